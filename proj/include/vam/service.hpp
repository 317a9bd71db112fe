// Copyright 2026 The VAM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <system_error>
#include <thread>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

// Bursts of respondents submitting at once overflow the library default of 5.
#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 256
#endif
#include <httplib.h>
#include <json.hpp>

#include "vam/csv.hpp"
#include "vam/decimal.hpp"
#include "vam/errors.hpp"
#include "vam/response_batch.hpp"
#include "vam/survey.hpp"
#include "vam/valuation.hpp"

/// HTTP questionnaire service:
///
///   GET  /api/questionnaire   questionnaire definition and displayed anchor value
///   POST /api/preview         allotment -> component value shown before stage two
///   POST /api/responses       submit; honours the Idempotency-Key header
///   GET  /api/summary         counts received / valid / rejected
namespace vam::service {

using json = nlohmann::ordered_json;

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp = std::chrono::system_clock::now())
{
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Receipt {
    std::string server_id;
    std::string respondent_id;
    std::string idempotency_key;
    std::string received_at;
    int questionnaire_version = 0;
};

inline json to_json(const Receipt& r)
{
    return {{"status", "accepted"},
            {"server_id", r.server_id},
            {"respondent_id", r.respondent_id},
            {"idempotency_key", r.idempotency_key},
            {"received_at", r.received_at},
            {"questionnaire_version", r.questionnaire_version}};
}

/// Append-only response batch with envelope columns. Every accepted row is
/// written with a single write(2) on an O_APPEND descriptor and fsynced, so
/// the file only ever ends between records; a torn tail left by a crash is
/// cut off when the store is reopened. Appends are serialized by one mutex.
class ResponseStore {
public:
    using Clock = std::function<std::string()>;

    ResponseStore(std::filesystem::path path, survey::QuestionnaireSpec spec, bool sync = true)
        : path_(std::move(path)), spec_(std::move(spec)), sync_(sync)
    {
        const std::string header = csv::format_row(batch::header(spec_, true));
        bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
        if (!fresh)
            recover(header);
        fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
        if (fd_ < 0)
            throw std::system_error(errno, std::generic_category(), "cannot open '" + path_.string() + "'");
        if (fresh)
            write_all(header);
    }

    ResponseStore(const ResponseStore&) = delete;
    ResponseStore& operator=(const ResponseStore&) = delete;

    ~ResponseStore()
    {
        if (fd_ >= 0)
            ::close(fd_);
    }

    struct AppendResult {
        Receipt receipt;
        bool replayed = false;
    };

    /// Stores `resp` once per idempotency key. A repeated key returns the
    /// receipt of the first append without writing.
    AppendResult append(const survey::SurveyResponse& resp, const std::string& idempotency_key, int version,
                        const std::string& received_at)
    {
        std::lock_guard lock(mutex_);
        if (!idempotency_key.empty()) {
            if (auto it = receipts_.find(idempotency_key); it != receipts_.end())
                return {it->second, true};
        }
        Receipt r;
        r.server_id = format_server_id(next_id_);
        r.respondent_id = resp.respondent_id;
        r.idempotency_key = idempotency_key.empty() ? "auto-" + r.server_id : idempotency_key;
        r.received_at = received_at;
        r.questionnaire_version = version;
        batch::Envelope env{r.server_id, r.idempotency_key, r.received_at, version};
        write_all(csv::format_row(batch::to_row(resp, spec_, &env)));
        ++next_id_;
        receipts_.emplace(r.idempotency_key, r);
        return {r, false};
    }

    std::optional<Receipt> find(const std::string& key) const
    {
        std::lock_guard lock(mutex_);
        auto it = receipts_.find(key);
        if (it == receipts_.end())
            return std::nullopt;
        return it->second;
    }

    std::size_t stored() const
    {
        std::lock_guard lock(mutex_);
        return receipts_.size();
    }

    const std::filesystem::path& path() const { return path_; }

private:
    static std::string format_server_id(std::uint64_t n)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "S%08llu", static_cast<unsigned long long>(n));
        return buf;
    }

    void recover(const std::string& header)
    {
        std::string text = batch::read_file(path_);
        auto last_newline = text.rfind('\n');
        std::size_t keep = (last_newline == std::string::npos) ? 0 : last_newline + 1;
        if (keep != text.size()) {
            std::filesystem::resize_file(path_, keep);
            text.resize(keep);
        }
        if (text.empty()) {
            std::filesystem::resize_file(path_, 0);
            return;
        }
        if (text.compare(0, header.size(), header) != 0)
            throw ValidationError("existing batch '" + path_.string() + "' has a different header");
        auto loaded = batch::parse_batch(text, spec_, path_.filename().string());
        for (std::size_t i = 0; i < loaded.responses.size(); ++i) {
            const auto& env = loaded.envelopes[i];
            if (!env)
                continue;
            Receipt r{env->server_id, loaded.responses[i].respondent_id, env->idempotency_key, env->received_at,
                      env->questionnaire_version};
            if (r.server_id.size() > 1)
                next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(r.server_id.substr(1)) + 1);
            receipts_.emplace(r.idempotency_key, r);
        }
    }

    void write_all(const std::string& line)
    {
        struct stat st{};
        if (::fstat(fd_, &st) != 0)
            throw std::system_error(errno, std::generic_category(), "stat of response batch failed");
        const off_t before = st.st_size;
        std::size_t done = 0;
        while (done < line.size()) {
            ssize_t n = ::write(fd_, line.data() + done, line.size() - done);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                int err = errno;
                if (::ftruncate(fd_, before) != 0) {
                    // the short record stays; recover() cuts it on reopen
                }
                throw std::system_error(err, std::generic_category(), "append to response batch failed");
            }
            done += static_cast<std::size_t>(n);
        }
        if (sync_ && ::fdatasync(fd_) != 0)
            throw std::system_error(errno, std::generic_category(), "fdatasync of response batch failed");
    }

    std::filesystem::path path_;
    survey::QuestionnaireSpec spec_;
    bool sync_;
    int fd_ = -1;
    mutable std::mutex mutex_;
    std::map<std::string, Receipt> receipts_;
    std::uint64_t next_id_ = 1;
};

struct ServiceConfig {
    survey::QuestionnaireSpec spec;
    Money anchor_value; ///< total value displayed to respondents and used for previews
    double sum_tolerance = survey::kDefaultSumTolerance;
    std::filesystem::path responses_out;
    bool sync_writes = true;
};

/// Status code plus JSON body; the transport-independent result of a handler.
struct Reply {
    int status = 200;
    json body;
    bool replayed = false;
};

namespace detail {

inline Reply error(int status, const std::string& code, const std::string& detail)
{
    return {status, {{"status", "error"}, {"error", code}, {"detail", detail}}};
}

inline std::optional<double> number_field(const json& j, std::string* problem, const std::string& name)
{
    if (j.is_null())
        return std::nullopt;
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        if (j.get<std::string>().empty())
            return std::nullopt;
        if (auto v = batch::parse_number(j.get<std::string>()))
            return v;
    }
    *problem = "field '" + name + "' is not a number";
    return std::nullopt;
}

} // namespace detail

/// Parses a submission body (flat object keyed like the batch columns) into
/// a response. Structural problems go to `problem`.
inline std::optional<survey::SurveyResponse> parse_submission(const json& body, const survey::QuestionnaireSpec& spec,
                                                             int* version, std::string* problem)
{
    if (!body.is_object()) {
        *problem = "body must be a JSON object";
        return std::nullopt;
    }
    survey::SurveyResponse r;
    auto rid = body.find("respondent_id");
    if (rid == body.end() || !rid->is_string() || rid->get<std::string>().empty()) {
        *problem = "respondent_id (non-empty string) is required";
        return std::nullopt;
    }
    r.respondent_id = rid->get<std::string>();
    auto ver = body.find("questionnaire_version");
    if (ver == body.end() || !ver->is_number_integer()) {
        *problem = "questionnaire_version (integer) is required";
        return std::nullopt;
    }
    *version = ver->get<int>();
    for (const auto& d : survey::demographic_fields()) {
        auto it = body.find(d);
        if (it == body.end() || it->is_null())
            continue;
        r.demographics[d] = it->is_string() ? it->get<std::string>() : it->dump();
    }
    for (const auto& id : spec.aggregation_ids()) {
        auto it = body.find(id);
        if (it == body.end())
            continue;
        if (auto v = detail::number_field(*it, problem, id))
            r.allotments[id] = *v;
        if (!problem->empty())
            return std::nullopt;
    }
    if (auto it = body.find("other_label"); it != body.end() && it->is_string() && !it->get<std::string>().empty())
        r.other_label = it->get<std::string>();
    auto kind_it = body.find("adjustment_kind");
    if (kind_it == body.end() || !kind_it->is_string()) {
        *problem = "adjustment_kind is required";
        return std::nullopt;
    }
    auto kind = survey::parse_adjustment_kind(kind_it->get<std::string>());
    if (!kind) {
        *problem = "unknown adjustment_kind '" + kind_it->get<std::string>() + "'";
        return std::nullopt;
    }
    r.adjustment.kind = *kind;
    if (*kind != survey::AdjustmentKind::AboutRight) {
        auto it = body.find("adjustment_pct");
        std::optional<double> pct;
        if (it != body.end())
            pct = detail::number_field(*it, problem, "adjustment_pct");
        if (!pct) {
            if (problem->empty())
                *problem = "adjustment_pct is required for " + kind_it->get<std::string>();
            return std::nullopt;
        }
        r.adjustment.pct = *pct;
    }
    if (auto it = body.find("submitted_at"); it != body.end() && it->is_string())
        r.submitted_at = it->get<std::string>();
    return r;
}

class SurveyService {
public:
    SurveyService() = default;

    explicit SurveyService(ServiceConfig config) { configure(std::move(config)); }

    SurveyService(const SurveyService&) = delete;
    SurveyService& operator=(const SurveyService&) = delete;

    ~SurveyService() { stop(); }

    /// Installs the questionnaire and opens the response store. Call before
    /// serving; until then every endpoint answers 503.
    void configure(ServiceConfig config)
    {
        survey::validate(config.spec);
        auto state = std::make_shared<State>();
        state->store = std::make_unique<ResponseStore>(config.responses_out, config.spec, config.sync_writes);
        state->questionnaire = questionnaire_json(config);
        state->config = std::move(config);
        std::atomic_store(&state_, std::shared_ptr<const State>(std::move(state)));
    }

    void set_clock(std::function<std::string()> clock) { clock_ = std::move(clock); }

    Reply get_questionnaire() const
    {
        auto s = std::atomic_load(&state_);
        if (!s)
            return detail::error(503, "Unconfigured", "service has no questionnaire configured");
        return {200, s->questionnaire};
    }

    Reply preview(const std::string& raw_body) const
    {
        auto s = std::atomic_load(&state_);
        if (!s)
            return detail::error(503, "Unconfigured", "service has no questionnaire configured");
        json body = json::parse(raw_body, nullptr, false);
        if (body.is_discarded() || !body.is_object())
            return detail::error(400, "Malformed", "body must be a JSON object");
        std::string problem;
        auto pct_it = body.find("allotment_pct");
        if (pct_it == body.end())
            return detail::error(400, "Malformed", "allotment_pct is required");
        auto pct = detail::number_field(*pct_it, &problem, "allotment_pct");
        if (!pct)
            return detail::error(400, "Malformed", problem.empty() ? "allotment_pct is required" : problem);
        std::string component = s->config.spec.target_component;
        if (auto c = body.find("component_id"); c != body.end() && c->is_string())
            component = c->get<std::string>();
        if (!s->config.spec.has_component(component) &&
            !(s->config.spec.allows_other && component == survey::kOtherComponent))
            return detail::error(400, "UnknownComponent", "unknown component '" + component + "'");
        if (!(*pct >= 0 && *pct <= 100))
            return detail::error(400, "AllotmentOutOfRange", "allotment_pct must lie in [0, 100]");
        Money v = preview_component_value(s->config.anchor_value, *pct);
        return {200,
                {{"component_id", component},
                 {"allotment_pct", *pct},
                 {"value", v.to_string()},
                 {"value_millions", format_millions(v, 1)}}};
    }

    /// `idempotency_key` may be empty, in which case retries are not deduplicated.
    Reply submit(const std::string& raw_body, const std::string& idempotency_key)
    {
        auto s = std::atomic_load(&state_);
        if (!s)
            return detail::error(503, "Unconfigured", "service has no questionnaire configured");
        if (!idempotency_key.empty()) {
            if (auto prior = s->store->find(idempotency_key))
                return {200, to_json(*prior), true};
        }
        json body = json::parse(raw_body, nullptr, false);
        if (body.is_discarded()) {
            count(false);
            return detail::error(400, "Malformed", "body is not valid JSON");
        }
        int version = 0;
        std::string problem;
        auto resp = parse_submission(body, s->config.spec, &version, &problem);
        if (!resp) {
            count(false);
            return detail::error(400, "Malformed", problem);
        }
        if (version != s->config.spec.version) {
            count(false);
            return {409,
                    {{"status", "rejected"},
                     {"reason", "VersionMismatch"},
                     {"detail", "questionnaire version " + std::to_string(version) + " is out of date"},
                     {"current_version", s->config.spec.version}}};
        }
        auto verdict = survey::validate_response(*resp, s->config.spec, s->config.sum_tolerance);
        if (!verdict.accepted()) {
            count(false);
            return {422,
                    {{"status", "rejected"},
                     {"reason", std::string(survey::to_string(verdict.reason))},
                     {"detail", verdict.detail}}};
        }
        if (resp->submitted_at.empty())
            resp->submitted_at = now();
        try {
            auto result = s->store->append(*resp, idempotency_key, version, now());
            if (!result.replayed)
                count(true);
            return {result.replayed ? 200 : 201, to_json(result.receipt), result.replayed};
        } catch (const std::exception& e) {
            return detail::error(500, "StorageFailure", e.what());
        }
    }

    Reply summary() const
    {
        auto s = std::atomic_load(&state_);
        if (!s)
            return detail::error(503, "Unconfigured", "service has no questionnaire configured");
        const std::size_t stored = s->store->stored(), rejected = rejected_.load();
        return {200,
                {{"total_received", stored + rejected},
                 {"valid", stored},
                 {"rejected", rejected},
                 {"accepted_this_session", valid_.load()}}};
    }

    /// Registers the endpoints on `server`.
    void mount(httplib::Server& server)
    {
        auto send = [](httplib::Response& res, const Reply& r) {
            res.status = r.status;
            if (r.replayed)
                res.set_header("Idempotent-Replayed", "true");
            res.set_content(r.body.dump(), "application/json");
        };
        server.Get("/api/questionnaire",
                   [this, send](const httplib::Request&, httplib::Response& res) { send(res, get_questionnaire()); });
        server.Post("/api/preview", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, preview(req.body));
        });
        server.Post("/api/responses", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, submit(req.body, req.get_header_value("Idempotency-Key")));
        });
        server.Get("/api/summary",
                   [this, send](const httplib::Request&, httplib::Response& res) { send(res, summary()); });
    }

    /// Binds to `host` on `port` (0 picks a free port) and serves on a
    /// background thread. Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0, std::size_t threads = 16)
    {
        server_ = std::make_unique<httplib::Server>();
        server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
        mount(*server_);
        int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
        if (bound < 0)
            throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
        thread_ = std::thread([this] { server_->listen_after_bind(); });
        server_->wait_until_ready();
        return bound;
    }

    /// Blocks serving until stop() is called from another thread or a signal.
    bool listen(const std::string& host, int port)
    {
        server_ = std::make_unique<httplib::Server>();
        mount(*server_);
        return server_->listen(host, port);
    }

    void stop()
    {
        if (server_)
            server_->stop();
        if (thread_.joinable())
            thread_.join();
    }

    static Money preview_component_value(Money anchor, double pct)
    {
        return valuation::component_value(anchor, pct, 1.0);
    }

private:
    struct State {
        ServiceConfig config;
        std::unique_ptr<ResponseStore> store;
        json questionnaire;
    };

    static json questionnaire_json(const ServiceConfig& c)
    {
        json comps = json::array();
        for (const auto& comp : c.spec.components)
            comps.push_back({{"id", comp.id}, {"name", comp.name}, {"explanation", comp.explanation}});
        json j;
        j["version"] = c.spec.version;
        j["components"] = comps;
        j["allows_other"] = c.spec.allows_other;
        if (c.spec.allows_other)
            j["other_row"] = {{"id", std::string(survey::kOtherComponent)}, {"name", "Others"}};
        j["info"] = {{"text", c.spec.info.text}, {"images", c.spec.info.images}};
        j["target_component"] = c.spec.target_component;
        j["total_asset_value_display"] = c.anchor_value.to_string();
        j["sum_tolerance"] = c.sum_tolerance;
        j["order_note"] = "The order of the components is random and does not imply any ranking of importance.";
        return j;
    }

    std::string now() const { return clock_ ? clock_() : utc_timestamp(); }

    void count(bool accepted) { (accepted ? valid_ : rejected_).fetch_add(1); }

    std::shared_ptr<const State> state_;
    std::function<std::string()> clock_;
    std::atomic<std::size_t> valid_{0};
    std::atomic<std::size_t> rejected_{0};
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

} // namespace vam::service
