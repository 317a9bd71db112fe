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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vam/csv.hpp"
#include "vam/errors.hpp"
#include "vam/survey.hpp"

/// Delimited response-batch files. The header is
///
///   respondent_id, <demographic fields>, <component ids>, [other, other_label,]
///   adjustment_kind, adjustment_pct, submitted_at
///
/// optionally followed by the envelope columns the survey service writes
/// (server_id, idempotency_key, received_at, questionnaire_version).
namespace vam::batch {

inline const std::vector<std::string>& envelope_columns()
{
    static const std::vector<std::string> cols = {"server_id", "idempotency_key", "received_at",
                                                  "questionnaire_version"};
    return cols;
}

struct Envelope {
    std::string server_id;
    std::string idempotency_key;
    std::string received_at;
    int questionnaire_version = 0;
};

inline csv::Row header(const survey::QuestionnaireSpec& spec, bool with_envelope = false)
{
    csv::Row h{"respondent_id"};
    for (const auto& d : survey::demographic_fields())
        h.push_back(d);
    for (const auto& c : spec.components)
        h.push_back(c.id);
    if (spec.allows_other) {
        h.emplace_back(survey::kOtherComponent);
        h.emplace_back("other_label");
    }
    h.insert(h.end(), {"adjustment_kind", "adjustment_pct", "submitted_at"});
    if (with_envelope)
        h.insert(h.end(), envelope_columns().begin(), envelope_columns().end());
    return h;
}

/// Shortest text that parses back to the same double.
inline std::string format_number(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{})
        return "nan";
    return std::string(buf, ptr);
}

inline std::optional<double> parse_number(std::string_view s)
{
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    if (!s.empty() && s.back() == '%')
        s.remove_suffix(1);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline csv::Row to_row(const survey::SurveyResponse& r, const survey::QuestionnaireSpec& spec,
                       const Envelope* envelope = nullptr)
{
    csv::Row row{r.respondent_id};
    for (const auto& d : survey::demographic_fields()) {
        auto it = r.demographics.find(d);
        row.push_back(it == r.demographics.end() ? "" : it->second);
    }
    auto pct = [&](const std::string& id) {
        auto it = r.allotments.find(id);
        return it == r.allotments.end() ? std::string() : format_number(it->second);
    };
    for (const auto& c : spec.components)
        row.push_back(pct(c.id));
    if (spec.allows_other) {
        row.push_back(pct(std::string(survey::kOtherComponent)));
        row.push_back(r.other_label.value_or(""));
    }
    row.emplace_back(survey::to_string(r.adjustment.kind));
    row.push_back(r.adjustment.kind == survey::AdjustmentKind::AboutRight ? "" : format_number(r.adjustment.pct));
    row.push_back(r.submitted_at);
    if (envelope) {
        row.push_back(envelope->server_id);
        row.push_back(envelope->idempotency_key);
        row.push_back(envelope->received_at);
        row.push_back(std::to_string(envelope->questionnaire_version));
    }
    return row;
}

/// Responses that parsed, plus rows that were structurally unusable.
struct LoadedBatch {
    std::vector<survey::SurveyResponse> responses;
    std::vector<survey::Rejection> malformed;
    std::vector<std::optional<Envelope>> envelopes; ///< parallel to `responses`

    std::size_t total_rows() const { return responses.size() + malformed.size(); }
};

namespace detail {

struct ColumnMap {
    std::map<std::string, std::size_t> index;

    std::optional<std::size_t> find(const std::string& name) const
    {
        auto it = index.find(name);
        if (it == index.end())
            return std::nullopt;
        return it->second;
    }
};

} // namespace detail

/// Parses batch text against the questionnaire. Header problems throw
/// SchemaError; per-row problems become Malformed rejections.
inline LoadedBatch parse_batch(std::string_view text, const survey::QuestionnaireSpec& spec,
                               const std::string& source = "responses")
{
    auto rows = csv::parse(text);
    if (rows.empty())
        throw SchemaError(source + ":header", "empty response batch, header row required");

    detail::ColumnMap cols;
    for (std::size_t i = 0; i < rows.front().fields.size(); ++i) {
        if (!cols.index.emplace(rows.front().fields[i], i).second)
            throw SchemaError(source + ":header", "duplicate column '" + rows.front().fields[i] + "'");
    }
    auto require = [&](const std::string& name) {
        auto idx = cols.find(name);
        if (!idx)
            throw SchemaError(source + ":header", "missing column '" + name + "'");
        return *idx;
    };
    const auto id_col = require("respondent_id");
    std::vector<std::pair<std::string, std::size_t>> component_cols;
    for (const auto& c : spec.components)
        component_cols.emplace_back(c.id, require(c.id));
    const auto kind_col = require("adjustment_kind");
    const auto pct_col = require("adjustment_pct");
    const auto at_col = require("submitted_at");
    const auto other_col = spec.allows_other ? cols.find(std::string(survey::kOtherComponent)) : std::nullopt;
    const auto other_label_col = cols.find("other_label");
    const auto server_id_col = cols.find("server_id");
    const auto key_col = cols.find("idempotency_key");
    const auto received_col = cols.find("received_at");
    const auto version_col = cols.find("questionnaire_version");
    const std::size_t width = rows.front().fields.size();

    LoadedBatch out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        const std::string line_tag = "line " + std::to_string(rows[r].line);
        std::string rid = f.empty() ? "" : f[id_col < f.size() ? id_col : 0];
        if (f.size() != width) {
            out.malformed.push_back({rid.empty() ? line_tag : rid, survey::Reason::Malformed,
                                     line_tag + ": expected " + std::to_string(width) + " fields, got " +
                                         std::to_string(f.size())});
            continue;
        }
        survey::SurveyResponse resp;
        resp.respondent_id = f[id_col];
        if (resp.respondent_id.empty())
            resp.respondent_id = line_tag;
        for (const auto& d : survey::demographic_fields()) {
            if (auto c = cols.find(d); c && !f[*c].empty())
                resp.demographics[d] = f[*c];
        }
        std::string problem;
        auto read_pct = [&](const std::string& id, std::size_t col) {
            if (f[col].empty())
                return;
            if (auto v = parse_number(f[col]))
                resp.allotments[id] = *v;
            else if (problem.empty())
                problem = "allotment for '" + id + "' is not a number: '" + f[col] + "'";
        };
        for (const auto& [id, col] : component_cols)
            read_pct(id, col);
        if (other_col)
            read_pct(std::string(survey::kOtherComponent), *other_col);
        if (other_label_col && !f[*other_label_col].empty())
            resp.other_label = f[*other_label_col];

        auto kind = survey::parse_adjustment_kind(f[kind_col]);
        if (!kind) {
            if (problem.empty())
                problem = "unknown adjustment_kind '" + f[kind_col] + "'";
        } else {
            resp.adjustment.kind = *kind;
            if (*kind != survey::AdjustmentKind::AboutRight) {
                auto p = parse_number(f[pct_col]);
                if (!p) {
                    if (problem.empty())
                        problem = "adjustment_pct missing or not a number";
                } else {
                    resp.adjustment.pct = *p;
                }
            }
        }
        resp.submitted_at = f[at_col];
        if (!problem.empty()) {
            out.malformed.push_back({resp.respondent_id, survey::Reason::Malformed, line_tag + ": " + problem});
            continue;
        }
        std::optional<Envelope> env;
        if (server_id_col && !f[*server_id_col].empty()) {
            Envelope e;
            e.server_id = f[*server_id_col];
            if (key_col)
                e.idempotency_key = f[*key_col];
            if (received_col)
                e.received_at = f[*received_col];
            if (version_col) {
                if (auto v = parse_number(f[*version_col]))
                    e.questionnaire_version = static_cast<int>(*v);
            }
            env = e;
        }
        out.responses.push_back(std::move(resp));
        out.envelopes.push_back(std::move(env));
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LoadedBatch load_batch(const std::filesystem::path& path, const survey::QuestionnaireSpec& spec)
{
    return parse_batch(read_file(path), spec, path.filename().string());
}

inline std::string format_batch(const std::vector<survey::SurveyResponse>& responses,
                                const survey::QuestionnaireSpec& spec)
{
    std::string out = csv::format_row(header(spec));
    for (const auto& r : responses)
        out += csv::format_row(to_row(r, spec));
    return out;
}

/// Validates a loaded batch; malformed rows count as received and rejected.
inline survey::ValidationReport validate_loaded(const LoadedBatch& batch, const survey::QuestionnaireSpec& spec,
                                                double tolerance,
                                                std::vector<survey::SurveyResponse>* accepted = nullptr)
{
    auto report = survey::validate_batch(batch.responses, spec, tolerance, accepted);
    report.total_received += batch.malformed.size();
    report.rejected.insert(report.rejected.end(), batch.malformed.begin(), batch.malformed.end());
    return report;
}

/// survey::analyze over a loaded batch, folding malformed rows into the report.
inline survey::AnalysisResult analyze(const LoadedBatch& batch, const survey::QuestionnaireSpec& spec,
                                      const survey::AnalysisParams& params)
{
    survey::validate(spec);
    survey::AnalysisResult out;
    out.validation = validate_loaded(batch, spec, params.sum_tolerance, &out.valid_responses);
    if (out.valid_responses.empty())
        throw DomainError("no valid responses in batch of " + std::to_string(out.validation.total_received));
    out.allotments = survey::summarize_allotments(out.valid_responses, spec, params.bootstrap);
    out.adjustments = survey::summarize_adjustments(out.valid_responses);
    return out;
}

} // namespace vam::batch
