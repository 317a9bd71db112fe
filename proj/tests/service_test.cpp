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

#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include <gtest/gtest.h>

#include "vam/project.hpp"
#include "vam/service.hpp"

using namespace vam;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / ("vam_service_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::path p = dir / name;
    fs::remove(p);
    return p;
}

service::ServiceConfig bmsa_config(const fs::path& out)
{
    auto p = project::load(std::string(VAM_FIXTURE_DIR) + "/bmsa/project.json");
    service::ServiceConfig c;
    c.spec = p.questionnaire;
    c.anchor_value = Money::from_major(1'587'786'926);
    c.responses_out = out;
    return c;
}

json submission(const std::string& id, double target = 10)
{
    return {{"respondent_id", id},
            {"questionnaire_version", 1},
            {"carbon_oxygen", 15},
            {"water_yield", 15},
            {"soil_retention", 10},
            {"biodiversity_maintenance", target},
            {"microclimate_regulation", 10},
            {"recreation", 10},
            {"aesthetic_enjoyment", 10},
            {"air_purification", 20 - (target - 10)},
            {"adjustment_kind", "about_right"}};
}

batch::LoadedBatch stored(const service::ServiceConfig& c)
{
    return batch::load_batch(c.responses_out, c.spec);
}

} // namespace

TEST(Service, UnconfiguredAnswers503)
{
    service::SurveyService svc;
    EXPECT_EQ(svc.get_questionnaire().status, 503);
    EXPECT_EQ(svc.preview("{}").status, 503);
    EXPECT_EQ(svc.submit("{}", "k").status, 503);
    EXPECT_EQ(svc.summary().status, 503);
}

TEST(Service, QuestionnaireListsComponentsAndOtherRow)
{
    service::SurveyService svc(bmsa_config(scratch("q.csv")));
    auto r = svc.get_questionnaire();
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["components"].size(), 8u);
    EXPECT_EQ(r.body["other_row"]["id"], "other");
    EXPECT_EQ(r.body["version"], 1);
    EXPECT_EQ(r.body["target_component"], "biodiversity_maintenance");

    auto c = bmsa_config(scratch("q1.csv"));
    c.spec.components.resize(1);
    c.spec.components[0] = {"biodiversity_maintenance", "Biodiversity", ""};
    c.spec.allows_other = false;
    service::SurveyService single(c);
    auto s = single.get_questionnaire();
    EXPECT_EQ(s.body["components"].size(), 1u);
    EXPECT_FALSE(s.body.contains("other_row"));
}

TEST(Service, PreviewValues)
{
    service::SurveyService svc(bmsa_config(scratch("p.csv")));
    auto r = svc.preview(R"({"component_id": "biodiversity_maintenance", "allotment_pct": 10})");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["value"], "158778692.60"); // 158,778,693 at whole-currency precision
    EXPECT_EQ(r.body["value_millions"], "158.8");
    EXPECT_EQ(svc.preview(R"({"allotment_pct": 0})").body["value"], "0");

    EXPECT_EQ(service::SurveyService::preview_component_value(Money::from_major(1000), 33), Money::from_major(330));
    EXPECT_EQ(svc.preview(R"({"allotment_pct": 101})").status, 400);
    EXPECT_EQ(svc.preview(R"({"allotment_pct": -1})").body["error"], "AllotmentOutOfRange");
    EXPECT_EQ(svc.preview(R"({"component_id": "zzz", "allotment_pct": 5})").body["error"], "UnknownComponent");
    EXPECT_EQ(svc.preview("nope").body["error"], "Malformed");
}

TEST(Service, SubmitValidationAndStorage)
{
    auto cfg = bmsa_config(scratch("s.csv"));
    service::SurveyService svc(cfg);
    svc.set_clock([] { return std::string("2026-01-01T00:00:00Z"); });

    auto ok = svc.submit(submission("A1").dump(), "key-1");
    ASSERT_EQ(ok.status, 201) << ok.body.dump();
    EXPECT_EQ(ok.body["server_id"], "S00000001");
    EXPECT_EQ(ok.body["received_at"], "2026-01-01T00:00:00Z");

    json short_sum = submission("A2");
    short_sum["air_purification"] = 0; // sums to 80
    auto bad = svc.submit(short_sum.dump(), "key-2");
    EXPECT_EQ(bad.status, 422);
    EXPECT_EQ(bad.body["reason"], "SumNot100");

    auto again = svc.submit(submission("A1").dump(), "key-1");
    EXPECT_EQ(again.status, 200);
    EXPECT_TRUE(again.replayed);
    EXPECT_EQ(again.body, ok.body);

    json stale = submission("A3");
    stale["questionnaire_version"] = 0;
    EXPECT_EQ(svc.submit(stale.dump(), "key-3").status, 409);
    EXPECT_EQ(svc.submit("{", "key-4").status, 400);
    json no_kind = submission("A4");
    no_kind.erase("adjustment_kind");
    EXPECT_EQ(svc.submit(no_kind.dump(), "key-5").body["error"], "Malformed");

    auto b = stored(cfg);
    ASSERT_EQ(b.responses.size(), 1u);
    EXPECT_TRUE(b.malformed.empty());
    EXPECT_EQ(b.responses[0].respondent_id, "A1");
    EXPECT_EQ(b.responses[0].allotments.at("biodiversity_maintenance"), 10);
    EXPECT_EQ(b.envelopes[0]->idempotency_key, "key-1");

    auto sum = svc.summary().body;
    EXPECT_EQ(sum["valid"], 1);
    EXPECT_EQ(sum["rejected"], 4);
    EXPECT_EQ(sum["total_received"], 5);
}

TEST(Service, StoredBatchFeedsTheAnalysis)
{
    auto cfg = bmsa_config(scratch("analysis.csv"));
    service::SurveyService svc(cfg);
    for (int i = 0; i < 5; ++i)
        ASSERT_EQ(svc.submit(submission("B" + std::to_string(i), 5 + i).dump(), "").status, 201);
    auto loaded = stored(cfg);
    auto result = batch::analyze(loaded, cfg.spec, {});
    EXPECT_EQ(result.validation.valid, 5u);
    EXPECT_EQ(result.allotments.find("biodiversity_maintenance")->median_pct, 7);
}

TEST(Service, StoreRecoversFromTornTail)
{
    auto cfg = bmsa_config(scratch("torn.csv"));
    {
        service::SurveyService svc(cfg);
        ASSERT_EQ(svc.submit(submission("T1").dump(), "t1").status, 201);
        ASSERT_EQ(svc.submit(submission("T2").dump(), "t2").status, 201);
    }
    {
        std::ofstream f(cfg.responses_out, std::ios::app | std::ios::binary);
        f << "T3,male,18-25,\"half a quo"; // crash mid-record
    }
    service::SurveyService svc(cfg);
    EXPECT_EQ(svc.summary().body["valid"], 2);
    auto replay = svc.submit(submission("T2").dump(), "t2");
    EXPECT_EQ(replay.status, 200);
    auto next = svc.submit(submission("T3").dump(), "t3");
    ASSERT_EQ(next.status, 201);
    EXPECT_EQ(next.body["server_id"], "S00000003");
    auto b = stored(cfg);
    EXPECT_EQ(b.responses.size(), 3u);
    EXPECT_TRUE(b.malformed.empty());
}

TEST(Service, StoreRejectsForeignHeader)
{
    auto cfg = bmsa_config(scratch("foreign.csv"));
    std::ofstream(cfg.responses_out) << "something,else\n";
    EXPECT_ANY_THROW(service::SurveyService{cfg});
}

TEST(Service, ConcurrentRetryStormOverHttp)
{
    auto cfg = bmsa_config(scratch("storm.csv"));
    service::SurveyService svc(cfg);
    const int port = svc.start("127.0.0.1", 0, 32);

    constexpr int kClients = 120, kAttempts = 3;
    std::vector<std::thread> threads;
    std::atomic<int> created{0}, replayed{0}, failed{0};
    for (int c = 0; c < kClients; ++c) {
        threads.emplace_back([&, c] {
            // Two clients share each key, as a retrying browser and a resend would.
            const std::string key = "storm-" + std::to_string(c / 2);
            const std::string body = submission("W" + std::to_string(c / 2)).dump();
            httplib::Client client("127.0.0.1", port);
            for (int a = 0; a < kAttempts; ++a) {
                httplib::Result res;
                for (int retry = 0; retry < 5 && !res; ++retry)
                    res = client.Post("/api/responses", {{"Idempotency-Key", key}}, body, "application/json");
                if (!res)
                    ++failed;
                else if (res->status == 201)
                    ++created;
                else if (res->status == 200 && res->get_header_value("Idempotent-Replayed") == "true")
                    ++replayed;
                else
                    ++failed;
            }
        });
    }
    for (auto& t : threads)
        t.join();
    svc.stop();

    EXPECT_EQ(failed.load(), 0);
    EXPECT_EQ(created.load(), kClients / 2);
    EXPECT_EQ(replayed.load(), kClients * kAttempts - kClients / 2);

    auto b = stored(cfg);
    EXPECT_TRUE(b.malformed.empty());
    std::map<std::string, int> per_key;
    for (const auto& e : b.envelopes)
        ++per_key[e->idempotency_key];
    EXPECT_EQ(per_key.size(), static_cast<std::size_t>(kClients / 2));
    for (const auto& [key, n] : per_key)
        EXPECT_EQ(n, 1) << key;
}

TEST(Service, HttpEndpoints)
{
    auto cfg = bmsa_config(scratch("http.csv"));
    service::SurveyService svc(cfg);
    const int port = svc.start();
    httplib::Client client("127.0.0.1", port);
    auto q = client.Get("/api/questionnaire");
    ASSERT_TRUE(q);
    EXPECT_EQ(q->status, 200);
    EXPECT_EQ(json::parse(q->body)["components"].size(), 8u);
    auto p = client.Post("/api/preview", R"({"allotment_pct": 10})", "application/json");
    ASSERT_TRUE(p);
    EXPECT_EQ(json::parse(p->body)["value_millions"], "158.8");
    json short_sum = submission("H1");
    short_sum["air_purification"] = 0;
    auto s = client.Post("/api/responses", short_sum.dump(), "application/json");
    ASSERT_TRUE(s);
    EXPECT_EQ(s->status, 422);
    EXPECT_EQ(json::parse(s->body)["reason"], "SumNot100");
    auto sum = client.Get("/api/summary");
    ASSERT_TRUE(sum);
    EXPECT_EQ(json::parse(sum->body)["rejected"], 1);
    svc.stop();
}
