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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "vam/service.hpp"
#include "vam/vam.hpp"

using namespace vam;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const fs::path kFixtures = VAM_FIXTURE_DIR;

struct Check {
    bool ok = true;
    std::ostringstream note;

    void expect(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            note << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void report(int n, const std::string& name, const Check& c)
{
    std::cout << (c.ok ? "PASS" : "FAIL") << "  " << n << "  " << name << ":" << c.note.str() << "\n";
    if (!c.ok)
        ++failures;
}

template <class F>
void run(int n, const std::string& name, F&& body)
{
    Check c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.note << " [exception: " << e.what() << "]";
    }
    report(n, name, c);
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= std::abs(want) * rel; }

double millions(Money m) { return static_cast<double>(m.minor()) / 100.0 / 1e6; }

std::string fixed(double x, int places)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(places);
    s << x;
    return s.str();
}

project::Project bmsa() { return project::load(kFixtures / "bmsa" / "project.json"); }

batch::LoadedBatch bmsa_batch(const project::Project& p)
{
    return batch::load_batch(*project::responses_path(p, kFixtures / "bmsa" / "project.json"), p.questionnaire);
}

void identities(Check& c)
{
    auto t0 = std::chrono::steady_clock::now();
    auto p = bmsa();
    auto a = pipeline::appraise(p);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.note << " reproduction " << format_grouped(a.reproduction_cost) << ", total asset value "
           << format_grouped(a.total_asset_value) << ", " << fixed(elapsed * 1000, 1) << " ms";
    c.expect(a.reproduction_cost == Money::from_major(1'602'096'836), "reproduction 1,602,096,836");
    c.expect(a.total_asset_value == Money::from_major(1'587'786'926), "total asset value 1,587,786,926");
    c.expect(elapsed < 1.0, "runtime < 1 s");
}

void component_value(Check& c)
{
    Money v = valuation::component_value(Money::from_major(1'587'786'926), 10, 1.0);
    c.note << " 1,587,786,926 x 10% x 1.0 = " << format_grouped(v) << " -> " << format_millions(v, 1) << " million";
    c.expect(format_millions(v, 1) == "158.8", "158.8 million");
}

void present_value(Check& c)
{
    auto p = bmsa();
    auto a = pipeline::appraise(p);
    auto loaded = bmsa_batch(p);
    auto result = pipeline::analyze(p, loaded);
    auto rows = pipeline::value(p, a, result.allotments, result.adjustments, &result.valid_responses);
    auto params = pipeline::discount_params(p, a);
    auto v = pipeline::compare(p, a, rows);

    double pv = millions(v.cvm_present_value), lo = millions(v.cvm_present_value_ci.low),
           hi = millions(v.cvm_present_value_ci.high);
    c.note << " T=" << params.horizon_years << " PV " << fixed(pv, 2) << "M (want 412.6 +/-0.5%), CI ("
           << fixed(lo, 2) << "M, " << fixed(hi, 2) << "M) (want 193, 639 +/-1%), ratio " << fixed(v.ratio, 3)
           << ", overlap " << (v.intervals_overlap ? "true" : "false");
    c.expect(params.horizon_years == 64, "T = 64");
    c.expect(within(pv, 412.6, 0.005), "PV 412.6M +/-0.5%");
    c.expect(within(lo, 193.0, 0.01), "CI low 193M +/-1% (got " + fixed(lo, 2) + "M, " +
                                          fixed((lo / 193.0 - 1) * 100, 2) + "%)");
    c.expect(within(hi, 639.0, 0.01), "CI high 639M +/-1%");
    c.expect(std::abs(v.ratio - 2.6) <= 0.1, "ratio 2.6 +/-0.1");
    c.expect(!v.intervals_overlap, "overlap false");
}

void survey_fixture(Check& c)
{
    auto p = bmsa();
    auto loaded = bmsa_batch(p);
    auto result = pipeline::analyze(p, loaded);
    const auto& adj = result.adjustments;
    const auto* bio = result.allotments.find("biodiversity_maintenance");
    c.note << " received " << result.validation.total_received << ", valid " << result.validation.valid
           << "; under " << adj.n_under << " @ " << fixed(adj.mean_under_pct, 1) << "%, over " << adj.n_over
           << " @ " << fixed(adj.mean_over_pct, 1) << "%, about right " << adj.n_about_right << "; aggregate "
           << fixed(adj.aggregate_coefficient, 2) << "; median biodiversity " << (bio ? bio->median_pct : -1) << "%";
    c.expect(result.validation.total_received == 120 && result.validation.valid == 117, "report (120, 117)");
    c.expect(adj.n_under == 21 && adj.n_over == 5 && adj.n_about_right == 91, "groups 21/5/91");
    c.expect(std::round(adj.mean_under_pct) == 205 && std::round(adj.mean_over_pct) == 39, "means 205%/39%");
    c.expect(adj.aggregate_coefficient == 1.0, "aggregate 1.0");
    c.expect(bio && bio->median_pct == 10, "median 10%");
}

void properties(Check& c)
{
    std::mt19937_64 rng(20260101);
    int cases = 0;

    // chain inequality over randomized ledgers
    for (int t = 0; t < 300; ++t, ++cases) {
        std::vector<cost::CostLineItem> items;
        for (int i = 0, n = 1 + static_cast<int>(rng() % 6); i < n; ++i) {
            bool direct = rng() % 2;
            items.push_back({"i", direct ? cost::CostKind::Direct : cost::CostKind::Indirect,
                             Decimal(static_cast<long long>(rng() % 100000)) / 100,
                             Decimal(static_cast<long long>(rng() % 1000000)) / 100,
                             direct ? Decimal(1) : Decimal(static_cast<long long>(1 + rng() % 4))});
        }
        Money repro = cost::reproduction_cost(items);
        Money curable = Money::from_minor(repro.minor() ? static_cast<std::int64_t>(rng() % (repro.minor() / 4 + 1)) : 0);
        Money repl = cost::replacement_cost(repro, curable);
        cost::DepreciationSchedule d;
        d.physical_deterioration.amount = Money::from_minor(repl.minor() / 5);
        d.incurable_functional_obsolescence.amount = Money::from_minor(repl.minor() / 7);
        d.economic_obsolescence.amount = Money::from_minor(repl.minor() / 11);
        Money tav = cost::total_asset_value(repl, d);
        if (!(Money{} <= tav && tav <= repl && repl <= repro)) {
            c.expect(false, "chain inequality");
            break;
        }
    }

    // partition: unadjusted component values sum to TAV within one minor unit per component
    for (int t = 0; t < 300; ++t, ++cases) {
        std::vector<double> cuts{0, 100};
        for (int i = 0, n = static_cast<int>(rng() % 8); i < n; ++i)
            cuts.push_back(static_cast<double>(rng() % 1001) / 10);
        std::sort(cuts.begin(), cuts.end());
        Money tav = Money::from_minor(static_cast<std::int64_t>(rng() % 1'000'000'000'000));
        std::int64_t sum = 0;
        for (std::size_t i = 1; i < cuts.size(); ++i)
            sum += valuation::component_value(tav, cuts[i] - cuts[i - 1], 1.0).minor();
        if (std::llabs(sum - tav.minor()) > static_cast<std::int64_t>(cuts.size() - 1)) {
            c.expect(false, "partition residue");
            break;
        }
    }

    // present value term sum against the closed form at 100 digits, T <= 10
    using Wide = boost::multiprecision::cpp_dec_float_100;
    Wide worst = 0;
    for (int t = 0; t < 200; ++t) {
        Decimal rate = Decimal(static_cast<long long>(rng() % 2001)) / 10000;
        Decimal annual = Decimal(static_cast<long long>(rng() % 1'000'000'000'000));
        Wide wr(rate.str(60, std::ios_base::scientific)), wa(annual.str(60, std::ios_base::scientific));
        for (int T = 1; T <= 10; ++T, ++cases) {
            Wide got(cvm::present_value(annual, {rate, T}).str(60, std::ios_base::scientific));
            Wide want = wa * T;
            if (wr != 0)
                want = wa * (1 - boost::multiprecision::pow(1 / (1 + wr), T)) / (1 - 1 / (1 + wr));
            if (want != 0)
                worst = std::max<Wide>(worst, boost::multiprecision::abs(got - want) / want);
        }
    }
    c.expect(worst < Wide("1e-45"), "term sum == closed form");

    // bootstrap determinism and degenerate collapse
    std::vector<double> sample;
    for (int i = 1; i <= 100; ++i)
        sample.push_back(i);
    stats::BootstrapParams bp{2000, 0.95, 99};
    auto a = stats::bootstrap_median_ci(sample, bp), b = stats::bootstrap_median_ci(sample, bp);
    c.expect(a.low == b.low && a.high == b.high, "bootstrap determinism");
    std::vector<double> flat(50, 7.5);
    auto d = stats::bootstrap_median_ci(flat, bp);
    c.expect(d.low == 7.5 && d.high == 7.5, "degenerate CI collapse");
    cases += 2;

    // order statistics invariant under permutation and duplication
    for (int t = 0; t < 300; ++t, ++cases) {
        std::vector<double> xs;
        for (int i = 0, n = 1 + static_cast<int>(rng() % 40); i < n; ++i)
            xs.push_back(static_cast<double>(rng() % 101));
        double m = stats::median(xs);
        auto perm = xs;
        std::shuffle(perm.begin(), perm.end(), rng);
        auto dup = xs;
        dup.insert(dup.end(), xs.begin(), xs.end());
        if (stats::median(perm) != m || stats::median(dup) != m) {
            c.expect(false, "median invariance");
            break;
        }
    }
    c.note << " " << cases << " randomized cases; worst closed-form relative error "
           << worst.str(3, std::ios_base::scientific);
}

json submission(const std::string& id, double air)
{
    return {{"respondent_id", id},         {"questionnaire_version", 1}, {"carbon_oxygen", 15},
            {"water_yield", 15},           {"soil_retention", 10},       {"biodiversity_maintenance", 10},
            {"microclimate_regulation", 10}, {"recreation", 10},         {"aesthetic_enjoyment", 10},
            {"air_purification", air},     {"adjustment_kind", "about_right"}};
}

void service_contract(Check& c)
{
    auto p = bmsa();
    fs::path out = fs::temp_directory_path() / ("vam_acceptance_" + std::to_string(::getpid()) + ".csv");
    fs::remove(out);
    service::ServiceConfig cfg;
    cfg.spec = p.questionnaire;
    cfg.anchor_value = Money::from_major(1'587'786'926);
    cfg.responses_out = out;
    service::SurveyService svc(cfg);
    const int port = svc.start("127.0.0.1", 0, 32);

    constexpr int kClients = 128, kKeys = 64, kAttempts = 3;
    std::atomic<int> transport_failures{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < kClients; ++i) {
        threads.emplace_back([&, i] {
            const std::string key = "acc-" + std::to_string(i % kKeys);
            const std::string body = submission("K" + std::to_string(i % kKeys), 20).dump();
            httplib::Client client("127.0.0.1", port);
            for (int a = 0; a < kAttempts; ++a) {
                httplib::Result res;
                for (int retry = 0; retry < 5 && !res; ++retry)
                    res = client.Post("/api/responses", {{"Idempotency-Key", key}}, body, "application/json");
                if (!res || (res->status != 201 && res->status != 200))
                    ++transport_failures;
            }
        });
    }
    for (auto& t : threads)
        t.join();

    httplib::Client client("127.0.0.1", port);
    auto bad = client.Post("/api/responses", {{"Idempotency-Key", "acc-bad"}}, submission("BAD", 0).dump(),
                           "application/json");
    svc.stop();

    auto stored = batch::load_batch(out, cfg.spec);
    std::map<std::string, int> per_key;
    for (const auto& e : stored.envelopes)
        ++per_key[e ? e->idempotency_key : ""];
    bool one_each = per_key.size() == kKeys &&
                    std::all_of(per_key.begin(), per_key.end(), [](const auto& kv) { return kv.second == 1; });
    std::string reason = bad ? json::parse(bad->body).value("reason", "") : "";
    c.note << " " << kClients << " clients x " << kAttempts << " attempts over " << kKeys << " keys -> "
           << stored.responses.size() << " rows, " << stored.malformed.size() << " unparseable; sum 80 -> "
           << (bad ? std::to_string(bad->status) : "no reply") << " " << reason;
    c.expect(transport_failures == 0, "every request answered 200/201");
    c.expect(one_each && stored.responses.size() == kKeys, "one row per key");
    c.expect(stored.malformed.empty(), "parseable batch");
    c.expect(bad && bad->status == 422 && reason == "SumNot100", "SumNot100 rejection");
    fs::remove(out);
}

} // namespace

int main()
{
    run(1, "cost identities", identities);
    run(2, "component value", component_value);
    run(3, "present value accumulation", present_value);
    run(4, "survey fixture", survey_fixture);
    run(5, "property suites", properties);
    run(6, "service contract", service_contract);
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << "\n";
    return failures ? 1 : 0;
}
