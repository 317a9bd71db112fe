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

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vam/cost_model.hpp"
#include "vam/cvm_compare.hpp"
#include "vam/decimal.hpp"
#include "vam/survey.hpp"
#include "vam/valuation.hpp"

/// Report rendering. The structured form (JSON) carries full stored
/// precision; the table form rounds for display.
namespace vam::report {

using json = nlohmann::ordered_json;

enum class Format { Structured, Table };

inline json interval_json(Money low, Money high) { return json::array({low.to_string(), high.to_string()}); }

inline json to_json(const cost::AppraisalResult& a, const cost::CostBreakdown* breakdown = nullptr)
{
    json j;
    j["valuation_year"] = a.valuation_year;
    j["currency_code"] = a.currency_code;
    if (breakdown) {
        j["direct_cost"] = breakdown->direct.to_string();
        j["indirect_cost"] = breakdown->indirect.to_string();
    }
    j["reproduction_cost"] = a.reproduction_cost.to_string();
    j["replacement_cost"] = a.replacement_cost.to_string();
    j["total_asset_value"] = a.total_asset_value.to_string();
    j["remaining_useful_life_years"] = format_decimal(a.remaining_useful_life_years, 6);
    return j;
}

inline json to_json(const survey::ValidationReport& r)
{
    json rejected = json::array();
    for (const auto& x : r.rejected)
        rejected.push_back({{"respondent_id", x.respondent_id},
                            {"reason", std::string(survey::to_string(x.reason))},
                            {"detail", x.detail}});
    return {{"total_received", r.total_received}, {"valid", r.valid}, {"rejected", rejected}};
}

inline json to_json(const survey::AllotmentSummary& s)
{
    json comps = json::array();
    for (const auto& c : s.components)
        comps.push_back({{"component_id", c.component_id},
                         {"median_pct", c.median_pct},
                         {"ci_low", c.ci.low},
                         {"ci_high", c.ci.high},
                         {"n", c.n}});
    return {{"components", comps},
            {"bootstrap", {{"resamples", s.bootstrap.resamples},
                           {"confidence_level", s.bootstrap.confidence_level},
                           {"seed", s.bootstrap.seed}}}};
}

inline json to_json(const survey::AdjustmentSummary& s)
{
    return {{"n_about_right", s.n_about_right}, {"n_under", s.n_under},
            {"n_over", s.n_over},               {"mean_under_pct", s.mean_under_pct},
            {"mean_over_pct", s.mean_over_pct}, {"aggregate_coefficient", s.aggregate_coefficient}};
}

/// Reads back the allotment and adjustment parts of an analysis summary.
inline survey::AllotmentSummary allotments_from_json(const json& j)
{
    survey::AllotmentSummary s;
    const auto& b = j.at("bootstrap");
    s.bootstrap.resamples = b.at("resamples").get<std::size_t>();
    s.bootstrap.confidence_level = b.at("confidence_level").get<double>();
    s.bootstrap.seed = b.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("components")) {
        survey::ComponentAllotment a;
        a.component_id = c.at("component_id").get<std::string>();
        a.median_pct = c.at("median_pct").get<double>();
        a.ci = {c.at("ci_low").get<double>(), c.at("ci_high").get<double>()};
        a.n = c.at("n").get<std::size_t>();
        s.components.push_back(a);
    }
    return s;
}

inline survey::AdjustmentSummary adjustments_from_json(const json& j)
{
    survey::AdjustmentSummary s;
    s.n_about_right = j.at("n_about_right").get<std::size_t>();
    s.n_under = j.at("n_under").get<std::size_t>();
    s.n_over = j.at("n_over").get<std::size_t>();
    s.mean_under_pct = j.at("mean_under_pct").get<double>();
    s.mean_over_pct = j.at("mean_over_pct").get<double>();
    s.aggregate_coefficient = j.at("aggregate_coefficient").get<double>();
    return s;
}

inline json to_json(const std::vector<valuation::ComponentValuation>& rows)
{
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"component_id", r.component_id},
                       {"allotment_pct", r.allotment_pct},
                       {"adjustment_coefficient", r.adjustment_coefficient},
                       {"value", r.value.to_string()},
                       {"value_ci", interval_json(r.value_ci.low, r.value_ci.high)},
                       {"valid_through_year", r.valid_through_year}});
    return out;
}

inline json to_json(const cvm::ComparisonVerdict& v, const cvm::DiscountParams& params)
{
    return {{"vam_value", v.vam_value.to_string()},
            {"vam_ci", interval_json(v.vam_ci.low, v.vam_ci.high)},
            {"cvm_present_value", v.cvm_present_value.to_string()},
            {"cvm_present_value_ci", interval_json(v.cvm_present_value_ci.low, v.cvm_present_value_ci.high)},
            {"ratio", v.ratio},
            {"intervals_overlap", v.intervals_overlap},
            {"discount_rate", to_plain_string(params.rate)},
            {"horizon_years", params.horizon_years}};
}

namespace detail {

inline std::string fixed(double x, int places)
{
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(places) << x;
    return ss.str();
}

inline std::string pad(const std::string& s, std::size_t width, bool right = false)
{
    if (s.size() >= width)
        return s;
    std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

} // namespace detail

inline std::string table(const cost::AppraisalResult& a, const cost::CostBreakdown* breakdown = nullptr)
{
    using detail::pad;
    std::ostringstream os;
    os << "Appraisal (" << a.currency_code << ", " << a.valuation_year << " prices)\n";
    auto line = [&](const std::string& label, Money m) {
        os << "  " << pad(label, 28) << pad(format_grouped(m), 18, true) << "\n";
    };
    if (breakdown) {
        line("Direct cost", breakdown->direct);
        line("Indirect cost", breakdown->indirect);
    }
    line("Reproduction cost", a.reproduction_cost);
    line("Replacement cost", a.replacement_cost);
    line("Total asset value", a.total_asset_value);
    os << "  " << pad("Remaining useful life", 28) << pad(format_decimal(a.remaining_useful_life_years, 1) + " years", 18, true)
       << "\n";
    return os.str();
}

inline std::string table(const survey::ValidationReport& r)
{
    std::ostringstream os;
    os << "Responses: " << r.total_received << " received, " << r.valid << " valid, " << r.rejected.size()
       << " rejected\n";
    for (const auto& x : r.rejected)
        os << "  rejected " << x.respondent_id << ": " << survey::to_string(x.reason) << " (" << x.detail << ")\n";
    return os.str();
}

inline std::string table(const survey::AllotmentSummary& s)
{
    using detail::fixed;
    using detail::pad;
    std::ostringstream os;
    os << "Median allotments (" << fixed(s.bootstrap.confidence_level * 100, 0) << "% percentile bootstrap, "
       << s.bootstrap.resamples << " resamples, seed " << s.bootstrap.seed << ")\n";
    os << "  " << pad("component", 28) << pad("median %", 10, true) << pad("CI low", 10, true)
       << pad("CI high", 10, true) << pad("n", 6, true) << "\n";
    for (const auto& c : s.components)
        os << "  " << pad(c.component_id, 28) << pad(fixed(c.median_pct, 2), 10, true)
           << pad(fixed(c.ci.low, 2), 10, true) << pad(fixed(c.ci.high, 2), 10, true)
           << pad(std::to_string(c.n), 6, true) << "\n";
    return os.str();
}

inline std::string table(const survey::AdjustmentSummary& s)
{
    using detail::fixed;
    std::ostringstream os;
    const auto total = s.n_about_right + s.n_under + s.n_over;
    auto share = [&](std::size_t n) { return total ? fixed(100.0 * double(n) / double(total), 1) : "0.0"; };
    os << "Contingent adjustments\n";
    os << "  underestimated: " << s.n_under << " (" << share(s.n_under) << "%), mean +" << fixed(s.mean_under_pct, 1)
       << "%\n";
    os << "  overestimated:  " << s.n_over << " (" << share(s.n_over) << "%), mean -" << fixed(s.mean_over_pct, 1)
       << "%\n";
    os << "  about right:    " << s.n_about_right << " (" << share(s.n_about_right) << "%)\n";
    os << "  aggregate coefficient (median): " << fixed(s.aggregate_coefficient, 4) << "\n";
    return os.str();
}

inline std::string table(const std::vector<valuation::ComponentValuation>& rows)
{
    using detail::fixed;
    using detail::pad;
    std::ostringstream os;
    os << "Component values (million)\n";
    os << "  " << pad("component", 28) << pad("allot %", 9, true) << pad("adj", 8, true) << pad("value", 10, true)
       << pad("CI", 20, true) << pad("valid to", 10, true) << "\n";
    for (const auto& r : rows)
        os << "  " << pad(r.component_id, 28) << pad(fixed(r.allotment_pct, 2), 9, true)
           << pad(fixed(r.adjustment_coefficient, 3), 8, true) << pad(format_millions(r.value), 10, true)
           << pad(format_millions(r.value_ci.low) + " - " + format_millions(r.value_ci.high), 20, true)
           << pad(std::to_string(r.valid_through_year), 10, true) << "\n";
    return os.str();
}

inline std::string table(const cvm::ComparisonVerdict& v, const cvm::DiscountParams& params)
{
    using detail::fixed;
    std::ostringstream os;
    os << "VAM vs CVM (r = " << to_plain_string(params.rate) << ", T = " << params.horizon_years << " years)\n";
    os << "  VAM value:          " << format_millions(v.vam_value) << " million (" << format_millions(v.vam_ci.low)
       << " - " << format_millions(v.vam_ci.high) << ")\n";
    os << "  CVM present value:  " << format_millions(v.cvm_present_value) << " million ("
       << format_millions(v.cvm_present_value_ci.low) << " - " << format_millions(v.cvm_present_value_ci.high)
       << ")\n";
    os << "  ratio CVM/VAM:      " << fixed(v.ratio, 2) << "\n";
    os << "  intervals overlap:  " << (v.intervals_overlap ? "yes" : "no") << "\n";
    return os.str();
}

} // namespace vam::report
