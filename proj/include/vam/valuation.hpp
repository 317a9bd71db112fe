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

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vam/cost_model.hpp"
#include "vam/decimal.hpp"
#include "vam/errors.hpp"
#include "vam/statistics.hpp"
#include "vam/survey.hpp"

namespace vam::valuation {

struct MoneyInterval {
    Money low;
    Money high;
};

struct ComponentValuation {
    std::string component_id;
    double allotment_pct = 0;
    double adjustment_coefficient = 1.0;
    Money value;
    MoneyInterval value_ci;
    int valid_through_year = 0;
};

/// total_asset_value x allotment/100 x adjustment, rounded half up to the
/// minor unit. Percent and coefficient enter at nine decimal places.
inline Money component_value(Money total_asset_value, double allotment_pct, double adjustment)
{
    if (!(allotment_pct >= 0 && allotment_pct <= 100))
        throw DomainError("allotment must lie in [0, 100]");
    if (!(adjustment > 0))
        throw DomainError("adjustment coefficient must be positive");
    Decimal v = total_asset_value.minor_decimal() * decimal_from_double(allotment_pct) / 100 *
                decimal_from_double(adjustment);
    return Money::from_minor_decimal(v);
}

/// Last year of validity: valuation year plus the rounded remaining life.
inline int valid_through_year(int valuation_year, const Decimal& remaining_useful_life_years)
{
    return valuation_year + round_half_up(remaining_useful_life_years).convert_to<int>();
}

/// One row per summarized component. The aggregate adjustment applies only
/// to `target_component`; every other component carries 1.0. CI endpoints
/// are the component values at the allotment CI endpoints.
/// `expected_components`, when non-empty, must match the summary's set.
inline std::vector<ComponentValuation> valuation_report(const cost::AppraisalResult& appraisal,
                                                        const survey::AllotmentSummary& allotments,
                                                        const survey::AdjustmentSummary& adjustments,
                                                        std::string_view target_component,
                                                        std::span<const std::string> expected_components = {})
{
    if (!expected_components.empty()) {
        std::set<std::string> expected(expected_components.begin(), expected_components.end());
        std::set<std::string> got;
        for (const auto& c : allotments.components)
            got.insert(c.component_id);
        if (expected != got)
            throw ValidationError("component sets differ between questionnaire and allotment summary");
    }
    if (allotments.find(target_component) == nullptr)
        throw ValidationError("target component '" + std::string(target_component) +
                              "' missing from allotment summary");
    if (!(adjustments.aggregate_coefficient > 0))
        throw DomainError("aggregate adjustment coefficient must be positive");

    const int through = valid_through_year(appraisal.valuation_year, appraisal.remaining_useful_life_years);
    std::vector<ComponentValuation> rows;
    rows.reserve(allotments.components.size());
    for (const auto& c : allotments.components) {
        ComponentValuation row;
        row.component_id = c.component_id;
        row.allotment_pct = c.median_pct;
        row.adjustment_coefficient = (c.component_id == target_component) ? adjustments.aggregate_coefficient : 1.0;
        row.value = component_value(appraisal.total_asset_value, c.median_pct, row.adjustment_coefficient);
        row.value_ci = {component_value(appraisal.total_asset_value, c.ci.low, row.adjustment_coefficient),
                        component_value(appraisal.total_asset_value, c.ci.high, row.adjustment_coefficient)};
        row.valid_through_year = through;
        rows.push_back(row);
    }
    return rows;
}

inline const ComponentValuation* find(std::span<const ComponentValuation> rows, std::string_view id)
{
    for (const auto& r : rows)
        if (r.component_id == id)
            return &r;
    return nullptr;
}

/// Alternative interval: bootstrap the median of per-respondent component
/// values (TAV x own allotment x own coefficient when `component` is the
/// target) rather than of the allotments.
inline MoneyInterval resampled_value_ci(Money total_asset_value, std::span<const survey::SurveyResponse> responses,
                                        std::string_view component, std::string_view target_component,
                                        const stats::BootstrapParams& params)
{
    std::vector<double> values;
    values.reserve(responses.size());
    auto pcts = survey::allotment_values(responses, component);
    for (std::size_t i = 0; i < responses.size(); ++i) {
        double coef = (component == target_component) ? survey::adjustment_coefficient(responses[i]) : 1.0;
        values.push_back(static_cast<double>(component_value(total_asset_value, pcts[i], coef).minor()));
    }
    auto ci = stats::bootstrap_median_ci(values, params);
    return {Money::from_minor_decimal(Decimal(ci.low)), Money::from_minor_decimal(Decimal(ci.high))};
}

} // namespace vam::valuation
