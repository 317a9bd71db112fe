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

#include <span>
#include <string>
#include <vector>

#include "vam/decimal.hpp"
#include "vam/errors.hpp"

/// Cost-approach appraisal of a reproducible asset: reproduction cost from
/// an itemized ledger, replacement cost after curable functional
/// obsolescence, total asset value after the remaining depreciation terms,
/// and a weighted remaining useful life.
namespace vam::cost {

enum class CostKind { Direct, Indirect };

inline const char* to_string(CostKind kind)
{
    return kind == CostKind::Direct ? "direct" : "indirect";
}

/// One ledger row. Direct items are one-time establishment costs (plants,
/// labour, equipment); indirect items are maintenance and overheads that may
/// recur over several periods.
struct CostLineItem {
    std::string label;
    CostKind kind = CostKind::Direct;
    Decimal quantity{0};
    Decimal unit_cost{0}; ///< major currency units per unit per period
    Decimal periods{1};

    /// quantity x unit_cost x periods, in major units, unrounded.
    Decimal amount() const { return quantity * unit_cost * periods; }
};

/// Throws ValidationError naming the item when a field is out of range.
inline void validate(const CostLineItem& item)
{
    auto fail = [&](const std::string& why) {
        throw ValidationError("cost item '" + item.label + "': " + why);
    };
    if (item.quantity < 0)
        fail("quantity must be non-negative");
    if (item.unit_cost < 0)
        fail("unit_cost must be non-negative");
    if (item.periods < 1)
        fail("periods must be at least 1");
    if (item.kind == CostKind::Direct && item.periods != 1)
        fail("direct (establishment) items are one-time, periods must be 1");
}

struct DepreciationEntry {
    Money amount;
    std::string note;
};

struct DepreciationSchedule {
    DepreciationEntry physical_deterioration;
    DepreciationEntry curable_functional_obsolescence;
    DepreciationEntry incurable_functional_obsolescence;
    DepreciationEntry economic_obsolescence;

    /// Physical + incurable + economic; the terms subtracted from replacement cost.
    Money post_replacement_total() const
    {
        return physical_deterioration.amount + incurable_functional_obsolescence.amount +
               economic_obsolescence.amount;
    }
};

inline void validate(const DepreciationSchedule& s)
{
    auto check = [](const DepreciationEntry& e, const char* name) {
        if (e.amount < Money{})
            throw ValidationError(std::string("depreciation '") + name + "' must be non-negative");
    };
    check(s.physical_deterioration, "physical_deterioration");
    check(s.curable_functional_obsolescence, "curable_functional_obsolescence");
    check(s.incurable_functional_obsolescence, "incurable_functional_obsolescence");
    check(s.economic_obsolescence, "economic_obsolescence");
}

/// A group of plants (or area) sharing one remaining-life estimate. Weight is
/// stem count for trees and shrubs, area for grass.
struct LifeCohort {
    std::string label;
    Decimal weight{1};
    Decimal remaining_life_years{1};
};

inline void validate(const LifeCohort& c)
{
    if (c.weight <= 0)
        throw ValidationError("life cohort '" + c.label + "': weight must be positive");
    if (c.remaining_life_years <= 0)
        throw ValidationError("life cohort '" + c.label + "': remaining_life_years must be positive");
}

struct AppraisalResult {
    Money reproduction_cost;
    Money replacement_cost;
    Money total_asset_value;
    Decimal remaining_useful_life_years{0};
    int valuation_year = 0;
    std::string currency_code;
};

/// Sum of direct and indirect line amounts, rounded once to the minor unit.
/// The decimal sum is exact, so the result does not depend on item order.
inline Money reproduction_cost(std::span<const CostLineItem> items)
{
    Decimal total{0};
    for (const auto& item : items) {
        validate(item);
        total += item.amount();
    }
    return Money::from_major(total);
}

/// Direct and indirect subtotals, each rounded to the minor unit.
struct CostBreakdown {
    Money direct;
    Money indirect;
};

inline CostBreakdown cost_breakdown(std::span<const CostLineItem> items)
{
    Decimal direct{0}, indirect{0};
    for (const auto& item : items) {
        validate(item);
        (item.kind == CostKind::Direct ? direct : indirect) += item.amount();
    }
    return {Money::from_major(direct), Money::from_major(indirect)};
}

inline Money replacement_cost(Money reproduction, Money curable_functional_obsolescence)
{
    if (curable_functional_obsolescence < Money{})
        throw ValidationError("curable functional obsolescence must be non-negative");
    if (curable_functional_obsolescence > reproduction)
        throw DomainError("curable functional obsolescence (" + curable_functional_obsolescence.to_string() +
                          ") exceeds reproduction cost (" + reproduction.to_string() +
                          "); replacement cost would be negative");
    return reproduction - curable_functional_obsolescence;
}

/// Replacement cost less physical deterioration, incurable functional
/// obsolescence and economic obsolescence. The curable term in `schedule` is
/// ignored here; it has already been taken out by replacement_cost().
inline Money total_asset_value(Money replacement, const DepreciationSchedule& schedule)
{
    validate(schedule);
    Money deductions = schedule.post_replacement_total();
    if (deductions > replacement)
        throw DomainError("total depreciation (" + deductions.to_string() + ") exceeds replacement cost (" +
                          replacement.to_string() + "); total asset value would be negative");
    return replacement - deductions;
}

/// Weight-averaged remaining life of the cohorts present today. Future
/// regeneration is not modelled.
inline Decimal weighted_rul(std::span<const LifeCohort> cohorts)
{
    if (cohorts.empty())
        throw ValidationError("remaining useful life needs at least one life cohort");
    Decimal weighted{0}, total_weight{0};
    for (const auto& c : cohorts) {
        validate(c);
        weighted += c.weight * c.remaining_life_years;
        total_weight += c.weight;
    }
    return weighted / total_weight;
}

/// One possible mapping from an observed loss rate (e.g. insect mortality) to
/// a depreciation amount: rate x affected cost base.
inline Money depreciation_from_rate(const Decimal& rate, Money affected_cost_base)
{
    if (rate < 0 || rate > 1)
        throw ValidationError("depreciation rate must lie in [0, 1]");
    return Money::from_minor_decimal(rate * affected_cost_base.minor_decimal());
}

struct AppraisalInput {
    int valuation_year = 0;
    std::string currency_code;
    std::vector<CostLineItem> items;
    DepreciationSchedule depreciation;
    std::vector<LifeCohort> cohorts;
};

inline AppraisalResult appraise(const AppraisalInput& in)
{
    AppraisalResult r;
    r.reproduction_cost = reproduction_cost(in.items);
    r.replacement_cost = replacement_cost(r.reproduction_cost, in.depreciation.curable_functional_obsolescence.amount);
    r.total_asset_value = total_asset_value(r.replacement_cost, in.depreciation);
    r.remaining_useful_life_years = weighted_rul(in.cohorts);
    r.valuation_year = in.valuation_year;
    r.currency_code = in.currency_code;
    return r;
}

} // namespace vam::cost
