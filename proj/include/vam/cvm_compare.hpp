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

#include <cstdint>
#include <optional>

#include "vam/decimal.hpp"
#include "vam/errors.hpp"
#include "vam/valuation.hpp"

/// Comparison of a component value against a contingent-valuation (CVM)
/// estimate of annual willingness to pay, accumulated to a present value.
namespace vam::cvm {

using valuation::MoneyInterval;

struct DiscountParams {
    Decimal rate{0};      ///< per year, e.g. 0.0346
    int horizon_years = 1; ///< number of annual payments accumulated
};

inline void validate(const DiscountParams& p)
{
    if (p.rate < 0)
        throw DomainError("discount rate must be non-negative");
    if (p.horizon_years < 1)
        throw DomainError("accumulation horizon must be at least one year");
}

/// annual x sum_{t=0}^{T-1} (1+r)^-t, by explicit term summation.
/// Input and result are in the same (unrounded) units.
inline Decimal present_value(const Decimal& annual, const DiscountParams& params)
{
    validate(params);
    if (annual < 0)
        throw DomainError("annual value must be non-negative");
    const Decimal growth = Decimal(1) + params.rate;
    Decimal term = annual;
    Decimal total{0};
    for (int t = 0; t < params.horizon_years; ++t) {
        total += term;
        term /= growth;
    }
    return total;
}

/// Present value in minor units, unrounded.
inline Decimal present_value(Money annual, const DiscountParams& params)
{
    return present_value(annual.minor_decimal(), params);
}

inline Money aggregate_annual(Money median_wtp, std::uint64_t households)
{
    if (median_wtp < Money{})
        throw DomainError("median WTP must be non-negative");
    return Money::from_minor_decimal(median_wtp.minor_decimal() * Decimal(households));
}

/// Published CVM figures. Either `households` or `annual_aggregate` may be
/// given; the other is derived where possible.
struct CvmEstimate {
    Money median_wtp_per_household_year;
    std::optional<MoneyInterval> wtp_ci;
    std::optional<std::uint64_t> households;
    Money annual_aggregate;
    MoneyInterval annual_aggregate_ci;
    Money component_annual_value; ///< share of the aggregate attributed to the compared component

    /// Share of the aggregate carried by the compared component.
    Decimal component_share() const
    {
        if (annual_aggregate <= Money{})
            throw DomainError("CVM annual aggregate must be positive");
        return component_annual_value.minor_decimal() / annual_aggregate.minor_decimal();
    }

    /// Aggregate CI scaled proportionally to the component's share.
    MoneyInterval component_annual_ci() const
    {
        const Decimal share = component_share();
        return {Money::from_minor_decimal(annual_aggregate_ci.low.minor_decimal() * share),
                Money::from_minor_decimal(annual_aggregate_ci.high.minor_decimal() * share)};
    }
};

inline void validate(const CvmEstimate& e)
{
    if (e.annual_aggregate_ci.low > e.annual_aggregate || e.annual_aggregate > e.annual_aggregate_ci.high)
        throw ValidationError("CVM aggregate CI must bracket the aggregate");
    if (e.wtp_ci && (e.wtp_ci->low > e.median_wtp_per_household_year ||
                     e.median_wtp_per_household_year > e.wtp_ci->high))
        throw ValidationError("CVM WTP CI must bracket the median WTP");
    if (e.component_annual_value < Money{} || e.component_annual_value > e.annual_aggregate)
        throw ValidationError("CVM component value must lie between 0 and the annual aggregate");
}

struct ComparisonVerdict {
    Money vam_value;
    MoneyInterval vam_ci;
    Money cvm_present_value;
    MoneyInterval cvm_present_value_ci;
    double ratio = 0; ///< cvm_present_value / vam_value
    bool intervals_overlap = false;
};

/// Closed-interval overlap.
inline bool overlaps(const MoneyInterval& a, const MoneyInterval& b)
{
    return a.low <= b.high && b.low <= a.high;
}

inline ComparisonVerdict compare(const valuation::ComponentValuation& vam, Money cvm_annual,
                                 const MoneyInterval& cvm_annual_ci, const DiscountParams& params)
{
    if (vam.value <= Money{})
        throw DomainError("VAM value must be positive to form a ratio");
    ComparisonVerdict v;
    v.vam_value = vam.value;
    v.vam_ci = vam.value_ci;
    const Decimal pv = present_value(cvm_annual, params);
    v.cvm_present_value = Money::from_minor_decimal(pv);
    v.cvm_present_value_ci = {Money::from_minor_decimal(present_value(cvm_annual_ci.low, params)),
                              Money::from_minor_decimal(present_value(cvm_annual_ci.high, params))};
    v.ratio = static_cast<double>(pv / vam.value.minor_decimal());
    v.intervals_overlap = overlaps(v.vam_ci, v.cvm_present_value_ci);
    return v;
}

/// Compares against the component portion of a published CVM estimate.
inline ComparisonVerdict compare(const valuation::ComponentValuation& vam, const CvmEstimate& estimate,
                                 const DiscountParams& params)
{
    validate(estimate);
    return compare(vam, estimate.component_annual_value, estimate.component_annual_ci(), params);
}

} // namespace vam::cvm
