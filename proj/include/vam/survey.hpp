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

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vam/decimal.hpp"
#include "vam/errors.hpp"
#include "vam/statistics.hpp"

/// Questionnaire definition, response validation and aggregation for the
/// two-stage allotment survey: respondents split the total asset value across
/// components in percent, then say whether the resulting value of the target
/// component is about right, underestimated or overestimated.
namespace vam::survey {

/// Component id of the write-in "Others" bucket.
inline constexpr std::string_view kOtherComponent = "other";

/// Demographic columns, in batch-file order.
inline const std::vector<std::string>& demographic_fields()
{
    static const std::vector<std::string> fields = {
        "gender",          "age_bracket",       "education",       "income",
        "visited_guangzhou", "lived_guangzhou", "nature_visit_frequency", "site_visit_frequency",
    };
    return fields;
}

struct Component {
    std::string id;
    std::string name;
    std::string explanation;
};

struct InfoPayload {
    std::string text;
    std::vector<std::string> images;
};

struct QuestionnaireSpec {
    int version = 1;
    std::vector<Component> components;
    bool allows_other = true;
    InfoPayload info;
    std::string target_component;
    std::optional<Money> total_asset_value_display;

    bool has_component(std::string_view id) const
    {
        return std::any_of(components.begin(), components.end(), [&](const Component& c) { return c.id == id; });
    }

    /// Component ids used for aggregation: the listed ones, then "other" if allowed.
    std::vector<std::string> aggregation_ids() const
    {
        std::vector<std::string> ids;
        for (const auto& c : components)
            ids.push_back(c.id);
        if (allows_other)
            ids.emplace_back(kOtherComponent);
        return ids;
    }
};

inline void validate(const QuestionnaireSpec& spec)
{
    if (spec.components.empty())
        throw ValidationError("questionnaire has no components");
    std::set<std::string> seen;
    for (const auto& c : spec.components) {
        if (c.id.empty())
            throw ValidationError("questionnaire component with empty id");
        if (c.id == kOtherComponent)
            throw ValidationError("component id 'other' is reserved for write-ins");
        if (!seen.insert(c.id).second)
            throw ValidationError("duplicate component id '" + c.id + "'");
    }
    if (!spec.has_component(spec.target_component))
        throw ValidationError("target component '" + spec.target_component + "' is not a questionnaire component");
}

enum class AdjustmentKind { AboutRight, Underestimated, Overestimated };

inline std::string_view to_string(AdjustmentKind k)
{
    switch (k) {
    case AdjustmentKind::AboutRight:
        return "about_right";
    case AdjustmentKind::Underestimated:
        return "underestimated";
    case AdjustmentKind::Overestimated:
        return "overestimated";
    }
    return "?";
}

inline std::optional<AdjustmentKind> parse_adjustment_kind(std::string_view s)
{
    if (s == "about_right")
        return AdjustmentKind::AboutRight;
    if (s == "underestimated")
        return AdjustmentKind::Underestimated;
    if (s == "overestimated")
        return AdjustmentKind::Overestimated;
    return std::nullopt;
}

/// Stage-two answer. `pct` is ignored for AboutRight.
struct Adjustment {
    AdjustmentKind kind = AdjustmentKind::AboutRight;
    double pct = 0;

    static Adjustment about_right() { return {}; }
    static Adjustment underestimated(double p) { return {AdjustmentKind::Underestimated, p}; }
    static Adjustment overestimated(double p) { return {AdjustmentKind::Overestimated, p}; }
};

struct SurveyResponse {
    std::string respondent_id;
    std::map<std::string, std::string> demographics;
    std::map<std::string, double> allotments; ///< component id -> percent; absent means unanswered
    std::optional<std::string> other_label;
    Adjustment adjustment;
    std::string submitted_at;
};

enum class Reason { Accepted, Malformed, MissingAllotment, UnknownComponent, AllotmentOutOfRange, SumNot100, InvalidAdjustment };

inline std::string_view to_string(Reason r)
{
    switch (r) {
    case Reason::Accepted:
        return "Accepted";
    case Reason::Malformed:
        return "Malformed";
    case Reason::MissingAllotment:
        return "MissingAllotment";
    case Reason::UnknownComponent:
        return "UnknownComponent";
    case Reason::AllotmentOutOfRange:
        return "AllotmentOutOfRange";
    case Reason::SumNot100:
        return "SumNot100";
    case Reason::InvalidAdjustment:
        return "InvalidAdjustment";
    }
    return "?";
}

struct ValidationVerdict {
    Reason reason = Reason::Accepted;
    std::string detail;

    bool accepted() const { return reason == Reason::Accepted; }
};

/// Percentage points by which the allotments may miss 100.
inline constexpr double kDefaultSumTolerance = 0.5;

/// Checks the analytical payload of a response (allotments and adjustment).
/// Demographics are not inspected.
inline ValidationVerdict validate_response(const SurveyResponse& resp, const QuestionnaireSpec& spec,
                                           double tolerance = kDefaultSumTolerance)
{
    for (const auto& c : spec.components) {
        if (!resp.allotments.contains(c.id))
            return {Reason::MissingAllotment, "no allotment for '" + c.id + "'"};
    }
    double sum = 0;
    for (const auto& [id, pct] : resp.allotments) {
        if (!spec.has_component(id) && !(spec.allows_other && id == kOtherComponent))
            return {Reason::UnknownComponent, "unknown component '" + id + "'"};
        if (!std::isfinite(pct) || pct < 0 || pct > 100)
            return {Reason::AllotmentOutOfRange, "allotment for '" + id + "' outside [0, 100]"};
        sum += pct;
    }
    if (std::fabs(sum - 100.0) > tolerance)
        return {Reason::SumNot100, "allotments sum to " + format_decimal(Decimal(sum), 2) + ", not 100"};

    const auto& adj = resp.adjustment;
    switch (adj.kind) {
    case AdjustmentKind::AboutRight:
        break;
    case AdjustmentKind::Underestimated:
        if (!std::isfinite(adj.pct) || adj.pct <= 0)
            return {Reason::InvalidAdjustment, "underestimate percentage must be positive"};
        break;
    case AdjustmentKind::Overestimated:
        if (!std::isfinite(adj.pct) || adj.pct <= 0 || adj.pct >= 100)
            return {Reason::InvalidAdjustment, "overestimate percentage must lie in (0, 100)"};
        break;
    }
    return {};
}

struct Rejection {
    std::string respondent_id;
    Reason reason;
    std::string detail;
};

struct ValidationReport {
    std::size_t total_received = 0;
    std::size_t valid = 0;
    std::vector<Rejection> rejected;
};

/// Splits a batch into accepted responses and a report of the rest.
inline ValidationReport validate_batch(std::span<const SurveyResponse> batch, const QuestionnaireSpec& spec,
                                       double tolerance, std::vector<SurveyResponse>* accepted = nullptr)
{
    ValidationReport report;
    for (const auto& r : batch) {
        ++report.total_received;
        auto verdict = validate_response(r, spec, tolerance);
        if (verdict.accepted()) {
            ++report.valid;
            if (accepted)
                accepted->push_back(r);
        } else {
            report.rejected.push_back({r.respondent_id, verdict.reason, verdict.detail});
        }
    }
    return report;
}

/// Allotment of `component` in each response; an absent write-in counts as 0.
inline std::vector<double> allotment_values(std::span<const SurveyResponse> responses, std::string_view component)
{
    std::vector<double> values;
    values.reserve(responses.size());
    for (const auto& r : responses) {
        auto it = r.allotments.find(std::string(component));
        if (it != r.allotments.end())
            values.push_back(it->second);
        else if (component == kOtherComponent)
            values.push_back(0.0);
        else
            throw ValidationError("response '" + r.respondent_id + "' has no allotment for '" +
                                  std::string(component) + "'");
    }
    return values;
}

inline double median_allotment(std::span<const SurveyResponse> responses, std::string_view component)
{
    if (responses.empty())
        throw ValidationError("median allotment needs at least one response");
    return stats::median(allotment_values(responses, component));
}

inline stats::Interval bootstrap_ci(std::span<const SurveyResponse> responses, std::string_view component,
                                    const stats::BootstrapParams& params)
{
    auto values = allotment_values(responses, component);
    return stats::bootstrap_median_ci(values, params);
}

/// Multiplier implied by a stage-two answer: 1 for about right,
/// 1 + p/100 for underestimated, 1 - p/100 for overestimated.
inline double adjustment_coefficient(const Adjustment& adj)
{
    switch (adj.kind) {
    case AdjustmentKind::AboutRight:
        return 1.0;
    case AdjustmentKind::Underestimated:
        if (!(adj.pct > 0))
            throw DomainError("underestimate percentage must be positive");
        return 1.0 + adj.pct / 100.0;
    case AdjustmentKind::Overestimated:
        if (!(adj.pct > 0) || adj.pct >= 100)
            throw DomainError("overestimate percentage must lie in (0, 100); coefficient would not be positive");
        return 1.0 - adj.pct / 100.0;
    }
    throw DomainError("unknown adjustment kind");
}

inline double adjustment_coefficient(const SurveyResponse& resp)
{
    return adjustment_coefficient(resp.adjustment);
}

struct AdjustmentSummary {
    std::size_t n_about_right = 0;
    std::size_t n_under = 0;
    std::size_t n_over = 0;
    double mean_under_pct = 0; ///< 0 when the group is empty
    double mean_over_pct = 0;
    double aggregate_coefficient = 1.0; ///< median of per-response coefficients
};

inline AdjustmentSummary summarize_adjustments(std::span<const SurveyResponse> responses)
{
    if (responses.empty())
        throw ValidationError("adjustment summary needs at least one response");
    AdjustmentSummary s;
    double under_sum = 0, over_sum = 0;
    std::vector<double> coefficients;
    coefficients.reserve(responses.size());
    for (const auto& r : responses) {
        switch (r.adjustment.kind) {
        case AdjustmentKind::AboutRight:
            ++s.n_about_right;
            break;
        case AdjustmentKind::Underestimated:
            ++s.n_under;
            under_sum += r.adjustment.pct;
            break;
        case AdjustmentKind::Overestimated:
            ++s.n_over;
            over_sum += r.adjustment.pct;
            break;
        }
        coefficients.push_back(adjustment_coefficient(r));
    }
    if (s.n_under)
        s.mean_under_pct = under_sum / static_cast<double>(s.n_under);
    if (s.n_over)
        s.mean_over_pct = over_sum / static_cast<double>(s.n_over);
    s.aggregate_coefficient = stats::median(coefficients);
    return s;
}

struct ComponentAllotment {
    std::string component_id;
    double median_pct = 0;
    stats::Interval ci;
    std::size_t n = 0;
};

struct AllotmentSummary {
    std::vector<ComponentAllotment> components;
    stats::BootstrapParams bootstrap;

    const ComponentAllotment* find(std::string_view id) const
    {
        for (const auto& c : components)
            if (c.component_id == id)
                return &c;
        return nullptr;
    }
};

/// Median and bootstrap interval per aggregation component. A single
/// response yields a degenerate interval at its own value.
inline AllotmentSummary summarize_allotments(std::span<const SurveyResponse> valid, const QuestionnaireSpec& spec,
                                             const stats::BootstrapParams& params)
{
    if (valid.empty())
        throw ValidationError("allotment summary needs at least one valid response");
    AllotmentSummary summary;
    summary.bootstrap = params;
    for (const auto& id : spec.aggregation_ids()) {
        auto values = allotment_values(valid, id);
        ComponentAllotment c;
        c.component_id = id;
        c.n = values.size();
        c.median_pct = stats::median(values);
        c.ci = values.size() >= 2 ? stats::bootstrap_median_ci(values, params)
                                  : stats::Interval{c.median_pct, c.median_pct};
        summary.components.push_back(c);
    }
    return summary;
}

struct AnalysisParams {
    double sum_tolerance = kDefaultSumTolerance;
    stats::BootstrapParams bootstrap;
};

struct AnalysisResult {
    ValidationReport validation;
    std::vector<SurveyResponse> valid_responses;
    AllotmentSummary allotments;
    AdjustmentSummary adjustments;
};

/// Validates a batch and aggregates the accepted responses.
/// Throws DomainError when no response is valid.
inline AnalysisResult analyze(std::span<const SurveyResponse> batch, const QuestionnaireSpec& spec,
                              const AnalysisParams& params)
{
    validate(spec);
    AnalysisResult out;
    out.validation = validate_batch(batch, spec, params.sum_tolerance, &out.valid_responses);
    if (out.valid_responses.empty())
        throw DomainError("no valid responses in batch of " + std::to_string(out.validation.total_received));
    out.allotments = summarize_allotments(out.valid_responses, spec, params.bootstrap);
    out.adjustments = summarize_adjustments(out.valid_responses);
    return out;
}

} // namespace vam::survey
