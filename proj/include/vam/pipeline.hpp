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

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vam/cost_model.hpp"
#include "vam/cvm_compare.hpp"
#include "vam/project.hpp"
#include "vam/response_batch.hpp"
#include "vam/survey.hpp"
#include "vam/valuation.hpp"

/// The end-to-end flow: appraise the asset, analyze the survey batch, value
/// each component, compare the target component with the CVM estimate.
namespace vam::pipeline {

inline cost::AppraisalResult appraise(const project::Project& p)
{
    return cost::appraise(p.appraisal_input());
}

inline survey::AnalysisResult analyze(const project::Project& p, const batch::LoadedBatch& responses)
{
    return batch::analyze(responses, p.questionnaire, p.analysis);
}

inline std::vector<valuation::ComponentValuation> value(const project::Project& p,
                                                        const cost::AppraisalResult& appraisal,
                                                        const survey::AllotmentSummary& allotments,
                                                        const survey::AdjustmentSummary& adjustments,
                                                        const std::vector<survey::SurveyResponse>* valid = nullptr)
{
    const auto ids = p.questionnaire.aggregation_ids();
    auto rows = valuation::valuation_report(appraisal, allotments, adjustments, p.questionnaire.target_component, ids);
    if (p.ci_basis == project::CiBasis::Value) {
        if (!valid || valid->size() < 2)
            throw ValidationError("value-basis intervals need the individual responses (at least 2)");
        for (auto& row : rows)
            row.value_ci = valuation::resampled_value_ci(appraisal.total_asset_value, *valid, row.component_id,
                                                         p.questionnaire.target_component, p.analysis.bootstrap);
    }
    return rows;
}

/// Accumulation horizon: the project's explicit value, else the rounded
/// remaining useful life.
inline cvm::DiscountParams discount_params(const project::Project& p, const cost::AppraisalResult& appraisal)
{
    if (!p.cvm)
        throw ValidationError("project has no 'cvm' section");
    cvm::DiscountParams params;
    params.rate = p.cvm->discount_rate;
    params.horizon_years = p.cvm->horizon_years.value_or(
        round_half_up(appraisal.remaining_useful_life_years).convert_to<int>());
    return params;
}

inline cvm::ComparisonVerdict compare(const project::Project& p, const cost::AppraisalResult& appraisal,
                                      const std::vector<valuation::ComponentValuation>& rows)
{
    const auto* target = valuation::find(rows, p.questionnaire.target_component);
    if (!target)
        throw ValidationError("no valuation row for target component '" + p.questionnaire.target_component + "'");
    return cvm::compare(*target, p.cvm.value().estimate, discount_params(p, appraisal));
}

} // namespace vam::pipeline
