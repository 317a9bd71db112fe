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

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vam/atomic_file.hpp"
#include "vam/errors.hpp"
#include "vam/pipeline.hpp"
#include "vam/project.hpp"
#include "vam/report.hpp"
#include "vam/response_batch.hpp"
#include "vam/service.hpp"

/// Command-line front end. Exit codes: 0 success, 1 domain error,
/// 2 input or schema error.
namespace vam::cli {

using json = nlohmann::ordered_json;

inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kInputError = 2;

/// A required upstream input (responses, summary, CVM section) is absent.
class MissingStage : public ValidationError {
public:
    MissingStage(const std::string& stage, const std::string& detail)
        : ValidationError("missing upstream stage '" + stage + "': " + detail) {}
};

struct Options {
    std::string project;
    std::string responses;
    std::string summary;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "table";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string responses_out;
};

namespace detail {

struct Context {
    project::Project project;
    std::filesystem::path project_path;
};

inline Context load_project(const Options& o)
{
    Context c{project::load(o.project), o.project};
    if (o.seed)
        c.project.analysis.bootstrap.seed = *o.seed;
    return c;
}

inline std::filesystem::path responses_path(const Context& c, const Options& o)
{
    if (!o.responses.empty())
        return o.responses;
    if (auto p = project::responses_path(c.project, c.project_path))
        return *p;
    throw MissingStage("analyze", "no response batch given (use --responses or the project's 'responses' field)");
}

struct Analysis {
    survey::AllotmentSummary allotments;
    survey::AdjustmentSummary adjustments;
    std::optional<survey::AnalysisResult> full;
};

inline Analysis analysis_for(const Context& c, const Options& o)
{
    if (!o.summary.empty()) {
        json j;
        try {
            j = json::parse(batch::read_file(o.summary));
            return {report::allotments_from_json(j.at("allotments")),
                    report::adjustments_from_json(j.at("adjustments")), std::nullopt};
        } catch (const json::exception& e) {
            throw SchemaError(o.summary, std::string("not an analysis summary: ") + e.what());
        }
    }
    auto loaded = batch::load_batch(responses_path(c, o), c.project.questionnaire);
    auto result = pipeline::analyze(c.project, loaded);
    return {result.allotments, result.adjustments, std::move(result)};
}

inline void emit(const Options& o, std::ostream& out, const json& structured, const std::string& table)
{
    if (o.format == "structured")
        out << structured.dump(2) << "\n";
    else
        out << table;
    if (!o.out.empty())
        write_file_atomically(o.out, structured.dump(2) + "\n");
}

inline int appraise(const Options& o, std::ostream& out)
{
    auto c = load_project(o);
    auto result = pipeline::appraise(c.project);
    auto split = cost::cost_breakdown(c.project.cost_items);
    emit(o, out, report::to_json(result, &split), report::table(result, &split));
    return kOk;
}

inline int validate_responses(const Options& o, std::ostream& out)
{
    auto c = load_project(o);
    auto loaded = batch::load_batch(responses_path(c, o), c.project.questionnaire);
    auto rep = batch::validate_loaded(loaded, c.project.questionnaire, c.project.analysis.sum_tolerance);
    emit(o, out, json{{"validation", report::to_json(rep)}}, report::table(rep));
    return kOk;
}

inline int analyze(const Options& o, std::ostream& out)
{
    auto c = load_project(o);
    auto loaded = batch::load_batch(responses_path(c, o), c.project.questionnaire);
    auto result = pipeline::analyze(c.project, loaded);
    json j{{"validation", report::to_json(result.validation)},
           {"allotments", report::to_json(result.allotments)},
           {"adjustments", report::to_json(result.adjustments)}};
    emit(o, out, j,
         report::table(result.validation) + "\n" + report::table(result.allotments) + "\n" +
             report::table(result.adjustments));
    return kOk;
}

inline int value(const Options& o, std::ostream& out)
{
    auto c = load_project(o);
    auto appraisal = pipeline::appraise(c.project);
    auto a = analysis_for(c, o);
    auto rows = pipeline::value(c.project, appraisal, a.allotments, a.adjustments,
                                a.full ? &a.full->valid_responses : nullptr);
    emit(o, out, json{{"components", report::to_json(rows)}}, report::table(rows));
    return kOk;
}

inline int compare(const Options& o, std::ostream& out)
{
    auto c = load_project(o);
    if (!c.project.cvm)
        throw MissingStage("cvm", "project has no 'cvm' section");
    auto appraisal = pipeline::appraise(c.project);
    auto a = analysis_for(c, o);
    auto rows = pipeline::value(c.project, appraisal, a.allotments, a.adjustments,
                                a.full ? &a.full->valid_responses : nullptr);
    auto params = pipeline::discount_params(c.project, appraisal);
    auto verdict = pipeline::compare(c.project, appraisal, rows);
    emit(o, out, json{{"comparison", report::to_json(verdict, params)}}, report::table(verdict, params));
    return kOk;
}

inline int full_report(const Options& o, std::ostream& out)
{
    auto c = load_project(o);
    auto appraisal = pipeline::appraise(c.project);
    auto split = cost::cost_breakdown(c.project.cost_items);
    auto loaded = batch::load_batch(responses_path(c, o), c.project.questionnaire);
    auto result = pipeline::analyze(c.project, loaded);
    auto rows = pipeline::value(c.project, appraisal, result.allotments, result.adjustments, &result.valid_responses);
    json j{{"project", c.project.name},
           {"appraisal", report::to_json(appraisal, &split)},
           {"validation", report::to_json(result.validation)},
           {"allotments", report::to_json(result.allotments)},
           {"adjustments", report::to_json(result.adjustments)},
           {"components", report::to_json(rows)}};
    std::string text = c.project.name + "\n\n" + report::table(appraisal, &split) + "\n" +
                       report::table(result.validation) + "\n" + report::table(result.allotments) + "\n" +
                       report::table(result.adjustments) + "\n" + report::table(rows);
    if (c.project.cvm) {
        auto params = pipeline::discount_params(c.project, appraisal);
        auto verdict = pipeline::compare(c.project, appraisal, rows);
        j["comparison"] = report::to_json(verdict, params);
        text += "\n" + report::table(verdict, params);
    }
    emit(o, out, j, text);
    return kOk;
}

inline int serve(const Options& o, std::ostream& out)
{
    auto c = load_project(o);
    if (o.responses_out.empty())
        throw ValidationError("--responses-out is required for serve");
    service::ServiceConfig cfg;
    cfg.spec = c.project.questionnaire;
    cfg.anchor_value = c.project.questionnaire.total_asset_value_display.value_or(
        pipeline::appraise(c.project).total_asset_value);
    cfg.sum_tolerance = c.project.analysis.sum_tolerance;
    cfg.responses_out = o.responses_out;
    service::SurveyService svc(std::move(cfg));
    out << "serving questionnaire v" << c.project.questionnaire.version << " on http://" << o.host << ":" << o.port
        << "\n"
        << std::flush;
    if (!svc.listen(o.host, o.port))
        throw ValidationError("cannot listen on " + o.host + ":" + std::to_string(o.port));
    return kOk;
}

} // namespace detail

/// Runs the CLI with the given arguments; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Value allotment toolkit: cost-approach appraisal, survey allotment analysis, CVM comparison"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool needs_responses) {
        sub->add_option("--project", o.project, "project file (JSON)")->required()->check(CLI::ExistingFile);
        if (needs_responses)
            sub->add_option("--responses", o.responses, "response batch (delimited text)");
        sub->add_option("--seed", o.seed, "bootstrap seed (overrides the project)");
        sub->add_option("--out", o.out, "write the structured report to this file");
        sub->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"structured", "table"}));
    };

    std::vector<std::pair<CLI::App*, int (*)(const Options&, std::ostream&)>> commands;
    auto* appraise = app.add_subcommand("appraise", "total asset value from the cost ledger");
    add_common(appraise, false);
    commands.emplace_back(appraise, &detail::appraise);
    auto* validate = app.add_subcommand("validate-responses", "validate a response batch");
    add_common(validate, true);
    commands.emplace_back(validate, &detail::validate_responses);
    auto* analyze = app.add_subcommand("analyze", "median allotments, bootstrap intervals, adjustments");
    add_common(analyze, true);
    commands.emplace_back(analyze, &detail::analyze);
    auto* value = app.add_subcommand("value", "component values");
    add_common(value, true);
    value->add_option("--summary", o.summary, "analysis summary written by 'analyze --out'");
    commands.emplace_back(value, &detail::value);
    auto* compare = app.add_subcommand("compare", "compare the target component with the CVM estimate");
    add_common(compare, true);
    compare->add_option("--summary", o.summary, "analysis summary written by 'analyze --out'");
    commands.emplace_back(compare, &detail::compare);
    auto* report = app.add_subcommand("report", "every stage in one report");
    add_common(report, true);
    commands.emplace_back(report, &detail::full_report);
    auto* serve = app.add_subcommand("serve", "serve the questionnaire over HTTP");
    serve->add_option("--project", o.project, "project file (JSON)")->required()->check(CLI::ExistingFile);
    serve->add_option("--port", o.port, "listen port");
    serve->add_option("--host", o.host, "listen address");
    serve->add_option("--responses-out", o.responses_out, "append-only response batch")->required();
    commands.emplace_back(serve, &detail::serve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        for (auto& [sub, fn] : commands)
            if (sub->parsed())
                return fn(o, out);
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kDomainError;
    } catch (const SchemaError& e) {
        err << "schema error at " << e.path() << ": " << e.what() << "\n";
        return kInputError;
    } catch (const ValidationError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::system_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

} // namespace vam::cli
