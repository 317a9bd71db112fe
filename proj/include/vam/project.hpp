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
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vam/atomic_file.hpp"
#include "vam/cost_model.hpp"
#include "vam/cvm_compare.hpp"
#include "vam/decimal.hpp"
#include "vam/errors.hpp"
#include "vam/response_batch.hpp"
#include "vam/survey.hpp"

/// Project files: JSON documents tagged "schema": "vam-project/1" holding the
/// cost ledger, depreciation schedule, life cohorts, questionnaire, CVM
/// inputs and analysis parameters. Monetary and decimal fields are written as
/// strings so they round-trip exactly; plain JSON numbers are also accepted.
namespace vam::project {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaTag = "vam-project/1";

/// Which sample the value interval is bootstrapped from.
enum class CiBasis { Allotment, Value };

struct CvmInputs {
    cvm::CvmEstimate estimate;
    Decimal discount_rate{0};
    std::optional<int> horizon_years; ///< defaults to the rounded remaining useful life
};

struct Project {
    std::string name;
    int valuation_year = 0;
    std::string currency_code = "CNY";
    std::vector<cost::CostLineItem> cost_items;
    cost::DepreciationSchedule depreciation;
    std::vector<cost::LifeCohort> life_cohorts;
    survey::QuestionnaireSpec questionnaire;
    std::optional<CvmInputs> cvm;
    survey::AnalysisParams analysis;
    CiBasis ci_basis = CiBasis::Allotment;
    std::optional<std::string> responses; ///< batch path, relative to the project file

    cost::AppraisalInput appraisal_input() const
    {
        return {valuation_year, currency_code, cost_items, depreciation, life_cohorts};
    }
};

namespace detail {

inline std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline const json& member(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object())
        throw SchemaError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(child(path, key), "required field is missing");
    return *it;
}

inline const json* optional_member(const json& obj, const std::string& key)
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return nullptr;
    return &*it;
}

inline std::string as_string(const json& j, const std::string& path)
{
    if (!j.is_string())
        throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

inline Decimal as_decimal(const json& j, const std::string& path)
{
    try {
        if (j.is_string())
            return parse_decimal(j.get<std::string>());
        if (j.is_number())
            return parse_decimal(j.dump());
    } catch (const ValidationError& e) {
        throw SchemaError(path, e.what());
    }
    throw SchemaError(path, "expected a decimal number (string or number)");
}

inline Money as_money(const json& j, const std::string& path) { return Money::from_major(as_decimal(j, path)); }

inline int as_int(const json& j, const std::string& path)
{
    if (!j.is_number_integer())
        throw SchemaError(path, "expected an integer");
    return j.get<int>();
}

inline double as_double(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw SchemaError(path, "expected a number");
    return j.get<double>();
}

inline const json& as_array(const json& j, const std::string& path)
{
    if (!j.is_array())
        throw SchemaError(path, "expected an array");
    return j;
}

inline valuation::MoneyInterval as_interval(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2)
        throw SchemaError(path, "expected [low, high]");
    valuation::MoneyInterval iv{as_money(j[0], child(path, 0)), as_money(j[1], child(path, 1))};
    if (iv.low > iv.high)
        throw SchemaError(path, "interval low exceeds high");
    return iv;
}

inline std::string money_text(Money m) { return m.to_string(); }

inline cost::DepreciationEntry parse_depreciation_entry(const json& obj, const std::string& key,
                                                       const std::string& path)
{
    const std::string p = child(path, key);
    const json* e = optional_member(obj, key);
    if (!e)
        return {};
    if (!e->is_object())
        throw SchemaError(p, "expected an object with 'amount' or 'rate' and 'base'");
    cost::DepreciationEntry entry;
    if (const json* note = optional_member(*e, "note"))
        entry.note = as_string(*note, child(p, "note"));
    const json* amount = optional_member(*e, "amount");
    const json* rate = optional_member(*e, "rate");
    if (amount) {
        entry.amount = as_money(*amount, child(p, "amount"));
    } else if (rate) {
        Money base = as_money(member(*e, "base", p), child(p, "base"));
        try {
            entry.amount = cost::depreciation_from_rate(as_decimal(*rate, child(p, "rate")), base);
        } catch (const ValidationError& ex) {
            throw SchemaError(child(p, "rate"), ex.what());
        }
    } else {
        throw SchemaError(child(p, "amount"), "required field is missing");
    }
    if (entry.amount < Money{})
        throw SchemaError(child(p, "amount"), "must be non-negative");
    return entry;
}

} // namespace detail

/// Parses and checks a project document. Every failure is a SchemaError whose
/// path names the offending field (e.g. "/cost_items/2/quantity").
inline Project from_json(const json& doc)
{
    using namespace detail;
    const std::string root;
    if (!doc.is_object())
        throw SchemaError("/", "project must be a JSON object");
    const std::string tag = as_string(member(doc, "schema", root), "/schema");
    if (tag != kSchemaTag)
        throw SchemaError("/schema", "unrecognised schema '" + tag + "', expected '" + kSchemaTag + "'");

    Project p;
    p.name = as_string(member(doc, "name", root), "/name");
    p.valuation_year = as_int(member(doc, "valuation_year", root), "/valuation_year");
    p.currency_code = as_string(member(doc, "currency_code", root), "/currency_code");

    const auto& items = as_array(member(doc, "cost_items", root), "/cost_items");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string ip = child("/cost_items", i);
        const auto& it = items[i];
        cost::CostLineItem item;
        item.label = as_string(member(it, "label", ip), child(ip, "label"));
        const std::string kind = as_string(member(it, "kind", ip), child(ip, "kind"));
        if (kind == "direct")
            item.kind = cost::CostKind::Direct;
        else if (kind == "indirect")
            item.kind = cost::CostKind::Indirect;
        else
            throw SchemaError(child(ip, "kind"), "expected 'direct' or 'indirect'");
        item.quantity = as_decimal(member(it, "quantity", ip), child(ip, "quantity"));
        item.unit_cost = as_decimal(member(it, "unit_cost", ip), child(ip, "unit_cost"));
        if (const json* periods = optional_member(it, "periods"))
            item.periods = as_decimal(*periods, child(ip, "periods"));
        try {
            cost::validate(item);
        } catch (const ValidationError& e) {
            std::string field = item.quantity < 0 ? "quantity" : item.unit_cost < 0 ? "unit_cost" : "periods";
            throw SchemaError(child(ip, field), e.what());
        }
        p.cost_items.push_back(std::move(item));
    }

    if (const json* dep = optional_member(doc, "depreciation")) {
        const std::string dp = "/depreciation";
        if (!dep->is_object())
            throw SchemaError(dp, "expected an object");
        p.depreciation.physical_deterioration = parse_depreciation_entry(*dep, "physical_deterioration", dp);
        p.depreciation.curable_functional_obsolescence =
            parse_depreciation_entry(*dep, "curable_functional_obsolescence", dp);
        p.depreciation.incurable_functional_obsolescence =
            parse_depreciation_entry(*dep, "incurable_functional_obsolescence", dp);
        p.depreciation.economic_obsolescence = parse_depreciation_entry(*dep, "economic_obsolescence", dp);
    }

    const auto& cohorts = as_array(member(doc, "life_cohorts", root), "/life_cohorts");
    if (cohorts.empty())
        throw SchemaError("/life_cohorts", "at least one life cohort is required");
    for (std::size_t i = 0; i < cohorts.size(); ++i) {
        const std::string cp = child("/life_cohorts", i);
        cost::LifeCohort c;
        c.label = as_string(member(cohorts[i], "label", cp), child(cp, "label"));
        c.weight = as_decimal(member(cohorts[i], "weight", cp), child(cp, "weight"));
        c.remaining_life_years =
            as_decimal(member(cohorts[i], "remaining_life_years", cp), child(cp, "remaining_life_years"));
        if (c.weight <= 0)
            throw SchemaError(child(cp, "weight"), "must be positive");
        if (c.remaining_life_years <= 0)
            throw SchemaError(child(cp, "remaining_life_years"), "must be positive");
        p.life_cohorts.push_back(std::move(c));
    }

    {
        const std::string qp = "/questionnaire";
        const auto& q = member(doc, "questionnaire", root);
        auto& spec = p.questionnaire;
        if (const json* v = optional_member(q, "version"))
            spec.version = as_int(*v, child(qp, "version"));
        const auto& comps = as_array(member(q, "components", qp), child(qp, "components"));
        std::set<std::string> ids;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::string cp = child(child(qp, "components"), i);
            survey::Component c;
            c.id = as_string(member(comps[i], "id", cp), child(cp, "id"));
            c.name = as_string(member(comps[i], "name", cp), child(cp, "name"));
            if (const json* ex = optional_member(comps[i], "explanation"))
                c.explanation = as_string(*ex, child(cp, "explanation"));
            if (c.id.empty() || c.id == survey::kOtherComponent)
                throw SchemaError(child(cp, "id"), "component id must be non-empty and not 'other'");
            if (!ids.insert(c.id).second)
                throw SchemaError(child(cp, "id"), "duplicate component id '" + c.id + "'");
            spec.components.push_back(std::move(c));
        }
        if (spec.components.empty())
            throw SchemaError(child(qp, "components"), "at least one component is required");
        if (const json* ao = optional_member(q, "allows_other")) {
            if (!ao->is_boolean())
                throw SchemaError(child(qp, "allows_other"), "expected a boolean");
            spec.allows_other = ao->get<bool>();
        }
        if (const json* info = optional_member(q, "info")) {
            const std::string ip = child(qp, "info");
            if (const json* t = optional_member(*info, "text"))
                spec.info.text = as_string(*t, child(ip, "text"));
            if (const json* imgs = optional_member(*info, "images")) {
                as_array(*imgs, child(ip, "images"));
                for (std::size_t i = 0; i < imgs->size(); ++i)
                    spec.info.images.push_back(as_string((*imgs)[i], child(child(ip, "images"), i)));
            }
        }
        spec.target_component = as_string(member(q, "target_component", qp), child(qp, "target_component"));
        if (!spec.has_component(spec.target_component))
            throw SchemaError(child(qp, "target_component"),
                              "'" + spec.target_component + "' is not one of the components");
        if (const json* d = optional_member(q, "total_asset_value_display"))
            spec.total_asset_value_display = as_money(*d, child(qp, "total_asset_value_display"));
    }

    if (const json* c = optional_member(doc, "cvm")) {
        const std::string cp = "/cvm";
        CvmInputs in;
        auto& e = in.estimate;
        e.median_wtp_per_household_year =
            as_money(member(*c, "median_wtp_per_household_year", cp), child(cp, "median_wtp_per_household_year"));
        if (const json* w = optional_member(*c, "wtp_ci"))
            e.wtp_ci = as_interval(*w, child(cp, "wtp_ci"));
        if (const json* h = optional_member(*c, "households")) {
            if (!h->is_number_unsigned() && !(h->is_number_integer() && h->get<long long>() >= 0))
                throw SchemaError(child(cp, "households"), "expected a non-negative integer");
            e.households = h->get<std::uint64_t>();
        }
        if (const json* a = optional_member(*c, "annual_aggregate"))
            e.annual_aggregate = as_money(*a, child(cp, "annual_aggregate"));
        else if (e.households)
            e.annual_aggregate = cvm::aggregate_annual(e.median_wtp_per_household_year, *e.households);
        else
            throw SchemaError(child(cp, "annual_aggregate"), "either annual_aggregate or households is required");
        e.annual_aggregate_ci = as_interval(member(*c, "annual_aggregate_ci", cp), child(cp, "annual_aggregate_ci"));
        e.component_annual_value =
            as_money(member(*c, "component_annual_value", cp), child(cp, "component_annual_value"));
        in.discount_rate = as_decimal(member(*c, "discount_rate", cp), child(cp, "discount_rate"));
        if (in.discount_rate < 0)
            throw SchemaError(child(cp, "discount_rate"), "must be non-negative");
        if (const json* h = optional_member(*c, "horizon_years")) {
            in.horizon_years = as_int(*h, child(cp, "horizon_years"));
            if (*in.horizon_years < 1)
                throw SchemaError(child(cp, "horizon_years"), "must be at least 1");
        }
        try {
            cvm::validate(e);
        } catch (const ValidationError& ex) {
            throw SchemaError(cp, ex.what());
        }
        p.cvm = std::move(in);
    }

    if (const json* a = optional_member(doc, "analysis")) {
        const std::string ap = "/analysis";
        if (const json* v = optional_member(*a, "sum_tolerance"))
            p.analysis.sum_tolerance = as_double(*v, child(ap, "sum_tolerance"));
        if (const json* v = optional_member(*a, "bootstrap_resamples")) {
            int n = as_int(*v, child(ap, "bootstrap_resamples"));
            if (n < 1000)
                throw SchemaError(child(ap, "bootstrap_resamples"), "must be at least 1000");
            p.analysis.bootstrap.resamples = static_cast<std::size_t>(n);
        }
        if (const json* v = optional_member(*a, "confidence_level")) {
            double level = as_double(*v, child(ap, "confidence_level"));
            if (!(level > 0 && level < 1))
                throw SchemaError(child(ap, "confidence_level"), "must lie in (0, 1)");
            p.analysis.bootstrap.confidence_level = level;
        }
        if (const json* v = optional_member(*a, "seed")) {
            if (!v->is_number_unsigned())
                throw SchemaError(child(ap, "seed"), "expected a non-negative integer");
            p.analysis.bootstrap.seed = v->get<std::uint64_t>();
        }
        if (const json* v = optional_member(*a, "ci_basis")) {
            const std::string basis = as_string(*v, child(ap, "ci_basis"));
            if (basis == "allotment")
                p.ci_basis = CiBasis::Allotment;
            else if (basis == "value")
                p.ci_basis = CiBasis::Value;
            else
                throw SchemaError(child(ap, "ci_basis"), "expected 'allotment' or 'value'");
        }
    }
    if (const json* r = optional_member(doc, "responses"))
        p.responses = as_string(*r, "/responses");
    return p;
}

inline json to_json(const Project& p)
{
    using detail::money_text;
    json doc;
    doc["schema"] = kSchemaTag;
    doc["name"] = p.name;
    doc["valuation_year"] = p.valuation_year;
    doc["currency_code"] = p.currency_code;
    doc["cost_items"] = json::array();
    for (const auto& item : p.cost_items) {
        doc["cost_items"].push_back({{"label", item.label},
                                     {"kind", cost::to_string(item.kind)},
                                     {"quantity", to_plain_string(item.quantity)},
                                     {"unit_cost", to_plain_string(item.unit_cost)},
                                     {"periods", to_plain_string(item.periods)}});
    }
    auto entry = [](const cost::DepreciationEntry& e) {
        json j{{"amount", money_text(e.amount)}};
        if (!e.note.empty())
            j["note"] = e.note;
        return j;
    };
    doc["depreciation"] = {
        {"physical_deterioration", entry(p.depreciation.physical_deterioration)},
        {"curable_functional_obsolescence", entry(p.depreciation.curable_functional_obsolescence)},
        {"incurable_functional_obsolescence", entry(p.depreciation.incurable_functional_obsolescence)},
        {"economic_obsolescence", entry(p.depreciation.economic_obsolescence)},
    };
    doc["life_cohorts"] = json::array();
    for (const auto& c : p.life_cohorts) {
        doc["life_cohorts"].push_back({{"label", c.label},
                                       {"weight", to_plain_string(c.weight)},
                                       {"remaining_life_years", to_plain_string(c.remaining_life_years)}});
    }
    json q;
    q["version"] = p.questionnaire.version;
    q["components"] = json::array();
    for (const auto& c : p.questionnaire.components)
        q["components"].push_back({{"id", c.id}, {"name", c.name}, {"explanation", c.explanation}});
    q["allows_other"] = p.questionnaire.allows_other;
    q["info"] = {{"text", p.questionnaire.info.text}, {"images", p.questionnaire.info.images}};
    q["target_component"] = p.questionnaire.target_component;
    if (p.questionnaire.total_asset_value_display)
        q["total_asset_value_display"] = money_text(*p.questionnaire.total_asset_value_display);
    doc["questionnaire"] = std::move(q);
    if (p.cvm) {
        const auto& e = p.cvm->estimate;
        json c;
        c["median_wtp_per_household_year"] = money_text(e.median_wtp_per_household_year);
        if (e.wtp_ci)
            c["wtp_ci"] = {money_text(e.wtp_ci->low), money_text(e.wtp_ci->high)};
        if (e.households)
            c["households"] = *e.households;
        c["annual_aggregate"] = money_text(e.annual_aggregate);
        c["annual_aggregate_ci"] = {money_text(e.annual_aggregate_ci.low), money_text(e.annual_aggregate_ci.high)};
        c["component_annual_value"] = money_text(e.component_annual_value);
        c["discount_rate"] = to_plain_string(p.cvm->discount_rate);
        if (p.cvm->horizon_years)
            c["horizon_years"] = *p.cvm->horizon_years;
        doc["cvm"] = std::move(c);
    }
    doc["analysis"] = {{"sum_tolerance", p.analysis.sum_tolerance},
                       {"bootstrap_resamples", p.analysis.bootstrap.resamples},
                       {"confidence_level", p.analysis.bootstrap.confidence_level},
                       {"seed", p.analysis.bootstrap.seed},
                       {"ci_basis", p.ci_basis == CiBasis::Value ? "value" : "allotment"}};
    if (p.responses)
        doc["responses"] = *p.responses;
    return doc;
}

inline Project parse(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("not valid JSON: ") + e.what());
    }
    return from_json(doc);
}

inline Project load(const std::filesystem::path& path) { return parse(batch::read_file(path)); }

inline void save(const Project& p, const std::filesystem::path& path)
{
    write_file_atomically(path, to_json(p).dump(2) + "\n");
}

/// Resolves the project's response batch path against the project file location.
inline std::optional<std::filesystem::path> responses_path(const Project& p, const std::filesystem::path& project_file)
{
    if (!p.responses)
        return std::nullopt;
    std::filesystem::path r(*p.responses);
    if (r.is_absolute())
        return r;
    return project_file.parent_path() / r;
}

} // namespace vam::project
