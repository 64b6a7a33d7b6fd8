#pragma once

// JSON forms of requirements, classifications and selection reports. Field names
// are shared by the CLI (`--format json`) and the HTTP service.

#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "matsel/core_model.hpp"
#include "matsel/error.hpp"
#include "matsel/knowledgebase.hpp"
#include "matsel/metrics.hpp"
#include "matsel/selector.hpp"

namespace matsel {

using nlohmann::json;

namespace detail {

inline json number_to_json(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

inline double number_from_json(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

/// Numeric values are JSON numbers; intervals (`lo..hi`) and labels are strings.
inline json value_to_json(const PropertyValue& value) {
    if (const auto* v = std::get_if<double>(&value)) {
        return *v;
    }
    return to_text(value);
}

inline PropertyValue value_from_json(const PropertyDef& def, const json& j) {
    if (j.is_number()) {
        const double v = j.get<double>();
        if (def.kind == PropertyKind::Numeric) {
            return v;
        }
        if (def.kind == PropertyKind::Interval) {
            return Interval{v, v};
        }
        throw InvalidValue("property '" + def.name + "' expects an ordinal label");
    }
    if (j.is_string()) {
        return parse_value(def, j.get<std::string>());
    }
    throw InvalidValue("property '" + def.name + "': value must be a number or a string");
}

inline json requirement_to_json(const DesignRequirement& req) {
    json out = json::array();
    for (const auto& e : req.entries()) {
        out.push_back({{"property", e.property}, {"value", value_to_json(e.value)}});
    }
    return out;
}

/// Accepts `[{"property": ..., "value": ...}, ...]` or `[[name, value], ...]`, order preserved.
inline DesignRequirement requirement_from_json(const json& j, const PropertySchema& schema) {
    if (!j.is_array()) {
        throw InvalidValue("requirement must be an array of (property, value) pairs");
    }
    std::vector<RequirementEntry> entries;
    for (const auto& item : j) {
        const json* name = nullptr;
        const json* value = nullptr;
        if (item.is_object() && item.contains("property") && item.contains("value")) {
            name = &item.at("property");
            value = &item.at("value");
        } else if (item.is_array() && item.size() == 2) {
            name = &item[0];
            value = &item[1];
        }
        if (name == nullptr || !name->is_string()) {
            throw InvalidValue("malformed requirement entry " + item.dump());
        }
        const auto& def = schema.at(name->get<std::string>());
        entries.push_back({def.name, value_from_json(def, *value)});
    }
    return DesignRequirement(schema, std::move(entries));
}

inline json classification_to_json(const ClassificationResult& c) {
    json nodes = json::array();
    for (const auto& n : c.node_list) {
        nodes.push_back({{"property", n.property}, {"index", n.index}});
    }
    json scores = json::object();
    for (auto cls : kAllClasses) {
        scores[std::string(to_string(cls))] = c.scores[static_cast<std::size_t>(cls)];
    }
    return {{"class", to_string(c.material_class)},
            {"index_pattern", c.index_pattern},
            {"node_list", nodes},
            {"class_scores", scores}};
}

inline ClassificationResult classification_from_json(const json& j) {
    ClassificationResult c;
    const auto cls = parse_material_class(j.at("class").get<std::string>());
    if (!cls) {
        throw InvalidValue("unknown class in report");
    }
    c.material_class = *cls;
    c.index_pattern = j.at("index_pattern").get<std::vector<int>>();
    for (const auto& n : j.at("node_list")) {
        c.node_list.push_back({n.at("property").get<std::string>(), n.at("index").get<std::size_t>()});
    }
    for (auto k : kAllClasses) {
        c.scores[static_cast<std::size_t>(k)] = j.at("class_scores").at(std::string(to_string(k))).get<int>();
    }
    return c;
}

inline json selection_to_json(const SelectionReport& r) {
    json ranking = json::array();
    for (const auto& c : r.ranking) {
        ranking.push_back({{"id", c.id}, {"score", detail::number_to_json(c.score)}});
    }
    json excluded = json::array();
    for (const auto& e : r.excluded) {
        excluded.push_back({{"id", e.id}, {"reason", e.reason}});
    }
    return {{"metric", to_string(r.metric)},
            {"mode", to_string(r.mode)},
            {"winner_id", r.winner_id},
            {"degree_of_similarity", detail::number_to_json(r.degree_of_similarity)},
            {"ranking", ranking},
            {"normalized", r.normalized},
            {"excluded", excluded}};
}

inline SelectionReport selection_from_json(const json& j) {
    SelectionReport r;
    const auto metric = parse_metric(j.at("metric").get<std::string>());
    const auto mode = parse_selection_mode(j.at("mode").get<std::string>());
    if (!metric || !mode) {
        throw InvalidValue("unknown metric or mode in report");
    }
    r.metric = *metric;
    r.mode = *mode;
    r.winner_id = j.at("winner_id").get<std::string>();
    r.degree_of_similarity = detail::number_from_json(j.at("degree_of_similarity"));
    for (const auto& c : j.at("ranking")) {
        r.ranking.push_back({c.at("id").get<std::string>(), detail::number_from_json(c.at("score"))});
    }
    r.normalized = j.at("normalized").get<bool>();
    for (const auto& e : j.at("excluded")) {
        r.excluded.push_back({e.at("id").get<std::string>(), e.at("reason").get<std::string>()});
    }
    return r;
}

inline json comparison_to_json(const ComparisonReport& r) {
    json reports = json::array();
    for (const auto& s : r.reports) {
        reports.push_back(selection_to_json(s));
    }
    json failures = json::array();
    for (const auto& f : r.failures) {
        failures.push_back({{"metric", to_string(f.metric)}, {"message", f.message}});
    }
    json out = classification_to_json(r.classification);
    out["requirement"] = requirement_to_json(r.requirement);
    out["fragment_rows"] = r.fragment_rows;
    out["normalized"] = r.normalized;
    out["reports"] = reports;
    out["failures"] = failures;
    return out;
}

inline ComparisonReport comparison_from_json(const json& j, const PropertySchema& schema) {
    ComparisonReport r;
    r.requirement = requirement_from_json(j.at("requirement"), schema);
    r.classification = classification_from_json(j);
    r.fragment_rows = j.at("fragment_rows").get<std::size_t>();
    r.normalized = j.at("normalized").get<bool>();
    for (const auto& s : j.at("reports")) {
        r.reports.push_back(selection_from_json(s));
    }
    for (const auto& f : j.at("failures")) {
        const auto metric = parse_metric(f.at("metric").get<std::string>());
        if (!metric) {
            throw InvalidValue("unknown metric in report");
        }
        r.failures.push_back({*metric, f.at("message").get<std::string>()});
    }
    return r;
}

inline json schema_to_json(const PropertySchema& schema) {
    json props = json::array();
    for (const auto& def : schema.properties()) {
        json p = {{"name", def.name}, {"kind", to_string(def.kind)}, {"unit", def.unit}, {"position", def.position}};
        if (def.kind == PropertyKind::Ordinal) {
            json labels = json::array();
            json weights = json::array();
            for (const auto& level : def.ordinal_scale) {
                labels.push_back(level.label);
                weights.push_back(level.weight);
            }
            p["ordinal_labels"] = labels;
            p["ordinal_weights"] = weights;
        }
        props.push_back(std::move(p));
    }
    return {{"properties", props}};
}

}  // namespace matsel
