#pragma once

// Stateless JSON request handlers over an immutable dataset. Transport-free so the
// same handlers back the HTTP server (service_http.hpp) and direct library calls.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "matsel/core_model.hpp"
#include "matsel/datastore.hpp"
#include "matsel/error.hpp"
#include "matsel/knowledgebase.hpp"
#include "matsel/report_json.hpp"
#include "matsel/selector.hpp"

namespace matsel {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string schema_path;  // empty: built-in 23-property schema
    std::string rules_path;   // empty: built-in 23-rule knowledgebase
    std::string db_path;
    SelectionMode default_mode = SelectionMode::Oriented;
};

struct ServiceResponse {
    int status = 200;
    json body;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(0, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Service {
public:
    Service(PropertySchema schema, Knowledgebase kb, MaterialDatabase db,
            SelectionMode default_mode = SelectionMode::Oriented)
        : schema_(std::move(schema)), kb_(std::move(kb)), db_(std::move(db)), default_mode_(default_mode) {}

    /// Loads every referenced file; any failure aborts startup.
    static Service from_config(const ServiceConfig& config) {
        auto schema = config.schema_path.empty() ? default_schema() : parse_schema(read_file(config.schema_path));
        auto kb = config.rules_path.empty() ? load_knowledgebase(default_rules_text(), schema)
                                            : load_knowledgebase(read_file(config.rules_path), schema);
        auto db = ingest_csv(read_file(config.db_path), schema);
        return Service(std::move(schema), std::move(kb), std::move(db), config.default_mode);
    }

    const PropertySchema& schema() const noexcept { return schema_; }
    const Knowledgebase& knowledgebase() const noexcept { return kb_; }
    const MaterialDatabase& database() const noexcept { return db_; }

    ServiceResponse schema_document() const { return {200, schema_to_json(schema_)}; }

    ServiceResponse health() const { return {200, {{"materials", db_.size()}}}; }

    /// Body: `{"requirement": [...]}` or a bare requirement array.
    ServiceResponse classify_request(const std::string& body) const {
        return guarded([&] {
            const auto j = json::parse(body);
            const auto& req_json = j.is_object() ? j.at("requirement") : j;
            const auto req = requirement_from_json(req_json, schema_);
            return ServiceResponse{200, classification_to_json(classify(req, kb_, schema_))};
        });
    }

    /// Body: `{"requirement": [...], "metrics": [...], "mode": ..., "normalize": ..., "top_k": ...}`.
    /// Missing `metrics` means all six; an explicit empty list is rejected.
    ServiceResponse compare_request(const std::string& body) const {
        return guarded([&] {
            const auto j = json::parse(body);
            if (!j.is_object() || !j.contains("requirement")) {
                throw InvalidValue("body must be an object with a 'requirement' field");
            }
            const auto req = requirement_from_json(j.at("requirement"), schema_);
            CompareOptions options;
            options.mode = default_mode_;
            if (j.contains("metrics")) {
                options.metrics.clear();
                for (const auto& m : j.at("metrics")) {
                    const auto kind = m.is_string() ? parse_metric(m.get<std::string>()) : std::nullopt;
                    if (!kind) {
                        throw InvalidValue("unknown metric " + m.dump() + "; valid: " + metric_names());
                    }
                    options.metrics.push_back(*kind);
                }
            }
            if (j.contains("mode") && !j.at("mode").is_null()) {
                const auto mode = parse_selection_mode(j.at("mode").get<std::string>());
                if (!mode) {
                    throw InvalidValue("mode must be 'paper-min' or 'oriented'");
                }
                options.mode = *mode;
            }
            if (j.contains("normalize")) {
                options.normalize = j.at("normalize").get<bool>();
            }
            if (j.contains("top_k") && !j.at("top_k").is_null()) {
                const auto k = j.at("top_k").get<std::int64_t>();
                if (k < 1) {
                    throw InvalidValue("top_k must be at least 1");
                }
                options.top_k = static_cast<std::size_t>(k);
            }
            return ServiceResponse{200, comparison_to_json(compare_metrics(db_, req, kb_, schema_, options))};
        });
    }

private:
    template <typename Fn>
    static ServiceResponse guarded(Fn&& fn) {
        try {
            return fn();
        } catch (const UnclassifiableRequirement& e) {
            json misses = json::array();
            for (const auto& m : e.nearest_misses()) {
                misses.push_back({{"rule_id", m.rule_id},
                                  {"class", to_string(m.target)},
                                  {"satisfied", m.satisfied},
                                  {"conditions", m.total}});
            }
            return {422, {{"error", e.what()}, {"nearest_misses", misses}}};
        } catch (const Unclassifiable& e) {
            return {422, {{"error", e.what()}}};
        } catch (const NoCandidates& e) {
            return {422, {{"error", e.what()}}};
        } catch (const Error& e) {
            return {400, {{"error", e.what()}}};
        } catch (const json::exception& e) {
            return {400, {{"error", std::string("malformed body: ") + e.what()}}};
        }
    }

    PropertySchema schema_;
    Knowledgebase kb_;
    MaterialDatabase db_;
    SelectionMode default_mode_;
};

}  // namespace matsel
