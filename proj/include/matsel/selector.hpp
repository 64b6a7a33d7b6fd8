#pragma once

// Best-match selection over a data matrix, top-k ranking, and the end-to-end
// classify -> fragment -> matrix -> score pipeline across several metrics.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matsel/core_model.hpp"
#include "matsel/datastore.hpp"
#include "matsel/error.hpp"
#include "matsel/knowledgebase.hpp"
#include "matsel/metrics.hpp"

namespace matsel {

/// PaperMin ranks every metric ascending (the literal least-value rule).
/// Oriented ranks distances ascending and similarities descending.
enum class SelectionMode { PaperMin, Oriented };

inline std::string_view to_string(SelectionMode mode) {
    return mode == SelectionMode::PaperMin ? "paper-min" : "oriented";
}

inline std::optional<SelectionMode> parse_selection_mode(std::string_view s) {
    if (s == "paper-min") return SelectionMode::PaperMin;
    if (s == "oriented") return SelectionMode::Oriented;
    return std::nullopt;
}

struct RankedCandidate {
    std::string id;
    double score;

    friend bool operator==(const RankedCandidate&, const RankedCandidate&) = default;
};

/// A row left out because it lies outside the metric's domain.
struct Exclusion {
    std::string id;
    std::string reason;

    friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

struct SelectionReport {
    MetricKind metric = MetricKind::Euclidean;
    SelectionMode mode = SelectionMode::Oriented;
    std::string winner_id;
    double degree_of_similarity = 0.0;
    std::vector<RankedCandidate> ranking;  // best first
    bool normalized = false;
    std::vector<Exclusion> excluded;

    friend bool operator==(const SelectionReport&, const SelectionReport&) = default;
};

/// Scores every row against `query` and ranks them. Ties go to the lexicographically
/// smaller material id, so the result never depends on evaluation order.
inline SelectionReport select_best(const DataMatrix& matrix, std::span<const double> query, MetricKind metric,
                                   SelectionMode mode) {
    if (matrix.empty()) {
        throw NoCandidates("no candidates: the fragment is empty");
    }
    if (query.size() != matrix.cols()) {
        throw PreconditionError("query has " + std::to_string(query.size()) + " entries, matrix has " +
                                std::to_string(matrix.cols()) + " columns");
    }
    SelectionReport report;
    report.metric = metric;
    report.mode = mode;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        try {
            report.ranking.push_back({matrix.row_ids()[i], score(metric, query, matrix.row(i))});
        } catch (const DomainError& e) {
            report.excluded.push_back({matrix.row_ids()[i], e.what()});
        }
    }
    if (report.ranking.empty()) {
        std::string what = "no scorable candidates for " + std::string(to_string(metric)) + ":";
        for (const auto& ex : report.excluded) {
            what += " " + ex.id + " (" + ex.reason + ")";
        }
        throw NoCandidates(what);
    }
    const bool descending = mode == SelectionMode::Oriented && orientation(metric) == Orientation::Similarity;
    std::sort(report.ranking.begin(), report.ranking.end(), [descending](const auto& a, const auto& b) {
        if (a.score != b.score) {
            return descending ? a.score > b.score : a.score < b.score;
        }
        return a.id < b.id;
    });
    report.winner_id = report.ranking.front().id;
    report.degree_of_similarity = report.ranking.front().score;
    return report;
}

inline SelectionReport rank_top_k(const DataMatrix& matrix, std::span<const double> query, MetricKind metric,
                                  SelectionMode mode, std::size_t k) {
    if (k < 1) {
        throw PreconditionError("k must be at least 1");
    }
    auto report = select_best(matrix, query, metric, mode);
    if (report.ranking.size() > k) {
        report.ranking.resize(k);
    }
    return report;
}

/// A metric that had nothing to rank after domain exclusions.
struct MetricFailure {
    MetricKind metric;
    std::string message;

    friend bool operator==(const MetricFailure&, const MetricFailure&) = default;
};

struct ComparisonReport {
    DesignRequirement requirement;
    ClassificationResult classification;
    std::size_t fragment_rows = 0;
    bool normalized = false;
    std::vector<SelectionReport> reports;  // one per scorable metric, request order
    std::vector<MetricFailure> failures;

    friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

struct CompareOptions {
    std::vector<MetricKind> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    SelectionMode mode = SelectionMode::Oriented;
    bool normalize = false;
    std::optional<std::size_t> top_k;  // unset: full ranking
};

/// Runs the whole pipeline once and scores the same matrix with every requested
/// metric. An empty fragment raises NoCandidates; a metric whose every row is outside
/// its domain is recorded in `failures` instead of aborting the others.
inline ComparisonReport compare_metrics(const MaterialDatabase& db, const DesignRequirement& req,
                                        const Knowledgebase& kb, const PropertySchema& schema,
                                        const CompareOptions& options) {
    if (options.metrics.empty()) {
        throw PreconditionError("metric list is empty");
    }
    if (options.top_k && *options.top_k < 1) {
        throw PreconditionError("top_k must be at least 1");
    }
    ComparisonReport out;
    out.requirement = req;
    out.classification = classify(req, kb, schema);
    out.normalized = options.normalize;

    const auto frag = fragment(db, out.classification.material_class, req);
    out.fragment_rows = frag.rows.size();
    if (frag.rows.empty()) {
        throw NoCandidates("no candidates: no " + std::string(to_string(out.classification.material_class)) +
                           " materials in the database");
    }
    DataMatrix matrix = to_matrix(frag, schema);
    std::vector<double> query = req.query_vector(schema);
    if (options.normalize) {
        auto norm = min_max_normalize(matrix, query);
        matrix = std::move(norm.matrix);
        query = std::move(norm.query);
    }
    for (auto metric : options.metrics) {
        try {
            auto report = options.top_k ? rank_top_k(matrix, query, metric, options.mode, *options.top_k)
                                        : select_best(matrix, query, metric, options.mode);
            report.normalized = options.normalize;
            out.reports.push_back(std::move(report));
        } catch (const NoCandidates& e) {
            out.failures.push_back({metric, e.what()});
        }
    }
    return out;
}

}  // namespace matsel
