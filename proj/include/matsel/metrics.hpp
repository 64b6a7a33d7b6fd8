#pragma once

// The six similarity/distance functions, min-max normalization, and a sampler
// that checks the four metric-space conditions for any of them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matsel/datastore.hpp"
#include "matsel/error.hpp"

namespace matsel {

/// Finite, non-empty vector of reals.
class FeatureVector {
public:
    FeatureVector() = default;

    explicit FeatureVector(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) {
            throw PreconditionError("feature vector is empty");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw PreconditionError("feature vector has a non-finite entry");
            }
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    operator std::span<const double>() const noexcept { return values_; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::vector<double> values_;
};

enum class MetricKind { Euclidean, CityBlock, AbsoluteExponential, GeometricAverageMin, CorrelationCoefficient,
                        ExponentialSimilarity };

/// Distance: smaller is closer, 0 at equality. Similarity: larger is closer, 1 at equality.
enum class Orientation { Distance, Similarity };

inline constexpr std::array<MetricKind, 6> kAllMetrics = {
    MetricKind::Euclidean,           MetricKind::CityBlock,
    MetricKind::AbsoluteExponential, MetricKind::GeometricAverageMin,
    MetricKind::CorrelationCoefficient, MetricKind::ExponentialSimilarity};

inline constexpr Orientation orientation(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean:
        case MetricKind::CityBlock:
        case MetricKind::ExponentialSimilarity: return Orientation::Distance;
        case MetricKind::AbsoluteExponential:
        case MetricKind::GeometricAverageMin:
        case MetricKind::CorrelationCoefficient: return Orientation::Similarity;
    }
    return Orientation::Distance;
}

/// CLI/API name.
inline std::string_view to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::CityBlock: return "cityblock";
        case MetricKind::AbsoluteExponential: return "absexp";
        case MetricKind::GeometricAverageMin: return "geomavg";
        case MetricKind::CorrelationCoefficient: return "corrcoef";
        case MetricKind::ExponentialSimilarity: return "expsim";
    }
    return "?";
}

inline std::string_view display_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "Euclidean Distance";
        case MetricKind::CityBlock: return "City Block Distance";
        case MetricKind::AbsoluteExponential: return "Absolute Exponential";
        case MetricKind::GeometricAverageMin: return "Geometric Average Minimum";
        case MetricKind::CorrelationCoefficient: return "Correlation Coefficient";
        case MetricKind::ExponentialSimilarity: return "Exponential Similarity";
    }
    return "?";
}

inline std::optional<MetricKind> parse_metric(std::string_view name) {
    for (auto kind : kAllMetrics) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

inline std::string metric_names() {
    std::string out;
    for (auto kind : kAllMetrics) {
        if (!out.empty()) {
            out += ", ";
        }
        out += to_string(kind);
    }
    return out;
}

namespace detail {

inline void check_pair(std::span<const double> y, std::span<const double> x) {
    if (y.size() != x.size()) {
        throw PreconditionError("vector length mismatch: " + std::to_string(y.size()) + " vs " +
                                std::to_string(x.size()));
    }
    if (y.empty()) {
        throw PreconditionError("vectors are empty");
    }
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (!std::isfinite(y[k]) || !std::isfinite(x[k])) {
            throw PreconditionError("non-finite vector entry at index " + std::to_string(k));
        }
    }
}

inline double sum_abs_diff(std::span<const double> y, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        s += std::abs(y[k] - x[k]);
    }
    return s;
}

}  // namespace detail

inline double euclidean(std::span<const double> y, std::span<const double> x) {
    detail::check_pair(y, x);
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double d = y[k] - x[k];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double city_block(std::span<const double> y, std::span<const double> x) {
    detail::check_pair(y, x);
    return detail::sum_abs_diff(y, x);
}

/// exp(-L1). Underflows to subnormals or 0 for far-apart vectors; that is a valid result.
inline double absolute_exponential(std::span<const double> y, std::span<const double> x) {
    detail::check_pair(y, x);
    return std::exp(-detail::sum_abs_diff(y, x));
}

/// Sum of pairwise minima over sum of pairwise geometric means. Needs strictly positive entries.
inline double geometric_average_min(std::span<const double> y, std::span<const double> x) {
    detail::check_pair(y, x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (!(y[k] > 0.0) || !(x[k] > 0.0)) {
            throw DomainError("geometric average minimum needs positive entries (index " + std::to_string(k) + ")");
        }
        num += std::min(x[k], y[k]);
        den += std::sqrt(x[k] * y[k]);
    }
    return num / den;
}

/// Deviation-product ratio with absolute values in the numerator, so the result
/// lies in [0, 1]. Needs n >= 2 and non-zero spread in both vectors.
inline double correlation_coefficient(std::span<const double> y, std::span<const double> x) {
    detail::check_pair(y, x);
    const std::size_t n = y.size();
    if (n < 2) {
        throw DomainError("correlation coefficient needs at least two components");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mean_x += x[k];
        mean_y += y[k];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double num = 0.0;
    double ssx = 0.0;
    double ssy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = x[k] - mean_x;
        const double dy = y[k] - mean_y;
        num += std::abs(dx) * std::abs(dy);
        ssx += dx * dx;
        ssy += dy * dy;
    }
    if (!(ssx > 0.0) || !(ssy > 0.0)) {
        throw DomainError("correlation coefficient undefined for a zero-variance vector");
    }
    if (n == 2) {
        // Deviations are (a, -a) and (b, -b): the ratio is exactly 1.
        return 1.0;
    }
    return std::min(1.0, num / (std::sqrt(ssx) * std::sqrt(ssy)));
}

/// Sum of |d| / (1 + exp(-|d|)); bounded above by the city-block distance.
inline double exponential_similarity(std::span<const double> y, std::span<const double> x) {
    detail::check_pair(y, x);
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double u = std::abs(y[k] - x[k]);
        s += u / (1.0 + std::exp(-u));
    }
    return s;
}

inline double score(MetricKind kind, std::span<const double> y, std::span<const double> x) {
    switch (kind) {
        case MetricKind::Euclidean: return euclidean(y, x);
        case MetricKind::CityBlock: return city_block(y, x);
        case MetricKind::AbsoluteExponential: return absolute_exponential(y, x);
        case MetricKind::GeometricAverageMin: return geometric_average_min(y, x);
        case MetricKind::CorrelationCoefficient: return correlation_coefficient(y, x);
        case MetricKind::ExponentialSimilarity: return exponential_similarity(y, x);
    }
    throw PreconditionError("unknown metric");
}

struct ColumnRange {
    double min;
    double max;

    friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

struct NormalizedData {
    DataMatrix matrix;
    std::vector<double> query;
    std::vector<ColumnRange> ranges;
};

/// Maps every column onto [0, 1] by (v - min) / (max - min), with min/max taken over
/// the column and the query entry together. Columns with max == min map to 0.
inline NormalizedData min_max_normalize(const DataMatrix& matrix, std::span<const double> query) {
    const std::size_t n = matrix.cols();
    if (query.size() != n) {
        throw PreconditionError("query has " + std::to_string(query.size()) + " entries, matrix has " +
                                std::to_string(n) + " columns");
    }
    std::vector<ColumnRange> ranges;
    ranges.reserve(n);
    for (std::size_t f = 0; f < n; ++f) {
        ColumnRange r{query[f], query[f]};
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
            r.min = std::min(r.min, matrix.at(i, f));
            r.max = std::max(r.max, matrix.at(i, f));
        }
        ranges.push_back(r);
    }
    const auto scale = [&](double v, std::size_t f) {
        const auto& r = ranges[f];
        return r.max == r.min ? 0.0 : (v - r.min) / (r.max - r.min);
    };

    std::vector<double> cells(matrix.cells().size());
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t f = 0; f < n; ++f) {
            cells[i * n + f] = scale(matrix.at(i, f), f);
        }
    }
    std::vector<double> q(n);
    for (std::size_t f = 0; f < n; ++f) {
        q[f] = scale(query[f], f);
    }
    return {DataMatrix(matrix.row_ids(), matrix.columns(), std::move(cells)), std::move(q), std::move(ranges)};
}

enum class Axiom {
    NonNegativity,       // d(x, y) >= 0
    Identity,            // d(x, x) equals the kind's best value: 0 for distances, 1 for similarities
    IdentityAsDistance,  // d(x, x) = 0, read literally for every kind
    Symmetry,            // d(x, y) = d(y, x)
    Triangle,            // d(x, z) + d(z, y) >= d(x, y)
};

inline constexpr std::array<Axiom, 5> kAllAxioms = {Axiom::NonNegativity, Axiom::Identity, Axiom::IdentityAsDistance,
                                                    Axiom::Symmetry, Axiom::Triangle};

inline std::string_view to_string(Axiom a) {
    switch (a) {
        case Axiom::NonNegativity: return "non-negativity";
        case Axiom::Identity: return "identity";
        case Axiom::IdentityAsDistance: return "identity-as-distance";
        case Axiom::Symmetry: return "symmetry";
        case Axiom::Triangle: return "triangle";
    }
    return "?";
}

/// One failed check. `lhs`/`rhs` are the two sides that were compared; the vectors
/// are kept so the failure can be re-evaluated directly.
struct AxiomCounterexample {
    Axiom axiom;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;  // triangle only
    double lhs;
    double rhs;
};

struct AxiomTally {
    std::size_t passed = 0;
    std::size_t failed = 0;
};

struct AxiomReport {
    MetricKind kind = MetricKind::Euclidean;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t skipped = 0;  // samples outside the metric's domain
    std::array<AxiomTally, kAllAxioms.size()> tallies{};
    std::vector<AxiomCounterexample> counterexamples;  // at most three per axiom

    const AxiomTally& tally(Axiom a) const { return tallies[static_cast<std::size_t>(a)]; }
    bool holds(Axiom a) const { return tally(a).failed == 0 && tally(a).passed > 0; }
};

inline constexpr double kAxiomRelTol = 1e-9;

/// Samples `samples` random triples (dimension 2..23) and tallies each condition.
/// Geometric average minimum is sampled on strictly positive vectors, the rest on
/// mixed-sign ones. Comparisons allow a relative slack of kAxiomRelTol.
inline AxiomReport check_metric_axioms(MetricKind kind, std::size_t samples, std::uint64_t seed) {
    if (samples < 1) {
        throw PreconditionError("samples must be at least 1");
    }
    AxiomReport report;
    report.kind = kind;
    report.samples = samples;
    report.seed = seed;

    std::mt19937_64 rng(seed);
    const bool positive = kind == MetricKind::GeometricAverageMin;
    const double lo = positive ? 0.1 : -50.0;
    const double hi = 100.0;
    const auto draw_vec = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& e : v) {
            e = lo + detail::unit_draw(rng) * (hi - lo);
        }
        return v;
    };
    const auto slack = [](double a, double b) {
        return kAxiomRelTol * std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    };
    const double best = orientation(kind) == Orientation::Distance ? 0.0 : 1.0;

    std::array<std::size_t, kAllAxioms.size()> kept{};
    const auto record = [&](Axiom a, bool ok, const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& z, double lhs, double rhs) {
        auto& t = report.tallies[static_cast<std::size_t>(a)];
        if (ok) {
            ++t.passed;
            return;
        }
        ++t.failed;
        if (kept[static_cast<std::size_t>(a)]++ < 3) {
            report.counterexamples.push_back({a, x, y, z, lhs, rhs});
        }
    };

    for (std::size_t s = 0; s < samples; ++s) {
        const auto n = static_cast<std::size_t>(2 + rng() % 22);
        const auto x = draw_vec(n);
        const auto y = draw_vec(n);
        const auto z = draw_vec(n);
        double dxy, dyx, dxx, dxz, dzy;
        try {
            dxy = score(kind, x, y);
            dyx = score(kind, y, x);
            dxx = score(kind, x, x);
            dxz = score(kind, x, z);
            dzy = score(kind, z, y);
        } catch (const DomainError&) {
            ++report.skipped;
            continue;
        }
        record(Axiom::NonNegativity, dxy >= 0.0, x, y, {}, dxy, 0.0);
        record(Axiom::Identity, std::abs(dxx - best) <= slack(dxx, best), x, x, {}, dxx, best);
        record(Axiom::IdentityAsDistance, std::abs(dxx) <= slack(dxx, 0.0), x, x, {}, dxx, 0.0);
        record(Axiom::Symmetry, std::abs(dxy - dyx) <= slack(dxy, dyx), x, y, {}, dxy, dyx);
        record(Axiom::Triangle, dxz + dzy >= dxy - slack(dxz + dzy, dxy), x, y, z, dxz + dzy, dxy);
    }
    return report;
}

}  // namespace matsel
