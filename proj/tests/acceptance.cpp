// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero if
// any criterion fails. Tolerances and sizes are pinned below.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "matsel/matsel.hpp"
#include "matsel/service.hpp"
#include "oracle/reference_metrics.hpp"
#include "test_support.hpp"

namespace {

using namespace matsel;
using Clock = std::chrono::steady_clock;
using Vec = std::vector<double>;

constexpr std::size_t kAxiomSamples = 1000;
constexpr double kAxiomBudgetSeconds = 5.0;
constexpr std::size_t kOraclePairs = 200;
constexpr double kOracleRelTol = 1e-9;
constexpr double kAbsExpRelTol = 1e-12;
constexpr std::size_t kFragmentTrials = 100;
constexpr std::size_t kFragmentMaxRows = 500;
constexpr std::size_t kPipelineRows = 2000;
constexpr double kPipelineBudgetSeconds = 1.0;
constexpr std::size_t kScaleTrials = 100;
constexpr std::size_t kClassifyRepeats = 100;
constexpr std::size_t kParityRequirements = 20;
constexpr double kParityRelTol = 1e-12;

/// Collects failure notes for one criterion.
struct Check {
    std::vector<std::string> notes;
    void expect(bool ok, const std::string& what) {
        if (!ok && notes.size() < 5) notes.push_back(what);
        if (!ok) ++failed;
    }
    std::size_t failed = 0;
};

bool rel_eq(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Check criterion_axioms(std::string& detail) {
    Check c;
    const auto t0 = Clock::now();
    for (auto kind : kAllMetrics) {
        const auto r = check_metric_axioms(kind, kAxiomSamples, 20240101);
        const std::string name(to_string(kind));
        c.expect(r.holds(Axiom::NonNegativity), name + " non-negativity");
        c.expect(r.holds(Axiom::Symmetry), name + " symmetry");
        c.expect(r.holds(Axiom::Identity), name + " identity");
        if (kind == MetricKind::Euclidean || kind == MetricKind::CityBlock) {
            c.expect(r.holds(Axiom::IdentityAsDistance), name + " identity as distance");
            c.expect(r.holds(Axiom::Triangle), name + " triangle");
        }
        c.expect(r.skipped == 0, name + " skipped samples");
    }
    const double secs = seconds_since(t0);
    c.expect(secs < kAxiomBudgetSeconds, "runtime " + std::to_string(secs) + " s");
    detail = std::to_string(kAxiomSamples) + " triples per metric in " + std::to_string(secs) + " s";
    return c;
}

Check criterion_oracle(std::string& detail) {
    Check c;
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> dist(0.01, 100.0);
    using Ref = long double (*)(const Vec&, const Vec&);
    const std::array<Ref, 6> refs = {oracle::ref_euclidean,           oracle::ref_city_block,
                                     oracle::ref_absolute_exponential, oracle::ref_geometric_average_min,
                                     oracle::ref_correlation_coefficient, oracle::ref_exponential_similarity};
    double worst = 0.0;
    for (std::size_t p = 0; p < kOraclePairs; ++p) {
        const std::size_t n = 2 + rng() % 22;
        Vec y(n), x(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = dist(rng);
            x[i] = dist(rng);
        }
        for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
            const double got = score(kAllMetrics[m], y, x);
            const double want = static_cast<double>(refs[m](y, x));
            if (want != 0.0) worst = std::max(worst, std::abs(got - want) / std::abs(want));
            c.expect(rel_eq(got, want, kOracleRelTol), std::string(to_string(kAllMetrics[m])) + " pair " +
                                                           std::to_string(p));
        }
        c.expect(rel_eq(absolute_exponential(y, x), std::exp(-city_block(y, x)), kAbsExpRelTol),
                 "absexp vs exp(-L1) pair " + std::to_string(p));
    }
    std::ostringstream os;
    os << kOraclePairs << " pairs, worst relative error " << worst;
    detail = os.str();
    return c;
}

Check criterion_polymer_case(std::string& detail) {
    Check c;
    const auto& schema = default_schema();
    const auto db = ingest_csv(testing_support::data_file("xg_fixture.csv"), schema);
    const auto req = testing_support::polymer_requirement();
    CompareOptions paper;
    paper.mode = SelectionMode::PaperMin;
    const auto p = compare_metrics(db, req, default_knowledgebase(), schema, paper);
    const auto o = compare_metrics(db, req, default_knowledgebase(), schema, CompareOptions{});
    const auto winner = [](const ComparisonReport& r, MetricKind k) {
        for (const auto& s : r.reports) {
            if (s.metric == k) return s.winner_id;
        }
        return std::string("<none>");
    };
    c.expect(p.classification.material_class == MaterialClass::Polymer, "classification");
    for (auto k : {MetricKind::Euclidean, MetricKind::CityBlock, MetricKind::ExponentialSimilarity}) {
        c.expect(winner(p, k) == "X", "paper-min " + std::string(to_string(k)));
    }
    c.expect(winner(p, MetricKind::GeometricAverageMin) == "G", "paper-min geomavg");
    for (auto k : kAllMetrics) {
        c.expect(winner(o, k) == "X", "oriented " + std::string(to_string(k)));
    }
    const auto& y = testing_support::kPolymerQuery;
    const auto& X = testing_support::kX;
    const auto& G = testing_support::kG;
    // Values recomputed by an independent high-precision oracle.
    c.expect(rel_eq(euclidean(y, X), 399.8524120672526342, 1e-12), "d_euclid(y,X)");
    c.expect(rel_eq(city_block(y, X), 429.266, 1e-12), "L1(y,X)");
    c.expect(rel_eq(geometric_average_min(y, X), 0.91116394875048127394, 1e-12), "geomavg(y,X)");
    c.expect(rel_eq(geometric_average_min(y, G), 0.04538459541123305538, 1e-12), "geomavg(y,G)");
    c.expect(rel_eq(correlation_coefficient(y, X), 0.99997426590083821134, 1e-12), "corrcoef(y,X)");
    c.expect(rel_eq(exponential_similarity(y, X), 429.26134285769167315, 1e-12), "expsim(y,X)");
    std::string pm;
    for (const auto& s : p.reports) pm += std::string(to_string(s.metric)) + "=" + s.winner_id + " ";
    detail = "paper-min: " + pm + "| oriented: all X";
    return c;
}

DesignRequirement random_requirement(std::mt19937_64& rng, const MaterialDatabase& db) {
    const auto& schema = db.schema();
    std::vector<std::size_t> order(schema.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(1 + rng() % schema.size());
    const auto& donor = db.materials()[rng() % db.size()];
    std::vector<RequirementEntry> entries;
    for (auto p : order) entries.push_back({schema[p].name, donor.values[p]});
    return DesignRequirement(schema, entries);
}

Check criterion_fragment(std::string& detail) {
    Check c;
    const auto& schema = default_schema();
    std::mt19937_64 rng(555);
    for (std::size_t t = 0; t < kFragmentTrials; ++t) {
        const auto db = generate_synthetic(rng(), 1 + rng() % kFragmentMaxRows, schema);
        const auto req = random_requirement(rng, db);
        const auto cls = kAllClasses[rng() % 3];
        const auto frag = fragment(db, cls, req);
        c.expect(frag == oracle::ref_fragment(db, cls, req), "trial " + std::to_string(t));
        std::vector<std::string> names;
        for (const auto& e : req.entries()) names.push_back(e.property);
        c.expect(frag.attributes == names, "column order trial " + std::to_string(t));
    }
    const auto text = serialize_csv(generate_synthetic(42, kPipelineRows, schema));
    const auto req = testing_support::polymer_requirement();
    const auto t0 = Clock::now();
    const auto db = ingest_csv(text, schema);
    const auto report = compare_metrics(db, req, default_knowledgebase(), schema, CompareOptions{});
    const double secs = seconds_since(t0);
    c.expect(report.reports.size() == kAllMetrics.size(), "pipeline produced " +
                                                              std::to_string(report.reports.size()) + " reports");
    c.expect(secs < kPipelineBudgetSeconds, "pipeline took " + std::to_string(secs) + " s");
    detail = std::to_string(kFragmentTrials) + " databases; " + std::to_string(kPipelineRows) +
             "-material ingest+compare in " + std::to_string(secs) + " s (" + std::to_string(report.fragment_rows) +
             " fragment rows)";
    return c;
}

Check criterion_scale(std::string& detail) {
    Check c;
    std::mt19937_64 rng(9001);
    std::uniform_real_distribution<double> dist(0.5, 500.0);
    std::uniform_real_distribution<double> log_factor(-6.0, 6.0);
    std::size_t comparisons = 0;
    for (std::size_t t = 0; t < kScaleTrials; ++t) {
        const std::size_t rows = 2 + rng() % 60;
        const std::size_t cols = 2 + rng() % 10;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < rows; ++i) ids.push_back("m" + std::to_string(i));
        std::vector<double> cells(rows * cols);
        for (auto& v : cells) v = dist(rng);
        Vec query(cols);
        for (auto& v : query) v = dist(rng);
        const std::size_t col = rng() % cols;
        const double factor = std::pow(10.0, log_factor(rng));
        auto scaled_cells = cells;
        auto scaled_query = query;
        for (std::size_t i = 0; i < rows; ++i) scaled_cells[i * cols + col] *= factor;
        scaled_query[col] *= factor;
        const std::vector<std::string> names(cols, "c");
        const auto a = min_max_normalize(DataMatrix(ids, names, cells), query);
        const auto b = min_max_normalize(DataMatrix(ids, names, scaled_cells), scaled_query);
        for (const auto* n : {&a, &b}) {
            for (double v : n->matrix.cells()) c.expect(v >= 0.0 && v <= 1.0, "cell outside [0,1]");
            for (double v : n->query) c.expect(v >= 0.0 && v <= 1.0, "query outside [0,1]");
        }
        for (auto k : kAllMetrics) {
            std::string wa, wb;
            try {
                wa = select_best(a.matrix, a.query, k, SelectionMode::Oriented).winner_id;
            } catch (const NoCandidates&) {
                wa = "<none>";
            }
            try {
                wb = select_best(b.matrix, b.query, k, SelectionMode::Oriented).winner_id;
            } catch (const NoCandidates&) {
                wb = "<none>";
            }
            ++comparisons;
            c.expect(wa == wb, "trial " + std::to_string(t) + " " + std::string(to_string(k)) + ": " + wa +
                                   " vs " + wb);
        }
    }
    detail = std::to_string(kScaleTrials) + " trials, " + std::to_string(comparisons) + " winner comparisons";
    return c;
}

Check criterion_classifier(std::string& detail) {
    Check c;
    const auto& schema = default_schema();
    const auto kb = load_knowledgebase(testing_support::data_file("rules23.txt"), schema);
    c.expect(kb.size() == 23, "rule count " + std::to_string(kb.size()));
    const auto req = testing_support::polymer_requirement();
    const auto first = classify(req, kb, schema);
    c.expect(first.material_class == MaterialClass::Polymer, "polymer case class");
    for (std::size_t i = 0; i < kClassifyRepeats; ++i) {
        c.expect(classify(req, kb, schema) == first, "run " + std::to_string(i) + " differs");
    }
    const auto tie = load_knowledgebase(
        "rule 1 => Metal when Hardness > 10\n"
        "rule 2 => Ceramic when Hardness > 10\n"
        "rule 3 => Polymer when Hardness > 10\n",
        schema);
    const auto tie_req = parse_requirement_inline(schema, "Hardness=50");
    c.expect(classify(tie_req, tie, schema).material_class == MaterialClass::Polymer, "three-way tie");
    const auto tie2 = load_knowledgebase(
        "rule 1 => Metal when Hardness > 10\n"
        "rule 2 => Ceramic when Hardness > 10\n"
        "rule 3 => Polymer when Hardness > 1000\n",
        schema);
    c.expect(classify(tie_req, tie2, schema).material_class == MaterialClass::Ceramic, "ceramic/metal tie");
    std::string pattern;
    for (int id : first.index_pattern) pattern += (pattern.empty() ? "" : ",") + std::to_string(id);
    detail = "23 rules; polymer case fires {" + pattern + "}; " + std::to_string(kClassifyRepeats) +
             " identical runs";
    return c;
}

struct Proc {
    int status = -1;
    std::string out;
};

Proc run_cli(const std::string& args) {
    const std::string cmd = std::string(MATSEL_CLI_PATH) + " " + args + " 2>/dev/null";
    Proc r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string requirement_file_text(const DesignRequirement& req) {
    std::string out;
    for (const auto& e : req.entries()) out += e.property + " = " + to_text(e.value) + "\n";
    return out;
}

Check criterion_parity(std::string& detail) {
    Check c;
    const auto& schema = default_schema();
    const auto dir = std::filesystem::temp_directory_path() / ("matsel_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto db_path = (dir / "db.csv").string();
    const auto req_path = (dir / "req.txt").string();
    {
        std::ofstream(db_path, std::ios::binary) << serialize_csv(generate_synthetic(7, 300, schema));
    }
    ServiceConfig config;
    config.db_path = db_path;
    const auto service = Service::from_config(config);

    std::mt19937_64 rng(777);
    std::size_t compared = 0;
    std::size_t agreed_errors = 0;
    for (std::size_t attempt = 0; compared < kParityRequirements && attempt < 200; ++attempt) {
        const auto req = random_requirement(rng, service.database());
        const bool paper = rng() % 2 == 0;
        const bool normalize = rng() % 2 == 0;
        {
            std::ofstream(req_path) << requirement_file_text(req);
        }
        std::string args = "compare --format json --db '" + db_path + "' --req '" + req_path + "'";
        if (paper) args += " --mode paper-min";
        if (normalize) args += " --normalize";
        const auto cli = run_cli(args);

        json body = {{"requirement", requirement_to_json(req)},
                     {"mode", paper ? "paper-min" : "oriented"},
                     {"normalize", normalize}};
        const auto svc = service.compare_request(body.dump());
        if (svc.status != 200) {
            c.expect(cli.status == 1, "service rejected (" + std::to_string(svc.status) + ") but CLI exit " +
                                          std::to_string(cli.status));
            ++agreed_errors;
            continue;
        }
        if (cli.status != 0) {
            c.expect(false, "CLI exit " + std::to_string(cli.status) + " on a request the service accepted");
            continue;
        }
        const auto cj = json::parse(cli.out);
        const auto& a = cj.at("reports");
        const auto& b = svc.body.at("reports");
        c.expect(a.size() == b.size(), "report count");
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            c.expect(a[i].at("winner_id") == b[i].at("winner_id"), "winner differs");
            const double da = a[i].at("degree_of_similarity").get<double>();
            const double db = b[i].at("degree_of_similarity").get<double>();
            c.expect(da == db || rel_eq(da, db, kParityRelTol), "degree of similarity differs");
        }
        const auto round = comparison_from_json(cj, schema);
        c.expect(comparison_to_json(round) == cj, "JSON round trip");
        ++compared;
    }
    c.expect(compared == kParityRequirements, "only " + std::to_string(compared) + " comparable requirements");
    std::filesystem::remove_all(dir);
    detail = std::to_string(compared) + " requirements compared, " + std::to_string(agreed_errors) +
             " rejected identically by both";
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* title;
        std::function<Check(std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "metric axioms", criterion_axioms},
        {2, "oracle equivalence", criterion_oracle},
        {3, "polymer case selection outcomes", criterion_polymer_case},
        {4, "fragmentation and pipeline scale", criterion_fragment},
        {5, "normalization scale invariance", criterion_scale},
        {6, "classifier determinism and coverage", criterion_classifier},
        {7, "CLI/service parity", criterion_parity},
    };
    int failures = 0;
    for (const auto& cr : criteria) {
        std::string detail;
        Check check;
        try {
            check = cr.run(detail);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const bool ok = check.failed == 0;
        failures += ok ? 0 : 1;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << cr.number << ". " << cr.title;
        if (!detail.empty()) std::cout << "  [" << detail << "]";
        std::cout << '\n';
        for (const auto& note : check.notes) std::cout << "      " << note << '\n';
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
