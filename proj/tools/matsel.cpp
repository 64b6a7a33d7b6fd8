// matsel: command-line front end for the materials selection pipeline.
//
// Exit codes: 0 success, 1 data or pipeline error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matsel/matsel.hpp"
#include "matsel/service.hpp"
#include "matsel/service_http.hpp"

namespace {

using namespace matsel;

/// Bad flag value discovered after CLI11 parsing; exits with status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Inputs {
    std::string db;
    std::string schema;
    std::string rules;
};

PropertySchema load_schema(const std::string& path) {
    return path.empty() ? default_schema() : parse_schema(read_file(path));
}

Knowledgebase load_rules(const std::string& path, const PropertySchema& schema) {
    return path.empty() ? load_knowledgebase(default_rules_text(), schema)
                        : load_knowledgebase(read_file(path), schema);
}

DesignRequirement load_requirement(const std::string& arg, const PropertySchema& schema) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) {
        return parse_requirement(schema, read_file(arg));
    }
    return parse_requirement_inline(schema, arg);
}

std::vector<MetricKind> parse_metric_list(const std::string& arg) {
    if (arg == "all") {
        return {kAllMetrics.begin(), kAllMetrics.end()};
    }
    std::vector<MetricKind> out;
    for (auto name : detail::split(arg, ',')) {
        const auto kind = parse_metric(detail::trim(name));
        if (!kind) {
            throw UsageError("unknown metric '" + std::string(detail::trim(name)) + "'; valid names: " +
                             metric_names() + ", all");
        }
        out.push_back(*kind);
    }
    return out;
}

SelectionMode parse_mode_flag(const std::string& arg) {
    const auto mode = parse_selection_mode(arg);
    if (!mode) {
        throw UsageError("unknown mode '" + arg + "'; valid: paper-min, oriented");
    }
    return *mode;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string class_line(const ComparisonReport& r) {
    std::string pattern;
    for (int id : r.classification.index_pattern) {
        pattern += (pattern.empty() ? "" : " ") + std::to_string(id);
    }
    return "class: " + std::string(to_string(r.classification.material_class)) + "  index pattern: [" + pattern +
           "]  fragment rows: " + std::to_string(r.fragment_rows) + "  normalized: " + (r.normalized ? "yes" : "no");
}

void print_comparison(const ComparisonReport& r, const std::string& format, bool show_ranking) {
    if (format == "json") {
        std::cout << comparison_to_json(r).dump(2) << '\n';
    } else if (format == "plotdata") {
        for (const auto& s : r.reports) {
            std::cout << to_string(s.metric) << '\t' << fmt("%.17g", s.degree_of_similarity) << '\n';
        }
    } else if (format == "csv") {
        if (show_ranking) {
            std::cout << "metric,mode,rank,id,score\n";
            for (const auto& s : r.reports) {
                for (std::size_t i = 0; i < s.ranking.size(); ++i) {
                    std::cout << to_string(s.metric) << ',' << to_string(s.mode) << ',' << i + 1 << ','
                              << s.ranking[i].id << ',' << fmt("%.17g", s.ranking[i].score) << '\n';
                }
            }
        } else {
            std::cout << "metric,mode,winner_id,degree_of_similarity\n";
            for (const auto& s : r.reports) {
                std::cout << to_string(s.metric) << ',' << to_string(s.mode) << ',' << s.winner_id << ','
                          << fmt("%.17g", s.degree_of_similarity) << '\n';
            }
        }
    } else {
        std::cout << class_line(r) << '\n';
        if (show_ranking) {
            for (const auto& s : r.reports) {
                std::cout << '\n' << to_string(s.metric) << " (" << display_name(s.metric) << ", " << to_string(s.mode)
                          << ")\n";
                for (std::size_t i = 0; i < s.ranking.size(); ++i) {
                    std::printf("  %3zu  %-16s %.10g\n", i + 1, s.ranking[i].id.c_str(), s.ranking[i].score);
                }
                for (const auto& ex : s.excluded) {
                    std::cout << "  excluded " << ex.id << ": " << ex.reason << '\n';
                }
            }
        } else {
            std::printf("%-10s %-10s %-16s %s\n", "metric", "mode", "winner", "degree_of_similarity");
            for (const auto& s : r.reports) {
                std::printf("%-10s %-10s %-16s %.10g\n", std::string(to_string(s.metric)).c_str(),
                            std::string(to_string(s.mode)).c_str(), s.winner_id.c_str(), s.degree_of_similarity);
            }
        }
        std::cout.flush();
    }
    for (const auto& f : r.failures) {
        std::cerr << "warning: " << to_string(f.metric) << ": " << f.message << '\n';
    }
}

int run_ingest(const Inputs& in, bool verbose_errors) {
    const auto schema = load_schema(in.schema);
    const auto result = read_csv(read_file(in.db), schema);
    for (const auto& issue : result.issues) {
        std::cerr << in.db << ": line " << issue.line << ": " << issue.message << '\n';
        if (!verbose_errors) {
            break;
        }
    }
    if (!result.ok()) {
        std::cerr << result.issues.size() << " error(s)\n";
        return 1;
    }
    const auto counts = result.database.count_by_class();
    std::cout << "N=" << result.database.size() << " materials (Polymer=" << counts[0] << ", Ceramic=" << counts[1]
              << ", Metal=" << counts[2] << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Materials selection by similarity measures"};
    app.require_subcommand(1);

    Inputs in;
    std::string req_arg;
    std::string metric_arg = "all";
    std::string mode_arg = "oriented";
    std::string format = "table";
    std::size_t top_k = 0;
    bool normalize = false;
    std::uint64_t seed = 42;
    std::size_t count = 0;
    std::size_t samples = 1000;
    std::string out_path;
    std::string host = "127.0.0.1";
    int port = 8080;

    const auto add_schema = [&](CLI::App* cmd) {
        cmd->add_option("--schema", in.schema, "Schema file (default: built-in 23-property schema)")
            ->envname("MATSEL_SCHEMA");
    };
    const auto add_db = [&](CLI::App* cmd) { cmd->add_option("--db", in.db, "Materials CSV")->required(); };
    const auto add_rules = [&](CLI::App* cmd) {
        cmd->add_option("--rules", in.rules, "Rules file (default: built-in 23 rules)");
    };
    const auto add_req = [&](CLI::App* cmd) {
        cmd->add_option("--req", req_arg, "Requirement file or inline 'Property=value,...'")->required();
    };
    const std::vector<std::string> formats = {"table", "json", "csv", "plotdata"};

    auto* ingest = app.add_subcommand("ingest", "Load a materials CSV and summarize it");
    add_db(ingest);
    add_schema(ingest);

    auto* validate = app.add_subcommand("validate", "Check a materials CSV and list every problem");
    add_db(validate);
    add_schema(validate);

    auto* generate = app.add_subcommand("generate", "Write a deterministic synthetic materials CSV");
    generate->add_option("--seed", seed, "Random seed");
    generate->add_option("--count", count, "Number of materials")->required()->check(CLI::PositiveNumber);
    generate->add_option("--out", out_path, "Output file ('-' for stdout)")->required();
    add_schema(generate);

    auto* classify_cmd = app.add_subcommand("classify", "Classify a requirement into a material class");
    add_req(classify_cmd);
    add_schema(classify_cmd);
    add_rules(classify_cmd);
    classify_cmd->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

    auto* select = app.add_subcommand("select", "Rank candidates for a requirement");
    auto* compare = app.add_subcommand("compare", "Compare winners across metrics");
    for (auto* cmd : {select, compare}) {
        add_db(cmd);
        add_schema(cmd);
        add_rules(cmd);
        add_req(cmd);
        cmd->add_option("--metric", metric_arg, "Metric name, comma list, or 'all' (" + metric_names() + ")");
        cmd->add_option("--mode", mode_arg, "paper-min or oriented");
        cmd->add_option("--top-k", top_k, "Keep the first k candidates of each ranking")->check(CLI::PositiveNumber);
        cmd->add_flag("--normalize", normalize, "Min-max normalize columns before scoring");
        cmd->add_option("--format", format, "table, json, csv or plotdata")->check(CLI::IsMember(formats));
    }

    auto* axioms = app.add_subcommand("axioms", "Sample the metric-space conditions for a metric");
    axioms->add_option("--metric", metric_arg, "Metric name or 'all'");
    axioms->add_option("--samples", samples, "Random triples to test")->check(CLI::PositiveNumber);
    axioms->add_option("--seed", seed, "Random seed");

    auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON query service");
    add_db(serve);
    add_schema(serve);
    add_rules(serve);
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
    serve->add_option("--mode", mode_arg, "Default selection mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*ingest || *validate) {
            return run_ingest(in, static_cast<bool>(*validate));
        }
        if (*generate) {
            const auto db = generate_synthetic(seed, count, load_schema(in.schema));
            const auto text = serialize_csv(db);
            if (out_path == "-") {
                std::cout << text;
                return 0;
            }
            std::ofstream out(out_path, std::ios::binary);
            out << text;
            if (!out.flush()) {
                std::cerr << "error: cannot write '" << out_path << "'\n";
                return 1;
            }
            return 0;
        }
        if (*classify_cmd) {
            const auto schema = load_schema(in.schema);
            const auto kb = load_rules(in.rules, schema);
            const auto result = classify(load_requirement(req_arg, schema), kb, schema);
            if (format == "json") {
                std::cout << classification_to_json(result).dump(2) << '\n';
                return 0;
            }
            std::cout << "class: " << to_string(result.material_class) << "\nindex pattern:";
            for (int id : result.index_pattern) {
                std::cout << ' ' << id;
            }
            std::cout << "\nnodes:\n";
            for (const auto& n : result.node_list) {
                std::cout << "  " << n.property << " [" << n.index << "]\n";
            }
            return 0;
        }
        if (*select || *compare) {
            CompareOptions options;
            options.metrics = parse_metric_list(metric_arg);
            options.mode = parse_mode_flag(mode_arg);
            options.normalize = normalize;
            if (top_k > 0) {
                options.top_k = top_k;
            } else if (*select) {
                options.top_k = 10;
            }
            const auto schema = load_schema(in.schema);
            const auto kb = load_rules(in.rules, schema);
            const auto db = ingest_csv(read_file(in.db), schema);
            const auto req = load_requirement(req_arg, schema);
            const auto report = compare_metrics(db, req, kb, schema, options);
            print_comparison(report, format, static_cast<bool>(*select));
            return report.reports.empty() ? 1 : 0;
        }
        if (*axioms) {
            for (auto kind : parse_metric_list(metric_arg)) {
                const auto report = check_metric_axioms(kind, samples, seed);
                std::cout << to_string(kind) << " (" << (orientation(kind) == Orientation::Distance ? "distance" : "similarity")
                          << ", " << samples << " samples, seed " << seed << ")\n";
                for (auto axiom : kAllAxioms) {
                    const auto& t = report.tally(axiom);
                    std::printf("  %-22s %s  (%zu passed, %zu failed)\n", std::string(to_string(axiom)).c_str(),
                                report.holds(axiom) ? "PASS" : "FAIL", t.passed, t.failed);
                }
                if (report.skipped > 0) {
                    std::cout << "  skipped " << report.skipped << " samples outside the domain\n";
                }
            }
            std::cout.flush();
            return 0;
        }
        if (*serve) {
            ServiceConfig config;
            config.host = host;
            config.port = port;
            config.schema_path = in.schema;
            config.rules_path = in.rules;
            config.db_path = in.db;
            config.default_mode = parse_mode_flag(mode_arg);
            const auto service = Service::from_config(config);
            httplib::Server server;
            mount(server, service);
            std::cerr << "serving " << service.database().size() << " materials on " << host << ':' << port << '\n';
            return server.listen(host, port) ? 0 : 1;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const matsel::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
