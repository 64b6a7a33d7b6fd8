// Classify the polymer reference requirement and compare the six metrics on the
// X/G fixture, once per selection mode.

#include <cstdio>
#include <string>

#include "matsel/matsel.hpp"
#include "matsel/service.hpp"

int main() {
    using namespace matsel;
    const std::string dir = MATSEL_DATA_DIR;
    const auto& schema = default_schema();
    const auto db = ingest_csv(read_file(dir + "/xg_fixture.csv"), schema);
    const auto req = parse_requirement(schema, read_file(dir + "/polymer_query.req"));

    for (auto mode : {SelectionMode::PaperMin, SelectionMode::Oriented}) {
        CompareOptions options;
        options.mode = mode;
        const auto report = compare_metrics(db, req, default_knowledgebase(), schema, options);
        std::printf("%s: class %s\n", std::string(to_string(mode)).c_str(),
                    std::string(to_string(report.classification.material_class)).c_str());
        for (const auto& s : report.reports) {
            std::printf("  %-10s %-4s %.10g\n", std::string(to_string(s.metric)).c_str(), s.winner_id.c_str(),
                        s.degree_of_similarity);
        }
    }
    return 0;
}
