#include <gtest/gtest.h>

#include <random>

#include "matsel/report_json.hpp"
#include "test_support.hpp"

namespace matsel {
namespace {

const PropertySchema& schema() { return default_schema(); }

MaterialDatabase fixture6() { return ingest_csv(testing_support::data_file("fixture6.csv"), schema()); }

TEST(RequirementJson, ShapeAndRoundTrip) {
    const auto req = parse_requirement_inline(schema(), "Hardness=3,Density=0.2..0.4,Machinability=Good");
    const auto j = requirement_to_json(req);
    EXPECT_EQ(j, json::parse(R"([{"property":"Hardness","value":3.0},
                                 {"property":"Density","value":"0.2..0.4"},
                                 {"property":"Machinability","value":"Good"}])"));
    EXPECT_EQ(requirement_from_json(j, schema()), req);
}

TEST(RequirementJson, PairFormAndErrors) {
    const auto req = requirement_from_json(json::parse(R"([["Hardness", 3], ["Density", 1.5]])"), schema());
    EXPECT_EQ(req.entries()[1].value, PropertyValue(Interval{1.5, 1.5}));
    EXPECT_THROW(requirement_from_json(json::parse("{}"), schema()), InvalidValue);
    EXPECT_THROW(requirement_from_json(json::parse("[]"), schema()), PreconditionError);
    EXPECT_THROW(requirement_from_json(json::parse(R"([["Flavor", 3]])"), schema()), InvalidValue);
    EXPECT_THROW(requirement_from_json(json::parse(R"([["Machinability", 3]])"), schema()), InvalidValue);
    EXPECT_THROW(requirement_from_json(json::parse(R"([["Hardness", true]])"), schema()), InvalidValue);
}

TEST(ClassificationJson, RoundTrip) {
    const auto c = classify(testing_support::polymer_requirement(), default_knowledgebase(), schema());
    const auto j = classification_to_json(c);
    EXPECT_EQ(j.at("class"), "Polymer");
    EXPECT_EQ(j.at("index_pattern"), json::parse("[1,2,6]"));
    EXPECT_EQ(j.at("node_list")[0], json::parse(R"({"property":"Tensile Strength","index":0})"));
    EXPECT_EQ(classification_from_json(j), c);
}

TEST(ComparisonJson, RoundTripsExactly) {
    const auto db = fixture6();
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const auto& m = db.materials()[rng() % db.size()];
        std::vector<RequirementEntry> entries;
        for (const auto& def : schema().properties()) {
            if (rng() % 2 == 0) entries.push_back({def.name, m.values[def.position]});
        }
        if (entries.empty()) continue;
        const DesignRequirement req(schema(), entries);
        CompareOptions opt;
        opt.normalize = t % 2 == 0;
        opt.mode = t % 3 == 0 ? SelectionMode::PaperMin : SelectionMode::Oriented;
        ComparisonReport report;
        try {
            report = compare_metrics(db, req, default_knowledgebase(), schema(), opt);
        } catch (const Error&) {
            continue;
        }
        const auto text = comparison_to_json(report).dump();
        EXPECT_EQ(comparison_from_json(json::parse(text), schema()), report);
    }
}

TEST(SelectionJson, NonFiniteScoresBecomeNull) {
    SelectionReport r;
    r.winner_id = "a";
    r.degree_of_similarity = 0.0;
    r.ranking = {{"a", 0.0}, {"b", std::numeric_limits<double>::infinity()}};
    const auto j = selection_to_json(r);
    EXPECT_TRUE(j.at("ranking")[1].at("score").is_null());
    EXPECT_TRUE(std::isnan(selection_from_json(j).ranking[1].score));
}

TEST(SchemaJson, ListsEveryProperty) {
    const auto j = schema_to_json(schema());
    ASSERT_EQ(j.at("properties").size(), 23u);
    EXPECT_EQ(j.at("properties")[0].at("name"), "Tensile Strength");
    EXPECT_EQ(j.at("properties")[5].at("kind"), "interval");
    const auto& ord = j.at("properties")[19];
    EXPECT_EQ(ord.at("kind"), "ordinal");
    EXPECT_EQ(ord.at("ordinal_labels").size(), 5u);
    EXPECT_FALSE(j.at("properties")[0].contains("ordinal_labels"));
}

}  // namespace
}  // namespace matsel
