#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "matsel/service_http.hpp"
#include "test_support.hpp"

namespace matsel {
namespace {

const char* kPolymerBody = R"({"requirement": [["Tensile Strength", 20], ["Yield Strength", 23.9],
    ["Impact Strength", 4], ["Hardness", 56.67], ["Tensile Modulus", 2000]]})";

Service fixture_service(const std::string& csv = "fixture6.csv") {
    ServiceConfig config;
    config.db_path = testing_support::data_path(csv);
    return Service::from_config(config);
}

json compare_body(const std::string& extra) {
    auto j = json::parse(kPolymerBody);
    j.update(json::parse(extra));
    return j;
}

TEST(ServiceHandlers, SchemaAndHealth) {
    const auto s = fixture_service();
    const auto schema = s.schema_document();
    EXPECT_EQ(schema.status, 200);
    EXPECT_EQ(schema.body.at("properties").size(), 23u);
    EXPECT_EQ(s.health().body, json::parse(R"({"materials": 6})"));
}

TEST(ServiceHandlers, ClassifyPolymerCase) {
    const auto s = fixture_service();
    const auto r = s.classify_request(kPolymerBody);
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_EQ(r.body.at("class"), "Polymer");
    EXPECT_EQ(r.body.at("index_pattern"), json::parse("[1,2,6]"));
    const auto bare = s.classify_request(json::parse(kPolymerBody).at("requirement").dump());
    EXPECT_EQ(bare.body, r.body);
}

TEST(ServiceHandlers, ClassifyErrors) {
    const auto s = fixture_service();
    EXPECT_EQ(s.classify_request(R"({"requirement": []})").status, 400);
    EXPECT_EQ(s.classify_request(R"({"requirement": [["Flavor", 1]]})").status, 400);
    EXPECT_EQ(s.classify_request("not json").status, 400);
    const auto r = s.classify_request(R"({"requirement": [["Cost", 5]]})");
    EXPECT_EQ(r.status, 422);
    EXPECT_TRUE(r.body.contains("nearest_misses"));
}

TEST(ServiceHandlers, CompareModes) {
    const auto s = fixture_service("xg_fixture.csv");
    const auto paper = s.compare_request(compare_body(R"({"mode": "paper-min"})").dump());
    ASSERT_EQ(paper.status, 200) << paper.body.dump();
    const auto& reports = paper.body.at("reports");
    ASSERT_EQ(reports.size(), 6u);
    EXPECT_EQ(reports[0].at("winner_id"), "X");
    EXPECT_EQ(reports[3].at("metric"), "geomavg");
    EXPECT_EQ(reports[3].at("winner_id"), "G");

    const auto oriented = s.compare_request(kPolymerBody);
    for (const auto& r : oriented.body.at("reports")) {
        EXPECT_EQ(r.at("winner_id"), "X") << r.dump();
    }
}

TEST(ServiceHandlers, CompareOptionsAndErrors) {
    const auto s = fixture_service("xg_fixture.csv");
    const auto one = s.compare_request(compare_body(R"({"metrics": ["cityblock"], "top_k": 1})").dump());
    ASSERT_EQ(one.status, 200);
    EXPECT_EQ(one.body.at("reports").size(), 1u);
    EXPECT_EQ(one.body.at("reports")[0].at("ranking").size(), 1u);
    EXPECT_EQ(s.compare_request(compare_body(R"({"metrics": []})").dump()).status, 400);
    EXPECT_EQ(s.compare_request(compare_body(R"({"metrics": ["nosuch"]})").dump()).status, 400);
    EXPECT_EQ(s.compare_request(compare_body(R"({"mode": "sideways"})").dump()).status, 400);
    EXPECT_EQ(s.compare_request(compare_body(R"({"top_k": 0})").dump()).status, 400);
    EXPECT_EQ(s.compare_request("[]").status, 400);
}

TEST(ServiceHandlers, NoCandidatesIs422) {
    const auto s = fixture_service("xg_fixture.csv");
    // A ceramic requirement against a polymer-only database.
    std::vector<Material> polymers;
    for (const auto& m : s.database().materials()) {
        if (m.material_class == MaterialClass::Polymer) polymers.push_back(m);
    }
    const Service only_polymers(s.schema(), s.knowledgebase(), MaterialDatabase(s.schema(), polymers));
    const auto r = only_polymers.compare_request(R"({"requirement": [["Hardness", 900], ["Melting Point", 2500]]})");
    EXPECT_EQ(r.status, 422) << r.body.dump();
}

TEST(ServiceConfig, MissingFilesAbortStartup) {
    ServiceConfig config;
    config.db_path = "/nonexistent/db.csv";
    EXPECT_THROW(Service::from_config(config), LoadError);
    config.db_path = testing_support::data_path("fixture6.csv");
    config.rules_path = testing_support::data_path("rules23.txt");
    config.schema_path = testing_support::data_path("schema23.txt");
    EXPECT_EQ(Service::from_config(config).database().size(), 6u);
}

class HttpServer : public ::testing::Test {
protected:
    void SetUp() override {
        service_ = std::make_unique<Service>(fixture_service("xg_fixture.csv"));
        mount(server_, *service_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    void TearDown() override {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

    std::unique_ptr<Service> service_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

TEST_F(HttpServer, Endpoints) {
    auto cli = client();
    auto schema = cli.Get("/api/schema");
    ASSERT_TRUE(schema);
    EXPECT_EQ(schema->status, 200);
    EXPECT_EQ(schema->get_header_value("Access-Control-Allow-Origin"), "*");
    const auto props = json::parse(schema->body).at("properties");
    EXPECT_EQ(props.size(), 23u);
    EXPECT_EQ(props[4].at("name"), "Tensile Modulus");

    auto health = cli.Get("/healthz");
    ASSERT_TRUE(health);
    EXPECT_EQ(json::parse(health->body).at("materials"), 4);

    auto cls = cli.Post("/api/classify", kPolymerBody, "application/json");
    ASSERT_TRUE(cls);
    EXPECT_EQ(json::parse(cls->body).at("class"), "Polymer");

    auto bad = cli.Post("/api/classify", R"({"requirement": []})", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    EXPECT_TRUE(json::parse(bad->body).contains("error"));

    auto cmp = cli.Post("/api/compare", compare_body(R"({"mode": "paper-min"})").dump(), "application/json");
    ASSERT_TRUE(cmp);
    ASSERT_EQ(cmp->status, 200);
    const auto reports = json::parse(cmp->body).at("reports");
    EXPECT_NE(reports[0].at("winner_id"), reports[3].at("winner_id"));

    auto opts = cli.Options("/api/compare");
    ASSERT_TRUE(opts);
    EXPECT_EQ(opts->status, 204);
}

TEST_F(HttpServer, ConcurrentRequestsAgree) {
    const auto expected = service_->compare_request(kPolymerBody).body;
    std::vector<std::future<json>> futures;
    for (int i = 0; i < 16; ++i) {
        futures.push_back(std::async(std::launch::async, [this] {
            auto cli = client();
            auto res = cli.Post("/api/compare", kPolymerBody, "application/json");
            return res ? json::parse(res->body) : json();
        }));
    }
    for (auto& f : futures) {
        EXPECT_EQ(f.get(), expected);
    }
}

}  // namespace
}  // namespace matsel
