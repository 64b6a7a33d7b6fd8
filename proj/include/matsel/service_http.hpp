#pragma once

#include <string>

#include <httplib.h>

#include "matsel/service.hpp"

namespace matsel {

/// Routes: GET /api/schema, POST /api/classify, POST /api/compare, GET /healthz.
/// CORS is open to any origin so the web workbench can call from its own host.
inline void mount(httplib::Server& server, const Service& service) {
    const auto reply = [](httplib::Response& res, const ServiceResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/api/schema",
               [&service, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.schema_document()); });
    server.Get("/healthz",
               [&service, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });
    server.Post("/api/classify", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.classify_request(req.body));
    });
    server.Post("/api/compare", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.compare_request(req.body));
    });
}

}  // namespace matsel
