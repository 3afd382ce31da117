#include <doctest.h>

#include <atomic>

#include "suppcom/error.hpp"
#include "suppcom/similarity.hpp"
#include "suppcom/verification.hpp"
#include "test_support.hpp"

using namespace suppcom;
using testsupport::FakeServer;

namespace {

HttpProviderConfig client_config(const FakeServer& server) {
    HttpProviderConfig c;
    c.base_url = server.base_url();
    c.retry.attempts = 3;
    c.retry.base_delay = std::chrono::milliseconds(1);
    return c;
}

std::vector<double> fake_vector(const std::string& text) {
    return {static_cast<double>(text.size()), 1.0, -0.5};
}

}  // namespace

TEST_CASE("/embed request and response") {
    NetworkGuard::deny(false);
    FakeServer server;
    std::vector<nlohmann::json> requests;
    std::string token;
    server.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        auto j = nlohmann::json::parse(req.body);
        requests.push_back(j);
        token = req.get_header_value("X-Auth-Token");
        CHECK(req.get_header_value("Content-Type") == "application/json");
        nlohmann::json vectors = nlohmann::json::array();
        for (const auto& t : j.at("texts")) vectors.push_back(fake_vector(t.get<std::string>()));
        res.set_content(nlohmann::json{{"vectors", vectors}, {"dim", 3}, {"model_id", "fake-sbert"}}.dump(),
                        "application/json");
    });
    server.start();
    setenv("SUPPCOM_TEST_SERVICE_TOKEN", "tok", 1);
    auto cfg = client_config(server);
    cfg.token_env = "SUPPCOM_TEST_SERVICE_TOKEN";
    cfg.max_batch = 2;
    HttpEmbeddingProvider provider(cfg, make_http_transport(std::chrono::seconds(5)));
    std::vector<std::string> texts{"a", "bb", "ccc"};
    auto vectors = provider.embed_batch(texts);
    REQUIRE(requests.size() == 2);
    CHECK(requests[0] == nlohmann::json{{"texts", {"a", "bb"}}});
    CHECK(requests[1] == nlohmann::json{{"texts", {"ccc"}}});
    CHECK(token == "tok");
    REQUIRE(vectors.size() == 3);
    CHECK(vectors[2].values == fake_vector("ccc"));
    CHECK(provider.dim() == 3);
    CHECK(provider.id() == "http:fake-sbert");
    CHECK(vectors[0].provider_id == "http:fake-sbert");
}

TEST_CASE("/embed errors: retried 503, short batch, dim mismatch") {
    NetworkGuard::deny(false);
    FakeServer server;
    std::atomic<int> calls{0};
    std::string mode = "flaky";
    server.server().Post("/embed", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        if (mode == "flaky" && calls == 1) {
            res.status = 503;
            return;
        }
        if (mode == "short") {
            res.set_content(R"({"vectors": [], "dim": 3, "model_id": "m"})", "application/json");
        } else if (mode == "dim") {
            res.set_content(R"({"vectors": [[1.0, 2.0]], "dim": 3, "model_id": "m"})", "application/json");
        } else {
            res.set_content(R"({"vectors": [[1.0, 2.0, 3.0]], "dim": 3, "model_id": "m"})", "application/json");
        }
    });
    server.start();
    HttpEmbeddingProvider provider(client_config(server), make_http_transport(std::chrono::seconds(5)));
    std::vector<std::string> one{"x"};
    CHECK(provider.embed_batch(one).size() == 1);
    CHECK(calls == 2);
    mode = "short";
    CHECK_THROWS_AS(provider.embed_batch(one), Error);
    mode = "dim";
    CHECK_THROWS_AS(provider.embed_batch(one), Error);
}

TEST_CASE("/side request and response") {
    NetworkGuard::deny(false);
    FakeServer server;
    nlohmann::json seen;
    server.server().Post("/side", [&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        nlohmann::json scores = nlohmann::json::array();
        for (const auto& s : seen.at("sentences")) {
            scores.push_back(s.get<std::string>().find("pause") != std::string::npos ? 0.8 : -0.2);
        }
        res.set_content(nlohmann::json{{"scores", scores}, {"model_id", "fake-side"}}.dump(), "application/json");
    });
    server.start();
    HttpSideScorer scorer(client_config(server), make_http_transport(std::chrono::seconds(5)));
    std::vector<std::string> sentences{"Call pause first.", "Unrelated."};
    auto scores = scorer.score_batch("void pause() {}", sentences);
    CHECK(seen == nlohmann::json{{"code", "void pause() {}"}, {"sentences", sentences}});
    CHECK(scores == std::vector<double>{0.8, -0.2});
    CHECK(scorer.score("void pause() {}", "Unrelated.") == -0.2);
    IdentifierSet none;
    CHECK(is_code_relevant("A short pause helps.", "void pause() {}", none, &scorer).criterion == RelevanceCriterion::Side);
}

TEST_CASE("/health schema") {
    NetworkGuard::deny(false);
    FakeServer server;
    std::string body = R"({"status": "ok", "model_ids": {"embed": "sbert-v2", "side": "side-v1"}, "dim": 768})";
    int status = 200;
    server.server().Get("/health", [&](const httplib::Request&, httplib::Response& res) {
        res.status = status;
        res.set_content(body, "application/json");
    });
    server.start();
    auto transport = make_http_transport(std::chrono::seconds(5));
    ServiceHealth h = check_service_health(server.base_url(), *transport);
    CHECK(h.ok());
    CHECK(h.model_ids == std::vector<std::string>{"sbert-v2", "side-v1"});
    CHECK(h.dim == 768);
    body = R"({"status": "loading", "model_ids": ["sbert-v2"], "dim": 768})";
    h = check_service_health(server.base_url(), *transport);
    CHECK_FALSE(h.ok());
    CHECK(h.model_ids == std::vector<std::string>{"sbert-v2"});
    body = R"({"status": "ok"})";
    CHECK_THROWS_AS(check_service_health(server.base_url(), *transport), Error);
    status = 503;
    CHECK_THROWS_AS(check_service_health(server.base_url(), *transport), Error);
}

TEST_CASE("denied network: no request leaves the process") {
    NetworkGuard::deny(true);
    NetworkGuard::reset_attempts();
    FakeServer server;
    std::atomic<int> hits{0};
    server.server().Post("/embed", [&](const httplib::Request&, httplib::Response&) { ++hits; });
    server.start();
    HttpEmbeddingProvider provider(client_config(server), make_http_transport());
    std::vector<std::string> one{"x"};
    CHECK_THROWS_AS(provider.embed_batch(one), NetworkDeniedError);
    CHECK(hits == 0);
    CHECK(NetworkGuard::attempts() >= 1);
    NetworkGuard::deny(false);
    NetworkGuard::reset_attempts();
    CHECK(NetworkGuard::attempts() == 0);
}
