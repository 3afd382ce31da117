#include <doctest.h>

#include <atomic>

#include "suppcom/error.hpp"
#include "suppcom/tracker.hpp"
#include "test_support.hpp"

using namespace suppcom;
using testsupport::FakeServer;
using testsupport::TempDir;

namespace {

TrackerConfig config_for(const FakeServer& server, const TempDir& tmp) {
    TrackerConfig c;
    c.base_url = server.base_url();
    c.cache_dir = tmp / "cache";
    c.retry.attempts = 4;
    c.retry.base_delay = std::chrono::milliseconds(1);
    return c;
}

const char* kPayload = R"({"key": "CAMEL-17551", "fields": {"summary": "Pause consumers",
  "description": "A paused consumer does not request more messages.", "comment": {"comments": []}}})";

}  // namespace

TEST_CASE("503, 503, then 200 succeeds and is cached") {
    NetworkGuard::deny(false);
    TempDir tmp;
    FakeServer server;
    std::atomic<int> hits{0};
    std::string auth;
    server.server().Get(R"(/rest/api/2/issue/([A-Z0-9-]+))", [&](const httplib::Request& req, httplib::Response& res) {
        auth = req.get_header_value("Authorization");
        if (++hits <= 2) {
            res.status = 503;
            return;
        }
        res.set_content(kPayload, "application/json");
    });
    server.start();
    setenv("SUPPCOM_TEST_TRACKER_TOKEN", "secret-token", 1);
    auto cfg = config_for(server, tmp);
    cfg.token_env = "SUPPCOM_TEST_TRACKER_TOKEN";
    TrackerClient client(cfg, make_http_transport(std::chrono::seconds(5)));
    IssueReport r = client.fetch("CAMEL-17551");
    CHECK(r.title == "Pause consumers");
    CHECK(hits == 3);
    CHECK(client.network_calls() == 3);
    CHECK(auth == "Bearer secret-token");
    CHECK(std::filesystem::exists(client.cache_path("CAMEL-17551")));

    TrackerClient again(cfg, make_http_transport());
    NetworkGuard::deny(true);
    NetworkGuard::reset_attempts();
    CHECK(again.fetch("CAMEL-17551") == r);
    CHECK(again.network_calls() == 0);
    CHECK(NetworkGuard::attempts() == 0);
    NetworkGuard::deny(false);
}

TEST_CASE("404 is NotFound, persistent 503 exhausts retries") {
    NetworkGuard::deny(false);
    TempDir tmp;
    FakeServer server;
    server.server().Get(R"(/rest/api/2/issue/MISSING-1)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 404;
    });
    server.server().Get(R"(/rest/api/2/issue/DOWN-1)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
    });
    server.start();
    TrackerClient client(config_for(server, tmp), make_http_transport(std::chrono::seconds(5)));
    CHECK_THROWS_AS(client.fetch("MISSING-1"), NotFoundError);
    try {
        client.fetch("DOWN-1");
        FAIL("expected TransientError");
    } catch (const TransientError& e) {
        CHECK(e.retries_exhausted());
    }
    CHECK(client.network_calls() == 1 + 4);
}

TEST_CASE("denied network never reaches the transport") {
    TempDir tmp;
    TrackerConfig cfg;
    cfg.base_url = "http://127.0.0.1:9";
    cfg.cache_dir = tmp / "cache";
    cfg.retry.attempts = 1;
    NetworkGuard::deny(true);
    NetworkGuard::reset_attempts();
    TrackerClient client(cfg, make_http_transport());
    CHECK_THROWS_AS(client.fetch("CAMEL-1"), NetworkDeniedError);
    NetworkGuard::deny(false);
}
