#include <doctest.h>

#include "suppcom/config.hpp"
#include "suppcom/error.hpp"
#include "test_support.hpp"

using namespace suppcom;
using nlohmann::json;

namespace {

json minimal() {
    return json::parse(R"({
        "repos": [{"path": "repo"}],
        "issues": {"directory": "issues"},
        "providers": {"chat": {"kind": "mock", "fixtures": "mock"}}
    })");
}

}  // namespace

TEST_CASE("minimal config takes the defaults and resolves relative paths") {
    auto c = parse_config(minimal(), "/base/dir");
    REQUIRE(c.repos.size() == 1);
    CHECK(c.repos[0].path == "/base/dir/repo");
    CHECK(c.repos[0].name == "repo");
    CHECK(*c.issue_directory == "/base/dir/issues");
    CHECK_FALSE(c.tracker.has_value());
    CHECK(c.chat.fixtures == "/base/dir/mock");
    CHECK(c.output_dir == "/base/dir/out");
    CHECK(c.thresholds.overlap == 0.7);
    CHECK(c.thresholds.mesia == 3.0);
    CHECK(c.thresholds.similarity == 0.6);
    CHECK(c.overlap_mode == OverlapMode::Set);
    CHECK(c.embedding.kind == "offline");
    CHECK(c.embedding.dim == 512);
    CHECK(c.side.kind == "offline");
    CHECK(c.min_method_lines == 3);
    CHECK(c.concurrency == 1);
    CHECK_FALSE(c.prompts_dir.has_value());
}

TEST_CASE("absolute paths are kept") {
    auto j = minimal();
    j["repos"][0]["path"] = "/abs/repo";
    j["output_dir"] = "/abs/out";
    auto c = parse_config(j, "/base");
    CHECK(c.repos[0].path == "/abs/repo");
    CHECK(c.output_dir == "/abs/out");
}

TEST_CASE("unknown keys are rejected at every level") {
    auto top = minimal();
    top["thresholdz"] = json::object();
    CHECK_THROWS_AS(parse_config(top, "/b"), ValidationError);

    auto nested = minimal();
    nested["thresholds"] = {{"overlap", 0.7}, {"simliarity", 0.6}};
    CHECK_THROWS_WITH_AS(parse_config(nested, "/b"), doctest::Contains("simliarity"), ValidationError);

    auto repo = minimal();
    repo["repos"][0]["branch"] = "main";
    CHECK_THROWS_AS(parse_config(repo, "/b"), ValidationError);
}

TEST_CASE("wrong types and bad ranges are rejected") {
    auto c1 = minimal();
    c1["thresholds"] = {{"overlap", "high"}};
    CHECK_THROWS_WITH_AS(parse_config(c1, "/b"), doctest::Contains("wrong type"), ValidationError);

    for (double bad : {0.0, -0.1, 1.01}) {
        auto c = minimal();
        c["thresholds"] = {{"overlap", bad}};
        CHECK_THROWS_AS(parse_config(c, "/b"), ValidationError);
    }
    for (double bad : {-0.1, 1.5}) {
        auto c = minimal();
        c["thresholds"] = {{"similarity", bad}};
        CHECK_THROWS_AS(parse_config(c, "/b"), ValidationError);
    }
    auto zero_sim = minimal();
    zero_sim["thresholds"] = {{"similarity", 0.0}, {"overlap", 1.0}};
    CHECK_NOTHROW(parse_config(zero_sim, "/b"));

    auto neg_mesia = minimal();
    neg_mesia["thresholds"] = {{"mesia", -1.0}};
    CHECK_THROWS_AS(parse_config(neg_mesia, "/b"), ValidationError);

    auto mode = minimal();
    mode["overlap_mode"] = "bag";
    CHECK_THROWS_AS(parse_config(mode, "/b"), ValidationError);

    auto lines = minimal();
    lines["miner"] = {{"min_method_lines", 0}};
    CHECK_THROWS_AS(parse_config(lines, "/b"), ValidationError);

    auto conc = minimal();
    conc["concurrency"] = 0;
    CHECK_THROWS_AS(parse_config(conc, "/b"), ValidationError);

    auto ceiling = minimal();
    ceiling["failure_rate_ceiling"] = 1.2;
    CHECK_THROWS_AS(parse_config(ceiling, "/b"), ValidationError);

    auto retry = minimal();
    retry["retry"] = {{"attempts", 0}};
    CHECK_THROWS_AS(parse_config(retry, "/b"), ValidationError);
}

TEST_CASE("exactly one issue source") {
    auto both = minimal();
    both["issues"]["tracker"] = {{"base_url", "https://issues.example.org"}};
    CHECK_THROWS_WITH_AS(parse_config(both, "/b"), doctest::Contains("exactly one"), ValidationError);

    auto neither = minimal();
    neither["issues"] = json::object();
    CHECK_THROWS_AS(parse_config(neither, "/b"), ValidationError);

    auto missing = minimal();
    missing.erase("issues");
    CHECK_THROWS_AS(parse_config(missing, "/b"), ValidationError);

    auto tracker = minimal();
    tracker["issues"] = {{"tracker", {{"base_url", "https://issues.example.org"}, {"token_env", "TRACKER_TOKEN"}}}};
    auto c = parse_config(tracker, "/b");
    REQUIRE(c.tracker.has_value());
    CHECK(c.tracker->token_env == "TRACKER_TOKEN");
    CHECK(c.tracker->url_template == "{base}/rest/api/2/issue/{key}");
}

TEST_CASE("provider kinds") {
    auto openai = minimal();
    openai["providers"]["chat"] = {{"kind", "openai"}, {"endpoint", "https://llm.example.org/v1"}};
    CHECK_THROWS_AS(parse_config(openai, "/b"), ValidationError);
    openai["providers"]["chat"]["model"] = "some-model";
    CHECK(parse_config(openai, "/b").chat.kind == "openai");

    auto emb = minimal();
    emb["providers"]["embedding"] = {{"kind", "http"}};
    CHECK_THROWS_AS(parse_config(emb, "/b"), ValidationError);
    emb["providers"]["embedding"]["base_url"] = "http://127.0.0.1:9000";
    CHECK_NOTHROW(parse_config(emb, "/b"));

    auto side = minimal();
    side["providers"]["side"] = {{"kind", "oracle"}};
    CHECK_THROWS_AS(parse_config(side, "/b"), ValidationError);
    side["providers"]["side"]["kind"] = "none";
    CHECK(parse_config(side, "/b").side.kind == "none");

    auto mock = minimal();
    mock["providers"]["chat"].erase("fixtures");
    CHECK_THROWS_AS(parse_config(mock, "/b"), ValidationError);
}

TEST_CASE("config_to_json round-trips") {
    auto c = load_config(testsupport::fixture("e2e/config.json"));
    CHECK(c.repos[0].name == "pulsar-bridge");
    CHECK(c.concurrency == 2);
    auto snapshot = config_to_json(c);
    auto again = parse_config(snapshot, c.config_dir);
    CHECK(config_to_json(again) == snapshot);
    CHECK(again.repos[0].path == c.repos[0].path);
    CHECK(again.output_dir == c.output_dir);
    CHECK(again.chat.fixtures == c.chat.fixtures);
}

TEST_CASE("load_config reports unreadable and malformed files") {
    testsupport::TempDir tmp;
    CHECK_THROWS(load_config(tmp / "absent.json"));
    testsupport::write_text(tmp / "bad.json", "{\"repos\": [");
    CHECK_THROWS_AS(load_config(tmp / "bad.json"), ValidationError);
}
