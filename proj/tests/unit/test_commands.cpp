#include <doctest.h>

#include <sstream>

#include "suppcom/commands.hpp"
#include "suppcom/error.hpp"
#include "suppcom/http.hpp"
#include "test_support.hpp"

using namespace suppcom;
using testsupport::TempDir;

namespace {

RunOptions quiet(std::ostream& log) {
    RunOptions o;
    o.offline = true;
    o.log = &log;
    return o;
}

}  // namespace

TEST_CASE("stages name the missing input and its producer") {
    TempDir tmp;
    std::ostringstream log;
    auto config = testsupport::e2e_config(tmp.path());
    Pipeline p(config, quiet(log));
    CHECK_THROWS_WITH_AS(p.link(), doctest::Contains("run `mine` first"), NotFoundError);
    CHECK_THROWS_WITH_AS(p.link(), doctest::Contains("methods.jsonl"), NotFoundError);
    CHECK_THROWS_WITH_AS(p.report(), doctest::Contains("run `evaluate` first"), NotFoundError);
    p.mine();
    CHECK_THROWS_WITH_AS(p.link(), doctest::Contains("run `ingest-issues` first"), NotFoundError);
    NetworkGuard::deny(false);
}

TEST_CASE("full offline run, resume and corruption recovery") {
    TempDir tmp;
    std::ostringstream log;
    auto config = testsupport::e2e_config(tmp.path());
    NetworkGuard::reset_attempts();
    Pipeline p(config, quiet(log));
    auto first = p.run_all();
    REQUIRE(first.exit_code == kExitOk);
    CHECK(NetworkGuard::attempts() == 0);

    const auto out = p.out_dir();
    for (const char* name : {"methods.jsonl", "comments.jsonl", "issues.jsonl", "links.jsonl", "dataset.jsonl",
                             "generated.jsonl", "report.json", "report.csv", "report.md", "manifest.json"}) {
        CHECK_MESSAGE(std::filesystem::exists(out / name), name);
    }
    auto counters = p.counters();
    CHECK(counters.mined > 0);
    CHECK(counters.linked > 0);
    CHECK(counters.retained > 0);
    CHECK(counters.failed == 0);

    auto manifest = testsupport::load_json(out / "manifest.json");
    CHECK(manifest["tool_version"] == std::string(kToolVersion));
    CHECK(manifest["stages"].contains("generate"));
    CHECK(manifest["counters"]["mined"] == counters.mined);

    const std::string report = read_file(out / "report.md");
    const std::string links = read_file(out / "links.jsonl");

    SUBCASE("a rerun skips every stage") {
        Pipeline again(config, quiet(log));
        CHECK(again.mine().skipped);
        CHECK(again.ingest_issues().skipped);
        CHECK(again.link().skipped);
        CHECK(again.dataset().skipped);
        CHECK(again.generate().skipped);
        CHECK(again.evaluate().skipped);
        CHECK(read_file(out / "report.md") == report);
    }

    SUBCASE("a corrupted output reruns its stage only") {
        testsupport::write_text(out / "links.jsonl", "{\"truncated\": ");
        Pipeline again(config, quiet(log));
        CHECK(again.mine().skipped);
        CHECK(again.ingest_issues().skipped);
        auto relinked = again.link();
        CHECK_FALSE(relinked.skipped);
        CHECK(read_file(out / "links.jsonl") == links);
        CHECK(again.dataset().skipped);
        CHECK(again.evaluate().skipped);
    }

    SUBCASE("resume off forces execution") {
        auto opts = quiet(log);
        opts.resume = false;
        Pipeline forced(config, opts);
        CHECK_FALSE(forced.link().skipped);
        CHECK(read_file(out / "links.jsonl") == links);
    }

    SUBCASE("a threshold change reruns dataset") {
        auto changed = config;
        changed.thresholds.overlap = 0.5;
        Pipeline again(changed, quiet(log));
        CHECK(again.link().skipped);
        CHECK_FALSE(again.dataset().skipped);
    }

    SUBCASE("report re-renders from report.json") {
        std::filesystem::remove(out / "report.md");
        CHECK(cmd_report(config, quiet(log)).exit_code == kExitOk);
        CHECK(read_file(out / "report.md") == report);
    }
    NetworkGuard::deny(false);
}

TEST_CASE("output override and determinism across directories") {
    TempDir tmp;
    std::ostringstream log;
    auto config = testsupport::e2e_config(tmp.path());
    auto a = quiet(log);
    a.out = tmp / "a";
    auto b = quiet(log);
    b.out = tmp / "b";
    b.concurrency = 1;
    REQUIRE(Pipeline(config, a).run_all().exit_code == kExitOk);
    REQUIRE(Pipeline(config, b).run_all().exit_code == kExitOk);
    for (const char* name : {"dataset.jsonl", "generated.jsonl", "report.md", "report.csv"}) {
        CHECK_MESSAGE(read_file(tmp / "a" / name) == read_file(tmp / "b" / name), name);
    }
    NetworkGuard::deny(false);
}
