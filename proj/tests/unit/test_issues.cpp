#include <doctest.h>

#include "suppcom/error.hpp"
#include "suppcom/issues.hpp"
#include "test_support.hpp"

using namespace suppcom;
using testsupport::fixture;

TEST_CASE("Jira export: word length and segmentation") {
    auto report = ingest_issue(testsupport::load_json(fixture("issues/HBASE-24957.json")));
    CHECK(report.key == "HBASE-24957");
    CHECK(report.word_length == testsupport::oracle()["issue_word_length"]["HBASE-24957"].get<std::size_t>());
    CHECK(report.word_length == 957);
    CHECK(report.discussion.size() == 4);
    REQUIRE_FALSE(report.sentences.empty());
    CHECK(report.sentences.front().source_field == SourceField::Title);
    bool has_code = false, has_discussion = false;
    for (std::size_t i = 0; i < report.sentences.size(); ++i) {
        const auto& s = report.sentences[i];
        CHECK(s.index == i);
        CHECK(s.issue_key == "HBASE-24957");
        has_code |= s.is_code_block;
        has_discussion |= s.source_field == SourceField::Discussion;
        CHECK(s.text.find("{code") == std::string::npos);
    }
    CHECK(has_code);
    CHECK(has_discussion);
}

TEST_CASE("local record format and stack traces") {
    nlohmann::json j = {
        {"key", "CAMEL-1"},
        {"title", "Consumer hangs"},
        {"body", "The consumer hangs on close.\njava.lang.IllegalStateException: closed\n"
                 "    at org.example.Bridge.close(Bridge.java:42)\n    ... 3 more\nIt never returns."},
        {"discussion", {{{"author", "a"}, {"timestamp", "2022-01-01T00:00:00Z"}, {"text", "Confirmed."}}}},
    };
    auto r = ingest_issue(j);
    std::vector<std::pair<std::string, bool>> got;
    for (const auto& s : r.sentences) got.emplace_back(s.text, s.is_code_block);
    CHECK(got == std::vector<std::pair<std::string, bool>>{
                     {"Consumer hangs", false},
                     {"The consumer hangs on close.", false},
                     {"java.lang.IllegalStateException: closed", true},
                     {"at org.example.Bridge.close(Bridge.java:42)", true},
                     {"... 3 more", true},
                     {"It never returns.", false},
                     {"Confirmed.", false},
                 });
    nlohmann::json round = r;
    CHECK(round.get<IssueReport>() == r);
}

TEST_CASE("missing key or title raises") {
    CHECK_THROWS_AS(ingest_issue({{"title", "t"}}), ValidationError);
    CHECK_THROWS_AS(ingest_issue({{"key", ""}, {"title", "t"}}), ValidationError);
    CHECK_THROWS_AS(ingest_issue({{"key", "A-1"}, {"body", "b"}}), ValidationError);
    CHECK_THROWS_AS(ingest_issue({{"key", "A-1"}, {"fields", {{"summary", "  "}}}}), ValidationError);
    CHECK_THROWS_AS(ingest_issue(nlohmann::json::array()), ValidationError);
}

TEST_CASE("linking keeps unresolved keys") {
    IssueStore store;
    store.add(ingest_issue({{"key", "A-1"}, {"title", "t"}}));
    MethodRecord m1, m2;
    m1.id = "m1";
    m1.commit.hash = "abcdef1";
    m1.commit.message = "A-1 and B-2";
    m2.id = "m2";
    m2.commit.message = "no key";
    std::vector<MethodRecord> methods{m1, m2};
    auto result = link_issues(methods, store);
    REQUIRE(result.links.size() == 2);
    CHECK(result.links[0].resolved);
    CHECK_FALSE(result.links[1].resolved);
    CHECK(result.links[1].span_begin == 8);
    CHECK(result.stats.methods_without_key == 1);
    CHECK(result.stats.unresolved_links == 1);
}
