#include <doctest.h>

#include "suppcom/error.hpp"
#include "suppcom/text.hpp"
#include "test_support.hpp"

using namespace suppcom;
using testsupport::fixture;
using testsupport::oracle;

namespace {

std::vector<Sentence> as_sentences(const std::vector<std::string>& texts) {
    std::vector<Sentence> out;
    for (const auto& t : texts) out.push_back(Sentence{t, tokenize_words(t), {}});
    return out;
}

}  // namespace

TEST_CASE("tokenize_words lowercases alphanumeric runs") {
    CHECK(tokenize_words("Call flush() before HTTP_503, e.g. twice!") ==
          std::vector<std::string>{"call", "flush", "before", "http", "503", "e", "g", "twice"});
    CHECK(tokenize_words("  ...  ").empty());
}

TEST_CASE("paragraph with a URL and an abbreviation splits into five sentences") {
    auto text = suppcom::read_file(fixture("text/paragraph5.txt"));
    auto sentences = split_sentences(text, "doc");
    REQUIRE(sentences.size() == 5);
    CHECK(sentences[1].text == "See https://hbase.apache.org/book.html#config.files for the defaults.");
    CHECK(sentences[2].text.find("e.g. the whole retry loop") != std::string::npos);
    CHECK(sentences[4].text == "Callers should therefore size the budget generously!");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        CHECK(sentences[i].origin.document_id == "doc");
        CHECK(sentences[i].origin.index == i);
    }
}

TEST_CASE("sentence splitting keeps dotted identifiers, bullets and blank lines") {
    auto s = split_sentences("Use Consumer.pause() in 2.10.1 first. Then resume.\n\n- one item\n- Another item");
    REQUIRE(s.size() == 4);
    CHECK(s[0].text == "Use Consumer.pause() in 2.10.1 first.");
    CHECK(s[1].text == "Then resume.");
    CHECK(s[2].text == "- one item");
    CHECK(s[3].text == "- Another item");
    CHECK(split_sentences("lower case after a stop. continues here").size() == 1);
    CHECK(split_sentences("   \n\n  ").empty());
}

TEST_CASE("word_overlap_ratio hand checks") {
    auto c = tokenize_words("alpha beta gamma delta epsilon");
    auto i = tokenize_words("alpha beta gamma delta");
    CHECK(word_overlap_ratio(c, i) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(word_overlap_ratio({}, i) == 0.0);
    auto rep = tokenize_words("the the queue");
    auto one = tokenize_words("the queue");
    CHECK(word_overlap_ratio(rep, one, OverlapMode::Set) == 1.0);
    CHECK(word_overlap_ratio(rep, one, OverlapMode::Multiset) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("overlap fixture matches the independent oracle") {
    auto fx = testsupport::load_json(fixture("text/overlap_fixture.json"));
    auto comments = as_sentences(fx["comments"].get<std::vector<std::string>>());
    auto issues = as_sentences(fx["issues"].get<std::vector<std::string>>());
    const auto& expected = oracle()["overlap"];
    for (std::size_t c = 0; c < comments.size(); ++c) {
        for (std::size_t k = 0; k < issues.size(); ++k) {
            CHECK(word_overlap_ratio(comments[c], issues[k]) ==
                  doctest::Approx(expected["rows"][c]["ratios"][k].get<double>()).epsilon(1e-12));
        }
    }
    auto kept = overlap_candidates(comments, issues, fx["threshold"].get<double>());
    std::vector<std::size_t> kept_idx;
    for (const auto& m : kept) {
        kept_idx.push_back(m.comment_index);
        CHECK(m.issue_index == expected["rows"][m.comment_index]["best_issue"].get<std::size_t>());
        CHECK(m.ratio == doctest::Approx(expected["rows"][m.comment_index]["best_ratio"].get<double>()));
    }
    CHECK(kept_idx == expected["kept"].get<std::vector<std::size_t>>());
}

TEST_CASE("overlap exactly at the threshold is not kept") {
    auto c = as_sentences({"one two three four five six seven eight nine ten"});
    auto i = as_sentences({"one two three four five six seven x y z"});
    CHECK(word_overlap_ratio(c[0], i[0]) == 0.7);
    CHECK(overlap_candidates(c, i, 0.7).empty());
    CHECK(overlap_candidates(c, i, 0.69).size() == 1);
    CHECK_THROWS_AS(overlap_candidates(c, i, 0.0), ValidationError);
    CHECK_THROWS_AS(overlap_candidates(c, i, 1.5), ValidationError);
}

TEST_CASE("split_identifier") {
    using V = std::vector<std::string>;
    CHECK(split_identifier("HTTPServerConfig") == V{"http", "server", "config"});
    CHECK(split_identifier("getPendingCount") == V{"get", "pending", "count"});
    CHECK(split_identifier("max_retry_count") == V{"max", "retry", "count"});
    CHECK(split_identifier("base64Encode") == V{"base", "64", "encode"});
    CHECK(split_identifier("x") == V{});
    CHECK(split_identifier("a_b_cd") == V{"cd"});
}

TEST_CASE("mentions_code_element") {
    IdentifierSet ids;
    ids.exact = {"drainQueue", "pause"};
    CHECK(mentions_code_element("Call pause() first.", ids));
    CHECK(mentions_code_element("When drainQueue is set, nothing is lost.", ids));
    CHECK_FALSE(mentions_code_element("Pausing is cheap.", ids));
    CHECK_FALSE(mentions_code_element("The drainQueueSize flag.", ids));
    CHECK(mentions_code_element("The queue is drained; drain the queue.", ids));
    CHECK_FALSE(mentions_code_element("The queue is short.", ids));
}
