#include <doctest.h>

#include <random>

#include "suppcom/error.hpp"
#include "suppcom/identifiers.hpp"
#include "suppcom/verification.hpp"
#include "test_support.hpp"

using namespace suppcom;
using testsupport::fixture;
using testsupport::oracle;

namespace {

struct Fixture30 {
    MethodRecord method;
    IssueReport issue;
    GeneratedComment comment;
};

Fixture30 load_fixture30() {
    auto fx = testsupport::load_json(fixture("verification/fixture30.json"));
    Fixture30 f;
    f.method.id = "fixture:pause";
    f.method.body = fx["method"].get<std::string>();
    f.issue.key = fx["issue_key"].get<std::string>();
    f.issue.title = "fixture";
    for (const auto& s : fx["issue_sentences"]) {
        f.issue.sentences.push_back({f.issue.key, f.issue.sentences.size(), s["text"].get<std::string>(),
                                     SourceField::Body, s["is_code_block"].get<bool>()});
    }
    f.comment.method_id = f.method.id;
    for (const auto& g : fx["generated"]) f.comment.sentences.push_back({g.get<std::string>(), InfoType::Concept});
    return f;
}

// Embeddings looked up from a table; unknown texts get a fixed vector.
class TableProvider final : public EmbeddingProvider {
public:
    explicit TableProvider(std::map<std::string, std::vector<double>> table) : table_(std::move(table)) {}
    std::string id() const override { return "table"; }
    std::size_t dim() const override { return 2; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override {
        std::vector<EmbeddingVector> out;
        for (const auto& t : texts) {
            auto it = table_.find(t);
            out.push_back({it == table_.end() ? std::vector<double>{0.0, 1.0} : it->second, id()});
        }
        return out;
    }

private:
    std::map<std::string, std::vector<double>> table_;
};

class FixedSide final : public SideScorer {
public:
    explicit FixedSide(double value, bool fail = false) : value_(value), fail_(fail) {}
    std::string id() const override { return "fixed"; }
    std::vector<double> score_batch(const std::string&, std::span<const std::string> s) override {
        if (fail_) throw TransientError("side scorer down", true);
        return std::vector<double>(s.size(), value_);
    }

private:
    double value_;
    bool fail_;
};

}  // namespace

TEST_CASE("hand-listed identifiers match the extractor") {
    auto fx = testsupport::load_json(fixture("verification/fixture30.json"));
    IdentifierSet ids = extract_identifiers(fx["method"].get<std::string>());
    CHECK(ids.exact == fx["identifiers"]["exact"].get<std::set<std::string>>());
    CHECK(ids.subtokens == oracle()["verification"]["subtokens"].get<std::set<std::string>>());
}

TEST_CASE("30-sentence fixture matches the oracle") {
    Fixture30 f = load_fixture30();
    auto engine = std::make_shared<SimilarityEngine>(std::make_shared<OfflineHashProvider>());
    OfflineSideScorer side(engine);
    std::vector<const IssueReport*> issues{&f.issue};
    GeneratedComment verified = verify_comment(f.comment, f.method, issues, *engine, &side);
    const auto& rows = oracle()["verification"]["rows"];
    REQUIRE(verified.sentences.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        const auto& s = verified.sentences[i];
        const auto& e = rows[i];
        INFO("sentence " << i << ": " << s.text);
        CHECK(s.code_relevant->value == e["relevant"].get<bool>());
        CHECK(to_string(s.code_relevant->criterion) == e["criterion"].get<std::string>());
        CHECK(s.verifiable->value == e["verifiable"].get<bool>());
        CHECK(std::abs(s.verifiable->score - e["score"].get<double>()) < 1e-9);
        CHECK(s.verifiable->best->index == e["best_index"].get<std::size_t>());
        CHECK(*s.retained == e["retained"].get<bool>());
        if (!e["side"].is_null()) {
            CHECK(std::abs(side.score(f.method.body, s.text) - e["side"].get<double>()) < 1e-9);
        }
    }
    QuadrantStats q = quadrant_stats(std::vector<GeneratedComment>{verified});
    nlohmann::json expected = oracle()["verification"]["quadrants"];
    CHECK(q.relevant_verifiable == expected["relevant_verifiable"].get<std::size_t>());
    CHECK(q.relevant_unverifiable == expected["relevant_unverifiable"].get<std::size_t>());
    CHECK(q.irrelevant_verifiable == expected["irrelevant_verifiable"].get<std::size_t>());
    CHECK(q.irrelevant_unverifiable == expected["irrelevant_unverifiable"].get<std::size_t>());
    CHECK(q.total() == 30);
    CHECK(q.proportion(q.relevant_verifiable) == doctest::Approx(std::round(8.0 / 30 * 10000) / 10000));
}

TEST_CASE("code-block sentences are not verification targets") {
    Fixture30 f = load_fixture30();
    std::vector<const IssueReport*> issues{&f.issue};
    auto with = verification_targets(issues, true);
    auto without = verification_targets(issues, false);
    CHECK(with.size() + 2 == without.size());
    for (const auto& t : with) CHECK_FALSE(t.is_code_block);
}

TEST_CASE("boundary pins") {
    SUBCASE("similarity exactly 0.6 is not verifiable") {
        SimilarityEngine engine(std::make_shared<TableProvider>(std::map<std::string, std::vector<double>>{
            {"generated", {5.0, 0.0}}, {"issue", {3.0, 4.0}}}));
        REQUIRE(engine.sentence_similarity("generated", "issue") == 0.6);
        std::vector<IssueSentence> targets{{"A-1", 0, "issue", SourceField::Body, false}};
        auto v = is_issue_verifiable("generated", targets, engine);
        CHECK_FALSE(v.value);
        CHECK(v.score == 0.6);
        REQUIRE(v.best);
        CHECK(v.best->index == 0);
        CHECK(is_issue_verifiable("generated", targets, engine, 0.59).value);
    }
    SUBCASE("SIDE exactly 0 is not relevant") {
        IdentifierSet ids;
        ids.exact = {"pause"};
        FixedSide zero(0.0), positive(1e-12);
        auto r = is_code_relevant("The broker stops dispatching.", "void pause() {}", ids, &zero);
        CHECK_FALSE(r.value);
        CHECK(r.criterion == RelevanceCriterion::None);
        CHECK_FALSE(r.side_unavailable);
        CHECK(is_code_relevant("The broker stops dispatching.", "void pause() {}", ids, &positive).criterion ==
              RelevanceCriterion::Side);
        CHECK(is_code_relevant("Call pause first.", "void pause() {}", ids, &zero).criterion ==
              RelevanceCriterion::Identifier);
    }
    SUBCASE("failing or missing scorer leaves identifiers only") {
        IdentifierSet ids;
        FixedSide down(1.0, true);
        auto r = is_code_relevant("Anything.", "void f() {}", ids, &down);
        CHECK_FALSE(r.value);
        CHECK(r.side_unavailable);
        CHECK(is_code_relevant("Anything.", "void f() {}", ids, nullptr).side_unavailable);
    }
}

TEST_CASE("retained iff relevant and verifiable; verification is idempotent") {
    std::mt19937 rng(99);
    const std::vector<std::string> words{"pause", "consumer", "broker", "queue", "route", "the", "flush",
                                         "pending", "messages", "drain", "paused", "request"};
    auto text = [&] {
        std::string s;
        int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) s += words[rng() % words.size()] + " ";
        return s + ".";
    };
    auto engine = std::make_shared<SimilarityEngine>(std::make_shared<OfflineHashProvider>());
    for (int round = 0; round < 200; ++round) {
        MethodRecord method;
        method.body = "void drainQueue(int pending) { consumer.pause(); }";
        IssueReport issue;
        issue.key = "R-" + std::to_string(round);
        for (int k = 0; k < 4; ++k) issue.sentences.push_back({issue.key, std::size_t(k), text(), SourceField::Body, k == 3});
        GeneratedComment comment;
        for (int k = 0; k < 5; ++k) {
            CommentSentence s{text(), InfoType::Implication};
            if (rng() % 2) {
                s.retained = true;  // stale annotations must be recomputed
                s.code_relevant = RelevanceAnnotation{true, RelevanceCriterion::Side, false};
            }
            comment.sentences.push_back(s);
        }
        std::vector<const IssueReport*> issues{&issue};
        double side_value = (static_cast<int>(rng() % 3) - 1) * 0.5;
        FixedSide side(side_value);
        VerificationConfig cfg;
        cfg.similarity_threshold = 0.3 + 0.1 * (rng() % 5);
        GeneratedComment once = verify_comment(comment, method, issues, *engine, &side, cfg);
        GeneratedComment twice = verify_comment(once, method, issues, *engine, &side, cfg);
        CHECK(once == twice);
        REQUIRE(once.sentences.size() == comment.sentences.size());
        for (std::size_t k = 0; k < once.sentences.size(); ++k) {
            const auto& s = once.sentences[k];
            CHECK(s.text == comment.sentences[k].text);
            CHECK(*s.retained == (s.code_relevant->value && s.verifiable->value));
        }
    }
}

TEST_CASE("quadrant json round-trip and empty proportions") {
    QuadrantStats q{1, 2, 3, 4};
    nlohmann::json j = q;
    CHECK(j.get<QuadrantStats>() == q);
    CHECK(QuadrantStats{}.proportion(0) == 0.0);
}
