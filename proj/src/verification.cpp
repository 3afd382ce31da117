#include "suppcom/verification.hpp"

#include "suppcom/error.hpp"
#include "suppcom/identifiers.hpp"

#include <cmath>
#include <cstdlib>

namespace suppcom {

OfflineSideScorer::OfflineSideScorer(std::shared_ptr<SimilarityEngine> engine) : engine_(std::move(engine)) {
    if (!engine_) throw std::invalid_argument("OfflineSideScorer requires an engine");
}

std::vector<double> OfflineSideScorer::score_batch(const std::string& method_source,
                                                   std::span<const std::string> sentences) {
    IdentifierSet ids = extract_identifiers(method_source);
    std::string code_text;
    for (const auto& s : ids.subtokens) {
        if (!code_text.empty()) code_text.push_back(' ');
        code_text += s;
    }
    std::vector<double> scores;
    if (code_text.empty()) return std::vector<double>(sentences.size(), 0.0);
    EmbeddingVector code = engine_->embed(code_text);
    for (const auto& s : sentences) {
        scores.push_back(s.find_first_not_of(" \t\r\n") == std::string::npos
                             ? 0.0
                             : cosine_similarity(engine_->embed(s), code));
    }
    return scores;
}

HttpSideScorer::HttpSideScorer(HttpProviderConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::vector<double> HttpSideScorer::score_batch(const std::string& method_source,
                                                std::span<const std::string> sentences) {
    nlohmann::json req{{"code", method_source},
                       {"sentences", std::vector<std::string>(sentences.begin(), sentences.end())}};
    HttpHeaders headers;
    if (!config_.token_env.empty()) {
        if (const char* tok = std::getenv(config_.token_env.c_str()); tok && *tok) headers["X-Auth-Token"] = tok;
    }
    HttpResponse res = with_retries(
        config_.retry,
        [&] { return transport_->post(config_.base_url + "/side", req.dump(), "application/json", headers); },
        "side");
    if (res.status != 200) throw Error("side scorer returned HTTP " + std::to_string(res.status));
    auto scores = nlohmann::json::parse(res.body).at("scores").get<std::vector<double>>();
    if (scores.size() != sentences.size()) throw Error("side scorer returned a short batch");
    return scores;
}

RelevanceAnnotation is_code_relevant(const std::string& sentence, const std::string& method_source,
                                     const IdentifierSet& ids, SideScorer* scorer) {
    if (mentions_code_element(sentence, ids)) return {true, RelevanceCriterion::Identifier, false};
    if (!scorer) return {false, RelevanceCriterion::None, true};
    try {
        if (scorer->score(method_source, sentence) > 0.0) return {true, RelevanceCriterion::Side, false};
    } catch (const NetworkDeniedError&) {
        throw;
    } catch (const std::exception&) {
        return {false, RelevanceCriterion::None, true};
    }
    return {false, RelevanceCriterion::None, false};
}

VerifiabilityAnnotation is_issue_verifiable(const std::string& sentence, std::span<const IssueSentence> targets,
                                            SimilarityEngine& engine, double threshold) {
    VerifiabilityAnnotation out;
    if (targets.empty()) return out;
    EmbeddingVector v = engine.embed(sentence);
    bool first = true;
    for (const auto& t : targets) {
        double sim = cosine_similarity(v, engine.embed(t.text));
        if (first || sim > out.score) {
            out.score = sim;
            out.best = IssueSentenceRef{t.issue_key, t.index};
            first = false;
        }
    }
    out.value = exceeds_threshold(out.score, threshold);
    return out;
}

std::vector<IssueSentence> verification_targets(std::span<const IssueReport* const> issues,
                                                bool exclude_code_blocks) {
    std::vector<IssueSentence> targets;
    for (const IssueReport* issue : issues) {
        if (!issue) continue;
        for (const auto& s : issue->sentences) {
            if (exclude_code_blocks && s.is_code_block) continue;
            targets.push_back(s);
        }
    }
    return targets;
}

GeneratedComment verify_comment(const GeneratedComment& comment, const MethodRecord& method,
                                std::span<const IssueReport* const> issues, SimilarityEngine& engine,
                                SideScorer* scorer, const VerificationConfig& config) {
    GeneratedComment out = comment;
    IdentifierSet ids = extract_identifiers(method);
    std::vector<IssueSentence> targets = verification_targets(issues, config.exclude_code_blocks);
    for (CommentSentence& s : out.sentences) {
        s.code_relevant = is_code_relevant(s.text, method.body, ids, scorer);
        s.verifiable = is_issue_verifiable(s.text, targets, engine, config.similarity_threshold);
        s.retained = s.code_relevant->value && s.verifiable->value;
    }
    return out;
}

double QuadrantStats::proportion(std::size_t count) const {
    if (total() == 0) return 0.0;
    return std::round(static_cast<double>(count) / static_cast<double>(total()) * 10000.0) / 10000.0;
}

QuadrantStats quadrant_stats(std::span<const GeneratedComment> comments) {
    QuadrantStats q;
    for (const auto& c : comments) {
        for (const auto& s : c.sentences) {
            if (!s.code_relevant || !s.verifiable) continue;
            bool r = s.code_relevant->value;
            bool v = s.verifiable->value;
            if (r && v) ++q.relevant_verifiable;
            else if (r) ++q.relevant_unverifiable;
            else if (v) ++q.irrelevant_verifiable;
            else ++q.irrelevant_unverifiable;
        }
    }
    return q;
}

void to_json(nlohmann::json& j, const QuadrantStats& q) {
    j = nlohmann::json{
        {"counts",
         {{"relevant_verifiable", q.relevant_verifiable},
          {"relevant_unverifiable", q.relevant_unverifiable},
          {"irrelevant_verifiable", q.irrelevant_verifiable},
          {"irrelevant_unverifiable", q.irrelevant_unverifiable}}},
        {"proportions",
         {{"relevant_verifiable", q.proportion(q.relevant_verifiable)},
          {"relevant_unverifiable", q.proportion(q.relevant_unverifiable)},
          {"irrelevant_verifiable", q.proportion(q.irrelevant_verifiable)},
          {"irrelevant_unverifiable", q.proportion(q.irrelevant_unverifiable)}}},
        {"total", q.total()}};
}

void from_json(const nlohmann::json& j, QuadrantStats& q) {
    const auto& c = j.at("counts");
    c.at("relevant_verifiable").get_to(q.relevant_verifiable);
    c.at("relevant_unverifiable").get_to(q.relevant_unverifiable);
    c.at("irrelevant_verifiable").get_to(q.irrelevant_verifiable);
    c.at("irrelevant_unverifiable").get_to(q.irrelevant_unverifiable);
}

}  // namespace suppcom
