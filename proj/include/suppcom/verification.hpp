#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "suppcom/comment.hpp"
#include "suppcom/corpus.hpp"
#include "suppcom/http.hpp"
#include "suppcom/issues.hpp"
#include "suppcom/llm.hpp"
#include "suppcom/similarity.hpp"
#include "suppcom/text.hpp"

namespace suppcom {

// Code/comment alignment score; only the sign is used (positive = aligned).
class SideScorer {
public:
    virtual ~SideScorer() = default;
    virtual std::string id() const = 0;
    virtual std::vector<double> score_batch(const std::string& method_source,
                                            std::span<const std::string> sentences) = 0;
    double score(const std::string& method_source, const std::string& sentence) {
        return score_batch(method_source, std::span<const std::string>(&sentence, 1)).front();
    }
};

// Offline stand-in: cosine between the sentence embedding and the
// embedding of the method's identifier fragments joined into one text.
class OfflineSideScorer final : public SideScorer {
public:
    explicit OfflineSideScorer(std::shared_ptr<SimilarityEngine> engine);
    std::string id() const override { return "offline-side:" + engine_->provider_id(); }
    std::vector<double> score_batch(const std::string& method_source,
                                    std::span<const std::string> sentences) override;

private:
    std::shared_ptr<SimilarityEngine> engine_;
};

// Scoring service client: POST {base}/side {"code", "sentences"} ->
// {"scores": [...], "model_id": "..."}.
class HttpSideScorer final : public SideScorer {
public:
    HttpSideScorer(HttpProviderConfig config, std::shared_ptr<HttpTransport> transport);
    std::string id() const override { return "http-side:" + config_.base_url; }
    std::vector<double> score_batch(const std::string& method_source,
                                    std::span<const std::string> sentences) override;

private:
    HttpProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
};

// Identifier mention first, then a strictly positive SIDE score. A null or
// failing scorer leaves identifiers as the only criterion (flagged).
RelevanceAnnotation is_code_relevant(const std::string& sentence, const std::string& method_source,
                                     const IdentifierSet& ids, SideScorer* scorer);

// Best similarity over `targets`; verifiable iff strictly above threshold.
// The best reference is recorded even when not verifiable.
VerifiabilityAnnotation is_issue_verifiable(const std::string& sentence,
                                            std::span<const IssueSentence> targets,
                                            SimilarityEngine& engine,
                                            double threshold = kDefaultSimilarityThreshold);

struct VerificationConfig {
    double similarity_threshold = kDefaultSimilarityThreshold;
    bool exclude_code_blocks = true;
};

// Issue sentences used as verification targets.
std::vector<IssueSentence> verification_targets(std::span<const IssueReport* const> issues,
                                                bool exclude_code_blocks);

// Annotates every sentence; retained = code_relevant && verifiable. Order
// and count are preserved, and existing annotations are recomputed.
GeneratedComment verify_comment(const GeneratedComment& comment, const MethodRecord& method,
                                std::span<const IssueReport* const> issues, SimilarityEngine& engine,
                                SideScorer* scorer, const VerificationConfig& config = {});

struct QuadrantStats {
    std::size_t relevant_verifiable = 0;
    std::size_t relevant_unverifiable = 0;
    std::size_t irrelevant_verifiable = 0;
    std::size_t irrelevant_unverifiable = 0;

    std::size_t total() const {
        return relevant_verifiable + relevant_unverifiable + irrelevant_verifiable + irrelevant_unverifiable;
    }
    std::size_t retained() const { return relevant_verifiable; }
    // Rounded to 4 decimals; all 0 when total() == 0.
    double proportion(std::size_t count) const;

    friend bool operator==(const QuadrantStats&, const QuadrantStats&) = default;
};

// Counts over annotated sentences; unannotated ones are skipped.
QuadrantStats quadrant_stats(std::span<const GeneratedComment> comments);

void to_json(nlohmann::json& j, const QuadrantStats& q);
void from_json(const nlohmann::json& j, QuadrantStats& q);

}  // namespace suppcom
