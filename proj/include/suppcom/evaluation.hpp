#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "suppcom/comment.hpp"
#include "suppcom/similarity.hpp"
#include "suppcom/verification.hpp"

namespace suppcom {

enum class CoverageCategory { Full, Partial, None };

std::string_view to_string(CoverageCategory c);
CoverageCategory parse_coverage_category(std::string_view s);

// Full: every flag set; Partial: some; None: no flag set (or no flags).
CoverageCategory categorize(std::span<const bool> covered);

struct ManualSentenceCoverage {
    std::string text;
    bool covered = false;
    std::optional<std::size_t> best_generated;  // index into the generated list
    double score = 0.0;
};

struct MethodCoverage {
    CoverageCategory category = CoverageCategory::None;
    std::vector<ManualSentenceCoverage> manual;
};

// A manual sentence is covered iff some generated sentence has similarity
// strictly above the threshold. Throws ValidationError on empty `manual`.
MethodCoverage coverage_evaluate(std::span<const std::string> generated, std::span<const std::string> manual,
                                 SimilarityEngine& engine, double threshold = kDefaultSimilarityThreshold);

struct CoverageAggregate {
    std::size_t n_full = 0;
    std::size_t n_partial = 0;
    std::size_t n_none = 0;
    std::size_t n_total = 0;
    double ratio = 0.0;  // (n_full + n_partial) / n_total, full precision

    friend bool operator==(const CoverageAggregate&, const CoverageAggregate&) = default;
};

// Throws ValidationError when n_total == 0 or full + partial > n_total.
CoverageAggregate aggregate_coverage(std::size_t n_full, std::size_t n_partial, std::size_t n_total);
// Methods missing from `categories` count as None.
CoverageAggregate aggregate_coverage(std::span<const CoverageCategory> categories, std::size_t n_total);

// "72.2%": ratio as a percentage with one decimal.
std::string format_percent(double ratio);

struct ScoredSentence {
    double score = 0.0;
    std::optional<InfoType> type;
};

struct TypeSummary {
    std::size_t count = 0;
    double mean = 0.0;
    friend bool operator==(const TypeSummary&, const TypeSummary&) = default;
};

struct SupplementarityStats {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::map<int, std::size_t> histogram;  // bin b holds scores in [b, b + 1) bits
    std::map<InfoType, TypeSummary> per_type;
    bool empty = true;

    friend bool operator==(const SupplementarityStats&, const SupplementarityStats&) = default;
};

SupplementarityStats supplementarity_stats(std::span<const ScoredSentence> sentences);

struct MethodEvaluation {
    std::string method_id;
    std::string status;  // pipeline status
    std::size_t generated = 0;
    std::size_t retained = 0;
    std::size_t manual = 0;
    std::optional<CoverageCategory> coverage_before;
    std::optional<CoverageCategory> coverage_after;
    std::optional<double> mesia_mean;  // over retained sentences

    friend bool operator==(const MethodEvaluation&, const MethodEvaluation&) = default;
};

struct VolumeStats {
    double sentences_avg = 0.0;       // per method
    double sentence_length_avg = 0.0; // word tokens per sentence

    friend bool operator==(const VolumeStats&, const VolumeStats&) = default;
};

// Sentence volume over `methods` sentence lists (methods with zero
// sentences count toward the per-method average).
VolumeStats volume_stats(std::span<const std::vector<std::string>> methods);

struct RunMetadata {
    std::string prompt_hash;
    std::string chat_provider;
    std::string embedding_provider;
    std::string side_scorer;
    double similarity_threshold = kDefaultSimilarityThreshold;
    double overlap_threshold = 0.7;
    double mesia_threshold = 3.0;
    std::string tool_version;

    friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

struct EvaluationReport {
    std::optional<CoverageAggregate> coverage_before;  // absent without manual comments
    std::optional<CoverageAggregate> coverage_after;
    VolumeStats volume_before;
    VolumeStats volume_after;  // retained sentences only
    QuadrantStats quadrants;
    SupplementarityStats mesia;
    std::size_t methods_attempted = 0;
    std::size_t methods_with_retained = 0;
    double generation_rate = 0.0;
    RunMetadata run;
    std::vector<MethodEvaluation> methods;

    friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

void to_json(nlohmann::json& j, const CoverageAggregate& c);
void from_json(const nlohmann::json& j, CoverageAggregate& c);
void to_json(nlohmann::json& j, const SupplementarityStats& s);
void from_json(const nlohmann::json& j, SupplementarityStats& s);
void to_json(nlohmann::json& j, const EvaluationReport& r);
void from_json(const nlohmann::json& j, EvaluationReport& r);

std::string render_markdown(const EvaluationReport& report);
std::string render_csv(const EvaluationReport& report);

enum class ReportFormat { Json, Csv, Markdown };

// Writes report.json / report.csv / report.md into `out_dir`.
void emit_report(const EvaluationReport& report, const std::filesystem::path& out_dir,
                 const std::set<ReportFormat>& formats = {ReportFormat::Json, ReportFormat::Csv,
                                                          ReportFormat::Markdown});

}  // namespace suppcom
