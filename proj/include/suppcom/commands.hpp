#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "suppcom/config.hpp"
#include "suppcom/corpus.hpp"
#include "suppcom/evaluation.hpp"
#include "suppcom/http.hpp"
#include "suppcom/llm.hpp"
#include "suppcom/similarity.hpp"
#include "suppcom/verification.hpp"

namespace suppcom {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

// A comment sentence whose words overlap a linked issue sentence.
struct SupplementaryMatch {
    std::size_t comment_index = 0;
    IssueSentenceRef issue;
    double ratio = 0.0;

    friend bool operator==(const SupplementaryMatch&, const SupplementaryMatch&) = default;
};

// One dataset.jsonl line: a method, its comment and the linked issues.
struct DatasetTriple {
    std::string method_id;
    std::vector<std::string> issue_keys;  // resolved links only
    CommentBlock comment;                 // mesia set
    std::vector<SupplementaryMatch> matches;

    // Comment sentences matched by an issue sentence: the manual reference.
    std::vector<std::string> reference_sentences() const;

    friend bool operator==(const DatasetTriple&, const DatasetTriple&) = default;
};

void to_json(nlohmann::json& j, const DatasetTriple& t);
void from_json(const nlohmann::json& j, DatasetTriple& t);

// One generated.jsonl line.
struct GenerationRecord {
    std::string method_id;
    std::vector<std::string> issue_keys;
    PipelineStatus status = PipelineStatus::Ok;
    std::string error;
    RetrievedEvidence evidence;
    GeneratedComment comment;  // verified
    Telemetry telemetry;       // latencies go to telemetry.jsonl

    std::size_t retained_count() const;

    friend bool operator==(const GenerationRecord& a, const GenerationRecord& b) {
        return a.method_id == b.method_id && a.issue_keys == b.issue_keys && a.status == b.status &&
               a.error == b.error && a.evidence == b.evidence && a.comment == b.comment;
    }
};

void to_json(nlohmann::json& j, const GenerationRecord& r);
void from_json(const nlohmann::json& j, GenerationRecord& r);

struct RunOptions {
    std::optional<std::filesystem::path> out;  // overrides config.output_dir
    bool offline = false;                      // deny all network access
    bool resume = true;
    std::optional<std::size_t> concurrency;
    std::shared_ptr<HttpTransport> transport;  // default: cpp-httplib
    std::ostream* log = nullptr;               // default: std::cerr
};

struct StageResult {
    int exit_code = kExitOk;
    bool skipped = false;  // outputs were current
    std::string summary;
};

struct RunCounters {
    std::size_t mined = 0;
    std::size_t linked = 0;     // methods with a resolved issue link
    std::size_t generated = 0;  // methods with at least one generated sentence
    std::size_t retained = 0;   // methods with at least one retained sentence
    std::size_t failed = 0;
};

// Stage runner over one output directory. Each stage reads the previous
// stages' files, skips itself when its recorded input and output hashes
// still match (unless resume is off), and updates manifest.json. Fatal
// problems throw; generate returns kExitFatal when every method failed and
// kExitPartial when the failure rate exceeds the configured ceiling.
class Pipeline {
public:
    Pipeline(PipelineConfig config, RunOptions options = {});

    StageResult mine();
    StageResult ingest_issues();
    StageResult link();
    StageResult dataset();
    StageResult generate();
    StageResult evaluate();
    StageResult report();
    // All stages in order; stops at the first nonzero exit code.
    StageResult run_all();

    const std::filesystem::path& out_dir() const { return out_; }
    const PipelineConfig& config() const { return config_; }
    RunCounters counters() const;

private:
    using Inputs = std::map<std::string, std::string>;

    std::filesystem::path file(std::string_view name) const { return out_ / std::string(name); }
    std::string input_hash(std::string_view name, std::string_view producer) const;
    bool stage_current(const std::string& stage, const Inputs& inputs) const;
    void record_stage(const std::string& stage, const Inputs& inputs, const std::vector<std::string>& outputs);
    StageResult finish(const std::string& stage, StageResult result, const std::string& started);
    std::shared_ptr<HttpTransport> transport();
    std::ostream& log() const;

    std::unique_ptr<ChatProvider> make_chat_provider();
    std::shared_ptr<EmbeddingProvider> make_embedding_provider();
    // GET /health on every HTTP scoring endpoint; throws unless "ok".
    void check_services();
    std::unique_ptr<SideScorer> make_side_scorer(std::shared_ptr<SimilarityEngine> engine);
    std::string chat_provider_id() const;
    std::string embedding_provider_id() const;
    std::string side_scorer_id() const;
    PromptTemplates templates() const;

    PipelineConfig config_;
    RunOptions options_;
    std::filesystem::path out_;
    std::shared_ptr<HttpTransport> transport_;
};

StageResult cmd_mine(const PipelineConfig& config, const RunOptions& options = {});
StageResult cmd_ingest_issues(const PipelineConfig& config, const RunOptions& options = {});
StageResult cmd_link(const PipelineConfig& config, const RunOptions& options = {});
StageResult cmd_dataset(const PipelineConfig& config, const RunOptions& options = {});
StageResult cmd_generate(const PipelineConfig& config, const RunOptions& options = {});
StageResult cmd_evaluate(const PipelineConfig& config, const RunOptions& options = {});
StageResult cmd_report(const PipelineConfig& config, const RunOptions& options = {});

}  // namespace suppcom
