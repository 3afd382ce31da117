#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "suppcom/http.hpp"
#include "suppcom/miner.hpp"
#include "suppcom/text.hpp"

namespace suppcom {

struct RepoConfig {
    std::filesystem::path path;
    std::string name;  // defaults to the directory name
};

struct TrackerSource {
    std::string base_url;
    std::string url_template = "{base}/rest/api/2/issue/{key}";
    std::string token_env;
    std::filesystem::path cache_dir;  // defaults to <output_dir>/cache/tracker
};

struct Thresholds {
    double overlap = 0.7;
    double mesia = 3.0;
    double similarity = 0.6;
};

struct ChatProviderConfig {
    std::string kind = "mock";       // mock | openai
    std::filesystem::path fixtures;  // mock
    std::string endpoint;            // openai
    std::string model;
    std::string api_key_env;
    double temperature = 0.0;
    int max_tokens = 0;
};

struct EmbeddingProviderConfig {
    std::string kind = "offline";  // offline | http
    std::size_t dim = 512;
    std::size_t hashes = 4;
    std::string base_url;
    std::string token_env;
};

struct SideScorerConfig {
    std::string kind = "offline";  // offline | http | none
    std::string base_url;
    std::string token_env;
};

struct PipelineConfig {
    std::filesystem::path config_dir;  // base for relative paths
    std::vector<RepoConfig> repos;
    std::vector<std::string> extensions{".java"};
    std::string revision_range;
    bool include_merges = false;
    bool include_uncommented = false;
    int min_method_lines = 3;
    std::string issue_key_pattern{kDefaultIssueKeyPattern};
    std::optional<std::filesystem::path> issue_directory;
    std::optional<TrackerSource> tracker;
    Thresholds thresholds;
    OverlapMode overlap_mode = OverlapMode::Set;
    ChatProviderConfig chat;
    EmbeddingProviderConfig embedding;
    SideScorerConfig side;
    RetryPolicy retry;
    std::size_t concurrency = 1;
    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> prompts_dir;  // builtin templates when absent
    std::size_t max_issue_words = 2000;
    double failure_rate_ceiling = 1.0;
    bool exclude_code_blocks = true;
    bool application_mode = false;
};

// Strict parse: unknown keys, wrong types, out-of-range thresholds and
// anything but exactly one issue source raise ValidationError. Relative
// paths resolve against `base_dir`.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// Snapshot with resolved paths; input to parse_config again.
nlohmann::json config_to_json(const PipelineConfig& config);

}  // namespace suppcom
