#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "suppcom/corpus.hpp"

namespace suppcom {

// Uppercase project key starting with a letter, a dash, digits, on word
// boundaries: CAMEL-17551, HBASE-9.
inline constexpr std::string_view kDefaultIssueKeyPattern = R"(\b[A-Z][A-Z0-9]*-[0-9]+\b)";

struct IssueKeyMatch {
    std::string key;
    std::size_t begin = 0;  // character span in the message
    std::size_t end = 0;
};

// First occurrence of every distinct key, in message order.
std::vector<IssueKeyMatch> extract_issue_key_matches(
    std::string_view commit_message, std::string_view pattern = kDefaultIssueKeyPattern);

std::vector<std::string> extract_issue_keys(std::string_view commit_message,
                                            std::string_view pattern = kDefaultIssueKeyPattern);

struct MinerOptions {
    std::string repo_name;  // defaults to the repository directory name
    std::vector<std::string> extensions{".java"};
    std::string revision_range;  // empty: full history of HEAD
    bool include_merges = false;
    bool include_uncommented = false;
    int min_method_lines = 3;
    std::size_t concurrency = 1;
};

struct MinedPair {
    MethodRecord method;
    CommentBlock comment;  // empty sentences for uncommented records
};

struct MinerStats {
    std::size_t commits_scanned = 0;
    std::size_t files_parsed = 0;
    std::size_t files_skipped = 0;  // parse warnings; records from them are dropped
    std::size_t duplicate_ids = 0;
};

struct MiningResult {
    std::vector<MinedPair> pairs;
    MinerStats stats;
};

// Method/doc-comment pairs where one commit touched both the comment block
// and the method. Commits are visited oldest first, so output order is
// deterministic. Throws RepositoryError for unreadable repositories.
MiningResult mine_method_comment_pairs(const std::filesystem::path& repo_path,
                                       const MinerOptions& options);

}  // namespace suppcom
