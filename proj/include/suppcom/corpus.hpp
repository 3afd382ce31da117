#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "suppcom/comment.hpp"

namespace suppcom {

struct CommitInfo {
    std::string hash;  // 7-64 lowercase hex chars
    std::string message;
    std::int64_t author_time = 0;  // seconds since the epoch, UTC
    std::vector<std::string> changed_paths;

    friend bool operator==(const CommitInfo&, const CommitInfo&) = default;
};

bool is_valid_commit_hash(const std::string& hash);

struct MethodRecord {
    std::string id;  // repo:path:qualified_name@hash
    std::string repo;
    std::string file_path;
    std::string qualified_name;
    std::string signature;
    std::string body;
    int start_line = 0;
    int end_line = 0;
    int line_count = 0;
    CommitInfo commit;
    std::string language_tag;

    friend bool operator==(const MethodRecord&, const MethodRecord&) = default;
};

std::string make_method_id(const std::string& repo, const std::string& file_path,
                           const std::string& qualified_name, const std::string& commit_hash);

struct CommentBlock {
    std::string method_id;
    std::string raw_text;  // doc comment with markup stripped; empty when uncommented
    std::vector<CommentSentence> sentences;
    std::optional<double> mesia;

    friend bool operator==(const CommentBlock&, const CommentBlock&) = default;
};

// Sentences of a comment text: split_sentences minus punctuation-only pieces.
std::vector<CommentSentence> comment_sentences(const std::string& text);

// "2024-05-01T12:00:00Z" <-> epoch seconds.
std::string format_utc(std::int64_t epoch_seconds);
std::int64_t parse_utc(const std::string& iso);

void to_json(nlohmann::json& j, const CommitInfo& c);
void from_json(const nlohmann::json& j, CommitInfo& c);
void to_json(nlohmann::json& j, const MethodRecord& m);
void from_json(const nlohmann::json& j, MethodRecord& m);
void to_json(nlohmann::json& j, const CommentBlock& c);
void from_json(const nlohmann::json& j, CommentBlock& c);

}  // namespace suppcom
