#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "suppcom/corpus.hpp"
#include "suppcom/miner.hpp"

namespace suppcom {

enum class SourceField { Title, Body, Discussion };

std::string_view to_string(SourceField f);

struct DiscussionEntry {
    std::string author;
    std::string timestamp;
    std::string text;

    friend bool operator==(const DiscussionEntry&, const DiscussionEntry&) = default;
};

struct IssueSentence {
    std::string issue_key;
    std::size_t index = 0;  // dense 0..n-1 per issue
    std::string text;
    SourceField source_field = SourceField::Body;
    bool is_code_block = false;

    friend bool operator==(const IssueSentence&, const IssueSentence&) = default;
};

struct IssueReport {
    std::string key;
    std::string title;
    std::string body;
    std::vector<DiscussionEntry> discussion;
    std::vector<IssueSentence> sentences;
    std::size_t word_length = 0;  // word tokens over title, body and discussion

    friend bool operator==(const IssueReport&, const IssueReport&) = default;
};

// Builds an IssueReport from either a local record
//   {"key", "title", "body", "discussion": [{"author", "timestamp", "text"}]}
// or a Jira-style REST payload
//   {"key", "fields": {"summary", "description", "comment": {"comments": [...]}}}.
// Fenced blocks (``` or {code}/{noformat}) and stack-trace lines become one
// sentence per line with is_code_block set. Throws ValidationError without
// a key or title.
IssueReport ingest_issue(const nlohmann::json& source);

// True for lines shaped like Java stack-trace output.
bool is_stack_trace_line(std::string_view line);

void to_json(nlohmann::json& j, const IssueReport& r);
void from_json(const nlohmann::json& j, IssueReport& r);

class IssueStore {
public:
    void add(IssueReport report);
    const IssueReport* find(const std::string& key) const;
    std::size_t size() const { return issues_.size(); }
    // Sorted by key.
    std::vector<const IssueReport*> all() const;

    // Ingests every *.json file in `dir` (sorted by file name).
    static IssueStore from_directory(const std::filesystem::path& dir);
    static IssueStore from_jsonl(const std::filesystem::path& path);
    void save_jsonl(const std::filesystem::path& path) const;

private:
    std::map<std::string, IssueReport> issues_;
};

struct IssueLink {
    std::string method_id;
    std::string issue_key;
    std::string commit_hash;
    std::size_t span_begin = 0;  // key position in the commit message
    std::size_t span_end = 0;
    bool resolved = false;       // issue present in the store

    friend bool operator==(const IssueLink&, const IssueLink&) = default;
};

void to_json(nlohmann::json& j, const IssueLink& l);
void from_json(const nlohmann::json& j, IssueLink& l);

struct LinkStats {
    std::size_t methods = 0;
    std::size_t methods_without_key = 0;
    std::size_t links = 0;
    std::size_t unresolved_links = 0;
};

struct LinkResult {
    std::vector<IssueLink> links;
    LinkStats stats;
};

// One link per (method, key) for every key in the method's commit message.
LinkResult link_issues(std::span<const MethodRecord> methods, const IssueStore& issues,
                       std::string_view pattern = kDefaultIssueKeyPattern);

}  // namespace suppcom
