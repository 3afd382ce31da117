#include "suppcom/issues.hpp"

#include "suppcom/error.hpp"
#include "suppcom/jsonl.hpp"
#include "suppcom/text.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace suppcom {

std::string_view to_string(SourceField f) {
    switch (f) {
        case SourceField::Title: return "title";
        case SourceField::Body: return "body";
        case SourceField::Discussion: return "discussion";
    }
    return "body";
}

namespace {

SourceField parse_source_field(const std::string& s) {
    if (s == "title") return SourceField::Title;
    if (s == "body") return SourceField::Body;
    if (s == "discussion") return SourceField::Discussion;
    throw ValidationError("unknown source_field: " + s);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_fence(std::string_view line) {
    line = trim(line);
    return line.rfind("```", 0) == 0 || line.rfind("{code", 0) == 0 || line.rfind("{noformat", 0) == 0;
}

std::string text_field(const nlohmann::json& j, const char* name) {
    if (!j.contains(name) || j.at(name).is_null()) return {};
    return j.at(name).get<std::string>();
}

class Segmenter {
public:
    Segmenter(std::string key, std::vector<IssueSentence>& out) : key_(std::move(key)), out_(out) {}

    void prose(std::string_view text, SourceField field) {
        for (auto& s : split_sentences(text)) {
            if (s.tokens.empty()) continue;
            push(std::move(s.text), field, false);
        }
    }

    // Prose with fenced blocks and stack traces split out line by line.
    void mixed(std::string_view text, SourceField field) {
        std::string pending;
        bool in_fence = false;
        auto flush = [&] {
            prose(pending, field);
            pending.clear();
        };
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos) nl = text.size();
            std::string_view line = text.substr(pos, nl - pos);
            pos = nl + 1;
            if (is_fence(line)) {
                flush();
                in_fence = !in_fence;
                continue;
            }
            if (in_fence || is_stack_trace_line(line)) {
                flush();
                std::string_view code = trim(line);
                if (!code.empty() && !tokenize_words(code).empty()) push(std::string(code), field, true);
                continue;
            }
            pending.append(line);
            pending.push_back('\n');
        }
        flush();
    }

private:
    void push(std::string text, SourceField field, bool code) {
        out_.push_back(IssueSentence{key_, out_.size(), std::move(text), field, code});
    }

    std::string key_;
    std::vector<IssueSentence>& out_;
};

}  // namespace

bool is_stack_trace_line(std::string_view line) {
    static const std::regex frame(R"(^\s*at\s+[\w$.<>/]+\(.*\)\s*$)");
    static const std::regex more(R"(^\s*\.\.\.\s+\d+\s+more\s*$)");
    static const std::regex caused(R"(^\s*(Caused by|Suppressed):\s+[\w$.]+.*$)");
    static const std::regex thrown(R"(^\s*(Exception in thread ".*"\s+)?([a-z_$][\w$]*\.)+[\w$]*(Exception|Error)(:.*)?$)");
    std::string s(line);
    return std::regex_match(s, frame) || std::regex_match(s, more) || std::regex_match(s, caused) ||
           std::regex_match(s, thrown);
}

IssueReport ingest_issue(const nlohmann::json& source) {
    if (!source.is_object()) throw ValidationError("issue source must be a JSON object");
    IssueReport report;
    if (!source.contains("key") || !source.at("key").is_string() ||
        source.at("key").get<std::string>().empty()) {
        throw ValidationError("issue source has no key");
    }
    report.key = source.at("key").get<std::string>();

    if (source.contains("fields")) {
        const auto& f = source.at("fields");
        report.title = text_field(f, "summary");
        report.body = text_field(f, "description");
        if (f.contains("comment") && f.at("comment").contains("comments")) {
            for (const auto& c : f.at("comment").at("comments")) {
                DiscussionEntry e;
                if (c.contains("author") && c.at("author").is_object()) {
                    e.author = c.at("author").value("displayName", c.at("author").value("name", ""));
                }
                e.timestamp = text_field(c, "created");
                e.text = text_field(c, "body");
                report.discussion.push_back(std::move(e));
            }
        }
    } else {
        report.title = text_field(source, "title");
        report.body = text_field(source, "body");
        if (source.contains("discussion")) {
            for (const auto& c : source.at("discussion")) {
                report.discussion.push_back(
                    {text_field(c, "author"), text_field(c, "timestamp"), text_field(c, "text")});
            }
        }
    }
    if (trim(report.title).empty()) throw ValidationError("issue " + report.key + " has no title");

    Segmenter seg(report.key, report.sentences);
    seg.prose(report.title, SourceField::Title);
    seg.mixed(report.body, SourceField::Body);
    for (const auto& e : report.discussion) seg.mixed(e.text, SourceField::Discussion);

    report.word_length = tokenize_words(report.title).size() + tokenize_words(report.body).size();
    for (const auto& e : report.discussion) report.word_length += tokenize_words(e.text).size();
    return report;
}

void to_json(nlohmann::json& j, const IssueReport& r) {
    nlohmann::json discussion = nlohmann::json::array();
    for (const auto& e : r.discussion) {
        discussion.push_back({{"author", e.author}, {"timestamp", e.timestamp}, {"text", e.text}});
    }
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& s : r.sentences) {
        sentences.push_back({{"issue_key", s.issue_key},
                             {"index", s.index},
                             {"text", s.text},
                             {"source_field", std::string(to_string(s.source_field))},
                             {"is_code_block", s.is_code_block}});
    }
    j = nlohmann::json{{"key", r.key},
                       {"title", r.title},
                       {"body", r.body},
                       {"discussion", std::move(discussion)},
                       {"sentences", std::move(sentences)},
                       {"word_length", r.word_length}};
}

void from_json(const nlohmann::json& j, IssueReport& r) {
    r = IssueReport{};
    j.at("key").get_to(r.key);
    j.at("title").get_to(r.title);
    j.at("body").get_to(r.body);
    for (const auto& e : j.at("discussion")) {
        r.discussion.push_back({e.at("author").get<std::string>(), e.at("timestamp").get<std::string>(),
                                e.at("text").get<std::string>()});
    }
    for (const auto& s : j.at("sentences")) {
        r.sentences.push_back({s.at("issue_key").get<std::string>(), s.at("index").get<std::size_t>(),
                               s.at("text").get<std::string>(),
                               parse_source_field(s.at("source_field").get<std::string>()),
                               s.at("is_code_block").get<bool>()});
    }
    j.at("word_length").get_to(r.word_length);
}

void IssueStore::add(IssueReport report) {
    std::string key = report.key;
    issues_.insert_or_assign(std::move(key), std::move(report));
}

const IssueReport* IssueStore::find(const std::string& key) const {
    auto it = issues_.find(key);
    return it == issues_.end() ? nullptr : &it->second;
}

std::vector<const IssueReport*> IssueStore::all() const {
    std::vector<const IssueReport*> out;
    for (const auto& [k, v] : issues_) out.push_back(&v);
    return out;
}

IssueStore IssueStore::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("issue directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    IssueStore store;
    for (const auto& f : files) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(f));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(f.string() + ": " + e.what());
        }
        store.add(ingest_issue(j));
    }
    return store;
}

IssueStore IssueStore::from_jsonl(const std::filesystem::path& path) {
    IssueStore store;
    for (auto& r : read_jsonl_as<IssueReport>(path)) store.add(std::move(r));
    return store;
}

void IssueStore::save_jsonl(const std::filesystem::path& path) const {
    std::vector<IssueReport> records;
    for (const auto& [k, v] : issues_) records.push_back(v);
    write_jsonl(path, records);
}

void to_json(nlohmann::json& j, const IssueLink& l) {
    j = nlohmann::json{{"method_id", l.method_id},
                       {"issue_key", l.issue_key},
                       {"provenance",
                        {{"commit", l.commit_hash}, {"span", {l.span_begin, l.span_end}}}},
                       {"resolved", l.resolved}};
}

void from_json(const nlohmann::json& j, IssueLink& l) {
    j.at("method_id").get_to(l.method_id);
    j.at("issue_key").get_to(l.issue_key);
    const auto& p = j.at("provenance");
    p.at("commit").get_to(l.commit_hash);
    l.span_begin = p.at("span").at(0).get<std::size_t>();
    l.span_end = p.at("span").at(1).get<std::size_t>();
    j.at("resolved").get_to(l.resolved);
}

LinkResult link_issues(std::span<const MethodRecord> methods, const IssueStore& issues,
                       std::string_view pattern) {
    LinkResult result;
    std::set<std::pair<std::string, std::string>> seen;
    for (const MethodRecord& m : methods) {
        ++result.stats.methods;
        auto matches = extract_issue_key_matches(m.commit.message, pattern);
        if (matches.empty()) {
            ++result.stats.methods_without_key;
            continue;
        }
        for (const auto& match : matches) {
            if (!seen.insert({m.id, match.key}).second) continue;
            IssueLink link{m.id, match.key, m.commit.hash, match.begin, match.end,
                           issues.find(match.key) != nullptr};
            if (!link.resolved) ++result.stats.unresolved_links;
            result.links.push_back(std::move(link));
        }
    }
    result.stats.links = result.links.size();
    return result;
}

}  // namespace suppcom
