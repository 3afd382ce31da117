#include "suppcom/corpus.hpp"

#include "suppcom/error.hpp"
#include "suppcom/text.hpp"

#include <cstdio>
#include <ctime>

namespace suppcom {

bool is_valid_commit_hash(const std::string& hash) {
    if (hash.size() < 7 || hash.size() > 64) return false;
    for (char c : hash) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

std::string make_method_id(const std::string& repo, const std::string& file_path,
                           const std::string& qualified_name, const std::string& commit_hash) {
    return repo + ":" + file_path + ":" + qualified_name + "@" + commit_hash;
}

std::vector<CommentSentence> comment_sentences(const std::string& text) {
    std::vector<CommentSentence> out;
    for (auto& s : split_sentences(text)) {
        if (s.tokens.empty()) continue;
        out.push_back(CommentSentence{std::move(s.text), {}, {}, {}, {}});
    }
    return out;
}

std::string format_utc(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::int64_t parse_utc(const std::string& iso) {
    std::tm tm{};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6) {
        throw ValidationError("bad UTC timestamp: " + iso);
    }
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    return static_cast<std::int64_t>(timegm(&tm));
}

void to_json(nlohmann::json& j, const CommitInfo& c) {
    j = nlohmann::json{{"hash", c.hash},
                       {"message", c.message},
                       {"author_time", format_utc(c.author_time)},
                       {"changed_paths", c.changed_paths}};
}

void from_json(const nlohmann::json& j, CommitInfo& c) {
    j.at("hash").get_to(c.hash);
    j.at("message").get_to(c.message);
    c.author_time = parse_utc(j.at("author_time").get<std::string>());
    j.at("changed_paths").get_to(c.changed_paths);
}

void to_json(nlohmann::json& j, const MethodRecord& m) {
    j = nlohmann::json{{"id", m.id},
                       {"repo", m.repo},
                       {"file_path", m.file_path},
                       {"qualified_name", m.qualified_name},
                       {"signature", m.signature},
                       {"body", m.body},
                       {"start_line", m.start_line},
                       {"end_line", m.end_line},
                       {"line_count", m.line_count},
                       {"commit", m.commit},
                       {"language_tag", m.language_tag}};
}

void from_json(const nlohmann::json& j, MethodRecord& m) {
    j.at("id").get_to(m.id);
    j.at("repo").get_to(m.repo);
    j.at("file_path").get_to(m.file_path);
    j.at("qualified_name").get_to(m.qualified_name);
    j.at("signature").get_to(m.signature);
    j.at("body").get_to(m.body);
    j.at("start_line").get_to(m.start_line);
    j.at("end_line").get_to(m.end_line);
    j.at("line_count").get_to(m.line_count);
    j.at("commit").get_to(m.commit);
    j.at("language_tag").get_to(m.language_tag);
}

void to_json(nlohmann::json& j, const CommentBlock& c) {
    j = nlohmann::json{{"method_id", c.method_id}, {"raw_text", c.raw_text}, {"sentences", c.sentences}};
    j["mesia_surrogate"] = c.mesia ? nlohmann::json(*c.mesia) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, CommentBlock& c) {
    j.at("method_id").get_to(c.method_id);
    j.at("raw_text").get_to(c.raw_text);
    j.at("sentences").get_to(c.sentences);
    c.mesia.reset();
    if (j.contains("mesia_surrogate") && !j.at("mesia_surrogate").is_null()) {
        c.mesia = j.at("mesia_surrogate").get<double>();
    }
}

}  // namespace suppcom
