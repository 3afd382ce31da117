#include "suppcom/text.hpp"

#include "suppcom/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace suppcom {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_word_char(char c) { return is_alnum(c) || c == '_' || c == '$'; }
char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool is_closing(char c) {
    return c == ')' || c == ']' || c == '}' || c == '"' || c == '\'';
}

// "- ", "* ", "+ ", "• ", "12. ", "3) ", "@param".
bool starts_with_bullet(std::string_view line) {
    if (line.empty()) return false;
    if (line.size() >= 2 && (line[0] == '-' || line[0] == '*' || line[0] == '+') &&
        is_space(line[1])) {
        return true;
    }
    if (line.substr(0, 3) == "\xE2\x80\xA2") return true;
    if (line[0] == '@' && line.size() > 1 && std::isalpha(static_cast<unsigned char>(line[1]))) {
        return true;
    }
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    return i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') &&
           is_space(line[i + 1]);
}

// Paragraph/bullet blocks with wrapped lines joined by a single space.
std::vector<std::string> split_blocks(std::string_view text) {
    std::vector<std::string> blocks;
    std::string current;
    bool open = false;
    auto close = [&] {
        if (open && !trim(current).empty()) blocks.push_back(current);
        current.clear();
        open = false;
    };
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = trim(text.substr(pos, nl - pos));
        if (line.empty()) {
            close();
        } else if (starts_with_bullet(line) || !open) {
            close();
            current.assign(line);
            open = true;
        } else {
            current.push_back(' ');
            current.append(line);
        }
        pos = nl + 1;
    }
    close();
    return blocks;
}

bool is_protected_word(std::string_view block, std::size_t dot) {
    std::size_t start = dot;
    while (start > 0 && !is_space(block[start - 1])) --start;
    std::string word;
    for (std::size_t i = start; i <= dot; ++i) {
        char c = block[i];
        if (word.empty() && (c == '(' || c == '"' || c == '\'' || c == '[')) continue;
        word.push_back(to_lower(c));
    }
    return protected_abbreviations().count(word) > 0;
}

}  // namespace

const std::set<std::string>& protected_abbreviations() {
    static const std::set<std::string> abbreviations = {
        "e.g.", "i.e.", "etc.", "vs.",  "cf.",  "approx.", "incl.", "resp.", "al.",
        "fig.", "no.",  "mr.",  "mrs.", "dr.",  "jr.",     "sr.",   "st.",   "viz.",
    };
    return abbreviations;
}

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_alnum(c)) {
            current.push_back(to_lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<Sentence> split_sentences(std::string_view text, std::string_view document_id) {
    std::vector<Sentence> out;
    auto emit = [&](std::string_view piece) {
        piece = trim(piece);
        if (piece.empty()) return;
        Sentence s;
        s.text.assign(piece);
        s.tokens = tokenize_words(s.text);
        s.origin = {std::string(document_id), out.size()};
        out.push_back(std::move(s));
    };

    for (const std::string& block : split_blocks(text)) {
        std::string_view b = block;
        std::size_t start = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            char c = b[i];
            if (c != '.' && c != '!' && c != '?' && c != ';') continue;
            std::size_t j = i + 1;
            while (j < b.size() && is_closing(b[j])) ++j;
            bool boundary = false;
            if (j == b.size()) {
                boundary = true;
            } else if (is_space(b[j])) {
                std::size_t k = j;
                while (k < b.size() && is_space(b[k])) ++k;
                boundary = k == b.size() || is_upper(b[k]);
            }
            if (boundary && c == '.' && is_protected_word(b, i)) boundary = false;
            if (!boundary) continue;
            emit(b.substr(start, j - start));
            start = j;
            i = j - 1;
        }
        emit(b.substr(start));
    }
    return out;
}

double word_overlap_ratio(std::span<const std::string> comment_tokens,
                          std::span<const std::string> issue_tokens, OverlapMode mode) {
    if (comment_tokens.empty()) return 0.0;
    if (mode == OverlapMode::Set) {
        std::unordered_set<std::string_view> comment(comment_tokens.begin(), comment_tokens.end());
        std::unordered_set<std::string_view> issue(issue_tokens.begin(), issue_tokens.end());
        std::size_t shared = 0;
        for (std::string_view t : comment) shared += issue.count(t);
        return static_cast<double>(shared) / static_cast<double>(comment.size());
    }
    std::unordered_map<std::string_view, std::size_t> issue_counts;
    for (const auto& t : issue_tokens) ++issue_counts[t];
    std::unordered_map<std::string_view, std::size_t> comment_counts;
    for (const auto& t : comment_tokens) ++comment_counts[t];
    std::size_t shared = 0;
    for (const auto& [t, n] : comment_counts) {
        auto it = issue_counts.find(t);
        if (it != issue_counts.end()) shared += std::min(n, it->second);
    }
    return static_cast<double>(shared) / static_cast<double>(comment_tokens.size());
}

std::vector<OverlapMatch> overlap_candidates(std::span<const Sentence> comment_sentences,
                                             std::span<const Sentence> issue_sentences,
                                             double threshold, OverlapMode mode) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ValidationError("overlap threshold must be in (0, 1]");
    }
    std::vector<OverlapMatch> kept;
    for (std::size_t c = 0; c < comment_sentences.size(); ++c) {
        OverlapMatch best{c, 0, -1.0};
        for (std::size_t i = 0; i < issue_sentences.size(); ++i) {
            double r = word_overlap_ratio(comment_sentences[c], issue_sentences[i], mode);
            if (r > best.ratio) best = {c, i, r};
        }
        if (best.ratio > threshold) kept.push_back(best);
    }
    return kept;
}

std::vector<std::string> split_identifier(std::string_view identifier) {
    std::vector<std::string> parts;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) parts.push_back(current);
        current.clear();
    };
    for (std::size_t i = 0; i < identifier.size(); ++i) {
        char c = identifier[i];
        if (!is_alnum(c)) {
            flush();
            continue;
        }
        if (!current.empty()) {
            char prev = identifier[i - 1];
            bool prev_digit = std::isdigit(static_cast<unsigned char>(prev)) != 0;
            bool cur_digit = std::isdigit(static_cast<unsigned char>(c)) != 0;
            bool lower_to_upper = std::islower(static_cast<unsigned char>(prev)) && is_upper(c);
            // Acronym end: "HTTPServer" splits before the 'S'.
            bool acronym_end = is_upper(prev) && is_upper(c) && i + 1 < identifier.size() &&
                               std::islower(static_cast<unsigned char>(identifier[i + 1]));
            if (lower_to_upper || acronym_end || prev_digit != cur_digit) flush();
        }
        current.push_back(to_lower(c));
    }
    flush();
    return parts;
}

bool mentions_code_element(std::string_view sentence, const IdentifierSet& ids) {
    for (const std::string& id : ids.exact) {
        if (id.empty()) continue;
        std::size_t pos = sentence.find(id);
        while (pos != std::string_view::npos) {
            bool left_ok = pos == 0 || !is_word_char(sentence[pos - 1]);
            std::size_t end = pos + id.size();
            bool right_ok = end >= sentence.size() || !is_word_char(sentence[end]);
            if (left_ok && right_ok) return true;
            pos = sentence.find(id, pos + 1);
        }
    }
    std::vector<std::string> words = tokenize_words(sentence);
    std::unordered_set<std::string> word_set(words.begin(), words.end());
    for (const std::string& id : ids.exact) {
        std::set<std::string> fragments;
        for (auto& f : split_identifier(id)) fragments.insert(std::move(f));
        std::size_t present = 0;
        for (const std::string& f : fragments) present += word_set.count(f);
        if (present >= 2) return true;
    }
    return false;
}

}  // namespace suppcom
