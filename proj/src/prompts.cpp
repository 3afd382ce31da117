#include "suppcom/llm.hpp"

#include "suppcom/error.hpp"
#include "suppcom/hash.hpp"
#include "suppcom/jsonl.hpp"
#include "suppcom/text.hpp"

#include <suppcom/prompt_templates.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace suppcom {

namespace {

std::string fill(std::string tmpl, const std::map<std::string, std::string>& slots) {
    for (const auto& [name, value] : slots) {
        const std::string marker = "{{" + name + "}}";
        std::size_t pos = 0;
        while ((pos = tmpl.find(marker, pos)) != std::string::npos) {
            tmpl.replace(pos, marker.size(), value);
            pos += value.size();
        }
    }
    return tmpl;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string type_definitions() {
    std::string out;
    for (InfoType t : kAllInfoTypes) {
        out += "- ";
        out += to_string(t);
        out += ": ";
        out += definition(t);
        out += '\n';
    }
    return strip_trailing_newlines(out);
}

std::string normalize_ws(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

// Strips "- ", "* ", "• " bullets.
std::string_view strip_bullet(std::string_view line) {
    line = trim(line);
    if (line.size() >= 2 && (line[0] == '-' || line[0] == '*' || line[0] == '+') && line[1] == ' ') {
        line.remove_prefix(2);
    } else if (line.substr(0, 3) == "\xE2\x80\xA2") {
        line.remove_prefix(3);
    }
    return trim(line);
}

// "[4] text", "(4) text", "4. text", "4) text", "Sentence 4: text".
std::pair<std::optional<std::size_t>, std::string_view> split_number(std::string_view line) {
    auto digits = [](std::string_view s, std::size_t from) {
        std::size_t k = from;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        return k;
    };
    if (!line.empty() && (line[0] == '[' || line[0] == '(')) {
        char close = line[0] == '[' ? ']' : ')';
        std::size_t k = digits(line, 1);
        if (k > 1 && k < line.size() && line[k] == close) {
            return {std::stoul(std::string(line.substr(1, k - 1))), trim(line.substr(k + 1))};
        }
    }
    if (line.rfind("Sentence ", 0) == 0) {
        std::size_t k = digits(line, 9);
        if (k > 9 && k < line.size() && line[k] == ':') {
            return {std::stoul(std::string(line.substr(9, k - 9))), trim(line.substr(k + 1))};
        }
    }
    std::size_t k = digits(line, 0);
    if (k > 0 && k + 1 < line.size() && (line[k] == '.' || line[k] == ')') && line[k + 1] == ' ') {
        return {std::stoul(std::string(line.substr(0, k))), trim(line.substr(k + 1))};
    }
    return {std::nullopt, line};
}

std::string_view strip_quotes(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        s = s.substr(1, s.size() - 2);
    }
    if (s.substr(0, 3) == "\xE2\x80\x9C" && s.size() >= 6 && s.substr(s.size() - 3) == "\xE2\x80\x9D") {
        s = s.substr(3, s.size() - 6);
    }
    return trim(s);
}

}  // namespace

const PromptTemplates& PromptTemplates::builtin() {
    static const PromptTemplates t{templates::kRetrievalSystem, templates::kRetrievalUser,
                                   templates::kGenerationSystem, templates::kGenerationUser};
    return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    return {read_file(dir / "retrieval_system.txt"), read_file(dir / "retrieval_user.txt"),
            read_file(dir / "generation_system.txt"), read_file(dir / "generation_user.txt")};
}

std::string PromptTemplates::hash() const {
    return sha256_hex(retrieval_system + '\x1f' + retrieval_user + '\x1f' + generation_system + '\x1f' +
                      generation_user);
}

ChatPrompt build_retrieval_prompt(const MethodRecord& method, const IssueReport& issue,
                                  const RetrievalPromptOptions& options, const PromptTemplates& templates) {
    ChatPrompt prompt;
    std::vector<const IssueSentence*> kept;
    std::size_t words = 0;
    for (const auto& s : issue.sentences) {
        kept.push_back(&s);
        words += tokenize_words(s.text).size();
    }
    if (options.max_issue_words > 0) {
        while (words > options.max_issue_words && !kept.empty()) {
            words -= tokenize_words(kept.back()->text).size();
            kept.pop_back();
            prompt.truncated = true;
        }
    }
    std::string numbered;
    for (const auto* s : kept) {
        numbered += "[" + std::to_string(s->index) + "] " + normalize_ws(s->text) + "\n";
    }
    if (prompt.truncated) numbered += "[... truncated ...]\n";

    prompt.system = strip_trailing_newlines(templates.retrieval_system);
    prompt.user = strip_trailing_newlines(fill(templates.retrieval_user,
                                               {{"TYPE_DEFINITIONS", type_definitions()},
                                                {"METHOD_SOURCE", strip_trailing_newlines(method.body)},
                                                {"ISSUE_KEY", issue.key},
                                                {"ISSUE_SENTENCES", strip_trailing_newlines(numbered)}}));
    return prompt;
}

ChatPrompt build_generation_prompt(const MethodRecord& method, const RetrievedEvidence& evidence,
                                   const PromptTemplates& templates) {
    if (evidence.empty()) throw ValidationError("generation prompt needs nonempty evidence");
    std::string rendered;
    for (const auto& [type, sentences] : evidence.entries) {
        rendered += "### ";
        rendered += to_string(type);
        rendered += " (";
        rendered += definition(type);
        rendered += ")\n";
        for (const auto& s : sentences) {
            rendered += "- [" + s.ref.issue_key + " #" + std::to_string(s.ref.index) + "] " +
                        normalize_ws(s.text) + "\n";
        }
        rendered += '\n';
    }
    ChatPrompt prompt;
    prompt.system = strip_trailing_newlines(templates.generation_system);
    prompt.user = strip_trailing_newlines(fill(templates.generation_user,
                                               {{"EVIDENCE", strip_trailing_newlines(rendered)},
                                                {"METHOD_SOURCE", strip_trailing_newlines(method.body)}}));
    return prompt;
}

std::optional<InfoType> parse_type_heading(std::string_view line) {
    line = trim(line);
    bool marked = false;
    while (!line.empty() && (line.front() == '#' || line.front() == '*')) {
        line.remove_prefix(1);
        marked = true;
    }
    line = trim(line);
    while (!line.empty() && (line.back() == '*' || line.back() == ':')) line.remove_suffix(1);
    line = trim(line);
    if (line.rfind("Type", 0) == 0 && line.size() > 4 && (line[4] == ':' || line[4] == ' ')) {
        line = trim(line.substr(5));
    }
    // Allow a trailing parenthetical: "Implication (performance)".
    std::size_t paren = line.find(" (");
    if (marked && paren != std::string_view::npos) line = trim(line.substr(0, paren));
    return parse_info_type(line);
}

RetrievalParse parse_retrieval_response(std::string_view response, const IssueReport& issue,
                                        double align_threshold) {
    RetrievalParse out;
    std::string_view whole = trim(response);
    if (whole.size() >= 4 && (whole.substr(0, 4) == "NONE" || whole.substr(0, 4) == "None")) {
        out.declared_none = true;
        return out;
    }

    std::vector<Sentence> issue_sentences;
    for (const auto& s : issue.sentences) {
        Sentence sent;
        sent.text = normalize_ws(s.text);
        sent.tokens = tokenize_words(s.text);
        issue_sentences.push_back(std::move(sent));
    }

    std::optional<InfoType> current;
    bool saw_heading = false;
    for (std::string_view raw : lines_of(response)) {
        if (trim(raw).empty()) continue;
        if (auto heading = parse_type_heading(raw)) {
            current = heading;
            saw_heading = true;
            continue;
        }
        if (!current) continue;
        auto [number, rest] = split_number(strip_bullet(raw));
        std::string quote = normalize_ws(strip_quotes(rest));

        std::optional<std::size_t> match;
        if (quote.empty()) {
            if (number && *number < issue.sentences.size()) match = *number;
        } else {
            auto contains = [&](std::size_t i) {
                return issue_sentences[i].text.find(quote) != std::string::npos;
            };
            if (number && *number < issue_sentences.size() && contains(*number)) {
                match = *number;
            } else {
                for (std::size_t i = 0; i < issue_sentences.size() && !match; ++i) {
                    if (contains(i)) match = i;
                }
            }
            if (!match) {
                std::vector<std::string> qtokens = tokenize_words(quote);
                double best = -1.0;
                std::size_t best_index = 0;
                for (std::size_t i = 0; i < issue_sentences.size(); ++i) {
                    double r = word_overlap_ratio(qtokens, issue_sentences[i].tokens);
                    bool better = r > best || (r == best && number && i == *number);
                    if (better) {
                        best = r;
                        best_index = i;
                    }
                }
                if (best > align_threshold) match = best_index;
            }
        }
        if (!match) {
            ++out.fabrications;
            continue;
        }
        const IssueSentence& s = issue.sentences[*match];
        out.evidence.add(*current, EvidenceSentence{{issue.key, s.index}, s.text});
    }
    out.parse_failure = !saw_heading;
    return out;
}

GenerationParse parse_generation_response(std::string_view response) {
    GenerationParse out;
    std::optional<InfoType> current;
    std::map<InfoType, std::string> blocks;
    std::vector<InfoType> order;
    for (std::string_view raw : lines_of(response)) {
        if (trim(raw).empty()) {
            if (current) blocks[*current] += "\n";
            continue;
        }
        if (auto heading = parse_type_heading(raw)) {
            current = heading;
            if (!blocks.count(*current)) order.push_back(*current);
            blocks[*current];
            continue;
        }
        std::string_view t = trim(raw);
        if (t.rfind("```", 0) == 0) continue;
        if (!current) {
            ++out.stray_lines;
            continue;
        }
        std::string& block = blocks[*current];
        // Bullets mark separate sentences.
        std::string_view stripped = strip_bullet(raw);
        if (stripped.size() != trim(raw).size()) block += "\n\n";
        block.append(stripped);
        block += '\n';
    }
    out.parse_failure = order.empty();
    for (InfoType type : order) {
        for (auto& s : split_sentences(blocks[type])) {
            if (s.tokens.empty()) continue;
            CommentSentence cs;
            cs.text = std::move(s.text);
            cs.info_type = type;
            out.comment.sentences.push_back(std::move(cs));
        }
    }
    return out;
}

}  // namespace suppcom
