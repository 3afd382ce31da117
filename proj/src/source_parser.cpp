#include "suppcom/source_parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace suppcom {

namespace {

bool ident_start(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) || c == '_' || c == '$' || u >= 0x80;
}

bool ident_part(char c) {
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace

bool is_java_keyword(std::string_view word) {
    static const std::set<std::string_view> keywords = {
        "abstract", "assert",     "boolean",   "break",     "byte",      "case",
        "catch",    "char",       "class",     "const",     "continue",  "default",
        "do",       "double",     "else",      "enum",      "extends",   "final",
        "finally",  "float",      "for",       "goto",      "if",        "implements",
        "import",   "instanceof", "int",       "interface", "long",      "native",
        "new",      "package",    "private",   "protected", "public",    "return",
        "short",    "static",     "strictfp",  "super",     "switch",    "synchronized",
        "this",     "throw",      "throws",    "transient", "try",       "void",
        "volatile", "while",      "true",      "false",     "null",      "var",
        "yield",
    };
    return keywords.count(word) > 0;
}

LexResult lex_source(std::string_view src) {
    LexResult result;
    int line = 1;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto count_lines = [&](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to; ++k) {
            if (src[k] == '\n') ++line;
        }
    };
    auto push = [&](TokenKind kind, std::size_t start, std::size_t end, int start_line) {
        result.tokens.push_back({kind, src.substr(start, end - start), start_line, line, start});
    };

    while (i < n) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        const int start_line = line;
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            std::size_t end = src.find('\n', i);
            if (end == std::string_view::npos) end = n;
            i = end;
            push(TokenKind::Comment, start, end, start_line);
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            std::size_t close = src.find("*/", i + 2);
            bool doc = i + 2 < n && src[i + 2] == '*' && close != i + 2;
            std::size_t end = close == std::string_view::npos ? n : close + 2;
            if (close == std::string_view::npos) result.ok = false;
            count_lines(i, end);
            i = end;
            push(doc ? TokenKind::DocComment : TokenKind::Comment, start, end, start_line);
            continue;
        }
        if (c == '"' && src.substr(i, 3) == "\"\"\"") {
            std::size_t close = src.find("\"\"\"", i + 3);
            std::size_t end = close == std::string_view::npos ? n : close + 3;
            if (close == std::string_view::npos) result.ok = false;
            count_lines(i, end);
            i = end;
            push(TokenKind::String, start, end, start_line);
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t k = i + 1;
            bool closed = false;
            while (k < n && src[k] != '\n') {
                if (src[k] == '\\') {
                    k += 2;
                    continue;
                }
                if (src[k] == c) {
                    closed = true;
                    ++k;
                    break;
                }
                ++k;
            }
            if (!closed) result.ok = false;
            k = std::min(k, n);
            i = k;
            push(c == '"' ? TokenKind::String : TokenKind::Char, start, k, start_line);
            continue;
        }
        if (ident_start(c)) {
            std::size_t k = i + 1;
            while (k < n && ident_part(src[k])) ++k;
            i = k;
            push(TokenKind::Identifier, start, k, start_line);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t k = i + 1;
            while (k < n && (std::isalnum(static_cast<unsigned char>(src[k])) || src[k] == '_' ||
                             (src[k] == '.' && k + 1 < n &&
                              std::isdigit(static_cast<unsigned char>(src[k + 1]))))) {
                ++k;
            }
            i = k;
            push(TokenKind::Number, start, k, start_line);
            continue;
        }
        ++i;
        push(TokenKind::Punct, start, i, start_line);
    }
    return result;
}

namespace {

enum class ScopeKind { Type, Method, Block };

struct Scope {
    ScopeKind kind;
    std::string name;               // Type scopes
    std::size_t method_index = 0;   // Method scopes: index into pending methods
};

struct PendingMethod {
    ExtractedMethod method;
    std::size_t body_begin = 0;  // source offset of the signature start
};

bool is_punct(const SourceToken& t, char c) {
    return t.kind == TokenKind::Punct && t.text.size() == 1 && t.text[0] == c;
}

bool is_ident(const SourceToken& t, std::string_view word) {
    return t.kind == TokenKind::Identifier && t.text == word;
}

// Index of the first token after the leading annotations of a declaration.
std::size_t skip_annotations(const std::vector<SourceToken>& decl) {
    std::size_t i = 0;
    while (i < decl.size() && is_punct(decl[i], '@') && i + 1 < decl.size() &&
           decl[i + 1].kind == TokenKind::Identifier && decl[i + 1].text != "interface") {
        i += 2;
        while (i + 1 < decl.size() && is_punct(decl[i], '.') &&
               decl[i + 1].kind == TokenKind::Identifier) {
            i += 2;
        }
        if (i < decl.size() && is_punct(decl[i], '(')) {
            int depth = 0;
            for (; i < decl.size(); ++i) {
                if (is_punct(decl[i], '(')) ++depth;
                if (is_punct(decl[i], ')') && --depth == 0) {
                    ++i;
                    break;
                }
            }
        }
    }
    return i;
}

std::optional<std::string> type_declaration_name(const std::vector<SourceToken>& decl) {
    for (std::size_t i = 0; i + 1 < decl.size(); ++i) {
        const auto& t = decl[i];
        if (t.kind != TokenKind::Identifier) continue;
        bool keyword = t.text == "class" || t.text == "interface" || t.text == "enum";
        // "record Name(" is a record only when followed by a name.
        if (t.text == "record" && decl[i + 1].kind == TokenKind::Identifier) keyword = true;
        if (keyword && decl[i + 1].kind == TokenKind::Identifier) {
            if (i > 0 && is_punct(decl[i - 1], '.')) continue;  // Foo.class
            return std::string(decl[i + 1].text);
        }
    }
    return std::nullopt;
}

std::string normalize_space(std::string_view s) {
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

struct MethodHeader {
    std::size_t name_index;
    std::string param_types;
};

// Recognises `modifiers type name(params) [throws X, Y]` (constructors
// included) in a declaration that ends right before '{'.
std::optional<MethodHeader> method_header(const std::vector<SourceToken>& decl, std::size_t first) {
    int angle = 0;
    std::size_t open = decl.size();
    for (std::size_t i = first; i < decl.size(); ++i) {
        const auto& t = decl[i];
        if (is_punct(t, '=')) return std::nullopt;
        if (is_punct(t, '<')) ++angle;
        if (is_punct(t, '>')) --angle;
        if (is_punct(t, '(') && angle == 0) {
            open = i;
            break;
        }
    }
    if (open == decl.size() || open == first) return std::nullopt;
    const auto& name = decl[open - 1];
    if (name.kind != TokenKind::Identifier || is_java_keyword(name.text)) return std::nullopt;

    int depth = 0;
    std::size_t close = decl.size();
    for (std::size_t i = open; i < decl.size(); ++i) {
        if (is_punct(decl[i], '(')) ++depth;
        if (is_punct(decl[i], ')') && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == decl.size()) return std::nullopt;

    // Parameter lists hold only type-ish tokens; literals mean an enum
    // constant or a call, not a declaration.
    std::vector<std::vector<const SourceToken*>> params(1);
    int nest = 0;
    for (std::size_t i = open + 1; i < close; ++i) {
        const auto& t = decl[i];
        if (t.kind == TokenKind::String || t.kind == TokenKind::Char || t.kind == TokenKind::Number) {
            return std::nullopt;
        }
        if (t.kind == TokenKind::Punct) {
            char c = t.text[0];
            if (c == '<' || c == '(') ++nest;
            if (c == '>' || c == ')') --nest;
            if (c == ',' && nest == 0) {
                params.emplace_back();
                continue;
            }
            if (std::string_view("<>[].,?@&()").find(c) == std::string_view::npos) return std::nullopt;
        }
        params.back().push_back(&t);
    }

    // Only `throws` clauses may follow the parameter list.
    if (close + 1 < decl.size()) {
        if (!is_ident(decl[close + 1], "throws")) return std::nullopt;
        for (std::size_t i = close + 2; i < decl.size(); ++i) {
            const auto& t = decl[i];
            if (t.kind != TokenKind::Identifier && !is_punct(t, ',') && !is_punct(t, '.') &&
                !is_punct(t, '<') && !is_punct(t, '>')) {
                return std::nullopt;
            }
        }
    }

    std::string types;
    bool first_param = true;
    for (auto& p : params) {
        if (p.empty()) continue;
        // Drop annotations and `final`, then the trailing parameter name.
        std::vector<const SourceToken*> kept;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i]->kind == TokenKind::Punct && p[i]->text == "@" && i + 1 < p.size()) {
                ++i;
                continue;
            }
            if (p[i]->text == "final") continue;
            kept.push_back(p[i]);
        }
        if (!kept.empty() && kept.back()->kind == TokenKind::Identifier) kept.pop_back();
        if (!first_param) types.push_back(',');
        first_param = false;
        for (const auto* t : kept) types.append(t->text);
    }
    return MethodHeader{open - 1, types};
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

}  // namespace

bool is_supported_language(std::string_view language_tag) { return language_tag == "java"; }

std::optional<std::string> language_for_path(std::string_view path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".java") return std::string("java");
    return std::nullopt;
}

std::string strip_doc_comment(std::string_view raw) {
    std::string_view s = raw;
    if (s.substr(0, 3) == "/**") s.remove_prefix(3);
    else if (s.substr(0, 2) == "/*") s.remove_prefix(2);
    if (s.size() >= 2 && s.substr(s.size() - 2) == "*/") s.remove_suffix(2);

    std::string text;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t nl = s.find('\n', pos);
        if (nl == std::string_view::npos) nl = s.size();
        std::string_view line = s.substr(pos, nl - pos);
        pos = nl + 1;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        while (!line.empty() && line.front() == '*') line.remove_prefix(1);
        if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        std::string_view head = line;
        while (!head.empty() && std::isspace(static_cast<unsigned char>(head.front()))) head.remove_prefix(1);
        if (!head.empty() && head.front() == '@') break;  // block tags
        text.append(line);
        text.push_back('\n');
    }

    // Inline tags: {@link Ref label} -> label, {@code x} -> x, {@inheritDoc} -> "".
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '{' && i + 1 < text.size() && text[i + 1] == '@') {
            std::size_t close = text.find('}', i);
            if (close != std::string::npos) {
                std::string_view inner(text.data() + i + 2, close - i - 2);
                std::size_t sp = inner.find_first_of(" \t\n");
                std::string_view tag = inner.substr(0, sp);
                std::string_view content =
                    sp == std::string_view::npos ? std::string_view{} : inner.substr(sp + 1);
                if (tag == "link" || tag == "linkplain") {
                    std::size_t label = content.find(' ');
                    if (label != std::string_view::npos) content = content.substr(label + 1);
                }
                out.append(content);
                i = close;
                continue;
            }
        }
        out.push_back(text[i]);
    }

    // HTML: paragraph-like tags become blank lines, other tags vanish.
    std::string cleaned;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == '<') {
            std::size_t close = out.find('>', i);
            if (close != std::string::npos && close > i + 1 &&
                (std::isalpha(static_cast<unsigned char>(out[i + 1])) || out[i + 1] == '/')) {
                std::string tag;
                for (std::size_t k = i + 1; k < close; ++k) {
                    char ch = out[k];
                    if (ch == '/' && tag.empty()) continue;
                    if (!std::isalpha(static_cast<unsigned char>(ch))) break;
                    tag.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
                }
                if (tag == "p" || tag == "br" || tag == "li" || tag == "ul" || tag == "ol" ||
                    tag == "pre") {
                    cleaned.append("\n\n");
                }
                i = close;
                continue;
            }
        }
        cleaned.push_back(out[i]);
    }
    cleaned = replace_all(cleaned, "&lt;", "<");
    cleaned = replace_all(cleaned, "&gt;", ">");
    cleaned = replace_all(cleaned, "&quot;", "\"");
    cleaned = replace_all(cleaned, "&nbsp;", " ");
    cleaned = replace_all(cleaned, "&amp;", "&");

    std::size_t b = cleaned.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = cleaned.find_last_not_of(" \t\r\n");
    return cleaned.substr(b, e - b + 1);
}

ExtractionResult extract_methods(std::string_view source, std::string_view language_tag) {
    ExtractionResult result;
    if (!is_supported_language(language_tag)) {
        result.parse_warning = true;
        return result;
    }
    LexResult lexed = lex_source(source);
    result.parse_warning = !lexed.ok;

    std::vector<Scope> scopes;
    std::vector<PendingMethod> pending;
    std::vector<SourceToken> decl;  // current declaration at type/file level
    const SourceToken* doc = nullptr;
    bool in_initializer = false;

    auto at_declaration_level = [&] {
        return scopes.empty() || scopes.back().kind == ScopeKind::Type;
    };
    auto reset_decl = [&] {
        decl.clear();
        doc = nullptr;
        in_initializer = false;
    };
    auto qualified_prefix = [&] {
        std::string prefix;
        for (const auto& s : scopes) {
            if (s.kind != ScopeKind::Type) continue;
            prefix += s.name;
            prefix.push_back('.');
        }
        return prefix;
    };

    for (const SourceToken& tok : lexed.tokens) {
        if (!at_declaration_level()) {
            if (is_punct(tok, '{')) {
                scopes.push_back({ScopeKind::Block, {}, 0});
            } else if (is_punct(tok, '}')) {
                Scope closing = scopes.back();
                scopes.pop_back();
                if (closing.kind == ScopeKind::Method) {
                    PendingMethod& pm = pending[closing.method_index];
                    pm.method.end_line = tok.line;
                    pm.method.body = std::string(
                        source.substr(pm.body_begin, tok.offset + 1 - pm.body_begin));
                    result.methods.push_back(std::move(pm.method));
                }
                if (at_declaration_level() && !in_initializer) reset_decl();
            }
            continue;
        }

        if (tok.kind == TokenKind::DocComment) {
            if (decl.empty()) doc = &tok;
            continue;
        }
        if (tok.kind == TokenKind::Comment) {
            if (decl.empty()) doc = nullptr;
            continue;
        }
        if (is_punct(tok, ';')) {
            reset_decl();
            continue;
        }
        if (is_punct(tok, '}')) {
            if (!scopes.empty()) scopes.pop_back();
            else result.parse_warning = true;
            reset_decl();
            continue;
        }
        if (!is_punct(tok, '{')) {
            if (is_punct(tok, '=')) in_initializer = true;
            decl.push_back(tok);
            continue;
        }

        // '{' at declaration level.
        if (in_initializer) {
            scopes.push_back({ScopeKind::Block, {}, 0});
            continue;
        }
        if (auto type_name = type_declaration_name(decl)) {
            scopes.push_back({ScopeKind::Type, *type_name, 0});
            reset_decl();
            continue;
        }
        std::size_t first = skip_annotations(decl);
        auto header = first < decl.size() ? method_header(decl, first) : std::nullopt;
        if (!header || scopes.empty()) {
            scopes.push_back({ScopeKind::Block, {}, 0});
            reset_decl();
            continue;
        }
        PendingMethod pm;
        const SourceToken& sig_start = decl[first];
        pm.body_begin = sig_start.offset;
        pm.method.name = std::string(decl[header->name_index].text);
        pm.method.qualified_name =
            qualified_prefix() + pm.method.name + "(" + header->param_types + ")";
        pm.method.signature = normalize_space(source.substr(sig_start.offset, tok.offset - sig_start.offset));
        pm.method.start_line = sig_start.line;
        if (doc) {
            pm.method.leading_comment =
                DocComment{strip_doc_comment(doc->text), doc->line, doc->end_line};
        }
        pending.push_back(std::move(pm));
        scopes.push_back({ScopeKind::Method, {}, pending.size() - 1});
        reset_decl();
    }

    if (!scopes.empty()) result.parse_warning = true;
    return result;
}

}  // namespace suppcom
