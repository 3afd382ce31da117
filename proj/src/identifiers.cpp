#include "suppcom/identifiers.hpp"

#include "suppcom/source_parser.hpp"

#include <cctype>
#include <set>

namespace suppcom {

namespace {

bool punct(const SourceToken& t, char c) {
    return t.kind == TokenKind::Punct && t.text.size() == 1 && t.text[0] == c;
}

bool ident(const SourceToken& t) { return t.kind == TokenKind::Identifier; }

bool is_primitive(std::string_view w) {
    static const std::set<std::string_view> p = {"int",  "long",  "short",   "byte", "char",
                                                 "float", "double", "boolean", "var"};
    return p.count(w) > 0;
}

// True when the '>' at `close` ends a generic type argument list.
bool closes_generic(const std::vector<SourceToken>& toks, std::size_t close) {
    int depth = 0;
    for (std::size_t k = close + 1; k-- > 0;) {
        const auto& t = toks[k];
        if (punct(t, '>')) {
            ++depth;
        } else if (punct(t, '<')) {
            if (--depth == 0) return k > 0 && ident(toks[k - 1]);
        } else if (!ident(t) && !punct(t, ',') && !punct(t, '.') && !punct(t, '?') &&
                   !punct(t, '[') && !punct(t, ']')) {
            return false;
        }
    }
    return false;
}

bool looks_like_type_end(const std::vector<SourceToken>& toks, std::size_t i) {
    const auto& t = toks[i];
    if (ident(t)) return !is_java_keyword(t.text) || is_primitive(t.text);
    if (punct(t, ']')) return i > 0 && punct(toks[i - 1], '[');
    if (punct(t, '>')) return closes_generic(toks, i);
    return false;
}

IdentifierSet fallback(std::string_view source) {
    IdentifierSet ids;
    ids.degraded = true;
    std::size_t i = 0;
    while (i < source.size()) {
        auto c = static_cast<unsigned char>(source[i]);
        if (std::isalpha(c) || c == '_' || c == '$') {
            std::size_t k = i + 1;
            while (k < source.size() &&
                   (std::isalnum(static_cast<unsigned char>(source[k])) || source[k] == '_' ||
                    source[k] == '$')) {
                ++k;
            }
            std::string_view word = source.substr(i, k - i);
            if (!is_java_keyword(word)) ids.exact.emplace(word);
            i = k;
        } else {
            ++i;
        }
    }
    return ids;
}

}  // namespace

IdentifierSet extract_identifiers(std::string_view source) {
    IdentifierSet ids;
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        ids.degenerate = true;
        return ids;
    }
    LexResult lexed = lex_source(source);
    std::vector<SourceToken> toks;
    for (const auto& t : lexed.tokens) {
        if (t.kind != TokenKind::Comment && t.kind != TokenKind::DocComment) toks.push_back(t);
    }
    std::size_t body_open = toks.size();
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (punct(toks[i], '{')) {
            body_open = i;
            break;
        }
    }
    if (!lexed.ok || body_open == toks.size()) {
        ids = fallback(source);
    } else {
        // Header: method name and parameter names.
        std::size_t open = body_open;
        for (std::size_t i = 0; i < body_open; ++i) {
            if (punct(toks[i], '(')) {
                open = i;
                break;
            }
        }
        if (open < body_open) {
            if (open > 0 && ident(toks[open - 1])) ids.exact.emplace(toks[open - 1].text);
            int depth = 0;
            for (std::size_t i = open; i < body_open; ++i) {
                if (punct(toks[i], '(') || punct(toks[i], '<')) ++depth;
                if (punct(toks[i], ')') || punct(toks[i], '>')) --depth;
                bool ends_param = (punct(toks[i + 1], ',') && depth == 1) ||
                                  (punct(toks[i + 1], ')') && depth == 1);
                if (ident(toks[i]) && ends_param && !is_java_keyword(toks[i].text) && i > open + 1) {
                    ids.exact.emplace(toks[i].text);
                }
            }
        }

        for (std::size_t i = body_open + 1; i < toks.size(); ++i) {
            const auto& t = toks[i];
            if (!ident(t) || is_java_keyword(t.text)) continue;
            const SourceToken* next = i + 1 < toks.size() ? &toks[i + 1] : nullptr;
            const SourceToken* prev = &toks[i - 1];
            if (next && punct(*next, '(')) {
                ids.exact.emplace(t.text);  // invoked call
                continue;
            }
            if (next && punct(*next, '-') && i + 2 < toks.size() && punct(toks[i + 2], '>')) {
                ids.exact.emplace(t.text);  // lambda parameter
                continue;
            }
            if (punct(*prev, '.') && i >= 2 && toks[i - 2].kind == TokenKind::Identifier &&
                toks[i - 2].text == "this") {
                ids.exact.emplace(t.text);  // this.field
                continue;
            }
            bool declarator_end = next && (punct(*next, '=') || punct(*next, ';') ||
                                           punct(*next, ',') || punct(*next, ':') ||
                                           punct(*next, ')'));
            if (declarator_end && looks_like_type_end(toks, i - 1) &&
                !(next && punct(*next, '=') && i + 2 < toks.size() && punct(toks[i + 2], '='))) {
                ids.exact.emplace(t.text);  // local declaration
            }
        }
    }
    for (const auto& id : ids.exact) {
        for (auto& sub : split_identifier(id)) ids.subtokens.insert(std::move(sub));
    }
    return ids;
}

}  // namespace suppcom
