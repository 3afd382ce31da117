#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace suppcom {

enum class TokenKind { Identifier, Number, String, Char, Punct, DocComment, Comment };

struct SourceToken {
    TokenKind kind;
    std::string_view text;  // view into the lexed source
    int line = 1;           // 1-based line of the first character
    int end_line = 1;       // line of the last character
    std::size_t offset = 0;
};

struct LexResult {
    std::vector<SourceToken> tokens;
    bool ok = true;  // false on an unterminated comment or literal
};

// Lexer for Java-style brace syntax. Comments and literals are single tokens,
// so braces inside them never affect nesting.
LexResult lex_source(std::string_view source);

bool is_java_keyword(std::string_view word);

struct DocComment {
    std::string text;  // markup stripped, see strip_doc_comment
    int start_line = 0;
    int end_line = 0;
};

struct ExtractedMethod {
    std::string name;
    std::string qualified_name;  // Outer.Inner.name(ParamType,...)
    std::string signature;       // whitespace-normalised header, without the body
    std::string body;            // source text from the signature to the closing brace
    int start_line = 0;          // line of the first signature token (after annotations)
    int end_line = 0;            // line of the closing brace
    std::optional<DocComment> leading_comment;
};

struct ExtractionResult {
    std::vector<ExtractedMethod> methods;
    bool parse_warning = false;  // unbalanced braces or unterminated token at EOF
};

// Methods with bodies declared directly in a type body (classes nested in
// type bodies included; classes local to a method body are part of that
// method). A doc comment is attached when only annotations and whitespace
// separate it from the declaration.
ExtractionResult extract_methods(std::string_view source, std::string_view language_tag);

bool is_supported_language(std::string_view language_tag);

// Language tag for a file extension such as ".java"; nullopt if unsupported.
std::optional<std::string> language_for_path(std::string_view path);

// Strips comment delimiters, leading '*', HTML tags and inline tags
// ({@code x} -> x). Text from the first block tag (@param, @return, ...)
// onwards is dropped.
std::string strip_doc_comment(std::string_view raw);

}  // namespace suppcom
