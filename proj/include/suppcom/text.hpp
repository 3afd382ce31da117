#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace suppcom {

struct SentenceOrigin {
    std::string document_id;
    std::size_t index = 0;
};

struct Sentence {
    std::string text;
    std::vector<std::string> tokens;  // tokenize_words(text)
    SentenceOrigin origin;
};

// Lowercased alphanumeric runs; every other byte separates tokens.
// No stemming and no stopword removal.
std::vector<std::string> tokenize_words(std::string_view text);

// Splits text into sentences.
//
// A boundary is a '.', '!', '?' or ';' (optionally followed by closing
// brackets or quotes) that is followed by whitespace and then an uppercase
// ASCII letter, or by the end of the text. A '.' ending one of
// protected_abbreviations() never ends a sentence. Terminators not followed
// by whitespace (dotted identifiers, versions, URLs) never split.
// Lines opening with a bullet marker ("- ", "* ", "+ ", "1. ", "1) ",
// "@tag") start a new sentence, and blank lines end a paragraph; other line
// breaks are joined with a single space. Whitespace-only pieces are dropped,
// every other character survives in order.
std::vector<Sentence> split_sentences(std::string_view text,
                                      std::string_view document_id = {});

// Lowercased abbreviations, with their trailing dot, that never end a sentence.
const std::set<std::string>& protected_abbreviations();

enum class OverlapMode { Set, Multiset };

// Fraction of the comment's tokens found among the issue's tokens.
// Set mode: |C ∩ I| / |C| over distinct tokens. Multiset mode: sum of
// min(count_C(t), count_I(t)) over the comment token count. 0 when the
// comment has no tokens.
double word_overlap_ratio(std::span<const std::string> comment_tokens,
                          std::span<const std::string> issue_tokens,
                          OverlapMode mode = OverlapMode::Set);

inline double word_overlap_ratio(const Sentence& comment, const Sentence& issue,
                                 OverlapMode mode = OverlapMode::Set) {
    return word_overlap_ratio(comment.tokens, issue.tokens, mode);
}

struct OverlapMatch {
    std::size_t comment_index = 0;
    std::size_t issue_index = 0;  // first issue sentence reaching the best ratio
    double ratio = 0.0;
};

// Comment sentences whose best overlap against any issue sentence is strictly
// greater than `threshold`. Throws ValidationError unless 0 < threshold <= 1.
std::vector<OverlapMatch> overlap_candidates(std::span<const Sentence> comment_sentences,
                                             std::span<const Sentence> issue_sentences,
                                             double threshold = 0.7,
                                             OverlapMode mode = OverlapMode::Set);

// camelCase / snake_case fragments of an identifier, lowercased, length >= 2.
// "HTTPServerConfig" -> {http, server, config}.
std::vector<std::string> split_identifier(std::string_view identifier);

struct IdentifierSet {
    std::set<std::string> exact;      // as written in the source
    std::set<std::string> subtokens;  // split_identifier over `exact`
    bool degraded = false;            // body did not lex; fallback token scan
    bool degenerate = false;          // empty body
};

// True iff the sentence contains an exact identifier on word boundaries
// (case-sensitive), or two distinct fragments of one identifier occur as
// words of the sentence.
bool mentions_code_element(std::string_view sentence, const IdentifierSet& ids);

}  // namespace suppcom
