#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace suppcom {

// Kinds of supplementary information a comment sentence can carry.
enum class InfoType { Functionality, Concept, Directive, Rationale, Implication };

inline constexpr std::array<InfoType, 5> kAllInfoTypes = {
    InfoType::Functionality, InfoType::Concept, InfoType::Directive,
    InfoType::Rationale,     InfoType::Implication,
};

std::string_view to_string(InfoType type);
std::string_view definition(InfoType type);
// Case-insensitive name lookup.
std::optional<InfoType> parse_info_type(std::string_view name);

enum class RelevanceCriterion { Identifier, Side, None };

std::string_view to_string(RelevanceCriterion c);

struct IssueSentenceRef {
    std::string issue_key;
    std::size_t index = 0;

    friend bool operator==(const IssueSentenceRef&, const IssueSentenceRef&) = default;
    friend auto operator<=>(const IssueSentenceRef&, const IssueSentenceRef&) = default;
};

struct RelevanceAnnotation {
    bool value = false;
    RelevanceCriterion criterion = RelevanceCriterion::None;
    bool side_unavailable = false;

    friend bool operator==(const RelevanceAnnotation&, const RelevanceAnnotation&) = default;
};

struct VerifiabilityAnnotation {
    bool value = false;
    std::optional<IssueSentenceRef> best;
    double score = 0.0;

    friend bool operator==(const VerifiabilityAnnotation&, const VerifiabilityAnnotation&) = default;
};

// One sentence of a manual or generated comment. Manual sentences have no
// info_type; verification fields are filled by the verification stage.
struct CommentSentence {
    std::string text;
    std::optional<InfoType> info_type;
    std::optional<RelevanceAnnotation> code_relevant;
    std::optional<VerifiabilityAnnotation> verifiable;
    std::optional<bool> retained;

    friend bool operator==(const CommentSentence&, const CommentSentence&) = default;
};

void to_json(nlohmann::json& j, const IssueSentenceRef& r);
void from_json(const nlohmann::json& j, IssueSentenceRef& r);
void to_json(nlohmann::json& j, const CommentSentence& s);
void from_json(const nlohmann::json& j, CommentSentence& s);

}  // namespace suppcom
