#include "suppcom/comment.hpp"

#include "suppcom/error.hpp"

#include <algorithm>
#include <cctype>

namespace suppcom {

std::string_view to_string(InfoType type) {
    switch (type) {
        case InfoType::Functionality: return "Functionality";
        case InfoType::Concept: return "Concept";
        case InfoType::Directive: return "Directive";
        case InfoType::Rationale: return "Rationale";
        case InfoType::Implication: return "Implication";
    }
    return "Unknown";
}

std::string_view definition(InfoType type) {
    switch (type) {
        case InfoType::Functionality:
            return "What the method does: its behavior, functionality or the feature it provides.";
        case InfoType::Concept:
            return "The meaning of terms used by the method, in particular domain concepts.";
        case InfoType::Directive:
            return "What callers or maintainers must pay attention to: what is allowed or "
                   "forbidden, and the contracts of the method.";
        case InfoType::Rationale:
            return "Why the code exists or is designed the way it is.";
        case InfoType::Implication:
            return "Quality attributes of the method, especially its performance implications.";
    }
    return "";
}

std::optional<InfoType> parse_info_type(std::string_view name) {
    for (InfoType t : kAllInfoTypes) {
        std::string_view candidate = to_string(t);
        if (candidate.size() == name.size() &&
            std::equal(candidate.begin(), candidate.end(), name.begin(), [](char a, char b) {
                return std::tolower(static_cast<unsigned char>(a)) ==
                       std::tolower(static_cast<unsigned char>(b));
            })) {
            return t;
        }
    }
    return std::nullopt;
}

std::string_view to_string(RelevanceCriterion c) {
    switch (c) {
        case RelevanceCriterion::Identifier: return "identifier";
        case RelevanceCriterion::Side: return "side";
        case RelevanceCriterion::None: return "none";
    }
    return "none";
}

namespace {

RelevanceCriterion parse_criterion(const std::string& s) {
    if (s == "identifier") return RelevanceCriterion::Identifier;
    if (s == "side") return RelevanceCriterion::Side;
    if (s == "none") return RelevanceCriterion::None;
    throw ValidationError("unknown relevance criterion: " + s);
}

}  // namespace

void to_json(nlohmann::json& j, const IssueSentenceRef& r) {
    j = nlohmann::json{{"issue_key", r.issue_key}, {"index", r.index}};
}

void from_json(const nlohmann::json& j, IssueSentenceRef& r) {
    j.at("issue_key").get_to(r.issue_key);
    j.at("index").get_to(r.index);
}

void to_json(nlohmann::json& j, const CommentSentence& s) {
    j = nlohmann::json{{"text", s.text}};
    if (s.info_type) j["info_type"] = std::string(to_string(*s.info_type));
    if (s.code_relevant) {
        nlohmann::json r{{"value", s.code_relevant->value},
                         {"criterion", std::string(to_string(s.code_relevant->criterion))}};
        if (s.code_relevant->side_unavailable) r["side_unavailable"] = true;
        j["code_relevant"] = std::move(r);
    }
    if (s.verifiable) {
        nlohmann::json v{{"value", s.verifiable->value}, {"score", s.verifiable->score}};
        v["best"] = s.verifiable->best ? nlohmann::json(*s.verifiable->best) : nlohmann::json(nullptr);
        j["verifiable"] = std::move(v);
    }
    if (s.retained) j["retained"] = *s.retained;
}

void from_json(const nlohmann::json& j, CommentSentence& s) {
    s = CommentSentence{};
    j.at("text").get_to(s.text);
    if (j.contains("info_type")) {
        auto t = parse_info_type(j.at("info_type").get<std::string>());
        if (!t) throw ValidationError("unknown info_type");
        s.info_type = *t;
    }
    if (j.contains("code_relevant")) {
        const auto& r = j.at("code_relevant");
        RelevanceAnnotation a;
        a.value = r.at("value").get<bool>();
        a.criterion = parse_criterion(r.at("criterion").get<std::string>());
        a.side_unavailable = r.value("side_unavailable", false);
        s.code_relevant = a;
    }
    if (j.contains("verifiable")) {
        const auto& v = j.at("verifiable");
        VerifiabilityAnnotation a;
        a.value = v.at("value").get<bool>();
        a.score = v.at("score").get<double>();
        if (v.contains("best") && !v.at("best").is_null()) a.best = v.at("best").get<IssueSentenceRef>();
        s.verifiable = a;
    }
    if (j.contains("retained")) s.retained = j.at("retained").get<bool>();
}

}  // namespace suppcom
