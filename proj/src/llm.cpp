#include "suppcom/llm.hpp"

#include "suppcom/error.hpp"

#include <chrono>

namespace suppcom {

std::size_t RetrievedEvidence::sentence_count() const {
    std::size_t n = 0;
    for (const auto& [t, v] : entries) n += v.size();
    return n;
}

bool RetrievedEvidence::add(InfoType type, EvidenceSentence sentence) {
    auto& list = entries[type];
    for (const auto& s : list) {
        if (s.ref == sentence.ref) return false;
    }
    list.push_back(std::move(sentence));
    return true;
}

void to_json(nlohmann::json& j, const RetrievedEvidence& e) {
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [type, sentences] : e.entries) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& s : sentences) {
            list.push_back({{"issue_key", s.ref.issue_key}, {"index", s.ref.index}, {"text", s.text}});
        }
        entries[std::string(to_string(type))] = std::move(list);
    }
    j = nlohmann::json{{"method_id", e.method_id}, {"entries", std::move(entries)}};
}

void from_json(const nlohmann::json& j, RetrievedEvidence& e) {
    e = RetrievedEvidence{};
    j.at("method_id").get_to(e.method_id);
    for (const auto& [name, list] : j.at("entries").items()) {
        auto type = parse_info_type(name);
        if (!type) throw ValidationError("unknown information type: " + name);
        for (const auto& s : list) {
            e.add(*type, {{s.at("issue_key").get<std::string>(), s.at("index").get<std::size_t>()},
                          s.at("text").get<std::string>()});
        }
    }
}

void to_json(nlohmann::json& j, const GeneratedComment& g) {
    j = nlohmann::json{{"method_id", g.method_id}, {"sentences", g.sentences}};
}

void from_json(const nlohmann::json& j, GeneratedComment& g) {
    j.at("method_id").get_to(g.method_id);
    j.at("sentences").get_to(g.sentences);
}

void to_json(nlohmann::json& j, const Telemetry& t) {
    j = nlohmann::json{{"prompt_hash", t.prompt_hash},
                       {"chat_calls", t.chat_calls},
                       {"prompt_tokens", t.prompt_tokens},
                       {"completion_tokens", t.completion_tokens},
                       {"truncations", t.truncations},
                       {"fabrications", t.fabrications},
                       {"parse_failures", t.parse_failures},
                       {"stray_lines", t.stray_lines}};
}

std::string_view to_string(PipelineStatus s) {
    switch (s) {
        case PipelineStatus::Ok: return "ok";
        case PipelineStatus::NoEvidence: return "no_evidence";
        case PipelineStatus::Failed: return "failed";
    }
    return "failed";
}

PipelineStatus parse_pipeline_status(std::string_view s) {
    if (s == "ok") return PipelineStatus::Ok;
    if (s == "no_evidence") return PipelineStatus::NoEvidence;
    if (s == "failed") return PipelineStatus::Failed;
    throw ValidationError("unknown pipeline status: " + std::string(s));
}

namespace {

ChatResponse timed_call(ChatProvider& provider, const ChatRequest& request, Telemetry& telemetry) {
    auto start = std::chrono::steady_clock::now();
    ++telemetry.chat_calls;
    ChatResponse res = provider.complete(request);
    telemetry.latencies_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    telemetry.prompt_tokens += res.prompt_tokens;
    telemetry.completion_tokens += res.completion_tokens;
    return res;
}

}  // namespace

PipelineResult run_pipeline(const MethodRecord& method, std::span<const IssueReport* const> issues,
                            ChatProvider& provider, const PipelineParams& params) {
    PipelineResult result;
    result.evidence.method_id = method.id;
    result.generated.method_id = method.id;
    result.telemetry.prompt_hash = params.templates.hash();

    auto fail = [&](std::string why) {
        result.status = PipelineStatus::Failed;
        result.error = std::move(why);
        return result;
    };

    std::size_t parsed = 0;
    for (const IssueReport* issue : issues) {
        if (!issue) continue;
        ChatPrompt prompt = build_retrieval_prompt(method, *issue, params.retrieval, params.templates);
        if (prompt.truncated) ++result.telemetry.truncations;
        ChatResponse res;
        try {
            res = timed_call(provider, {"retrieval", prompt.system, prompt.user, params.chat}, result.telemetry);
        } catch (const std::exception& e) {
            return fail(std::string("retrieval call failed: ") + e.what());
        }
        RetrievalParse rp = parse_retrieval_response(res.text, *issue, params.align_threshold);
        result.telemetry.fabrications += rp.fabrications;
        if (rp.parse_failure) {
            ++result.telemetry.parse_failures;
            continue;
        }
        ++parsed;
        for (auto& [type, sentences] : rp.evidence.entries) {
            for (auto& s : sentences) result.evidence.add(type, std::move(s));
        }
    }
    if (result.evidence.empty()) {
        if (parsed == 0) return fail("no parseable retrieval response");
        result.status = PipelineStatus::NoEvidence;
        return result;
    }

    ChatPrompt prompt = build_generation_prompt(method, result.evidence, params.templates);
    ChatResponse res;
    try {
        res = timed_call(provider, {"generation", prompt.system, prompt.user, params.chat}, result.telemetry);
    } catch (const std::exception& e) {
        return fail(std::string("generation call failed: ") + e.what());
    }
    GenerationParse gp = parse_generation_response(res.text);
    result.telemetry.stray_lines += gp.stray_lines;
    if (gp.parse_failure || gp.comment.sentences.empty()) {
        ++result.telemetry.parse_failures;
        return fail("unparseable generation response");
    }
    result.generated.sentences = std::move(gp.comment.sentences);
    return result;
}

}  // namespace suppcom
