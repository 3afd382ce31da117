#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "suppcom/comment.hpp"
#include "suppcom/corpus.hpp"
#include "suppcom/http.hpp"
#include "suppcom/issues.hpp"

namespace suppcom {

struct EvidenceSentence {
    IssueSentenceRef ref;
    std::string text;

    friend bool operator==(const EvidenceSentence&, const EvidenceSentence&) = default;
};

// Issue sentences supporting each information type. Types without
// evidence are absent; lists are never empty.
struct RetrievedEvidence {
    std::string method_id;
    std::map<InfoType, std::vector<EvidenceSentence>> entries;

    bool empty() const { return entries.empty(); }
    std::size_t sentence_count() const;
    // Adds unless (type, ref) is already present. Returns true if added.
    bool add(InfoType type, EvidenceSentence sentence);

    friend bool operator==(const RetrievedEvidence&, const RetrievedEvidence&) = default;
};

struct GeneratedComment {
    std::string method_id;
    std::vector<CommentSentence> sentences;  // each carries an info_type

    friend bool operator==(const GeneratedComment&, const GeneratedComment&) = default;
};

void to_json(nlohmann::json& j, const RetrievedEvidence& e);
void from_json(const nlohmann::json& j, RetrievedEvidence& e);
void to_json(nlohmann::json& j, const GeneratedComment& g);
void from_json(const nlohmann::json& j, GeneratedComment& g);

// ---------------------------------------------------------------------------
// Chat providers

struct ChatParams {
    std::string model;
    double temperature = 0.0;
    int max_tokens = 0;  // 0: provider default
};

struct ChatRequest {
    std::string phase;  // "retrieval" or "generation"; not sent over the wire
    std::string system;
    std::string user;
    ChatParams params;
};

struct ChatResponse {
    std::string text;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string id() const = 0;
    // Throws TransientError / NotFoundError / Error on failure.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct MockRule {
    std::optional<std::string> request_hash;
    std::string phase;                  // empty matches any phase
    std::vector<std::string> contains;  // all must occur in the user prompt
    std::string response;
    bool fail = false;                  // throw a TransientError instead
};

// Scripted provider for tests and offline runs. Lookup order: a
// `<request-hash>.txt` file in the fixtures directory, then the first
// matching rule of `index.json`. Unknown requests throw NotFoundError.
class MockChatProvider final : public ChatProvider {
public:
    explicit MockChatProvider(std::vector<MockRule> rules);
    static MockChatProvider from_directory(const std::filesystem::path& dir);

    std::string id() const override { return "mock"; }
    ChatResponse complete(const ChatRequest& request) override;

    // sha256 over system and user text.
    static std::string request_hash(const ChatRequest& request);

private:
    std::vector<MockRule> rules_;
    std::filesystem::path dir_;
};

struct OpenAIConfig {
    std::string endpoint;  // full chat-completions URL
    std::string model;
    std::string api_key_env;
    RetryPolicy retry;
};

// Chat-completions endpoint with system and user roles.
class OpenAIChatProvider final : public ChatProvider {
public:
    OpenAIChatProvider(OpenAIConfig config, std::shared_ptr<HttpTransport> transport);
    std::string id() const override { return "openai:" + config_.model; }
    ChatResponse complete(const ChatRequest& request) override;

private:
    OpenAIConfig config_;
    std::shared_ptr<HttpTransport> transport_;
};

// ---------------------------------------------------------------------------
// Prompts

struct ChatPrompt {
    std::string system;
    std::string user;
    bool truncated = false;

    std::string text() const { return system + "\n\n" + user; }
};

// The four prompt templates. Slots are written {{NAME}}.
struct PromptTemplates {
    std::string retrieval_system;
    std::string retrieval_user;
    std::string generation_system;
    std::string generation_user;

    // Compiled-in copies of prompts/*.txt.
    static const PromptTemplates& builtin();
    // Reads retrieval_system.txt, retrieval_user.txt, generation_system.txt
    // and generation_user.txt from `dir`.
    static PromptTemplates load(const std::filesystem::path& dir);
    // sha256 over all four templates; identifies the prompt version.
    std::string hash() const;
};

inline std::string prompt_template_hash() { return PromptTemplates::builtin().hash(); }

struct RetrievalPromptOptions {
    std::size_t max_issue_words = 2000;  // 0: unlimited
};

// Task, type definitions, then the method and the numbered issue sentences.
// Over budget, whole sentences are dropped from the end (discussion first).
ChatPrompt build_retrieval_prompt(const MethodRecord& method, const IssueReport& issue,
                                  const RetrievalPromptOptions& options = {},
                                  const PromptTemplates& templates = PromptTemplates::builtin());

// Throws ValidationError on empty evidence.
ChatPrompt build_generation_prompt(const MethodRecord& method, const RetrievedEvidence& evidence,
                                   const PromptTemplates& templates = PromptTemplates::builtin());

struct RetrievalParse {
    RetrievedEvidence evidence;
    std::size_t fabrications = 0;  // quotes that match no issue sentence
    bool parse_failure = false;
    bool declared_none = false;
};

// Quotes are aligned to issue sentences: exact substring first, otherwise
// the sentence with the highest word overlap if it exceeds
// `align_threshold`; anything else counts as a fabrication.
RetrievalParse parse_retrieval_response(std::string_view response, const IssueReport& issue,
                                        double align_threshold = 0.7);

struct GenerationParse {
    GeneratedComment comment;
    std::size_t stray_lines = 0;  // text outside any type section
    bool parse_failure = false;
};

GenerationParse parse_generation_response(std::string_view response);

// Heading such as "### Implication" or "**Rationale:**"; nullopt otherwise.
std::optional<InfoType> parse_type_heading(std::string_view line);

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineParams {
    ChatParams chat;
    RetrievalPromptOptions retrieval;
    double align_threshold = 0.7;
    PromptTemplates templates = PromptTemplates::builtin();
};

struct Telemetry {
    std::string prompt_hash;
    std::size_t chat_calls = 0;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    std::size_t truncations = 0;
    std::size_t fabrications = 0;
    std::size_t parse_failures = 0;
    std::size_t stray_lines = 0;
    std::vector<double> latencies_ms;  // kept out of generated.jsonl
};

enum class PipelineStatus { Ok, NoEvidence, Failed };

std::string_view to_string(PipelineStatus s);
PipelineStatus parse_pipeline_status(std::string_view s);

struct PipelineResult {
    RetrievedEvidence evidence;
    GeneratedComment generated;
    Telemetry telemetry;
    PipelineStatus status = PipelineStatus::Ok;
    std::string error;
};

// Retrieval per linked issue (evidence merged), then one generation call.
// Provider failures and unparseable responses mark the result Failed; they
// never throw.
PipelineResult run_pipeline(const MethodRecord& method, std::span<const IssueReport* const> issues,
                            ChatProvider& provider, const PipelineParams& params);

void to_json(nlohmann::json& j, const Telemetry& t);  // without latencies

}  // namespace suppcom
