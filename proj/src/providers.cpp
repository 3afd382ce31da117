#include "suppcom/llm.hpp"

#include "suppcom/error.hpp"
#include "suppcom/hash.hpp"
#include "suppcom/jsonl.hpp"
#include "suppcom/text.hpp"

#include <algorithm>
#include <cstdlib>

namespace suppcom {

MockChatProvider::MockChatProvider(std::vector<MockRule> rules) : rules_(std::move(rules)) {}

MockChatProvider MockChatProvider::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("mock fixtures directory not found: " + dir.string());
    std::vector<MockRule> rules;
    auto index = dir / "index.json";
    if (std::filesystem::exists(index)) {
        auto j = nlohmann::json::parse(read_file(index));
        for (const auto& r : j.at("rules")) {
            MockRule rule;
            if (r.contains("request_hash")) rule.request_hash = r.at("request_hash").get<std::string>();
            rule.phase = r.value("phase", "");
            if (r.contains("contains")) rule.contains = r.at("contains").get<std::vector<std::string>>();
            rule.fail = r.value("fail", false);
            if (r.contains("response_file")) {
                rule.response = read_file(dir / r.at("response_file").get<std::string>());
            } else {
                rule.response = r.value("response", "");
            }
            rules.push_back(std::move(rule));
        }
    }
    MockChatProvider provider(std::move(rules));
    provider.dir_ = dir;
    return provider;
}

std::string MockChatProvider::request_hash(const ChatRequest& request) {
    return sha256_hex(request.system + '\x1f' + request.user);
}

ChatResponse MockChatProvider::complete(const ChatRequest& request) {
    const std::string hash = request_hash(request);
    std::optional<std::string> text;
    bool fail = false;
    if (!dir_.empty()) {
        auto direct = dir_ / (hash + ".txt");
        if (std::filesystem::exists(direct)) text = read_file(direct);
    }
    for (const auto& rule : rules_) {
        if (text) break;
        if (rule.request_hash && *rule.request_hash != hash) continue;
        if (!rule.phase.empty() && rule.phase != request.phase) continue;
        bool all = std::all_of(rule.contains.begin(), rule.contains.end(), [&](const std::string& s) {
            return request.user.find(s) != std::string::npos;
        });
        if (!all) continue;
        fail = rule.fail;
        text = rule.response;
    }
    if (fail) throw TransientError("mock provider: scripted failure", true);
    if (!text) throw NotFoundError("mock provider: no scripted response for request " + hash);
    ChatResponse res;
    res.text = *text;
    res.prompt_tokens = tokenize_words(request.system).size() + tokenize_words(request.user).size();
    res.completion_tokens = tokenize_words(res.text).size();
    return res;
}

OpenAIChatProvider::OpenAIChatProvider(OpenAIConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (!transport_) throw std::invalid_argument("OpenAIChatProvider requires a transport");
}

ChatResponse OpenAIChatProvider::complete(const ChatRequest& request) {
    nlohmann::json body{
        {"model", request.params.model.empty() ? config_.model : request.params.model},
        {"temperature", request.params.temperature},
        {"messages",
         {{{"role", "system"}, {"content", request.system}}, {{"role", "user"}, {"content", request.user}}}},
    };
    if (request.params.max_tokens > 0) body["max_tokens"] = request.params.max_tokens;
    HttpHeaders headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key) throw Error("environment variable " + config_.api_key_env + " is not set");
        headers["Authorization"] = std::string("Bearer ") + key;
    }
    HttpResponse res = with_retries(
        config_.retry, [&] { return transport_->post(config_.endpoint, body.dump(), "application/json", headers); },
        "chat completion");
    if (res.status < 200 || res.status >= 300) {
        throw Error("chat endpoint returned HTTP " + std::to_string(res.status));
    }
    ChatResponse out;
    try {
        auto j = nlohmann::json::parse(res.body);
        out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            out.prompt_tokens = j.at("usage").value("prompt_tokens", std::size_t{0});
            out.completion_tokens = j.at("usage").value("completion_tokens", std::size_t{0});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed chat completion response: ") + e.what());
    }
    return out;
}

}  // namespace suppcom
