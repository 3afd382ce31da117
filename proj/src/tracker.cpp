#include "suppcom/tracker.hpp"

#include "suppcom/error.hpp"
#include "suppcom/jsonl.hpp"

#include <cctype>
#include <cstdlib>

namespace suppcom {

namespace {

std::string substitute(std::string s, const std::string& slot, const std::string& value) {
    std::size_t pos;
    while ((pos = s.find(slot)) != std::string::npos) s.replace(pos, slot.size(), value);
    return s;
}

std::string cache_segment(const std::string& url) {
    std::string host = split_url(url).first;
    std::size_t scheme = host.find("://");
    if (scheme != std::string::npos) host = host.substr(scheme + 3);
    for (char& c : host) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
    }
    return host.empty() ? "tracker" : host;
}

}  // namespace

TrackerClient::TrackerClient(TrackerConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (!transport_) throw std::invalid_argument("TrackerClient requires a transport");
}

std::filesystem::path TrackerClient::cache_path(const std::string& key) const {
    return config_.cache_dir / cache_segment(config_.base_url) / (key + ".json");
}

IssueReport TrackerClient::fetch(const std::string& key) {
    std::filesystem::path cached = cache_path(key);
    if (!config_.cache_dir.empty() && std::filesystem::exists(cached)) {
        return ingest_issue(nlohmann::json::parse(read_file(cached)));
    }

    std::string url = substitute(substitute(config_.url_template, "{base}", config_.base_url), "{key}", key);
    HttpHeaders headers{{"Accept", "application/json"}};
    if (!config_.token_env.empty()) {
        if (const char* token = std::getenv(config_.token_env.c_str()); token && *token) {
            headers["Authorization"] = std::string("Bearer ") + token;
        }
    }
    HttpResponse res = with_retries(
        config_.retry,
        [&] {
            ++network_calls_;
            return transport_->get(url, headers);
        },
        "fetch " + key);
    if (res.status == 404) throw NotFoundError("issue not found: " + key);
    if (res.status < 200 || res.status >= 300) {
        throw Error("tracker returned HTTP " + std::to_string(res.status) + " for " + key);
    }
    nlohmann::json payload;
    try {
        payload = nlohmann::json::parse(res.body);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("tracker payload for " + key + " is not JSON: " + e.what());
    }
    IssueReport report = ingest_issue(payload);
    if (!config_.cache_dir.empty()) write_file_atomic(cached, payload.dump(2) + "\n");
    return report;
}

}  // namespace suppcom
