#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>

#include "suppcom/http.hpp"
#include "suppcom/issues.hpp"

namespace suppcom {

struct TrackerConfig {
    std::string base_url;
    // {base} and {key} are substituted.
    std::string url_template = "{base}/rest/api/2/issue/{key}";
    std::string token_env;  // bearer token read from this environment variable
    std::filesystem::path cache_dir;
    RetryPolicy retry;
};

// REST client for issue trackers. Payloads are cached on disk keyed by
// (tracker host, key) so reruns never touch the network.
class TrackerClient {
public:
    TrackerClient(TrackerConfig config, std::shared_ptr<HttpTransport> transport);

    // Throws NotFoundError on 404 and TransientError once retries run out.
    IssueReport fetch(const std::string& key);

    std::size_t network_calls() const { return network_calls_; }
    std::filesystem::path cache_path(const std::string& key) const;

private:
    TrackerConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::atomic<std::size_t> network_calls_{0};
};

inline IssueReport fetch_issue(TrackerClient& client, const std::string& key) {
    return client.fetch(key);
}

}  // namespace suppcom
