#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>

namespace suppcom {

struct HttpResponse {
    int status = 0;
    std::string body;
};

using HttpHeaders = std::map<std::string, std::string>;

// Minimal HTTP client surface so tests can script servers or fakes.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // Throws TransientError on connection failures.
    virtual HttpResponse get(const std::string& url, const HttpHeaders& headers) = 0;
    virtual HttpResponse post(const std::string& url, const std::string& body,
                              const std::string& content_type, const HttpHeaders& headers) = 0;
};

// cpp-httplib backed transport. Every call is checked against NetworkGuard.
std::shared_ptr<HttpTransport> make_http_transport(std::chrono::milliseconds timeout =
                                                       std::chrono::seconds(60));

// Process-wide switch used by offline runs and tests: while denied, every
// request throws NetworkDeniedError. Attempts are counted either way.
class NetworkGuard {
public:
    static void deny(bool denied);
    static bool denied();
    static std::size_t attempts();
    static void reset_attempts();
    // Throws NetworkDeniedError when denied.
    static void check(const std::string& url);

private:
    static std::atomic<bool> denied_;
    static std::atomic<std::size_t> attempts_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds base_delay{500};
};

inline bool is_retriable_status(int status) { return status == 429 || status >= 500; }

// Calls `request` up to policy.attempts times, sleeping base*2^k between
// tries. Retries on TransientError and on 429/5xx responses. Throws
// TransientError(retries_exhausted=true) when the budget is spent; other
// responses are returned as-is.
HttpResponse with_retries(const RetryPolicy& policy, const std::function<HttpResponse()>& request,
                          const std::string& what);

// Splits "http://host:port/base" into ("http://host:port", "/base").
std::pair<std::string, std::string> split_url(const std::string& url);

}  // namespace suppcom
