#include "suppcom/http.hpp"

#include "suppcom/error.hpp"

#include <httplib.h>

#include <thread>

namespace suppcom {

std::atomic<bool> NetworkGuard::denied_{false};
std::atomic<std::size_t> NetworkGuard::attempts_{0};

void NetworkGuard::deny(bool denied) { denied_ = denied; }
bool NetworkGuard::denied() { return denied_; }
std::size_t NetworkGuard::attempts() { return attempts_; }
void NetworkGuard::reset_attempts() { attempts_ = 0; }

void NetworkGuard::check(const std::string& url) {
    ++attempts_;
    if (denied_) throw NetworkDeniedError("network access denied: " + url);
}

std::pair<std::string, std::string> split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t path = url.find('/', host_start);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

namespace {

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

    HttpResponse get(const std::string& url, const HttpHeaders& headers) override {
        NetworkGuard::check(url);
        auto [origin, path] = split_url(url);
        httplib::Client client(origin);
        configure(client);
        auto res = client.Get(path, to_headers(headers));
        return convert(res, url);
    }

    HttpResponse post(const std::string& url, const std::string& body,
                      const std::string& content_type, const HttpHeaders& headers) override {
        NetworkGuard::check(url);
        auto [origin, path] = split_url(url);
        httplib::Client client(origin);
        configure(client);
        auto res = client.Post(path, to_headers(headers), body, content_type);
        return convert(res, url);
    }

private:
    void configure(httplib::Client& client) const {
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_).count();
        client.set_connection_timeout(std::max<long>(1, static_cast<long>(secs)), 0);
        client.set_read_timeout(std::max<long>(1, static_cast<long>(secs)), 0);
    }

    static httplib::Headers to_headers(const HttpHeaders& headers) {
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        return h;
    }

    static HttpResponse convert(const httplib::Result& res, const std::string& url) {
        if (!res) {
            throw TransientError("HTTP request to " + url + " failed: " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    }

    std::chrono::milliseconds timeout_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(std::chrono::milliseconds timeout) {
    return std::make_shared<HttplibTransport>(timeout);
}

HttpResponse with_retries(const RetryPolicy& policy, const std::function<HttpResponse()>& request,
                          const std::string& what) {
    const int attempts = std::max(1, policy.attempts);
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(policy.base_delay * (1 << (attempt - 1)));
        try {
            HttpResponse res = request();
            if (!is_retriable_status(res.status)) return res;
            last_error = "HTTP " + std::to_string(res.status);
        } catch (const TransientError& e) {
            last_error = e.what();
        }
    }
    throw TransientError(what + ": retries exhausted (" + last_error + ")", true);
}

}  // namespace suppcom
