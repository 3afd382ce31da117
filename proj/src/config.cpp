#include "suppcom/config.hpp"

#include "suppcom/error.hpp"
#include "suppcom/jsonl.hpp"

#include <chrono>
#include <set>

namespace suppcom {

namespace {

using nlohmann::json;

// Walks one JSON object; fails on keys that were never read.
class Section {
public:
    Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ValidationError(where_ + ": expected an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ValidationError(where_ + ": unknown key '" + key + "'");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ValidationError(where_ + "." + key + ": wrong type");
        }
    }

    std::string path(const std::string& key) const { return where_ + "." + key; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.empty() || path.is_absolute()) return path;
    return (base / path).lexically_normal();
}

void check_fraction(double v, const std::string& name, bool allow_zero) {
    if (!(v <= 1.0) || v < 0.0 || (!allow_zero && v == 0.0)) {
        throw ValidationError("thresholds." + name + " out of range: " + std::to_string(v));
    }
}

RetryPolicy read_retry(Section& s) {
    RetryPolicy r;
    int attempts = r.attempts;
    long long delay = r.base_delay.count();
    s.read("attempts", attempts);
    s.read("base_delay_ms", delay);
    if (attempts < 1) throw ValidationError("retry.attempts must be >= 1");
    if (delay < 0) throw ValidationError("retry.base_delay_ms must be >= 0");
    r.attempts = attempts;
    r.base_delay = std::chrono::milliseconds(delay);
    return r;
}

}  // namespace

PipelineConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    c.config_dir = base_dir;
    Section root(j, "config");

    if (!root.has("repos")) throw ValidationError("config.repos is required");
    const json& repos = root.at("repos");
    if (!repos.is_array()) throw ValidationError("config.repos: expected an array");
    for (std::size_t i = 0; i < repos.size(); ++i) {
        Section r(repos[i], "config.repos[" + std::to_string(i) + "]");
        std::string path, name;
        r.read("path", path);
        r.read("name", name);
        if (path.empty()) throw ValidationError(r.path("path") + " is required");
        RepoConfig rc{resolve(base_dir, path), name};
        if (rc.name.empty()) rc.name = rc.path.filename().string();
        c.repos.push_back(std::move(rc));
    }

    if (root.has("miner")) {
        Section m(root.at("miner"), "config.miner");
        m.read("extensions", c.extensions);
        m.read("revision_range", c.revision_range);
        m.read("include_merges", c.include_merges);
        m.read("include_uncommented", c.include_uncommented);
        m.read("min_method_lines", c.min_method_lines);
        m.read("issue_key_pattern", c.issue_key_pattern);
        if (c.min_method_lines < 1) throw ValidationError("config.miner.min_method_lines must be >= 1");
    }

    if (!root.has("issues")) throw ValidationError("config.issues is required");
    {
        Section is(root.at("issues"), "config.issues");
        if (is.has("directory")) {
            std::string dir;
            is.read("directory", dir);
            c.issue_directory = resolve(base_dir, dir);
        }
        if (is.has("tracker")) {
            Section t(is.at("tracker"), "config.issues.tracker");
            TrackerSource ts;
            std::string cache;
            t.read("base_url", ts.base_url);
            t.read("url_template", ts.url_template);
            t.read("token_env", ts.token_env);
            t.read("cache_dir", cache);
            if (ts.base_url.empty()) throw ValidationError("config.issues.tracker.base_url is required");
            if (!cache.empty()) ts.cache_dir = resolve(base_dir, cache);
            c.tracker = std::move(ts);
        }
        if (c.issue_directory.has_value() == c.tracker.has_value()) {
            throw ValidationError("config.issues: exactly one of 'directory' or 'tracker' is required");
        }
    }

    if (root.has("thresholds")) {
        Section t(root.at("thresholds"), "config.thresholds");
        t.read("overlap", c.thresholds.overlap);
        t.read("mesia", c.thresholds.mesia);
        t.read("similarity", c.thresholds.similarity);
    }
    check_fraction(c.thresholds.overlap, "overlap", false);
    check_fraction(c.thresholds.similarity, "similarity", true);
    if (!(c.thresholds.mesia >= 0.0)) throw ValidationError("thresholds.mesia must be >= 0");

    if (root.has("overlap_mode")) {
        std::string mode;
        root.read("overlap_mode", mode);
        if (mode == "set") c.overlap_mode = OverlapMode::Set;
        else if (mode == "multiset") c.overlap_mode = OverlapMode::Multiset;
        else throw ValidationError("config.overlap_mode must be 'set' or 'multiset'");
    }

    if (root.has("providers")) {
        Section p(root.at("providers"), "config.providers");
        if (p.has("chat")) {
            Section ch(p.at("chat"), "config.providers.chat");
            std::string fixtures;
            ch.read("kind", c.chat.kind);
            ch.read("fixtures", fixtures);
            ch.read("endpoint", c.chat.endpoint);
            ch.read("model", c.chat.model);
            ch.read("api_key_env", c.chat.api_key_env);
            ch.read("temperature", c.chat.temperature);
            ch.read("max_tokens", c.chat.max_tokens);
            if (!fixtures.empty()) c.chat.fixtures = resolve(base_dir, fixtures);
        }
        if (p.has("embedding")) {
            Section e(p.at("embedding"), "config.providers.embedding");
            e.read("kind", c.embedding.kind);
            e.read("dim", c.embedding.dim);
            e.read("hashes", c.embedding.hashes);
            e.read("base_url", c.embedding.base_url);
            e.read("token_env", c.embedding.token_env);
        }
        if (p.has("side")) {
            Section s(p.at("side"), "config.providers.side");
            s.read("kind", c.side.kind);
            s.read("base_url", c.side.base_url);
            s.read("token_env", c.side.token_env);
        }
    }
    if (c.chat.kind == "mock") {
        if (c.chat.fixtures.empty()) throw ValidationError("config.providers.chat.fixtures is required for mock");
    } else if (c.chat.kind == "openai") {
        if (c.chat.endpoint.empty() || c.chat.model.empty()) {
            throw ValidationError("config.providers.chat: openai needs endpoint and model");
        }
    } else {
        throw ValidationError("config.providers.chat.kind must be 'mock' or 'openai'");
    }
    if (c.embedding.kind == "offline") {
        if (c.embedding.dim == 0 || c.embedding.hashes == 0) {
            throw ValidationError("config.providers.embedding: dim and hashes must be positive");
        }
    } else if (c.embedding.kind == "http") {
        if (c.embedding.base_url.empty()) throw ValidationError("config.providers.embedding.base_url is required");
    } else {
        throw ValidationError("config.providers.embedding.kind must be 'offline' or 'http'");
    }
    if (c.side.kind == "http") {
        if (c.side.base_url.empty()) throw ValidationError("config.providers.side.base_url is required");
    } else if (c.side.kind != "offline" && c.side.kind != "none") {
        throw ValidationError("config.providers.side.kind must be 'offline', 'http' or 'none'");
    }

    if (root.has("retry")) {
        Section r(root.at("retry"), "config.retry");
        c.retry = read_retry(r);
    }

    root.read("concurrency", c.concurrency);
    if (c.concurrency == 0) throw ValidationError("config.concurrency must be >= 1");
    if (root.has("output_dir")) {
        std::string out;
        root.read("output_dir", out);
        c.output_dir = out;
    }
    c.output_dir = resolve(base_dir, c.output_dir.string());
    if (root.has("prompts")) {
        std::string dir;
        root.read("prompts", dir);
        c.prompts_dir = resolve(base_dir, dir);
    }
    root.read("max_issue_words", c.max_issue_words);
    root.read("failure_rate_ceiling", c.failure_rate_ceiling);
    if (c.failure_rate_ceiling < 0.0 || c.failure_rate_ceiling > 1.0) {
        throw ValidationError("config.failure_rate_ceiling must lie in [0, 1]");
    }
    root.read("exclude_code_blocks", c.exclude_code_blocks);
    root.read("application_mode", c.application_mode);
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    auto base = std::filesystem::absolute(path).parent_path();
    return parse_config(j, base);
}

json config_to_json(const PipelineConfig& c) {
    json repos = json::array();
    for (const auto& r : c.repos) repos.push_back({{"path", r.path.string()}, {"name", r.name}});
    json issues = json::object();
    if (c.issue_directory) issues["directory"] = c.issue_directory->string();
    if (c.tracker) {
        issues["tracker"] = {{"base_url", c.tracker->base_url},
                             {"url_template", c.tracker->url_template},
                             {"token_env", c.tracker->token_env},
                             {"cache_dir", c.tracker->cache_dir.string()}};
    }
    json j{
        {"repos", repos},
        {"miner",
         {{"extensions", c.extensions},
          {"revision_range", c.revision_range},
          {"include_merges", c.include_merges},
          {"include_uncommented", c.include_uncommented},
          {"min_method_lines", c.min_method_lines},
          {"issue_key_pattern", c.issue_key_pattern}}},
        {"issues", issues},
        {"thresholds",
         {{"overlap", c.thresholds.overlap}, {"mesia", c.thresholds.mesia}, {"similarity", c.thresholds.similarity}}},
        {"overlap_mode", c.overlap_mode == OverlapMode::Set ? "set" : "multiset"},
        {"providers",
         {{"chat",
           {{"kind", c.chat.kind},
            {"fixtures", c.chat.fixtures.string()},
            {"endpoint", c.chat.endpoint},
            {"model", c.chat.model},
            {"api_key_env", c.chat.api_key_env},
            {"temperature", c.chat.temperature},
            {"max_tokens", c.chat.max_tokens}}},
          {"embedding",
           {{"kind", c.embedding.kind},
            {"dim", c.embedding.dim},
            {"hashes", c.embedding.hashes},
            {"base_url", c.embedding.base_url},
            {"token_env", c.embedding.token_env}}},
          {"side", {{"kind", c.side.kind}, {"base_url", c.side.base_url}, {"token_env", c.side.token_env}}}}},
        {"retry", {{"attempts", c.retry.attempts}, {"base_delay_ms", c.retry.base_delay.count()}}},
        {"concurrency", c.concurrency},
        {"output_dir", c.output_dir.string()},
        {"max_issue_words", c.max_issue_words},
        {"failure_rate_ceiling", c.failure_rate_ceiling},
        {"exclude_code_blocks", c.exclude_code_blocks},
        {"application_mode", c.application_mode},
    };
    if (c.prompts_dir) j["prompts"] = c.prompts_dir->string();
    return j;
}

}  // namespace suppcom
