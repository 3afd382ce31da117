#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "suppcom/config.hpp"
#include "suppcom/git.hpp"
#include "suppcom/jsonl.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return fs::path(SUPPCOM_FIXTURES_DIR); }
inline fs::path fixture(const std::string& rel) { return fixtures_dir() / rel; }

inline nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(suppcom::read_file(p)); }

inline const nlohmann::json& oracle() {
    static const nlohmann::json j = load_json(fixture("oracles/expected.json"));
    return j;
}

inline std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "suppcom-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
}

// Scripted git repository with a fixed identity and one day per commit.
class GitFixture {
public:
    explicit GitFixture(fs::path dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_ / ".home");
        setenv("HOME", (dir_ / ".home").c_str(), 1);
        setenv("GIT_CONFIG_NOSYSTEM", "1", 1);
        setenv("GIT_AUTHOR_NAME", "Fixture Author", 1);
        setenv("GIT_AUTHOR_EMAIL", "author@example.org", 1);
        setenv("GIT_COMMITTER_NAME", "Fixture Author", 1);
        setenv("GIT_COMMITTER_EMAIL", "author@example.org", 1);
        git({"init", "-q", "-b", "main", "."});
        git({"config", "commit.gpgsign", "false"});
    }

    const fs::path& path() const { return dir_; }

    void write(const std::string& rel, const std::string& content) { write_text(dir_ / rel, content); }
    void remove(const std::string& rel) { fs::remove(dir_ / rel); }

    std::string commit(const std::string& message) {
        ++step_;
        char when[32];
        std::snprintf(when, sizeof when, "2023-01-%02dT12:00:00Z", step_);
        setenv("GIT_AUTHOR_DATE", when, 1);
        setenv("GIT_COMMITTER_DATE", when, 1);
        git({"add", "-A"});
        git({"commit", "-q", "--allow-empty", "-m", message});
        auto head = git({"rev-parse", "HEAD"});
        return head.substr(0, head.find('\n'));
    }

private:
    std::string git(std::vector<std::string> args) {
        args.insert(args.begin(), {"git", "-C", dir_.string()});
        auto r = suppcom::run_process(args);
        if (r.exit_code != 0) throw std::runtime_error("git failed: " + args[3]);
        return r.output;
    }

    fs::path dir_;
    int step_ = 0;
};

// The end-to-end fixture: builds the repository under `work` and returns
// the fixture config with repo and output redirected into `work`.
inline suppcom::PipelineConfig e2e_config(const fs::path& work, const std::string& config_name = "config.json") {
    fs::path repo = work / "repo";
    std::string cmd = "bash '" + fixture("e2e/build_repo.sh").string() + "' '" + repo.string() + "' >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("build_repo.sh failed");
    suppcom::PipelineConfig config = suppcom::load_config(fixture("e2e/" + config_name));
    config.repos.at(0).path = repo;
    config.output_dir = work / "out";
    return config;
}

// cpp-httplib server on an ephemeral loopback port, stopped on destruction.
class FakeServer {
public:
    FakeServer() = default;
    ~FakeServer() { stop(); }
    FakeServer(const FakeServer&) = delete;
    FakeServer& operator=(const FakeServer&) = delete;

    httplib::Server& server() { return server_; }

    void start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw std::runtime_error("FakeServer: bind failed");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        for (int i = 0; i < 200 && !server_.is_running(); ++i) {
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace testsupport
