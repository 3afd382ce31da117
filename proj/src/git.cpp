#include "suppcom/git.hpp"

#include "suppcom/error.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <sstream>

namespace suppcom {

ProcessResult run_process(const std::vector<std::string>& argv) {
    if (argv.empty()) throw std::invalid_argument("run_process: empty argv");
    int pipefd[2];
    if (pipe(pipefd) != 0) throw Error("pipe() failed");
    pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        throw Error("fork() failed");
    }
    if (pid == 0) {
        dup2(pipefd[1], STDOUT_FILENO);
        int devnull = open("/dev/null", O_WRONLY);
        if (devnull >= 0) dup2(devnull, STDERR_FILENO);
        close(pipefd[0]);
        close(pipefd[1]);
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }
    close(pipefd[1]);
    ProcessResult result;
    char buf[65536];
    ssize_t n;
    while ((n = read(pipefd[0], buf, sizeof buf)) > 0) result.output.append(buf, static_cast<std::size_t>(n));
    close(pipefd[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::vector<DiffHunk> parse_unified_hunks(const std::string& diff) {
    std::vector<DiffHunk> hunks;
    std::istringstream in(diff);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("@@ ", 0) != 0) continue;
        std::size_t plus = line.find(" +");
        if (plus == std::string::npos) continue;
        DiffHunk h;
        std::size_t pos = plus + 2;
        h.start = std::stoi(line.substr(pos));
        std::size_t comma = line.find(',', pos);
        std::size_t space = line.find(' ', pos);
        h.count = (comma != std::string::npos && comma < space) ? std::stoi(line.substr(comma + 1)) : 1;
        hunks.push_back(h);
    }
    return hunks;
}

bool hunks_touch(const std::vector<DiffHunk>& hunks, int first, int last) {
    for (const auto& h : hunks) {
        if (h.count > 0) {
            if (h.start <= last && h.start + h.count - 1 >= first) return true;
        } else if (first <= h.start && h.start < last) {
            return true;
        }
    }
    return false;
}

GitRepository::GitRepository(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (!std::filesystem::is_directory(path_, ec)) {
        throw RepositoryError("not a directory: " + path_.string());
    }
    if (git({"rev-parse", "--git-dir"}).exit_code != 0) {
        throw RepositoryError("not a git repository: " + path_.string());
    }
}

ProcessResult GitRepository::git(std::vector<std::string> args) const {
    std::vector<std::string> argv{"git", "-C", path_.string(), "-c", "core.quotepath=off"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv);
}

std::vector<CommitInfo> GitRepository::list_commits(const std::string& revision_range,
                                                    bool include_merges) const {
    if (revision_range.empty() && git({"rev-parse", "--verify", "-q", "HEAD"}).exit_code != 0) {
        return {};
    }
    std::vector<std::string> args{"log", "--reverse", "--format=%H%x1f%at%x1f%B%x1e"};
    if (!include_merges) args.push_back("--no-merges");
    args.push_back(revision_range.empty() ? "HEAD" : revision_range);
    args.push_back("--");
    ProcessResult res = git(args);
    if (res.exit_code != 0) throw RepositoryError("git log failed in " + path_.string());

    std::vector<CommitInfo> commits;
    std::size_t pos = 0;
    while (pos < res.output.size()) {
        std::size_t end = res.output.find('\x1e', pos);
        if (end == std::string::npos) end = res.output.size();
        std::string record = res.output.substr(pos, end - pos);
        pos = end + 1;
        std::size_t first = record.find_first_not_of("\n");
        if (first == std::string::npos) continue;
        record = record.substr(first);
        std::size_t f1 = record.find('\x1f');
        std::size_t f2 = record.find('\x1f', f1 + 1);
        if (f1 == std::string::npos || f2 == std::string::npos) continue;
        CommitInfo c;
        c.hash = record.substr(0, f1);
        c.author_time = std::stoll(record.substr(f1 + 1, f2 - f1 - 1));
        c.message = record.substr(f2 + 1);
        while (!c.message.empty() && (c.message.back() == '\n' || c.message.back() == ' ')) {
            c.message.pop_back();
        }
        ProcessResult paths =
            git({"diff-tree", "--no-commit-id", "--name-only", "-r", "--root", "-m",
                 "--first-parent", "--no-renames", "-z", c.hash});
        if (paths.exit_code != 0) throw RepositoryError("git diff-tree failed for " + c.hash);
        std::size_t p = 0;
        while (p < paths.output.size()) {
            std::size_t z = paths.output.find('\0', p);
            if (z == std::string::npos) z = paths.output.size();
            if (z > p) c.changed_paths.push_back(paths.output.substr(p, z - p));
            p = z + 1;
        }
        commits.push_back(std::move(c));
    }
    return commits;
}

std::optional<std::string> GitRepository::file_at(const std::string& commit,
                                                  const std::string& file) const {
    ProcessResult res = git({"show", commit + ":" + file});
    if (res.exit_code != 0) return std::nullopt;
    return res.output;
}

std::vector<DiffHunk> GitRepository::diff_hunks(const std::string& commit,
                                                const std::string& file) const {
    ProcessResult res = git({"diff-tree", "-p", "--unified=0", "--no-renames", "--root", "-m",
                             "--first-parent", "--no-color", "--no-ext-diff", commit, "--", file});
    if (res.exit_code != 0) throw RepositoryError("git diff-tree -p failed for " + commit);
    return parse_unified_hunks(res.output);
}

}  // namespace suppcom
