#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "suppcom/corpus.hpp"

namespace suppcom {

struct ProcessResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

// Runs argv[0] with arguments (PATH lookup, no shell); stderr is discarded.
ProcessResult run_process(const std::vector<std::string>& argv);

// New-file side of a unified diff hunk: lines [start, start + count).
// count == 0 marks a pure deletion after line `start`.
struct DiffHunk {
    int start = 0;
    int count = 0;
};

std::vector<DiffHunk> parse_unified_hunks(const std::string& diff);

// True when any hunk adds or modifies a line in [first, last], or deletes
// lines strictly inside that range.
bool hunks_touch(const std::vector<DiffHunk>& hunks, int first, int last);

// Read-only view of a git repository through the git command line.
class GitRepository {
public:
    // Throws RepositoryError when `path` is not a readable repository.
    explicit GitRepository(std::filesystem::path path);

    const std::filesystem::path& path() const { return path_; }

    // Oldest first. Empty for a repository without commits.
    std::vector<CommitInfo> list_commits(const std::string& revision_range = {},
                                         bool include_merges = false) const;

    // File content at a commit; nullopt when the path does not exist there.
    std::optional<std::string> file_at(const std::string& commit, const std::string& file) const;

    // Hunks the commit applied to `file`, relative to its first parent
    // (all-added for a root commit).
    std::vector<DiffHunk> diff_hunks(const std::string& commit, const std::string& file) const;

private:
    ProcessResult git(std::vector<std::string> args) const;

    std::filesystem::path path_;
};

}  // namespace suppcom
