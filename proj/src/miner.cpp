#include "suppcom/miner.hpp"

#include "suppcom/git.hpp"
#include "suppcom/parallel.hpp"
#include "suppcom/source_parser.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace suppcom {

std::vector<IssueKeyMatch> extract_issue_key_matches(std::string_view commit_message,
                                                     std::string_view pattern) {
    std::regex re{std::string(pattern)};
    std::vector<IssueKeyMatch> out;
    std::set<std::string> seen;
    std::string message(commit_message);
    for (auto it = std::sregex_iterator(message.begin(), message.end(), re);
         it != std::sregex_iterator(); ++it) {
        std::string key = it->str();
        if (!seen.insert(key).second) continue;
        auto begin = static_cast<std::size_t>(it->position());
        out.push_back({key, begin, begin + key.size()});
    }
    return out;
}

std::vector<std::string> extract_issue_keys(std::string_view commit_message, std::string_view pattern) {
    std::vector<std::string> keys;
    for (auto& m : extract_issue_key_matches(commit_message, pattern)) keys.push_back(std::move(m.key));
    return keys;
}

namespace {

bool has_extension(const std::string& path, const std::vector<std::string>& extensions) {
    return std::any_of(extensions.begin(), extensions.end(), [&](const std::string& ext) {
        return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
    });
}

struct CommitOutput {
    std::vector<MinedPair> pairs;
    std::size_t files_parsed = 0;
    std::size_t files_skipped = 0;
};

CommitOutput mine_commit(const GitRepository& repo, const CommitInfo& commit,
                         const MinerOptions& options, const std::string& repo_name) {
    CommitOutput out;
    for (const std::string& path : commit.changed_paths) {
        if (!has_extension(path, options.extensions)) continue;
        auto language = language_for_path(path);
        if (!language) continue;
        auto content = repo.file_at(commit.hash, path);
        if (!content) continue;  // deleted by this commit
        ExtractionResult extracted = extract_methods(*content, *language);
        if (extracted.parse_warning) {
            ++out.files_skipped;
            continue;
        }
        ++out.files_parsed;
        std::vector<DiffHunk> hunks = repo.diff_hunks(commit.hash, path);
        for (const ExtractedMethod& m : extracted.methods) {
            int line_count = m.end_line - m.start_line + 1;
            if (line_count < options.min_method_lines) continue;
            bool method_touched = hunks_touch(hunks, m.start_line, m.end_line);
            bool documented = m.leading_comment && !m.leading_comment->text.empty();
            bool comment_touched =
                documented &&
                hunks_touch(hunks, m.leading_comment->start_line, m.leading_comment->end_line);
            bool keep = documented ? (method_touched && comment_touched)
                                   : (options.include_uncommented && method_touched);
            if (!keep) continue;

            MinedPair pair;
            MethodRecord& rec = pair.method;
            rec.repo = repo_name;
            rec.file_path = path;
            rec.qualified_name = m.qualified_name;
            rec.id = make_method_id(repo_name, path, m.qualified_name, commit.hash);
            rec.signature = m.signature;
            rec.body = m.body;
            rec.start_line = m.start_line;
            rec.end_line = m.end_line;
            rec.line_count = line_count;
            rec.commit = commit;
            rec.language_tag = *language;
            pair.comment.method_id = rec.id;
            if (documented) {
                pair.comment.raw_text = m.leading_comment->text;
                pair.comment.sentences = comment_sentences(pair.comment.raw_text);
            }
            out.pairs.push_back(std::move(pair));
        }
    }
    return out;
}

}  // namespace

MiningResult mine_method_comment_pairs(const std::filesystem::path& repo_path,
                                       const MinerOptions& options) {
    GitRepository repo(repo_path);
    std::string repo_name = options.repo_name;
    if (repo_name.empty()) {
        repo_name = std::filesystem::weakly_canonical(repo_path).filename().string();
    }
    std::vector<CommitInfo> commits = repo.list_commits(options.revision_range, options.include_merges);

    std::vector<CommitOutput> per_commit(commits.size());
    parallel_for(commits.size(), options.concurrency, [&](std::size_t i) {
        per_commit[i] = mine_commit(repo, commits[i], options, repo_name);
    });

    MiningResult result;
    result.stats.commits_scanned = commits.size();
    std::set<std::string> ids;
    for (auto& c : per_commit) {
        result.stats.files_parsed += c.files_parsed;
        result.stats.files_skipped += c.files_skipped;
        for (auto& p : c.pairs) {
            if (!ids.insert(p.method.id).second) {
                ++result.stats.duplicate_ids;
                continue;
            }
            result.pairs.push_back(std::move(p));
        }
    }
    return result;
}

}  // namespace suppcom
