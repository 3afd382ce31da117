#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "suppcom/corpus.hpp"
#include "suppcom/text.hpp"

namespace suppcom {

// Add-one smoothed unigram model over comment word tokens.
// P(t) = (count(t) + 1) / (total + vocab_size + 1), strictly positive for
// unseen tokens too.
class BackgroundModel {
public:
    BackgroundModel() = default;
    explicit BackgroundModel(std::map<std::string, std::uint64_t> counts);

    double probability(const std::string& token) const;
    std::uint64_t count(const std::string& token) const;
    std::uint64_t total() const { return total_; }
    std::size_t vocab_size() const { return counts_.size(); }
    const std::map<std::string, std::uint64_t>& counts() const { return counts_; }

    void save(const std::filesystem::path& path) const;
    static BackgroundModel load(const std::filesystem::path& path);

private:
    std::map<std::string, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// Throws ValidationError on an empty corpus.
BackgroundModel build_background_model(std::span<const std::string> corpus);

struct MesiaScore {
    double value = 0.0;  // bits
    std::size_t novel_token_count = 0;
    std::size_t total_token_count = 0;
};

// Supplementarity surrogate: mean self-information, -log2 P(t), over the
// distinct comment tokens that do not occur in the code (identifier
// fragments, exact identifiers lowercased, body word tokens). 0 when every
// comment token already occurs in the code.
MesiaScore mesia_score(const std::string& comment_text, const std::string& method_source,
                       const BackgroundModel& model);

inline MesiaScore mesia_score(const CommentBlock& comment, const MethodRecord& method,
                              const BackgroundModel& model) {
    return mesia_score(comment.raw_text, method.body, model);
}

// Vocabulary a comment token is checked against.
std::set<std::string> code_vocabulary(const std::string& method_source);

inline constexpr double kDefaultMesiaThreshold = 3.0;

// Splits items into (retained, rejected): retained iff score(item) >= threshold.
template <typename T, typename ScoreFn>
std::pair<std::vector<T>, std::vector<T>> filter_supplementary(std::span<const T> items,
                                                               ScoreFn&& score,
                                                               double threshold = kDefaultMesiaThreshold) {
    std::pair<std::vector<T>, std::vector<T>> out;
    for (const T& item : items) {
        if (score(item) >= threshold) out.first.push_back(item);
        else out.second.push_back(item);
    }
    return out;
}

}  // namespace suppcom
