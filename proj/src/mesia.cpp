#include "suppcom/mesia.hpp"

#include "suppcom/error.hpp"
#include "suppcom/identifiers.hpp"
#include "suppcom/jsonl.hpp"

#include <json.hpp>

namespace suppcom {

BackgroundModel::BackgroundModel(std::map<std::string, std::uint64_t> counts)
    : counts_(std::move(counts)) {
    for (const auto& [t, n] : counts_) total_ += n;
}

std::uint64_t BackgroundModel::count(const std::string& token) const {
    auto it = counts_.find(token);
    return it == counts_.end() ? 0 : it->second;
}

double BackgroundModel::probability(const std::string& token) const {
    return static_cast<double>(count(token) + 1) /
           static_cast<double>(total_ + counts_.size() + 1);
}

void BackgroundModel::save(const std::filesystem::path& path) const {
    nlohmann::json j{{"smoothing", "add-one"},
                     {"total", total_},
                     {"vocab_size", counts_.size()},
                     {"counts", counts_}};
    write_file_atomic(path, j.dump(1) + "\n");
}

BackgroundModel BackgroundModel::load(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(read_file(path));
    BackgroundModel model(j.at("counts").get<std::map<std::string, std::uint64_t>>());
    if (model.total() != j.at("total").get<std::uint64_t>()) {
        throw ValidationError("background model total does not match its counts: " + path.string());
    }
    return model;
}

BackgroundModel build_background_model(std::span<const std::string> corpus) {
    if (corpus.empty()) throw ValidationError("background model needs a nonempty corpus");
    std::map<std::string, std::uint64_t> counts;
    for (const auto& text : corpus) {
        for (auto& t : tokenize_words(text)) ++counts[t];
    }
    return BackgroundModel(std::move(counts));
}

std::set<std::string> code_vocabulary(const std::string& method_source) {
    IdentifierSet ids = extract_identifiers(method_source);
    std::set<std::string> vocab = ids.subtokens;
    for (const auto& id : ids.exact) {
        std::string lower;
        for (char c : id) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        vocab.insert(lower);
    }
    for (auto& t : tokenize_words(method_source)) vocab.insert(std::move(t));
    return vocab;
}

MesiaScore mesia_score(const std::string& comment_text, const std::string& method_source,
                       const BackgroundModel& model) {
    std::vector<std::string> tokens = tokenize_words(comment_text);
    std::set<std::string> code = code_vocabulary(method_source);
    std::set<std::string> novel;
    for (const auto& t : tokens) {
        if (!code.count(t)) novel.insert(t);
    }
    MesiaScore score;
    score.total_token_count = tokens.size();
    score.novel_token_count = novel.size();
    if (novel.empty()) return score;
    double bits = 0.0;
    for (const auto& t : novel) bits -= std::log2(model.probability(t));
    score.value = bits / static_cast<double>(novel.size());
    return score;
}

}  // namespace suppcom
