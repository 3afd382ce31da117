#include "suppcom/evaluation.hpp"

#include "suppcom/error.hpp"
#include "suppcom/jsonl.hpp"
#include "suppcom/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace suppcom {

std::string_view to_string(CoverageCategory c) {
    switch (c) {
        case CoverageCategory::Full: return "full";
        case CoverageCategory::Partial: return "partial";
        case CoverageCategory::None: return "none";
    }
    return "none";
}

CoverageCategory parse_coverage_category(std::string_view s) {
    if (s == "full") return CoverageCategory::Full;
    if (s == "partial") return CoverageCategory::Partial;
    if (s == "none") return CoverageCategory::None;
    throw ValidationError("unknown coverage category: " + std::string(s));
}

CoverageCategory categorize(std::span<const bool> covered) {
    std::size_t n = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
    if (n == 0) return CoverageCategory::None;
    return n == covered.size() ? CoverageCategory::Full : CoverageCategory::Partial;
}

MethodCoverage coverage_evaluate(std::span<const std::string> generated, std::span<const std::string> manual,
                                 SimilarityEngine& engine, double threshold) {
    if (manual.empty()) throw ValidationError("coverage needs at least one manual sentence");
    MethodCoverage out;
    std::vector<EmbeddingVector> gen = engine.embed_batch(generated);
    auto flags = std::make_unique<bool[]>(manual.size());
    for (std::size_t k = 0; k < manual.size(); ++k) {
        const std::string& m = manual[k];
        ManualSentenceCoverage mc;
        mc.text = m;
        EmbeddingVector mv = engine.embed(m);
        for (std::size_t g = 0; g < gen.size(); ++g) {
            double sim = cosine_similarity(mv, gen[g]);
            if (!mc.best_generated || sim > mc.score) {
                mc.score = sim;
                mc.best_generated = g;
            }
        }
        mc.covered = mc.best_generated && exceeds_threshold(mc.score, threshold);
        flags[k] = mc.covered;
        out.manual.push_back(std::move(mc));
    }
    out.category = categorize(std::span<const bool>(flags.get(), manual.size()));
    return out;
}

CoverageAggregate aggregate_coverage(std::size_t n_full, std::size_t n_partial, std::size_t n_total) {
    if (n_total == 0) throw ValidationError("coverage aggregate needs n_total > 0");
    if (n_full + n_partial > n_total) throw ValidationError("more covered methods than methods");
    CoverageAggregate a;
    a.n_full = n_full;
    a.n_partial = n_partial;
    a.n_total = n_total;
    a.n_none = n_total - n_full - n_partial;
    a.ratio = static_cast<double>(n_full + n_partial) / static_cast<double>(n_total);
    return a;
}

CoverageAggregate aggregate_coverage(std::span<const CoverageCategory> categories, std::size_t n_total) {
    if (categories.size() > n_total) throw ValidationError("more coverage results than methods");
    std::size_t full = 0, partial = 0;
    for (auto c : categories) {
        if (c == CoverageCategory::Full) ++full;
        if (c == CoverageCategory::Partial) ++partial;
    }
    return aggregate_coverage(full, partial, n_total);
}

std::string format_percent(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", ratio * 100.0);
    return buf;
}

SupplementarityStats supplementarity_stats(std::span<const ScoredSentence> sentences) {
    SupplementarityStats s;
    if (sentences.empty()) return s;
    s.empty = false;
    s.count = sentences.size();
    s.min = sentences.front().score;
    s.max = sentences.front().score;
    double sum = 0.0;
    std::map<InfoType, double> type_sums;
    for (const auto& x : sentences) {
        sum += x.score;
        s.min = std::min(s.min, x.score);
        s.max = std::max(s.max, x.score);
        ++s.histogram[static_cast<int>(std::floor(x.score))];
        if (x.type) {
            ++s.per_type[*x.type].count;
            type_sums[*x.type] += x.score;
        }
    }
    s.mean = sum / static_cast<double>(s.count);
    for (auto& [t, summary] : s.per_type) summary.mean = type_sums[t] / static_cast<double>(summary.count);
    return s;
}

VolumeStats volume_stats(std::span<const std::vector<std::string>> methods) {
    VolumeStats v;
    if (methods.empty()) return v;
    std::size_t sentences = 0, words = 0;
    for (const auto& m : methods) {
        sentences += m.size();
        for (const auto& s : m) words += tokenize_words(s).size();
    }
    v.sentences_avg = static_cast<double>(sentences) / static_cast<double>(methods.size());
    v.sentence_length_avg = sentences == 0 ? 0.0 : static_cast<double>(words) / static_cast<double>(sentences);
    return v;
}

// --- JSON -----------------------------------------------------------------

void to_json(nlohmann::json& j, const CoverageAggregate& c) {
    j = nlohmann::json{{"n_full", c.n_full},   {"n_partial", c.n_partial}, {"n_none", c.n_none},
                       {"n_total", c.n_total}, {"ratio", c.ratio},         {"ratio_display", format_percent(c.ratio)}};
}

void from_json(const nlohmann::json& j, CoverageAggregate& c) {
    j.at("n_full").get_to(c.n_full);
    j.at("n_partial").get_to(c.n_partial);
    j.at("n_none").get_to(c.n_none);
    j.at("n_total").get_to(c.n_total);
    j.at("ratio").get_to(c.ratio);
}

void to_json(nlohmann::json& j, const SupplementarityStats& s) {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [bin, n] : s.histogram) hist[std::to_string(bin)] = n;
    nlohmann::json types = nlohmann::json::object();
    for (const auto& [t, summary] : s.per_type) {
        types[std::string(to_string(t))] = {{"count", summary.count}, {"mean", summary.mean}};
    }
    j = nlohmann::json{{"metric", "mesia_surrogate"}, {"count", s.count}, {"mean", s.mean},
                       {"min", s.min},   {"max", s.max},     {"histogram_bin_width", 1},
                       {"histogram", std::move(hist)},       {"per_type", std::move(types)},
                       {"empty", s.empty}};
}

void from_json(const nlohmann::json& j, SupplementarityStats& s) {
    s = SupplementarityStats{};
    j.at("count").get_to(s.count);
    j.at("mean").get_to(s.mean);
    j.at("min").get_to(s.min);
    j.at("max").get_to(s.max);
    j.at("empty").get_to(s.empty);
    for (const auto& [bin, n] : j.at("histogram").items()) s.histogram[std::stoi(bin)] = n.get<std::size_t>();
    for (const auto& [name, v] : j.at("per_type").items()) {
        auto t = parse_info_type(name);
        if (!t) throw ValidationError("unknown information type: " + name);
        s.per_type[*t] = {v.at("count").get<std::size_t>(), v.at("mean").get<double>()};
    }
}

namespace {

nlohmann::json optional_json(const auto& opt) {
    return opt ? nlohmann::json(*opt) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const VolumeStats& v) {
    j = nlohmann::json{{"sentences_avg", v.sentences_avg}, {"sentence_length_avg", v.sentence_length_avg}};
}

VolumeStats volume_from_json(const nlohmann::json& j) {
    return {j.at("sentences_avg").get<double>(), j.at("sentence_length_avg").get<double>()};
}

std::string fmt1(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", x);
    return buf;
}

std::string fmt3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

}  // namespace

void to_json(nlohmann::json& j, const EvaluationReport& r) {
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : r.methods) {
        nlohmann::json mj{{"method_id", m.method_id}, {"status", m.status},   {"generated", m.generated},
                          {"retained", m.retained},   {"manual", m.manual}};
        mj["coverage_before"] = m.coverage_before ? nlohmann::json(std::string(to_string(*m.coverage_before)))
                                                  : nlohmann::json(nullptr);
        mj["coverage_after"] = m.coverage_after ? nlohmann::json(std::string(to_string(*m.coverage_after)))
                                                : nlohmann::json(nullptr);
        mj["mesia_mean"] = optional_json(m.mesia_mean);
        methods.push_back(std::move(mj));
    }
    nlohmann::json before, after;
    to_json(before, r.volume_before);
    to_json(after, r.volume_after);
    j = nlohmann::json{
        {"coverage_before", optional_json(r.coverage_before)},
        {"coverage_after", optional_json(r.coverage_after)},
        {"volume_before", before},
        {"volume_after", after},
        {"quadrants", r.quadrants},
        {"supplementarity", r.mesia},
        {"methods_attempted", r.methods_attempted},
        {"methods_with_retained", r.methods_with_retained},
        {"generation_rate", r.generation_rate},
        {"run",
         {{"prompt_hash", r.run.prompt_hash},
          {"chat_provider", r.run.chat_provider},
          {"embedding_provider", r.run.embedding_provider},
          {"side_scorer", r.run.side_scorer},
          {"similarity_threshold", r.run.similarity_threshold},
          {"overlap_threshold", r.run.overlap_threshold},
          {"mesia_threshold", r.run.mesia_threshold},
          {"tool_version", r.run.tool_version}}},
        {"methods", std::move(methods)},
    };
}

void from_json(const nlohmann::json& j, EvaluationReport& r) {
    r = EvaluationReport{};
    if (!j.at("coverage_before").is_null()) r.coverage_before = j.at("coverage_before").get<CoverageAggregate>();
    if (!j.at("coverage_after").is_null()) r.coverage_after = j.at("coverage_after").get<CoverageAggregate>();
    r.volume_before = volume_from_json(j.at("volume_before"));
    r.volume_after = volume_from_json(j.at("volume_after"));
    j.at("quadrants").get_to(r.quadrants);
    j.at("supplementarity").get_to(r.mesia);
    j.at("methods_attempted").get_to(r.methods_attempted);
    j.at("methods_with_retained").get_to(r.methods_with_retained);
    j.at("generation_rate").get_to(r.generation_rate);
    const auto& run = j.at("run");
    run.at("prompt_hash").get_to(r.run.prompt_hash);
    run.at("chat_provider").get_to(r.run.chat_provider);
    run.at("embedding_provider").get_to(r.run.embedding_provider);
    run.at("side_scorer").get_to(r.run.side_scorer);
    run.at("similarity_threshold").get_to(r.run.similarity_threshold);
    run.at("overlap_threshold").get_to(r.run.overlap_threshold);
    run.at("mesia_threshold").get_to(r.run.mesia_threshold);
    run.at("tool_version").get_to(r.run.tool_version);
    for (const auto& mj : j.at("methods")) {
        MethodEvaluation m;
        mj.at("method_id").get_to(m.method_id);
        mj.at("status").get_to(m.status);
        mj.at("generated").get_to(m.generated);
        mj.at("retained").get_to(m.retained);
        mj.at("manual").get_to(m.manual);
        if (!mj.at("coverage_before").is_null()) {
            m.coverage_before = parse_coverage_category(mj.at("coverage_before").get<std::string>());
        }
        if (!mj.at("coverage_after").is_null()) {
            m.coverage_after = parse_coverage_category(mj.at("coverage_after").get<std::string>());
        }
        if (!mj.at("mesia_mean").is_null()) m.mesia_mean = mj.at("mesia_mean").get<double>();
        r.methods.push_back(std::move(m));
    }
}

std::string render_markdown(const EvaluationReport& r) {
    std::ostringstream md;
    md << "# Supplementary comment evaluation\n\n";
    md << "## Generation and coverage\n\n";
    md << "| Stage | #Sents (avg) | Sent Len (avg) | #Full-Cover | #Partial-Cover | Coverage (Ratio) |\n";
    md << "|---|---|---|---|---|---|\n";
    auto row = [&](const char* stage, const VolumeStats& v, const std::optional<CoverageAggregate>& c) {
        md << "| " << stage << " | " << fmt1(v.sentences_avg) << " | " << fmt1(v.sentence_length_avg) << " | ";
        if (c) md << c->n_full << " | " << c->n_partial << " | " << format_percent(c->ratio) << " |\n";
        else md << "- | - | - |\n";
    };
    row("Before filtering", r.volume_before, r.coverage_before);
    row("After filtering", r.volume_after, r.coverage_after);
    if (r.coverage_before) md << "\nCoverage is computed over " << r.coverage_before->n_total
                              << " methods with manual supplementary comments.\n";

    const QuadrantStats& q = r.quadrants;
    md << "\n## Verifiability\n\n";
    md << "| Code-relevant | Issue-verifiable | Sentences | Proportion |\n|---|---|---|---|\n";
    md << "| yes | yes | " << q.relevant_verifiable << " | " << fmt3(q.proportion(q.relevant_verifiable)) << " |\n";
    md << "| yes | no | " << q.relevant_unverifiable << " | " << fmt3(q.proportion(q.relevant_unverifiable)) << " |\n";
    md << "| no | yes | " << q.irrelevant_verifiable << " | " << fmt3(q.proportion(q.irrelevant_verifiable)) << " |\n";
    md << "| no | no | " << q.irrelevant_unverifiable << " | " << fmt3(q.proportion(q.irrelevant_unverifiable)) << " |\n";

    md << "\n## Supplementarity (mesia_surrogate, retained sentences)\n\n";
    if (r.mesia.empty) {
        md << "No retained sentences.\n";
    } else {
        md << "| Count | Mean | Min | Max |\n|---|---|---|---|\n";
        md << "| " << r.mesia.count << " | " << fmt3(r.mesia.mean) << " | " << fmt3(r.mesia.min) << " | "
           << fmt3(r.mesia.max) << " |\n\n";
        md << "| Bits | Sentences |\n|---|---|\n";
        for (const auto& [bin, n] : r.mesia.histogram) md << "| [" << bin << ", " << bin + 1 << ") | " << n << " |\n";
        md << "\n| Type | Sentences | Mean |\n|---|---|---|\n";
        for (const auto& [t, s] : r.mesia.per_type) {
            md << "| " << to_string(t) << " | " << s.count << " | " << fmt3(s.mean) << " |\n";
        }
    }

    md << "\n## Generation rate\n\n";
    md << r.methods_with_retained << " of " << r.methods_attempted
       << " linked methods received at least one retained sentence (" << format_percent(r.generation_rate)
       << ").\n";

    md << "\n## Methods\n\n";
    md << "| Method | Status | Generated | Retained | Manual | Coverage before | Coverage after |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& m : r.methods) {
        md << "| `" << m.method_id << "` | " << m.status << " | " << m.generated << " | " << m.retained << " | "
           << m.manual << " | " << (m.coverage_before ? to_string(*m.coverage_before) : "-") << " | "
           << (m.coverage_after ? to_string(*m.coverage_after) : "-") << " |\n";
    }

    md << "\n## Run\n\n";
    md << "- prompt template: `" << r.run.prompt_hash.substr(0, 16) << "`\n";
    md << "- chat provider: " << r.run.chat_provider << "\n";
    md << "- embedding provider: " << r.run.embedding_provider << "\n";
    md << "- side scorer: " << r.run.side_scorer << "\n";
    md << "- thresholds: similarity > " << r.run.similarity_threshold << ", overlap > "
       << r.run.overlap_threshold << ", mesia_surrogate >= " << r.run.mesia_threshold << "\n";
    return md.str();
}

std::string render_csv(const EvaluationReport& r) {
    std::ostringstream csv;
    csv << "method_id,status,generated,retained,manual,coverage_before,coverage_after,mesia_mean\n";
    for (const auto& m : r.methods) {
        csv << csv_field(m.method_id) << ',' << m.status << ',' << m.generated << ',' << m.retained << ','
            << m.manual << ',' << (m.coverage_before ? to_string(*m.coverage_before) : "") << ','
            << (m.coverage_after ? to_string(*m.coverage_after) : "") << ','
            << (m.mesia_mean ? fmt3(*m.mesia_mean) : "") << '\n';
    }
    return csv.str();
}

void emit_report(const EvaluationReport& report, const std::filesystem::path& out_dir,
                 const std::set<ReportFormat>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw Error("cannot create output directory " + out_dir.string());
    }
    if (formats.count(ReportFormat::Json)) {
        write_file_atomic(out_dir / "report.json", nlohmann::json(report).dump(2) + "\n");
    }
    if (formats.count(ReportFormat::Csv)) write_file_atomic(out_dir / "report.csv", render_csv(report));
    if (formats.count(ReportFormat::Markdown)) write_file_atomic(out_dir / "report.md", render_markdown(report));
}

}  // namespace suppcom
