#include "suppcom/commands.hpp"

#include "suppcom/error.hpp"
#include "suppcom/git.hpp"
#include "suppcom/hash.hpp"
#include "suppcom/issues.hpp"
#include "suppcom/jsonl.hpp"
#include "suppcom/mesia.hpp"
#include "suppcom/miner.hpp"
#include "suppcom/parallel.hpp"
#include "suppcom/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <set>
#include <sstream>

namespace suppcom {

namespace fs = std::filesystem;
using nlohmann::json;

// --- records --------------------------------------------------------------

std::vector<std::string> DatasetTriple::reference_sentences() const {
    std::set<std::size_t> indices;
    for (const auto& m : matches) indices.insert(m.comment_index);
    std::vector<std::string> out;
    for (std::size_t i : indices) {
        if (i < comment.sentences.size()) out.push_back(comment.sentences[i].text);
    }
    return out;
}

void to_json(json& j, const DatasetTriple& t) {
    json matches = json::array();
    for (const auto& m : t.matches) {
        matches.push_back({{"comment_index", m.comment_index}, {"issue", m.issue}, {"ratio", m.ratio}});
    }
    j = json{{"method_id", t.method_id}, {"issue_keys", t.issue_keys}, {"comment", t.comment},
             {"matches", std::move(matches)}};
}

void from_json(const json& j, DatasetTriple& t) {
    j.at("method_id").get_to(t.method_id);
    j.at("issue_keys").get_to(t.issue_keys);
    j.at("comment").get_to(t.comment);
    t.matches.clear();
    for (const auto& m : j.at("matches")) {
        t.matches.push_back({m.at("comment_index").get<std::size_t>(), m.at("issue").get<IssueSentenceRef>(),
                             m.at("ratio").get<double>()});
    }
}

std::size_t GenerationRecord::retained_count() const {
    return static_cast<std::size_t>(std::count_if(comment.sentences.begin(), comment.sentences.end(),
                                                  [](const CommentSentence& s) { return s.retained.value_or(false); }));
}

void to_json(json& j, const GenerationRecord& r) {
    j = json{{"method_id", r.method_id},
             {"issue_keys", r.issue_keys},
             {"status", std::string(to_string(r.status))},
             {"error", r.error},
             {"evidence", r.evidence},
             {"comment", r.comment},
             {"telemetry", r.telemetry}};
}

void from_json(const json& j, GenerationRecord& r) {
    j.at("method_id").get_to(r.method_id);
    j.at("issue_keys").get_to(r.issue_keys);
    r.status = parse_pipeline_status(j.at("status").get<std::string>());
    j.at("error").get_to(r.error);
    j.at("evidence").get_to(r.evidence);
    j.at("comment").get_to(r.comment);
    const json& t = j.at("telemetry");
    r.telemetry = Telemetry{};
    r.telemetry.prompt_hash = t.value("prompt_hash", "");
    r.telemetry.chat_calls = t.value("chat_calls", std::size_t{0});
    r.telemetry.prompt_tokens = t.value("prompt_tokens", std::size_t{0});
    r.telemetry.completion_tokens = t.value("completion_tokens", std::size_t{0});
    r.telemetry.truncations = t.value("truncations", std::size_t{0});
    r.telemetry.fabrications = t.value("fabrications", std::size_t{0});
    r.telemetry.parse_failures = t.value("parse_failures", std::size_t{0});
    r.telemetry.stray_lines = t.value("stray_lines", std::size_t{0});
}

// --- helpers --------------------------------------------------------------

namespace {

std::string now_utc() {
    return format_utc(std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count());
}

std::string hash_json(const json& j) { return sha256_hex(j.dump()); }

// Hash over the names and contents of every regular file below `dir`.
std::string hash_directory(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw NotFoundError("directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string acc;
    for (const auto& f : files) {
        acc += fs::relative(f, dir).generic_string();
        acc += '\0';
        acc += sha256_file(f);
        acc += '\n';
    }
    return sha256_hex(acc);
}

std::string git_head(const fs::path& repo) {
    auto r = run_process({"git", "-C", repo.string(), "rev-parse", "--verify", "-q", "HEAD"});
    if (r.exit_code != 0) return "no-head";
    std::string out = r.output;
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out;
}

template <typename T>
std::map<std::string, T> index_by_method(std::vector<T> items) {
    std::map<std::string, T> out;
    for (auto& item : items) {
        std::string id = item.method_id;
        out.emplace(std::move(id), std::move(item));
    }
    return out;
}

std::map<std::string, MethodRecord> methods_by_id(const std::vector<MethodRecord>& methods) {
    std::map<std::string, MethodRecord> out;
    for (const auto& m : methods) out.emplace(m.id, m);
    return out;
}

// Resolved issue keys per method, in link order, without duplicates.
std::map<std::string, std::vector<std::string>> resolved_keys(const std::vector<IssueLink>& links) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& l : links) {
        if (!l.resolved) continue;
        auto& keys = out[l.method_id];
        if (std::find(keys.begin(), keys.end(), l.issue_key) == keys.end()) keys.push_back(l.issue_key);
    }
    return out;
}

std::vector<const IssueReport*> lookup_issues(const IssueStore& store, const std::vector<std::string>& keys) {
    std::vector<const IssueReport*> out;
    for (const auto& k : keys) {
        if (const IssueReport* r = store.find(k)) out.push_back(r);
    }
    return out;
}

std::size_t count_lines(const fs::path& p) {
    if (!fs::exists(p)) return 0;
    std::string content = read_file(p);
    return static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));
}

}  // namespace

// --- pipeline -------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config, RunOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
    out_ = options_.out ? *options_.out : config_.output_dir;
    if (options_.concurrency) {
        if (*options_.concurrency == 0) throw ValidationError("concurrency must be >= 1");
        config_.concurrency = *options_.concurrency;
    }
    if (options_.offline) NetworkGuard::deny(true);
    std::error_code ec;
    fs::create_directories(out_ / ".stages", ec);
    if (ec) throw Error("cannot create output directory " + out_.string() + ": " + ec.message());
}

std::ostream& Pipeline::log() const { return options_.log ? *options_.log : std::cerr; }

std::shared_ptr<HttpTransport> Pipeline::transport() {
    if (!transport_) transport_ = options_.transport ? options_.transport : make_http_transport();
    return transport_;
}

std::string Pipeline::input_hash(std::string_view name, std::string_view producer) const {
    fs::path p = file(name);
    if (!fs::exists(p)) {
        throw NotFoundError("missing input " + p.string() + " (run `" + std::string(producer) + "` first)");
    }
    return sha256_file(p);
}

bool Pipeline::stage_current(const std::string& stage, const Inputs& inputs) const {
    if (!options_.resume) return false;
    fs::path record = out_ / ".stages" / (stage + ".json");
    if (!fs::exists(record)) return false;
    try {
        json j = json::parse(read_file(record));
        if (j.at("inputs").get<Inputs>() != inputs) return false;
        for (const auto& [name, hash] : j.at("outputs").get<Inputs>()) {
            fs::path p = file(name);
            if (!fs::exists(p) || sha256_file(p) != hash) return false;
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void Pipeline::record_stage(const std::string& stage, const Inputs& inputs, const std::vector<std::string>& outputs) {
    Inputs hashes;
    for (const auto& o : outputs) hashes[o] = sha256_file(file(o));
    json j{{"stage", stage}, {"inputs", inputs}, {"outputs", hashes}};
    write_file_atomic(out_ / ".stages" / (stage + ".json"), j.dump(2) + "\n");
}

RunCounters Pipeline::counters() const {
    RunCounters c;
    c.mined = count_lines(file("methods.jsonl"));
    // Damaged files count as zero.
    try {
        if (fs::exists(file("links.jsonl"))) {
            std::set<std::string> linked;
            for (const auto& l : read_jsonl_as<IssueLink>(file("links.jsonl"))) {
                if (l.resolved) linked.insert(l.method_id);
            }
            c.linked = linked.size();
        }
    } catch (const std::exception&) {
        c.linked = 0;
    }
    try {
        if (fs::exists(file("generated.jsonl"))) {
            for (const auto& r : read_jsonl_as<GenerationRecord>(file("generated.jsonl"))) {
                if (!r.comment.sentences.empty()) ++c.generated;
                if (r.retained_count() > 0) ++c.retained;
                if (r.status == PipelineStatus::Failed) ++c.failed;
            }
        }
    } catch (const std::exception&) {
        c.generated = c.retained = c.failed = 0;
    }
    return c;
}

StageResult Pipeline::finish(const std::string& stage, StageResult result, const std::string& started) {
    json manifest = json::object();
    fs::path path = file("manifest.json");
    if (fs::exists(path)) {
        try {
            manifest = json::parse(read_file(path));
        } catch (const json::exception&) {
            manifest = json::object();
        }
    }
    if (!manifest.contains("started_at")) manifest["started_at"] = started;
    manifest["finished_at"] = now_utc();
    manifest["tool_version"] = std::string(kToolVersion);
    manifest["config"] = config_to_json(config_);
    manifest["prompt_hash"] = templates().hash();
    manifest["providers"] = {{"chat", chat_provider_id()},
                             {"embedding", embedding_provider_id()},
                             {"side", side_scorer_id()}};
    manifest["stages"][stage] = {{"started_at", started},
                                 {"finished_at", now_utc()},
                                 {"skipped", result.skipped},
                                 {"exit_code", result.exit_code},
                                 {"summary", result.summary}};
    RunCounters c = counters();
    manifest["counters"] = {{"mined", c.mined},
                            {"linked", c.linked},
                            {"generated", c.generated},
                            {"retained", c.retained},
                            {"failed", c.failed}};
    write_file_atomic(path, manifest.dump(2) + "\n");
    log() << stage << ": " << (result.skipped ? "up to date" : result.summary) << "\n";
    return result;
}

PromptTemplates Pipeline::templates() const {
    return config_.prompts_dir ? PromptTemplates::load(*config_.prompts_dir) : PromptTemplates::builtin();
}

std::string Pipeline::chat_provider_id() const {
    return config_.chat.kind == "mock" ? "mock" : "openai:" + config_.chat.model;
}

std::string Pipeline::embedding_provider_id() const {
    if (config_.embedding.kind == "offline") {
        return OfflineHashProvider(config_.embedding.dim, config_.embedding.hashes).id();
    }
    return "http:" + config_.embedding.base_url;
}

std::string Pipeline::side_scorer_id() const {
    if (config_.side.kind == "offline") return "offline-side:" + embedding_provider_id();
    if (config_.side.kind == "http") return "http-side:" + config_.side.base_url;
    return "none";
}

std::unique_ptr<ChatProvider> Pipeline::make_chat_provider() {
    if (config_.chat.kind == "mock") {
        return std::make_unique<MockChatProvider>(MockChatProvider::from_directory(config_.chat.fixtures));
    }
    OpenAIConfig oc{config_.chat.endpoint, config_.chat.model, config_.chat.api_key_env, config_.retry};
    return std::make_unique<OpenAIChatProvider>(oc, transport());
}

std::shared_ptr<EmbeddingProvider> Pipeline::make_embedding_provider() {
    if (config_.embedding.kind == "offline") {
        return std::make_shared<OfflineHashProvider>(config_.embedding.dim, config_.embedding.hashes);
    }
    HttpProviderConfig hc{config_.embedding.base_url, config_.embedding.token_env, config_.retry};
    return std::make_shared<HttpEmbeddingProvider>(hc, transport());
}

void Pipeline::check_services() {
    auto check = [&](const std::string& base_url, const std::string& token_env) {
        HttpHeaders headers;
        if (!token_env.empty()) {
            if (const char* tok = std::getenv(token_env.c_str()); tok && *tok) headers["X-Auth-Token"] = tok;
        }
        ServiceHealth h = check_service_health(base_url, *transport(), headers);
        if (!h.ok()) throw Error("scoring service at " + base_url + " reports status " + h.status);
    };
    if (config_.embedding.kind == "http") check(config_.embedding.base_url, config_.embedding.token_env);
    if (config_.side.kind == "http" && config_.side.base_url != config_.embedding.base_url) {
        check(config_.side.base_url, config_.side.token_env);
    }
}

std::unique_ptr<SideScorer> Pipeline::make_side_scorer(std::shared_ptr<SimilarityEngine> engine) {
    if (config_.side.kind == "offline") return std::make_unique<OfflineSideScorer>(std::move(engine));
    if (config_.side.kind == "http") {
        HttpProviderConfig hc{config_.side.base_url, config_.side.token_env, config_.retry};
        return std::make_unique<HttpSideScorer>(hc, transport());
    }
    return nullptr;
}

// --- stages ---------------------------------------------------------------

StageResult Pipeline::mine() {
    const std::string started = now_utc();
    Inputs inputs;
    json cfg = config_to_json(config_);
    inputs["config"] = hash_json({cfg["repos"], cfg["miner"]});
    for (const auto& r : config_.repos) inputs["repo:" + r.name] = git_head(r.path);
    if (stage_current("mine", inputs)) return finish("mine", {kExitOk, true, ""}, started);

    std::vector<MethodRecord> methods;
    std::vector<CommentBlock> comments;
    MinerStats total;
    for (const auto& r : config_.repos) {
        MinerOptions mo;
        mo.repo_name = r.name;
        mo.extensions = config_.extensions;
        mo.revision_range = config_.revision_range;
        mo.include_merges = config_.include_merges;
        mo.include_uncommented = config_.include_uncommented;
        mo.min_method_lines = config_.min_method_lines;
        mo.concurrency = config_.concurrency;
        MiningResult result = mine_method_comment_pairs(r.path, mo);
        for (auto& p : result.pairs) {
            methods.push_back(std::move(p.method));
            comments.push_back(std::move(p.comment));
        }
        total.commits_scanned += result.stats.commits_scanned;
        total.files_parsed += result.stats.files_parsed;
        total.files_skipped += result.stats.files_skipped;
    }
    write_jsonl(file("methods.jsonl"), methods);
    write_jsonl(file("comments.jsonl"), comments);
    record_stage("mine", inputs, {"methods.jsonl", "comments.jsonl"});
    std::ostringstream s;
    s << methods.size() << " methods from " << total.commits_scanned << " commits (" << total.files_skipped
      << " files skipped)";
    return finish("mine", {kExitOk, false, s.str()}, started);
}

StageResult Pipeline::ingest_issues() {
    const std::string started = now_utc();
    Inputs inputs;
    json cfg = config_to_json(config_);
    inputs["config"] = hash_json(cfg["issues"]);
    if (config_.issue_directory) {
        inputs["issues_dir"] = hash_directory(*config_.issue_directory);
    } else {
        inputs["methods.jsonl"] = input_hash("methods.jsonl", "mine");
        inputs["pattern"] = config_.issue_key_pattern;
    }
    if (stage_current("ingest-issues", inputs)) return finish("ingest-issues", {kExitOk, true, ""}, started);

    IssueStore store;
    StageResult result;
    if (config_.issue_directory) {
        store = IssueStore::from_directory(*config_.issue_directory);
        result.summary = std::to_string(store.size()) + " issues from " + config_.issue_directory->string();
    } else {
        std::set<std::string> keys;
        for (const auto& m : read_jsonl_as<MethodRecord>(file("methods.jsonl"))) {
            for (auto& k : extract_issue_keys(m.commit.message, config_.issue_key_pattern)) keys.insert(k);
        }
        TrackerConfig tc;
        tc.base_url = config_.tracker->base_url;
        tc.url_template = config_.tracker->url_template;
        tc.token_env = config_.tracker->token_env;
        tc.cache_dir = config_.tracker->cache_dir.empty() ? out_ / "cache" / "tracker" : config_.tracker->cache_dir;
        tc.retry = config_.retry;
        TrackerClient client(tc, transport());
        std::size_t missing = 0, failed = 0;
        for (const auto& k : keys) {
            try {
                store.add(client.fetch(k));
            } catch (const NotFoundError&) {
                ++missing;
            } catch (const TransientError& e) {
                ++failed;
                log() << "ingest-issues: " << k << ": " << e.what() << "\n";
            }
        }
        if (!keys.empty() && failed == keys.size()) throw Error("every issue fetch failed");
        if (!keys.empty() && static_cast<double>(failed) / static_cast<double>(keys.size()) >
                                 config_.failure_rate_ceiling) {
            result.exit_code = kExitPartial;
        }
        result.summary = std::to_string(store.size()) + " of " + std::to_string(keys.size()) + " issues fetched (" +
                         std::to_string(missing) + " not found, " + std::to_string(failed) + " failed)";
    }
    store.save_jsonl(file("issues.jsonl"));
    if (result.exit_code == kExitOk) record_stage("ingest-issues", inputs, {"issues.jsonl"});
    return finish("ingest-issues", result, started);
}

StageResult Pipeline::link() {
    const std::string started = now_utc();
    Inputs inputs{{"methods.jsonl", input_hash("methods.jsonl", "mine")},
                  {"issues.jsonl", input_hash("issues.jsonl", "ingest-issues")},
                  {"pattern", config_.issue_key_pattern}};
    if (stage_current("link", inputs)) return finish("link", {kExitOk, true, ""}, started);

    auto methods = read_jsonl_as<MethodRecord>(file("methods.jsonl"));
    IssueStore store = IssueStore::from_jsonl(file("issues.jsonl"));
    LinkResult result = link_issues(methods, store, config_.issue_key_pattern);
    write_jsonl(file("links.jsonl"), result.links);
    record_stage("link", inputs, {"links.jsonl"});
    std::ostringstream s;
    s << result.stats.links << " links (" << result.stats.unresolved_links << " unresolved), "
      << result.stats.methods_without_key << " of " << result.stats.methods << " methods without a key";
    return finish("link", {kExitOk, false, s.str()}, started);
}

StageResult Pipeline::dataset() {
    const std::string started = now_utc();
    Inputs inputs{{"methods.jsonl", input_hash("methods.jsonl", "mine")},
                  {"comments.jsonl", input_hash("comments.jsonl", "mine")},
                  {"issues.jsonl", input_hash("issues.jsonl", "ingest-issues")},
                  {"links.jsonl", input_hash("links.jsonl", "link")}};
    json cfg = config_to_json(config_);
    inputs["config"] = hash_json({cfg["thresholds"], cfg["overlap_mode"], cfg["exclude_code_blocks"]});
    if (stage_current("dataset", inputs)) return finish("dataset", {kExitOk, true, ""}, started);

    auto methods = methods_by_id(read_jsonl_as<MethodRecord>(file("methods.jsonl")));
    auto comments = read_jsonl_as<CommentBlock>(file("comments.jsonl"));
    IssueStore store = IssueStore::from_jsonl(file("issues.jsonl"));
    auto keys = resolved_keys(read_jsonl_as<IssueLink>(file("links.jsonl")));

    std::vector<std::string> corpus;
    for (const auto& c : comments) {
        if (!c.sentences.empty()) corpus.push_back(c.raw_text);
    }
    if (corpus.empty()) throw ValidationError("no documented methods to build the background model from");
    BackgroundModel model = build_background_model(corpus);
    model.save(file("mesia_model.json"));

    std::vector<DatasetTriple> triples;
    std::size_t documented = 0, supplementary = 0;
    for (auto& c : comments) {
        if (c.sentences.empty()) continue;
        ++documented;
        auto m = methods.find(c.method_id);
        if (m == methods.end()) throw ValidationError("comment for unknown method " + c.method_id);
        c.mesia = mesia_score(c, m->second, model).value;
        if (*c.mesia < config_.thresholds.mesia) continue;
        ++supplementary;
        auto k = keys.find(c.method_id);
        if (k == keys.end()) continue;

        std::vector<Sentence> comment_sents;
        for (std::size_t i = 0; i < c.sentences.size(); ++i) {
            comment_sents.push_back({c.sentences[i].text, tokenize_words(c.sentences[i].text), {c.method_id, i}});
        }
        std::vector<Sentence> issue_sents;
        std::vector<IssueSentenceRef> refs;
        for (const IssueReport* issue : lookup_issues(store, k->second)) {
            for (const auto& s : issue->sentences) {
                if (config_.exclude_code_blocks && s.is_code_block) continue;
                issue_sents.push_back({s.text, tokenize_words(s.text), {s.issue_key, s.index}});
                refs.push_back({s.issue_key, s.index});
            }
        }
        auto matches = overlap_candidates(comment_sents, issue_sents, config_.thresholds.overlap,
                                          config_.overlap_mode);
        if (matches.empty()) continue;
        DatasetTriple t;
        t.method_id = c.method_id;
        t.issue_keys = k->second;
        t.comment = c;
        for (const auto& mm : matches) t.matches.push_back({mm.comment_index, refs[mm.issue_index], mm.ratio});
        triples.push_back(std::move(t));
    }
    write_jsonl(file("dataset.jsonl"), triples);
    record_stage("dataset", inputs, {"dataset.jsonl", "mesia_model.json"});
    std::ostringstream s;
    s << triples.size() << " triples (" << documented << " documented, " << supplementary
      << " above the supplementarity threshold)";
    return finish("dataset", {kExitOk, false, s.str()}, started);
}

StageResult Pipeline::generate() {
    const std::string started = now_utc();
    Inputs inputs{{"methods.jsonl", input_hash("methods.jsonl", "mine")},
                  {"issues.jsonl", input_hash("issues.jsonl", "ingest-issues")},
                  {"links.jsonl", input_hash("links.jsonl", "link")}};
    if (!config_.application_mode) inputs["dataset.jsonl"] = input_hash("dataset.jsonl", "dataset");
    json cfg = config_to_json(config_);
    inputs["config"] = hash_json({cfg["providers"], cfg["thresholds"], cfg["max_issue_words"],
                                  cfg["exclude_code_blocks"], cfg["application_mode"]});
    PromptTemplates prompt_templates = templates();
    inputs["prompts"] = prompt_templates.hash();
    if (config_.chat.kind == "mock") inputs["mock_fixtures"] = hash_directory(config_.chat.fixtures);
    if (stage_current("generate", inputs)) return finish("generate", {kExitOk, true, ""}, started);

    auto all_methods = read_jsonl_as<MethodRecord>(file("methods.jsonl"));
    auto methods = methods_by_id(all_methods);
    IssueStore store = IssueStore::from_jsonl(file("issues.jsonl"));
    auto keys = resolved_keys(read_jsonl_as<IssueLink>(file("links.jsonl")));

    std::vector<std::string> targets;
    if (config_.application_mode) {
        for (const auto& m : all_methods) {
            if (keys.count(m.id)) targets.push_back(m.id);
        }
    } else {
        for (const auto& t : read_jsonl_as<DatasetTriple>(file("dataset.jsonl"))) targets.push_back(t.method_id);
    }

    check_services();
    auto chat = make_chat_provider();
    auto engine = std::make_shared<SimilarityEngine>(
        make_embedding_provider(), config_.embedding.kind == "offline" ? fs::path{} : out_ / "cache" / "embeddings");
    auto side = make_side_scorer(engine);
    PipelineParams params;
    params.chat.model = config_.chat.model;
    params.chat.temperature = config_.chat.temperature;
    params.chat.max_tokens = config_.chat.max_tokens;
    params.retrieval.max_issue_words = config_.max_issue_words;
    params.align_threshold = config_.thresholds.overlap;
    params.templates = prompt_templates;
    VerificationConfig vc{config_.thresholds.similarity, config_.exclude_code_blocks};

    std::vector<GenerationRecord> records(targets.size());
    parallel_for(targets.size(), config_.concurrency, [&](std::size_t i) {
        const MethodRecord& method = methods.at(targets[i]);
        auto issues = lookup_issues(store, keys[targets[i]]);
        PipelineResult pr = run_pipeline(method, issues, *chat, params);
        GenerationRecord& rec = records[i];
        rec.method_id = method.id;
        rec.issue_keys = keys[targets[i]];
        rec.status = pr.status;
        rec.error = pr.error;
        rec.evidence = std::move(pr.evidence);
        rec.telemetry = std::move(pr.telemetry);
        rec.comment = pr.status == PipelineStatus::Ok
                          ? verify_comment(pr.generated, method, issues, *engine, side.get(), vc)
                          : std::move(pr.generated);
        rec.comment.method_id = method.id;
    });

    std::size_t failed = 0;
    std::string telemetry;
    for (const auto& r : records) {
        if (r.status == PipelineStatus::Failed) ++failed;
        json t = r.telemetry;
        t["method_id"] = r.method_id;
        t["latencies_ms"] = r.telemetry.latencies_ms;
        telemetry += t.dump() + "\n";
    }
    write_jsonl(file("generated.jsonl"), records);
    write_file_atomic(file("telemetry.jsonl"), telemetry);

    StageResult result;
    std::ostringstream s;
    s << records.size() << " methods attempted, " << failed << " failed";
    result.summary = s.str();
    if (!records.empty() && failed == records.size()) {
        result.exit_code = kExitFatal;
    } else if (!records.empty() &&
               static_cast<double>(failed) / static_cast<double>(records.size()) > config_.failure_rate_ceiling) {
        result.exit_code = kExitPartial;
    }
    record_stage("generate", inputs, {"generated.jsonl"});
    return finish("generate", result, started);
}

StageResult Pipeline::evaluate() {
    const std::string started = now_utc();
    Inputs inputs{{"methods.jsonl", input_hash("methods.jsonl", "mine")},
                  {"generated.jsonl", input_hash("generated.jsonl", "generate")},
                  {"mesia_model.json", input_hash("mesia_model.json", "dataset")}};
    const bool with_coverage = !config_.application_mode || fs::exists(file("dataset.jsonl"));
    if (with_coverage) inputs["dataset.jsonl"] = input_hash("dataset.jsonl", "dataset");
    json cfg = config_to_json(config_);
    inputs["config"] = hash_json({cfg["providers"], cfg["thresholds"]});
    inputs["prompts"] = templates().hash();
    if (stage_current("evaluate", inputs)) return finish("evaluate", {kExitOk, true, ""}, started);

    auto methods = methods_by_id(read_jsonl_as<MethodRecord>(file("methods.jsonl")));
    auto records = read_jsonl_as<GenerationRecord>(file("generated.jsonl"));
    BackgroundModel model = BackgroundModel::load(file("mesia_model.json"));
    auto engine = std::make_shared<SimilarityEngine>(
        make_embedding_provider(), config_.embedding.kind == "offline" ? fs::path{} : out_ / "cache" / "embeddings");

    EvaluationReport report;
    report.run = {templates().hash(),         chat_provider_id(),
                  embedding_provider_id(),    side_scorer_id(),
                  config_.thresholds.similarity, config_.thresholds.overlap,
                  config_.thresholds.mesia,   std::string(kToolVersion)};

    std::map<std::string, const GenerationRecord*> by_id;
    std::vector<std::vector<std::string>> before, after;
    std::vector<GeneratedComment> comments;
    std::vector<ScoredSentence> scored;
    for (const auto& r : records) {
        by_id[r.method_id] = &r;
        std::vector<std::string> all, kept;
        for (const auto& s : r.comment.sentences) {
            all.push_back(s.text);
            if (s.retained.value_or(false)) kept.push_back(s.text);
        }
        before.push_back(std::move(all));
        after.push_back(std::move(kept));
        comments.push_back(r.comment);

        MethodEvaluation me;
        me.method_id = r.method_id;
        me.status = std::string(to_string(r.status));
        me.generated = r.comment.sentences.size();
        me.retained = r.retained_count();
        auto m = methods.find(r.method_id);
        if (m == methods.end()) throw ValidationError("generated record for unknown method " + r.method_id);
        double sum = 0.0;
        for (const auto& s : r.comment.sentences) {
            if (!s.retained.value_or(false)) continue;
            double v = mesia_score(s.text, m->second.body, model).value;
            scored.push_back({v, s.info_type});
            sum += v;
        }
        if (me.retained > 0) me.mesia_mean = sum / static_cast<double>(me.retained);
        report.methods.push_back(std::move(me));
    }
    report.volume_before = volume_stats(before);
    report.volume_after = volume_stats(after);
    report.quadrants = quadrant_stats(comments);
    report.mesia = supplementarity_stats(scored);
    report.methods_attempted = records.size();
    report.methods_with_retained = static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const GenerationRecord& r) { return r.retained_count() > 0; }));
    report.generation_rate = records.empty() ? 0.0
                                             : static_cast<double>(report.methods_with_retained) /
                                                   static_cast<double>(records.size());

    if (with_coverage) {
        auto triples = read_jsonl_as<DatasetTriple>(file("dataset.jsonl"));
        std::vector<CoverageCategory> pre, post;
        for (const auto& t : triples) {
            auto manual = t.reference_sentences();
            std::vector<std::string> gen_all, gen_kept;
            auto it = by_id.find(t.method_id);
            if (it != by_id.end()) {
                for (const auto& s : it->second->comment.sentences) {
                    gen_all.push_back(s.text);
                    if (s.retained.value_or(false)) gen_kept.push_back(s.text);
                }
            }
            CoverageCategory cb = coverage_evaluate(gen_all, manual, *engine, config_.thresholds.similarity).category;
            CoverageCategory ca = coverage_evaluate(gen_kept, manual, *engine, config_.thresholds.similarity).category;
            pre.push_back(cb);
            post.push_back(ca);
            for (auto& me : report.methods) {
                if (me.method_id != t.method_id) continue;
                me.manual = manual.size();
                me.coverage_before = cb;
                me.coverage_after = ca;
            }
        }
        if (!triples.empty()) {
            report.coverage_before = aggregate_coverage(pre, triples.size());
            report.coverage_after = aggregate_coverage(post, triples.size());
        }
    }

    emit_report(report, out_);
    record_stage("evaluate", inputs, {"report.json", "report.csv", "report.md"});
    std::ostringstream s;
    s << report.methods_attempted << " methods evaluated";
    if (report.coverage_before) s << ", coverage " << format_percent(report.coverage_before->ratio) << " -> "
                                  << format_percent(report.coverage_after->ratio);
    s << ", generation rate " << format_percent(report.generation_rate);
    return finish("evaluate", {kExitOk, false, s.str()}, started);
}

StageResult Pipeline::report() {
    const std::string started = now_utc();
    input_hash("report.json", "evaluate");
    EvaluationReport r = json::parse(read_file(file("report.json"))).get<EvaluationReport>();
    emit_report(r, out_, {ReportFormat::Csv, ReportFormat::Markdown});
    return finish("report", {kExitOk, false, "rendered report.md and report.csv from report.json"}, started);
}

StageResult Pipeline::run_all() {
    using Stage = StageResult (Pipeline::*)();
    for (Stage stage : {&Pipeline::mine, &Pipeline::ingest_issues, &Pipeline::link, &Pipeline::dataset,
                        &Pipeline::generate, &Pipeline::evaluate}) {
        StageResult r = (this->*stage)();
        if (r.exit_code != kExitOk) return r;
    }
    return {kExitOk, false, "all stages complete"};
}

StageResult cmd_mine(const PipelineConfig& c, const RunOptions& o) { return Pipeline(c, o).mine(); }
StageResult cmd_ingest_issues(const PipelineConfig& c, const RunOptions& o) { return Pipeline(c, o).ingest_issues(); }
StageResult cmd_link(const PipelineConfig& c, const RunOptions& o) { return Pipeline(c, o).link(); }
StageResult cmd_dataset(const PipelineConfig& c, const RunOptions& o) { return Pipeline(c, o).dataset(); }
StageResult cmd_generate(const PipelineConfig& c, const RunOptions& o) { return Pipeline(c, o).generate(); }
StageResult cmd_evaluate(const PipelineConfig& c, const RunOptions& o) { return Pipeline(c, o).evaluate(); }
StageResult cmd_report(const PipelineConfig& c, const RunOptions& o) { return Pipeline(c, o).report(); }

}  // namespace suppcom
