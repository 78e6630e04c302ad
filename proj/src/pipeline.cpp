#include "keynmf/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace keynmf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::set<std::string> load_stopwords(const TokenizerOptions& tok) {
    std::set<std::string> stopwords;
    if (tok.stopwords) {
        for (auto& w : read_token_file(*tok.stopwords)) stopwords.insert(std::move(w));
    }
    return stopwords;
}

Segmenter make_segmenter(const TokenizerOptions& tok) {
    if (tok.lexicon) return Segmenter::dictionary(read_token_file(*tok.lexicon));
    return Segmenter::unicode();
}

fs::path cache_root() {
    if (const char* env = std::getenv("KEYNMF_CACHE_DIR")) return fs::path(env);
    if (const char* home = std::getenv("HOME"))
        return fs::path(home) / ".cache" / "keynmf";
    return fs::path(".keynmf-cache");
}

// ---- model directory layout ----

constexpr const char* kKeywordMatrixFile = "keyword_matrix.knmf";
constexpr const char* kVocabularyFile = "vocabulary.ids";
constexpr const char* kDocumentIdsFile = "documents.ids";
constexpr const char* kDocumentsFile = "documents.jsonl";
constexpr const char* kWFile = "W.knmf";
constexpr const char* kHFile = "H.knmf";
constexpr const char* kModelFile = "model.json";

struct LoadedModel {
    KeywordMatrix m;
    TopicModel model;
    std::vector<std::int64_t> timestamps;  // per row of m
    std::vector<std::string> doc_ids;
    SolverConfig solver;
    int n_keywords = 0;
};

LoadedModel load_model_dir(const fs::path& dir) {
    LoadedModel loaded;
    loaded.m.cells = read_sparse(dir / kKeywordMatrixFile);
    loaded.m.vocabulary = read_ids(dir / kVocabularyFile);
    loaded.m.doc_ids = read_ids(dir / kDocumentIdsFile);
    loaded.model.W = read_dense(dir / kWFile);
    loaded.model.H = read_dense(dir / kHFile);
    loaded.model.vocabulary = loaded.m.vocabulary;

    json meta = json::parse(read_file(dir / kModelFile));
    loaded.model.k = meta.at("k").get<int>();
    loaded.model.final_loss = meta.at("final_loss").get<double>();
    loaded.model.iterations_run = meta.at("iterations_run").get<int>();
    loaded.n_keywords = meta.at("n_keywords").get<int>();
    const auto& cfg = meta.at("solver");
    loaded.solver.k = loaded.model.k;
    loaded.solver.max_iter = cfg.at("max_iter").get<int>();
    loaded.solver.rel_tol = cfg.at("rel_tol").get<double>();
    loaded.solver.seed = cfg.at("seed").get<std::uint64_t>();
    loaded.solver.init = cfg.at("init").get<std::string>() == "seeded-random"
                             ? NmfInit::SeededRandom
                             : NmfInit::Nndsvd;

    std::istringstream docs_in(read_file(dir / kDocumentsFile));
    std::string line;
    while (std::getline(docs_in, line)) {
        if (line.empty()) continue;
        json obj = json::parse(line);
        loaded.timestamps.push_back(parse_iso8601(obj.at("timestamp").get<std::string>()));
        loaded.doc_ids.push_back(obj.at("id").get<std::string>());
    }
    if (loaded.timestamps.size() != static_cast<std::size_t>(loaded.m.cells.rows()))
        throw Error("documents.jsonl row count does not match keyword matrix: " +
                    dir.string());
    return loaded;
}

std::string init_name(NmfInit init) {
    return init == NmfInit::Nndsvd ? "nndsvd" : "seeded-random";
}

}  // namespace

CorpusBundle load_and_tokenize(const fs::path& corpus_path, const TokenizerOptions& tok,
                               bool dedupe) {
    CorpusBundle bundle;
    bundle.docs = ingest_jsonl(corpus_path, dedupe
                                                ? DedupePolicy::KeepFirstPerId
                                                : DedupePolicy::RejectDuplicateIdTimestamp);
    auto segmenter = make_segmenter(tok);
    auto stopwords = load_stopwords(tok);
    bundle.tokenized.reserve(bundle.docs.size());
    for (const auto& doc : bundle.docs)
        bundle.tokenized.push_back(tokenize(doc, segmenter, stopwords));
    return bundle;
}

std::shared_ptr<EmbeddingProvider> make_provider(const std::string& spec,
                                                 std::uint64_t seed) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "test") {
        std::uint64_t s = arg.empty() ? seed : std::stoull(arg);
        return std::make_shared<TestEmbedder>(s, 64);
    }
    if (kind == "precomputed") {
        if (arg.empty()) throw Error("precomputed provider needs a matrix path");
        return load_precomputed_store(arg, arg + ".ids");
    }
    if (kind == "http") {
        if (arg.empty()) throw Error("http provider needs a base URL");
        auto inner = std::make_shared<HttpEmbedder>(arg);
        return std::make_shared<CachedProvider>(inner, cache_root() / inner->id());
    }
    throw Error("unknown embeddings spec '" + spec +
                "' (expected test:SEED | precomputed:PATH | http:URL)");
}

std::vector<DocCandidates> compute_candidates(const CorpusBundle& corpus,
                                              EmbeddingProvider& provider) {
    if (corpus.docs.empty()) throw Error("corpus is empty");

    std::vector<std::string> texts;
    texts.reserve(corpus.docs.size());
    for (const auto& doc : corpus.docs) texts.push_back(doc.text);
    auto doc_vecs = embed_batch(provider, texts);

    std::set<std::string> vocab_set;
    for (const auto& doc : corpus.tokenized)
        vocab_set.insert(doc.tokens.begin(), doc.tokens.end());
    std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
    std::unordered_map<std::string, EmbeddingVector> word_vecs;
    if (!vocab.empty()) {
        auto vecs = embed_batch(provider, vocab);
        for (std::size_t i = 0; i < vocab.size(); ++i) word_vecs[vocab[i]] = vecs[i];
    }

    std::vector<DocCandidates> out;
    out.reserve(corpus.docs.size());
    for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
        auto full = extract_keywords(corpus.tokenized[i], doc_vecs[i], word_vecs,
                                     std::numeric_limits<int>::max());
        out.push_back(DocCandidates{full.doc_id, std::move(full.entries)});
    }
    return out;
}

KeywordMatrix matrix_from_candidates(const std::vector<DocCandidates>& candidates, int n) {
    if (n < 1) throw Error("n-keywords must be >= 1");
    std::vector<KeywordSet> sets;
    sets.reserve(candidates.size());
    for (const auto& cand : candidates) {
        KeywordSet ks{cand.doc_id, cand.sorted_positive};
        if (ks.entries.size() > static_cast<std::size_t>(n))
            ks.entries.resize(static_cast<std::size_t>(n));
        sets.push_back(std::move(ks));
    }
    return build_keyword_matrix(sets);
}

TopicDescriptions describe_topics(const TopicModel& model, int top_k) {
    TopicDescriptions desc;
    for (int j = 0; j < model.k; ++j) {
        std::vector<std::string> words;
        for (auto& [word, weight] : topic_top_words(model, j, top_k))
            words.push_back(word);
        desc.topics.push_back(std::move(words));
    }
    return desc;
}

// ---- run directories ----

DirLock::DirLock(const fs::path& dir) {
    fs::create_directories(dir);
    path_ = dir / ".lock";
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw Error("output directory is locked by another run: " + dir.string() +
                    " (remove " + path_.string() + " if stale)");
    ::close(fd);
}

DirLock::~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

void ManifestBuilder::write(const fs::path& dir) const {
    json manifest;
    manifest["tool_version"] = KEYNMF_VERSION;
    manifest["command"] = command;
    json cfg = json::object();
    for (const auto& [key, value] : config) cfg[key] = value;
    manifest["config"] = cfg;
    json inputs = json::object();
    for (const auto& [key, value] : input_digests) inputs[key] = value;
    manifest["inputs"] = inputs;
    json timings = json::object();
    for (const auto& [key, value] : timings_seconds) timings[key] = value;
    manifest["timings_seconds"] = timings;
    manifest["warnings"] = warnings;
    write_file(dir / "run_manifest.json", manifest.dump(2) + "\n");
}

// ---- fit ----

void run_fit(const FitOptions& opts) {
    DirLock lock(opts.out);
    ManifestBuilder manifest;
    manifest.command = "fit";
    manifest.config = {
        {"corpus", opts.corpus.string()},
        {"embeddings", opts.embeddings},
        {"n_keywords", std::to_string(opts.n_keywords)},
        {"k", std::to_string(opts.solver.k)},
        {"max_iter", std::to_string(opts.solver.max_iter)},
        {"rel_tol", format_double(opts.solver.rel_tol)},
        {"init", init_name(opts.solver.init)},
        {"seed", std::to_string(opts.solver.seed)},
        {"dedupe", opts.dedupe ? "true" : "false"},
    };
    manifest.input_digests.emplace_back("corpus", file_digest(opts.corpus));
    if (opts.tokenizer.lexicon)
        manifest.input_digests.emplace_back("lexicon", file_digest(*opts.tokenizer.lexicon));
    if (opts.tokenizer.stopwords)
        manifest.input_digests.emplace_back("stopwords",
                                            file_digest(*opts.tokenizer.stopwords));

    Timer total;
    Timer stage;
    auto corpus = load_and_tokenize(opts.corpus, opts.tokenizer, opts.dedupe);
    manifest.timings_seconds.emplace_back("ingest", stage.seconds());

    stage = Timer();
    auto provider = make_provider(opts.embeddings, opts.solver.seed);
    auto candidates = compute_candidates(corpus, *provider);
    auto m = matrix_from_candidates(candidates, opts.n_keywords);
    manifest.timings_seconds.emplace_back("keywords", stage.seconds());

    stage = Timer();
    auto model = fit_nmf(m, opts.solver);
    manifest.timings_seconds.emplace_back("nmf", stage.seconds());

    write_sparse(opts.out / kKeywordMatrixFile, m.cells);
    write_ids(opts.out / kVocabularyFile, m.vocabulary);
    write_ids(opts.out / kDocumentIdsFile, m.doc_ids);
    write_dense(opts.out / kWFile, model.W);
    write_dense(opts.out / kHFile, model.H);

    std::string docs_out;
    for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
        json obj;
        obj["row"] = i;
        obj["id"] = corpus.docs[i].id;
        obj["timestamp"] = format_iso8601(corpus.docs[i].timestamp);
        obj["source"] = corpus.docs[i].source;
        docs_out += obj.dump() + "\n";
    }
    write_file(opts.out / kDocumentsFile, docs_out);

    json meta;
    meta["k"] = model.k;
    meta["n_keywords"] = opts.n_keywords;
    meta["final_loss"] = model.final_loss;
    meta["iterations_run"] = model.iterations_run;
    meta["embeddings_provider"] = provider->id();
    meta["solver"] = {{"max_iter", opts.solver.max_iter},
                      {"rel_tol", opts.solver.rel_tol},
                      {"init", init_name(opts.solver.init)},
                      {"seed", opts.solver.seed}};
    write_file(opts.out / kModelFile, meta.dump(2) + "\n");

    manifest.timings_seconds.emplace_back("total", total.seconds());
    manifest.write(opts.out);

    for (int j = 0; j < model.k; ++j) {
        std::cout << "topic " << j << ":";
        for (auto& [word, weight] : topic_top_words(model, j, 10))
            std::cout << " " << word;
        std::cout << "\n";
    }
}

// ---- dynamic ----

void run_dynamic(const DynamicOptions& opts) {
    DirLock lock(opts.out);
    Timer total;
    auto loaded = load_model_dir(opts.model_dir);

    std::int64_t width = parse_duration_seconds(opts.slice_width);
    std::int64_t origin;
    if (opts.origin) {
        origin = parse_iso8601(*opts.origin);
    } else {
        origin = *std::min_element(loaded.timestamps.begin(), loaded.timestamps.end());
        origin -= ((origin % 3600) + 3600) % 3600;  // truncate to the hour
    }

    // slice by row position
    std::map<std::int64_t, std::vector<std::size_t>> slice_map;
    std::int64_t max_index = -1;
    for (std::size_t i = 0; i < loaded.timestamps.size(); ++i) {
        if (loaded.timestamps[i] < origin)
            throw Error("document '" + loaded.doc_ids[i] + "' predates the slice origin");
        std::int64_t index = (loaded.timestamps[i] - origin) / width;
        slice_map[index].push_back(i);
        max_index = std::max(max_index, index);
    }
    if (slice_map.empty()) throw Error("no documents to slice");
    for (std::int64_t t = 0; t <= max_index; ++t) slice_map.try_emplace(t);

    SolverConfig cfg = loaded.solver;
    auto dynamic = dynamic_from_model(loaded.m, std::move(loaded.model), slice_map, cfg);

    const int k = dynamic.base.k;
    std::string slices_csv = "slice,start_iso,doc_count\n";
    std::string p_hat_csv = "slice_start_iso";
    for (int j = 0; j < k; ++j) p_hat_csv += ",topic_" + std::to_string(j);
    p_hat_csv += "\n";
    std::string top_words;
    fs::create_directories(opts.out / "h_t");

    for (std::size_t pos = 0; pos < dynamic.slices.size(); ++pos) {
        std::int64_t slice = dynamic.slices[pos];
        std::string start_iso = format_iso8601(origin + slice * width);
        slices_csv += std::to_string(slice) + "," + start_iso + "," +
                      std::to_string(slice_map.at(slice).size()) + "\n";
        p_hat_csv += start_iso;
        for (int j = 0; j < k; ++j)
            p_hat_csv += "," + format_double(dynamic.p_hat(static_cast<Eigen::Index>(pos), j));
        p_hat_csv += "\n";

        char name[32];
        std::snprintf(name, sizeof(name), "slice_%06lld.knmf", static_cast<long long>(slice));
        write_dense(opts.out / "h_t" / name, dynamic.h_t[pos]);

        for (int j = 0; j < k; ++j) {
            auto words = topic_top_words(dynamic, j, pos, 10);
            json obj;
            obj["slice"] = slice;
            obj["topic"] = j;
            json ws = json::array(), wts = json::array();
            for (auto& [word, weight] : words) {
                ws.push_back(word);
                wts.push_back(weight);
            }
            obj["words"] = ws;
            obj["weights"] = wts;
            top_words += obj.dump() + "\n";
        }
    }

    write_file(opts.out / "slices.csv", slices_csv);
    write_file(opts.out / "p_hat.csv", p_hat_csv);
    write_file(opts.out / "top_words.jsonl", top_words);
    write_dense(opts.out / "p_hat.knmf", dynamic.p_hat);
    write_dense(opts.out / "importance.knmf", dynamic.importance);

    json meta;
    meta["k"] = k;
    meta["width_seconds"] = width;
    meta["origin"] = format_iso8601(origin);
    meta["slices"] = dynamic.slices;
    meta["degenerate_slices"] = dynamic.degenerate_slices;
    write_file(opts.out / "dynamic.json", meta.dump(2) + "\n");

    ManifestBuilder manifest;
    manifest.command = "dynamic";
    manifest.config = {
        {"model_dir", opts.model_dir.string()},
        {"slice_width", opts.slice_width},
        {"origin", format_iso8601(origin)},
    };
    for (auto slice : dynamic.degenerate_slices)
        manifest.warnings.push_back("slice " + std::to_string(slice) +
                                    " has no topic mass; uniform pseudo-distribution");
    manifest.timings_seconds.emplace_back("total", total.seconds());
    manifest.write(opts.out);
}

// ---- infodyn ----

void run_infodyn(const InfodynOptions& opts) {
    if (opts.window < 1) throw Error("window must be >= 1");
    DirLock lock(opts.out);
    Timer total;

    DenseMatrix p_hat = read_dense(opts.dynamic_dir / "p_hat.knmf");
    json meta = json::parse(read_file(opts.dynamic_dir / "dynamic.json"));
    std::int64_t width = meta.at("width_seconds").get<std::int64_t>();
    std::int64_t origin = parse_iso8601(meta.at("origin").get<std::string>());
    std::vector<std::int64_t> slices = meta.at("slices").get<std::vector<std::int64_t>>();

    auto series = resonance_series(p_hat, opts.window);
    for (auto slice : slices) series.time_points.push_back(origin + slice * width);
    smooth_signals(series, opts.span, opts.degree);

    auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    std::string csv = "time_iso,novelty,transience,resonance,novelty_smooth,resonance_smooth\n";
    for (std::size_t t = 0; t < series.time_points.size(); ++t) {
        csv += format_iso8601(series.time_points[t]) + "," + cell(series.novelty[t]) + "," +
               cell(series.transience[t]) + "," + cell(series.resonance[t]) + "," +
               cell(series.novelty_smooth[t]) + "," + cell(series.resonance_smooth[t]) + "\n";
    }
    write_file(opts.out / "signals.csv", csv);

    if (opts.events) {
        // echo the event annotation windows for plotting; no detection happens here
        std::istringstream in(read_file(*opts.events));
        std::string line, echo;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::exception& e) {
                throw Error("events file line " + std::to_string(line_no) + ": " + e.what());
            }
            for (const char* key : {"label", "start", "end"}) {
                if (!obj.contains(key))
                    throw Error("events file line " + std::to_string(line_no) +
                                " missing field '" + std::string(key) + "'");
            }
            echo += obj.dump() + "\n";
        }
        write_file(opts.out / "events.jsonl", echo);
    }

    ManifestBuilder manifest;
    manifest.command = "infodyn";
    manifest.config = {
        {"dynamic_dir", opts.dynamic_dir.string()},
        {"window", std::to_string(opts.window)},
        {"span", std::to_string(opts.span)},
        {"degree", std::to_string(opts.degree)},
    };
    manifest.timings_seconds.emplace_back("total", total.seconds());
    manifest.write(opts.out);
}

// ---- eval ----

namespace {

struct MetricsReport {
    TopicDescriptions desc;
    double diversity_value = 0.0;
    double c_in = 0.0, c_ex = 0.0, c_npmi = 0.0;
    std::vector<double> c_in_topics, c_ex_topics, c_npmi_topics;
};

MetricsReport compute_metrics(const TopicModel& model, const CorpusBundle& corpus,
                              EmbeddingProvider& external,
                              std::unordered_map<std::string, EmbeddingVector>& internal,
                              int internal_dim, int top_k) {
    MetricsReport report;
    report.desc = describe_topics(model, top_k);
    report.diversity_value = diversity(report.desc);

    MapProvider internal_provider(internal, internal_dim, "internal-ppmi-svd");
    report.c_in_topics = embedding_coherence_per_topic(report.desc, internal_provider);
    report.c_in = embedding_coherence(report.desc, internal_provider);
    report.c_ex_topics = embedding_coherence_per_topic(report.desc, external);
    report.c_ex = embedding_coherence(report.desc, external);
    report.c_npmi_topics = npmi_coherence_per_topic(report.desc, corpus.tokenized);
    report.c_npmi = npmi_coherence(report.desc, corpus.tokenized);
    return report;
}

int pick_internal_dim(const CorpusBundle& corpus) {
    std::set<std::string> vocab;
    for (const auto& doc : corpus.tokenized) vocab.insert(doc.tokens.begin(), doc.tokens.end());
    if (vocab.size() < 2) throw Error("corpus vocabulary too small for internal embeddings");
    return static_cast<int>(std::min<std::size_t>(64, vocab.size()));
}

json report_to_json(const MetricsReport& report) {
    json out;
    out["diversity"] = report.diversity_value;
    out["c_in"] = report.c_in;
    out["c_ex"] = report.c_ex;
    out["c_npmi"] = report.c_npmi;
    json topics = json::array();
    for (std::size_t j = 0; j < report.desc.topics.size(); ++j) {
        json t;
        t["topic"] = j;
        t["words"] = report.desc.topics[j];
        auto value_or_null = [](const std::vector<double>& v, std::size_t i) {
            return std::isnan(v[i]) ? json() : json(v[i]);
        };
        t["c_in"] = value_or_null(report.c_in_topics, j);
        t["c_ex"] = value_or_null(report.c_ex_topics, j);
        t["c_npmi"] = value_or_null(report.c_npmi_topics, j);
        topics.push_back(t);
    }
    out["topics"] = topics;
    return out;
}

}  // namespace

void run_eval(const EvalOptions& opts) {
    auto loaded = load_model_dir(opts.model_dir);
    auto corpus = load_and_tokenize(opts.corpus, opts.tokenizer, opts.dedupe);
    auto provider = make_provider(opts.embeddings, opts.seed);

    int dim = pick_internal_dim(corpus);
    auto internal = train_internal_embeddings(corpus.tokenized, dim);
    auto report = compute_metrics(loaded.model, corpus, *provider, internal, dim, opts.top_k);

    write_file(opts.out, report_to_json(report).dump(2) + "\n");
}

// ---- sweep ----

void run_sweep(const SweepOptions& opts) {
    if (opts.n_from < 1 || opts.n_to < opts.n_from || opts.n_step < 1)
        throw Error("invalid keyword range");
    auto corpus = load_and_tokenize(opts.corpus, opts.tokenizer, opts.dedupe);
    auto provider = make_provider(opts.embeddings, opts.solver.seed);
    auto candidates = compute_candidates(corpus, *provider);

    int dim = pick_internal_dim(corpus);
    auto internal = train_internal_embeddings(corpus.tokenized, dim);

    std::string csv = "n,diversity,c_in,c_ex,c_npmi\n";
    for (int n = opts.n_from; n <= opts.n_to; n += opts.n_step) {
        auto m = matrix_from_candidates(candidates, n);
        auto model = fit_nmf(m, opts.solver);
        auto report = compute_metrics(model, corpus, *provider, internal, dim, 10);
        csv += std::to_string(n) + "," + format_double(report.diversity_value) + "," +
               format_double(report.c_in) + "," + format_double(report.c_ex) + "," +
               format_double(report.c_npmi) + "\n";
        std::cerr << "sweep n=" << n << " diversity=" << report.diversity_value << "\n";
    }
    write_file(opts.out, csv);
}

}  // namespace keynmf
