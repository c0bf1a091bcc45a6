#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "ipts/bootstrap.hpp"
#include "ipts/error.hpp"
#include "ipts/expansion.hpp"
#include "ipts/io.hpp"
#include "ipts/sage.hpp"
#include "ipts/stats.hpp"
#include "ipts/text.hpp"
#include "ipts/topics.hpp"
#include "log.hpp"
#include "pipeline.hpp"

namespace ipts::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

struct Overrides {
    std::optional<std::string> corpus, embeddings, codebooks, lexicon, scores, responses, bootstrap, out_dir;
    std::optional<double> tau;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k_min, k_max, per_bucket, sage_k, sage_min_count, expand_max_iters, hashing_dim;
    std::optional<std::string> embed_url, score_url, chat_url;

    void apply(RunConfig& c) const {
        auto set_path = [](std::optional<fs::path>& dst, const std::optional<std::string>& src) {
            if (src) dst = fs::path(*src);
        };
        set_path(c.corpus, corpus);
        set_path(c.embeddings, embeddings);
        set_path(c.codebooks, codebooks);
        set_path(c.lexicon, lexicon);
        set_path(c.scores, scores);
        set_path(c.responses, responses);
        set_path(c.bootstrap, bootstrap);
        if (out_dir) c.out_dir = *out_dir;
        if (tau) c.tau = *tau;
        if (seed) c.seed = *seed;
        if (k_min) c.k_min = *k_min;
        if (k_max) c.k_max = *k_max;
        if (per_bucket) c.per_bucket = *per_bucket;
        if (sage_k) c.sage_k = *sage_k;
        if (sage_min_count) c.sage_min_count = *sage_min_count;
        if (expand_max_iters) c.expand_max_iters = *expand_max_iters;
        if (hashing_dim) c.hashing_dim = *hashing_dim;
        if (embed_url) c.embed_url = *embed_url;
        if (score_url) c.score_url = *score_url;
        if (chat_url) c.chat_url = *chat_url;
    }
};

void print_error(const std::string& module, const std::string& message, const std::string& context) {
    json j;
    j["error"]["module"] = module;
    j["error"]["message"] = message;
    j["error"]["context"] = context;
    std::cerr << j.dump() << std::endl;
}

void check_inputs(std::initializer_list<std::pair<const char*, const std::string*>> inputs) {
    for (const auto& [name, path] : inputs)
        if (path && !path->empty() && !fs::exists(*path))
            throw Error("config", fmt::format("{} path does not exist", name), *path);
}

void write_json_out(const std::string& out, const ojson& j) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << std::endl;
        return;
    }
    io::write_atomic(out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    info("wrote {}", out);
}

std::vector<std::string> read_text_field(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("sage", "cannot open input", path.string());
    std::vector<std::string> texts;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::is_blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error("sage", fmt::format("malformed JSON: {}", e.what()), fmt::format("{}:{}", path.string(), n));
        }
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
            throw Error("sage", "record needs a string 'text' field", fmt::format("{}:{}", path.string(), n));
        texts.push_back(j["text"].get<std::string>());
    }
    return texts;
}

std::vector<std::vector<std::string>> read_csv_columns(const fs::path& path, std::vector<std::string>& header) {
    std::istringstream in(io::read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw Error("stats", "empty CSV", path.string());
    header = io::parse_csv_line(line);
    std::vector<std::vector<std::string>> cols(header.size());
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line)) continue;
        auto cells = io::parse_csv_line(line);
        if (cells.size() > header.size())
            throw Error("stats", "row has more cells than the header", fmt::format("{}:{}", path.string(), n));
        cells.resize(header.size());
        for (std::size_t c = 0; c < cells.size(); ++c) cols[c].push_back(text::trim(cells[c]));
    }
    return cols;
}

double parse_real(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw Error("stats", fmt::format("'{}' is not a number", s), where);
    return v;
}

ojson stat_json(const stats::StatResult& r) {
    ojson j;
    j["statistic"] = r.statistic;
    j["p"] = r.p_value;
    j["p_bonferroni"] = r.p_adjusted;
    j["n_comparisons"] = r.n_comparisons;
    j["significance"] = std::string(stats::stars_text(r.stars));
    return j;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    std::vector<std::string> copy = args;
    for (auto& a : copy) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
    CLI::App app{"Interpersonal-theory-of-suicide corpus analytics"};
    app.set_version_flag("--version", std::string("ipts ") + IPTS_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    bool log_json = false;
    bool quiet = false;
    Overrides ov;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_flag("--log-json", log_json, "Structured JSON log lines on stderr");
    app.add_flag("--quiet", quiet, "Only warnings and errors");

    auto corpus_opt = [&](CLI::App* s) { s->add_option("--corpus", ov.corpus, "Corpus JSONL"); };
    auto embeddings_opt = [&](CLI::App* s) { s->add_option("--embeddings", ov.embeddings, "Embedding JSONL"); };
    auto codebooks_opt = [&](CLI::App* s) { s->add_option("--codebooks,--codebook", ov.codebooks, "Codebook JSON (default: seeds)"); };
    auto lexicon_opt = [&](CLI::App* s) { s->add_option("--lexicon", ov.lexicon, ".dic lexicon (default: demo)"); };
    auto tau_opt = [&](CLI::App* s) { s->add_option("--tau", ov.tau, "Labeling threshold"); };
    auto seed_opt = [&](CLI::App* s) { s->add_option("--seed", ov.seed, "Random seed"); };
    auto provider_opts = [&](CLI::App* s) {
        s->add_option("--embed-url", ov.embed_url, "Embedding server base URL (env IPTS_EMBED_URL)");
        s->add_option("--hashing-dim", ov.hashing_dim, "Use the offline hashing embedder with this dimension");
    };
    auto score_opts = [&](CLI::App* s) {
        s->add_option("--scores", ov.scores, "Formality/empathy score JSONL");
        s->add_option("--score-url", ov.score_url, "Score server base URL");
    };
    auto response_opts = [&](CLI::App* s) {
        s->add_option("--responses", ov.responses, "Response JSONL {post_id, tier, text}");
        s->add_option("--chat-url", ov.chat_url, "Chat server base URL");
    };
    auto out_dir_opt = [&](CLI::App* s) { s->add_option("--out-dir", ov.out_dir, "Output directory"); };

    std::string in_path, out_path, source_label, data_path, test_path, fg_path, bg_path, pairs_path, groups_path,
        assignments_path, embeddings_out;
    std::size_t epochs = 40;

    auto* ingest_cmd = app.add_subcommand("ingest", "Validate, deduplicate and canonicalize a corpus");
    ingest_cmd->add_option("--in", in_path, "Raw corpus JSONL")->required();
    ingest_cmd->add_option("--out", out_path, "Canonical corpus JSONL")->required();
    ingest_cmd->add_option("--source-label", source_label, "Source label");

    auto* embed_cmd = app.add_subcommand("embed", "Embed documents, codebook phrases and responses");
    corpus_opt(embed_cmd);
    embeddings_opt(embed_cmd);
    codebooks_opt(embed_cmd);
    embed_cmd->add_option("--responses", ov.responses, "Response JSONL to embed as well");
    provider_opts(embed_cmd);
    embed_cmd->add_option("--out", out_path, "Embedding JSONL")->required();

    auto* expand_cmd = app.add_subcommand("expand", "Grow codebooks to a fixpoint with RAKE");
    corpus_opt(expand_cmd);
    embeddings_opt(expand_cmd);
    codebooks_opt(expand_cmd);
    tau_opt(expand_cmd);
    provider_opts(expand_cmd);
    expand_cmd->add_option("--bootstrap", ov.bootstrap, "Bootstrap classifier JSON");
    expand_cmd->add_option("--max-iters", ov.expand_max_iters, "Iteration cap");
    expand_cmd->add_option("--out", out_path, "Expanded codebook JSON")->required();
    expand_cmd->add_option("--embeddings-out", embeddings_out, "Write the store with newly fetched phrase vectors");

    auto* label_cmd = app.add_subcommand("label", "Label posts with dimensions and risk factors");
    corpus_opt(label_cmd);
    embeddings_opt(label_cmd);
    codebooks_opt(label_cmd);
    tau_opt(label_cmd);
    label_cmd->add_option("--bootstrap", ov.bootstrap, "Bootstrap classifier JSON");
    out_dir_opt(label_cmd);

    auto* train_cmd = app.add_subcommand("train", "Train bootstrap classifiers");
    train_cmd->add_option("--data", data_path, "JSONL {label, text, y}")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--test", test_path, "Held-out JSONL {label, text, y}")->check(CLI::ExistingFile);
    train_cmd->add_option("--epochs", epochs, "SGD epochs");
    seed_opt(train_cmd);
    train_cmd->add_option("--out", out_path, "Classifier JSON")->required();

    auto* lexicon_cmd = app.add_subcommand("lexicon", "Per-document lexicon category rates");
    corpus_opt(lexicon_cmd);
    lexicon_opt(lexicon_cmd);
    lexicon_cmd->add_option("--out", out_path, "Profile CSV")->required();

    std::size_t sage_k = 16;
    auto* sage_cmd = app.add_subcommand("sage", "Top discriminating n-grams between two corpora");
    sage_cmd->add_option("--foreground", fg_path, "JSONL with a text field")->required()->check(CLI::ExistingFile);
    sage_cmd->add_option("--background", bg_path, "JSONL with a text field")->required()->check(CLI::ExistingFile);
    sage_cmd->add_option("--k", sage_k, "n-grams per direction");
    sage_cmd->add_option("--min-count", ov.sage_min_count, "Minimum combined n-gram count");
    sage_cmd->add_option("--out", out_path, "CSV ngram,eta")->required();

    auto* topics_cmd = app.add_subcommand("topics", "k-means topics with a coherence scan");
    corpus_opt(topics_cmd);
    embeddings_opt(topics_cmd);
    topics_cmd->add_option("--kmin", ov.k_min, "Smallest k");
    topics_cmd->add_option("--kmax", ov.k_max, "Largest k");
    seed_opt(topics_cmd);
    topics_cmd->add_option("--out", out_path, "Topic JSON")->required();

    auto* metrics_cmd = app.add_subcommand("metrics", "Response quality metrics");
    metrics_cmd->add_option("--pairs", pairs_path, "JSONL {post_id, response_id, condition, text?}")
        ->required()
        ->check(CLI::ExistingFile);
    corpus_opt(metrics_cmd);
    embeddings_opt(metrics_cmd);
    lexicon_opt(metrics_cmd);
    score_opts(metrics_cmd);
    metrics_cmd->add_option("--responses", ov.responses, "Response JSONL for AI texts");
    provider_opts(metrics_cmd);
    metrics_cmd->add_option("--out", out_path, "Metric CSV")->required();

    auto* compare_cmd = app.add_subcommand("compare", "Prompt tiers, responses and the comparison report");
    corpus_opt(compare_cmd);
    embeddings_opt(compare_cmd);
    compare_cmd->add_option("--assignments", assignments_path, "Assignments JSONL from label")->required();
    tau_opt(compare_cmd);
    lexicon_opt(compare_cmd);
    score_opts(compare_cmd);
    response_opts(compare_cmd);
    provider_opts(compare_cmd);
    compare_cmd->add_option("--per-bucket", ov.per_bucket, "Posts sampled per bucket");
    seed_opt(compare_cmd);
    out_dir_opt(compare_cmd);

    auto* stats_cmd = app.add_subcommand("stats", "Kruskal-Wallis and paired t-tests on CSV input");
    stats_cmd->require_subcommand(1);
    int n_comparisons = 1;
    auto* kw_cmd = stats_cmd->add_subcommand("kw", "Kruskal-Wallis H over CSV columns");
    kw_cmd->add_option("--groups", groups_path, "CSV, one column per group")->required()->check(CLI::ExistingFile);
    kw_cmd->add_option("--comparisons", n_comparisons, "Bonferroni n");
    kw_cmd->add_option("--out", out_path, "JSON output (default stdout)");
    auto* t_cmd = stats_cmd->add_subcommand("t", "Paired t-test over two CSV columns x,y");
    t_cmd->add_option("--pairs", pairs_path, "CSV with two columns")->required()->check(CLI::ExistingFile);
    t_cmd->add_option("--comparisons", n_comparisons, "Bonferroni n");
    t_cmd->add_option("--out", out_path, "JSON output (default stdout)");

    auto* report_cmd = app.add_subcommand("report", "Full pipeline into one output directory");
    corpus_opt(report_cmd);
    embeddings_opt(report_cmd);
    codebooks_opt(report_cmd);
    lexicon_opt(report_cmd);
    tau_opt(report_cmd);
    seed_opt(report_cmd);
    score_opts(report_cmd);
    response_opts(report_cmd);
    provider_opts(report_cmd);
    report_cmd->add_option("--bootstrap", ov.bootstrap, "Bootstrap classifier JSON");
    report_cmd->add_option("--per-bucket", ov.per_bucket, "Posts sampled per bucket");
    report_cmd->add_option("--kmin", ov.k_min, "Smallest k");
    report_cmd->add_option("--kmax", ov.k_max, "Largest k");
    out_dir_opt(report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("cli", e.what(), "");
        return 2;
    }

    try {
        configure_logging(log_json, quiet);
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        ov.apply(cfg);
        if (cfg.embed_url.empty())
            if (const char* env = std::getenv("IPTS_EMBED_URL")) cfg.embed_url = env;
        if (ingest_cmd->parsed()) cfg.corpus = in_path;
        cfg.validate();
        check_inputs({{"assignments", &assignments_path}});

        if (ingest_cmd->parsed()) {
            IngestConfig ic;
            ic.source_label = source_label.empty() ? fs::path(in_path).filename().string() : source_label;
            const auto result = ingest(in_path, ic);
            io::write_atomic(out_path, [&](std::ostream& o) { write_corpus(o, result.corpus); });
            ojson j;
            j["documents"] = result.corpus.size();
            j["lines_read"] = result.report.lines_read;
            j["duplicates"] = result.report.duplicates;
            j["removed_or_empty"] = result.report.removed_or_empty;
            j["orphans"] = result.report.orphans;
            j["flattened"] = result.report.flattened;
            std::cout << j.dump() << std::endl;
        } else if (embed_cmd->parsed()) {
            cfg.require({"corpus"});
            auto provider = make_provider(cfg);
            if (!provider) throw Error("config", "embed needs --embed-url, IPTS_EMBED_URL or --hashing-dim");
            const auto corpus = load_corpus(*cfg.corpus);
            auto items = document_items(corpus);
            const auto phrases = phrase_items(load_or_seed_codebooks(cfg));
            items.insert(items.end(), phrases.begin(), phrases.end());
            if (cfg.responses)
                for (const auto& [key, text] : load_responses(*cfg.responses))
                    items.push_back({ai_response_id(key.first, key.second), text});
            const auto prepared = prepare_store(cfg, items, provider.get());
            io::write_atomic(out_path, [&](std::ostream& o) { write_store(o, prepared.store); });
            info("embedded {} new texts; store holds {}", prepared.fetched, prepared.store.size());
        } else if (expand_cmd->parsed()) {
            cfg.require({"corpus", "embeddings"});
            auto provider = make_provider(cfg);
            const auto corpus = load_corpus(*cfg.corpus);
            auto store = load_store(*cfg.embeddings);
            std::optional<BootstrapClassifier> gate;
            if (cfg.bootstrap) gate = BootstrapClassifier::load(*cfg.bootstrap);
            ExpansionConfig ex;
            ex.max_iters = cfg.expand_max_iters;
            ex.threshold = cfg.tau;
            const auto before = store.size();
            const auto result = expand_to_fixpoint(load_or_seed_codebooks(cfg), corpus, store, ex, provider.get(),
                                                   gate ? &*gate : nullptr);
            io::write_atomic(out_path, [&](std::ostream& o) { write_codebooks(o, result.codebooks); });
            if (!embeddings_out.empty())
                io::write_atomic(embeddings_out, [&](std::ostream& o) { write_store(o, store); });
            else if (store.size() != before)
                warn("{} phrase vectors were fetched but --embeddings-out is not set", store.size() - before);
            info("expansion: {} iterations, converged={}", result.iterations_run, result.converged);
        } else if (label_cmd->parsed()) {
            cfg.require({"corpus", "embeddings"});
            const auto corpus = load_corpus(*cfg.corpus);
            const auto store = load_store(*cfg.embeddings);
            std::optional<BootstrapClassifier> gate;
            if (cfg.bootstrap) gate = BootstrapClassifier::load(*cfg.bootstrap);
            const auto result =
                label_corpus(corpus, load_or_seed_codebooks(cfg), store, cfg.tau, gate ? &*gate : nullptr);
            io::write_atomic(cfg.out_dir / "assignments.jsonl",
                             [&](std::ostream& o) { write_assignments(o, result.assignments); });
            io::write_atomic(cfg.out_dir / "distribution.csv",
                             [&](std::ostream& o) { write_distribution_csv(o, result.table); });
            info("labeled {} posts into {}", result.table.posts, cfg.out_dir.string());
        } else if (train_cmd->parsed()) {
            auto read_examples = [](const std::string& path) {
                std::map<Label, std::vector<TrainingExample>> out;
                std::istringstream in(io::read_file(path));
                std::string line;
                std::size_t n = 0;
                while (std::getline(in, line)) {
                    ++n;
                    if (text::is_blank(line)) continue;
                    const auto where = fmt::format("{}:{}", path, n);
                    json j;
                    try {
                        j = json::parse(line);
                    } catch (const json::parse_error& e) {
                        throw Error("bootstrap", fmt::format("malformed JSON: {}", e.what()), where);
                    }
                    if (!j.is_object() || !j.value("label", json()).is_string() || !j.value("text", json()).is_string() ||
                        !j.value("y", json()).is_number_integer())
                        throw Error("bootstrap", "record needs label, text and integer y", where);
                    const auto label = parse_label(j["label"].get<std::string>());
                    if (!label) throw Error("bootstrap", "unknown label", where);
                    const int y = j["y"].get<int>();
                    if (y != 0 && y != 1) throw Error("bootstrap", "y must be 0 or 1", where);
                    out[*label].push_back({j["text"].get<std::string>(), y});
                }
                return out;
            };
            const auto train = read_examples(data_path);
            const auto test = test_path.empty() ? decltype(train){} : read_examples(test_path);
            TrainConfig tc;
            tc.epochs = epochs;
            tc.seed = cfg.seed;
            BootstrapClassifier clf;
            ojson summary;
            for (const auto& [label, examples] : train) {
                std::span<const TrainingExample> held;
                if (auto it = test.find(label); it != test.end()) held = it->second;
                auto trained = train_bootstrap(examples, tc, held);
                ojson r;
                r["train_accuracy"] = trained.report.train_accuracy;
                if (trained.report.test_accuracy) r["test_accuracy"] = *trained.report.test_accuracy;
                summary[std::string(label_name(label))] = r;
                clf.set_model(label, std::move(trained.model));
            }
            io::write_atomic(out_path, [&](std::ostream& o) { o << clf.to_json().dump() << '\n'; });
            std::cout << summary.dump() << std::endl;
        } else if (lexicon_cmd->parsed()) {
            cfg.require({"corpus"});
            const auto corpus = load_corpus(*cfg.corpus);
            const auto lex = load_lexicon_or_demo(cfg);
            std::vector<LexiconProfile> profiles;
            for (const auto& d : corpus.documents()) profiles.push_back(profile(d.text, lex, d.id));
            io::write_atomic(out_path, [&](std::ostream& o) { write_profiles_csv(o, profiles, lex); });
        } else if (sage_cmd->parsed()) {
            const auto fg = read_text_field(fg_path);
            const auto bg = read_text_field(bg_path);
            std::vector<std::string_view> fgv(fg.begin(), fg.end()), bgv(bg.begin(), bg.end());
            VocabConfig vc;
            vc.min_count = cfg.sage_min_count;
            const auto result = fit_sage(build_sage_input(fgv, bgv, vc));
            if (!result.converged) warn("SAGE stopped at max_iters without converging");
            io::write_atomic(out_path, [&](std::ostream& o) { write_sage_csv(o, top_discriminating(result, sage_k)); });
        } else if (topics_cmd->parsed()) {
            cfg.require({"corpus", "embeddings"});
            const auto corpus = load_corpus(*cfg.corpus);
            const auto store = load_store(*cfg.embeddings);
            ScanConfig sc;
            sc.k_min = cfg.k_min;
            sc.k_max = cfg.k_max;
            sc.seed = cfg.seed;
            const auto docs = topic_documents(corpus);
            const auto scan = coherence_scan(docs, store, sc);
            io::write_atomic(out_path, [&](std::ostream& o) { write_scan_json(o, scan); });
            info("best k = {}", scan.best_k);
        } else if (metrics_cmd->parsed()) {
            cfg.require({"corpus"});
            const auto corpus = load_corpus(*cfg.corpus);
            ResponseMap responses;
            if (cfg.responses) responses = load_responses(*cfg.responses);
            std::vector<MetricInput> inputs;
            std::istringstream in(io::read_file(pairs_path));
            std::string line;
            std::size_t n = 0;
            while (std::getline(in, line)) {
                ++n;
                if (text::is_blank(line)) continue;
                const auto where = fmt::format("{}:{}", pairs_path, n);
                json j;
                try {
                    j = json::parse(line);
                } catch (const json::parse_error& e) {
                    throw Error("metrics", fmt::format("malformed JSON: {}", e.what()), where);
                }
                for (const char* f : {"post_id", "response_id", "condition"})
                    if (!j.is_object() || !j.value(f, json()).is_string())
                        throw Error("metrics", fmt::format("pair needs string field '{}'", f), where);
                MetricInput mi;
                mi.post_id = j["post_id"].get<std::string>();
                mi.response_id = j["response_id"].get<std::string>();
                mi.condition = parse_condition(j["condition"].get<std::string>());
                const auto* post = corpus.find(mi.post_id);
                if (!post) throw Error("metrics", "post not in corpus", mi.post_id);
                mi.post_text = post->text;
                if (j.contains("text") && j["text"].is_string()) {
                    mi.response_text = j["text"].get<std::string>();
                } else if (const auto* doc = corpus.find(mi.response_id)) {
                    mi.response_text = doc->text;
                } else if (mi.condition != Condition::OC) {
                    auto it = responses.find({mi.post_id, parse_tier(condition_name(mi.condition))});
                    if (it == responses.end()) throw Error("metrics", "no text for response", mi.response_id);
                    mi.response_text = it->second;
                } else {
                    throw Error("metrics", "no text for response", mi.response_id);
                }
                inputs.push_back(std::move(mi));
            }
            std::vector<TextItem> needed;
            for (const auto& mi : inputs) {
                needed.push_back({mi.post_id, mi.post_text});
                needed.push_back({mi.response_id, mi.response_text});
            }
            auto provider = make_provider(cfg);
            const auto prepared = prepare_store(cfg, needed, provider.get());
            const auto lex = load_lexicon_or_demo(cfg);
            MetricConfig mc;
            mc.lexicon = &lex;
            auto scorer = make_score_provider(cfg);
            const auto batch = compute_metrics(inputs, prepared.store, mc, scorer.get());
            for (const auto& w : batch.warnings) warn("{}", w);
            io::write_atomic(out_path, [&](std::ostream& o) { write_metrics_csv(o, batch.rows); });
        } else if (compare_cmd->parsed()) {
            cfg.require({"corpus"});
            const auto corpus = load_corpus(*cfg.corpus);
            const auto assignments = load_assignments(assignments_path, cfg.tau);
            const auto sample = sample_posts(assignments, cfg.per_bucket, cfg.seed);
            std::map<std::string, const LabelAssignment*> by_id;
            for (const auto& a : assignments) by_id[a.document_id] = &a;
            std::vector<PromptRequest> requests;
            for (const auto& s : sample) {
                const auto* post = corpus.find(s.post_id);
                if (!post) throw Error("compare", "assignment refers to a post missing from the corpus", s.post_id);
                for (auto tier : kAllTiers) requests.push_back({s.post_id, tier, build_prompt(*post, tier, by_id.at(s.post_id))});
            }
            io::write_atomic(cfg.out_dir / "prompts.jsonl", [&](std::ostream& o) {
                for (const auto& r : requests) {
                    ojson j;
                    j["post_id"] = r.post_id;
                    j["tier"] = std::string(tier_name(r.tier));
                    j["prompt"] = r.prompt;
                    o << j.dump() << '\n';
                }
            });
            const auto responses = gather_responses(cfg, requests);
            if (!cfg.responses)
                io::write_atomic(cfg.out_dir / "responses.jsonl",
                                 [&](std::ostream& o) { write_responses(o, responses.responses); });
            const auto cmp = comparison_inputs(corpus, sample, responses);
            std::vector<TextItem> needed;
            for (const auto& mi : cmp.inputs) {
                needed.push_back({mi.post_id, mi.post_text});
                needed.push_back({mi.response_id, mi.response_text});
            }
            auto provider = make_provider(cfg);
            const auto prepared = prepare_store(cfg, needed, provider.get());
            const auto lex = load_lexicon_or_demo(cfg);
            MetricConfig mc;
            mc.lexicon = &lex;
            auto scorer = make_score_provider(cfg);
            const auto batch = compute_metrics(cmp.inputs, prepared.store, mc, scorer.get());
            for (const auto& w : batch.warnings) warn("{}", w);
            const auto report = comparison_report(batch.rows);
            io::write_atomic(cfg.out_dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, batch.rows); });
            io::write_atomic(cfg.out_dir / "excluded.json", [&](std::ostream& o) {
                ojson j = ojson::array();
                for (const auto& e : cmp.excluded) j.push_back({{"post_id", e.post_id}, {"reason", e.reason}});
                o << j.dump(2) << '\n';
            });
            io::write_atomic(cfg.out_dir / "comparison.csv", [&](std::ostream& o) { write_report_csv(o, report); });
            io::write_atomic(cfg.out_dir / "comparison.json", [&](std::ostream& o) { write_report_json(o, report); });
            info("compared {} posts ({} excluded)", report.posts, cmp.excluded.size());
        } else if (kw_cmd->parsed()) {
            std::vector<std::string> header;
            const auto cols = read_csv_columns(groups_path, header);
            std::vector<std::vector<double>> groups;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                std::vector<double> g;
                for (const auto& cell : cols[c])
                    if (!cell.empty()) g.push_back(parse_real(cell, header[c]));
                groups.push_back(std::move(g));
            }
            auto j = stat_json(stats::kruskal_wallis(groups, n_comparisons));
            j["df"] = groups.size() - 1;
            write_json_out(out_path, j);
        } else if (t_cmd->parsed()) {
            std::vector<std::string> header;
            const auto cols = read_csv_columns(pairs_path, header);
            if (cols.size() != 2) throw Error("stats", "paired CSV needs exactly two columns", pairs_path);
            std::vector<double> x, y;
            for (std::size_t i = 0; i < cols[0].size(); ++i) {
                x.push_back(parse_real(cols[0][i], header[0]));
                y.push_back(parse_real(cols[1][i], header[1]));
            }
            auto j = stat_json(stats::paired_t(x, y, n_comparisons));
            j["df"] = x.size() - 1;
            j["n"] = x.size();
            write_json_out(out_path, j);
        } else if (report_cmd->parsed()) {
            const auto out = run_pipeline(cfg);
            info("pipeline wrote {} files into {}", out.files.size(), cfg.out_dir.string());
        }
    } catch (const Error& e) {
        print_error(e.module(), e.what(), e.context());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what(), "");
        return 1;
    }
    return 0;
}

}  // namespace ipts::cli
