#include "pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ipts/error.hpp"
#include "ipts/expansion.hpp"
#include "ipts/io.hpp"
#include "ipts/sage.hpp"
#include "ipts/stats.hpp"
#include "ipts/topics.hpp"
#include "log.hpp"

namespace ipts::cli {
namespace {

constexpr const char* kModule = "pipeline";

using ojson = nlohmann::ordered_json;

struct Writer {
    fs::path dir;
    PipelineOutputs outputs;

    template <typename F>
    void operator()(const std::string& name, F&& fn) {
        const auto path = dir / name;
        io::write_atomic(path, std::forward<F>(fn));
        outputs.files.push_back(path);
        info("wrote {}", path.string());
    }
};

}  // namespace

Corpus load_corpus(const fs::path& path) {
    IngestConfig cfg;
    cfg.source_label = path.filename().string();
    cfg.ingested_at = 1;
    auto result = ingest(path, cfg);
    const auto& r = result.report;
    if (r.duplicates || r.removed_or_empty || r.orphans || r.flattened)
        info("{}: dropped {} duplicates, {} removed/empty, {} orphans; flattened {}", path.string(), r.duplicates,
             r.removed_or_empty, r.orphans, r.flattened);
    return std::move(result.corpus);
}

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& config) {
    if (!config.embed_url.empty()) {
        HttpProviderConfig http;
        http.url = config.embed_url;
        return std::make_unique<HttpProvider>(http);
    }
    if (config.hashing_dim > 0) return std::make_unique<HashingProvider>(config.hashing_dim, default_stoplist());
    return nullptr;
}

std::unique_ptr<ScoreProvider> make_score_provider(const RunConfig& config) {
    if (config.scores) return std::make_unique<FileScoreProvider>(*config.scores);
    if (!config.score_url.empty()) return std::make_unique<HttpScoreProvider>(config.score_url);
    return nullptr;
}

PreparedStore prepare_store(const RunConfig& config, std::span<const TextItem> needed, EmbeddingProvider* provider) {
    PreparedStore p;
    if (config.embeddings) p.store = load_store(*config.embeddings);
    std::vector<TextItem> missing;
    std::set<std::string> seen;
    for (const auto& item : needed)
        if (!p.store.contains(item.key) && seen.insert(item.key).second) missing.push_back(item);
    if (missing.empty()) return p;
    if (!provider) {
        std::vector<std::string> keys;
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) keys.push_back(missing[i].key);
        if (missing.size() > 20) keys.push_back("...");
        throw Error("embedding",
                    fmt::format("{} vectors missing and no embedding provider is configured", missing.size()),
                    fmt::format("{}", fmt::join(keys, ", ")));
    }
    info("embedding {} texts", missing.size());
    p.store.merge(embed_texts(*provider, missing));
    p.fetched = missing.size();
    return p;
}

std::vector<TextItem> document_items(const Corpus& corpus) {
    std::vector<TextItem> items;
    for (const auto& d : corpus.documents()) items.push_back({d.id, d.text});
    return items;
}

std::vector<TextItem> phrase_items(const CodebookSet& codebooks) {
    std::vector<TextItem> items;
    for (const auto& [label, book] : codebooks)
        for (const auto& p : book.phrases()) items.push_back({phrase_key(p.text), p.text});
    return items;
}

CodebookSet load_or_seed_codebooks(const RunConfig& config) {
    return config.codebooks ? load_codebooks(*config.codebooks) : seed_codebooks();
}

CategoryLexicon load_lexicon_or_demo(const RunConfig& config) {
    return config.lexicon ? load_lexicon(*config.lexicon) : demo_lexicon();
}

ResponseSet gather_responses(const RunConfig& config, std::span<const PromptRequest> requests) {
    if (config.responses) return collect_responses(requests, load_responses(*config.responses));
    if (!config.chat_url.empty()) {
        HttpChatProvider chat(HttpChatConfig{config.chat_url});
        return collect_responses(requests, chat);
    }
    throw Error(kModule, "comparison needs a response file or a chat URL");
}

void write_lexicon_kw_csv(std::ostream& out, const Corpus& corpus, std::span<const LabelAssignment> assignments,
                          const CategoryLexicon& lexicon) {
    constexpr std::array<Bucket, 4> order{Bucket::Lethal, Bucket::AcquiredCapability, Bucket::PerceivedBurdensomeness,
                                          Bucket::ThwartedBelongingness};
    std::map<Bucket, std::vector<LexiconProfile>> groups;
    for (const auto& a : assignments) {
        const auto b = bucket_of(a);
        if (!b) continue;
        const auto* doc = corpus.find(a.document_id);
        if (!doc) throw Error(kModule, "assignment for unknown document", a.document_id);
        groups[*b].push_back(profile(doc->text, lexicon, doc->id));
    }
    std::vector<Bucket> present;
    for (auto b : order)
        if (!groups[b].empty()) present.push_back(b);

    out << "category";
    for (auto b : present) out << ",mean_" << bucket_name(b);
    out << ",H,padj,sig\n";
    const auto names = lexicon.category_names();
    const int n = static_cast<int>(names.size());
    for (const auto& cat : names) {
        out << io::csv_field(cat);
        std::vector<std::vector<double>> values;
        for (auto b : present) {
            std::vector<double> v;
            for (const auto& p : groups[b]) v.push_back(100.0 * p.rate(cat));
            double sum = 0.0;
            for (double x : v) sum += x;
            out << ',' << io::format_real(sum / static_cast<double>(v.size()));
            values.push_back(std::move(v));
        }
        std::optional<stats::StatResult> kw;
        if (values.size() >= 2) {
            try {
                kw = stats::kruskal_wallis(values, n);
            } catch (const Error&) {
            }
        }
        if (kw)
            out << ',' << io::format_real(kw->statistic) << ',' << io::format_real(kw->p_adjusted) << ','
                << stats::stars_text(kw->stars) << '\n';
        else
            out << ",,,degenerate\n";
    }
}

PipelineOutputs run_pipeline(const RunConfig& config) {
    config.validate();
    config.require({"corpus"});
    Writer write{config.out_dir, {}};

    const auto corpus = load_corpus(*config.corpus);
    info("corpus: {} posts, {} comments", corpus.posts().size(), corpus.comments().size());
    write("corpus.jsonl", [&](std::ostream& o) { write_corpus(o, corpus); });
    const auto cs = corpus_stats(corpus);
    write("corpus_stats.json", [&](std::ostream& o) {
        ojson j;
        j["posts"] = cs.posts;
        j["comments"] = cs.comments;
        j["unique_posting_authors"] = cs.unique_posting_authors;
        j["unique_commenting_authors"] = cs.unique_commenting_authors;
        j["mean_post_words"] = cs.mean_post_words;
        j["stdev_post_words"] = cs.stdev_post_words;
        j["mean_comment_words"] = cs.mean_comment_words;
        j["stdev_comment_words"] = cs.stdev_comment_words;
        j["mean_comments_per_post"] = cs.mean_comments_per_post;
        o << j.dump(2) << '\n';
    });

    auto provider = make_provider(config);
    const auto seeds = load_or_seed_codebooks(config);
    auto needed = document_items(corpus);
    const auto phrases = phrase_items(seeds);
    needed.insert(needed.end(), phrases.begin(), phrases.end());
    auto prepared = prepare_store(config, needed, provider.get());
    auto& store = prepared.store;

    std::optional<BootstrapClassifier> bootstrap;
    if (config.bootstrap) bootstrap = BootstrapClassifier::load(*config.bootstrap);
    const BootstrapClassifier* gate = bootstrap ? &*bootstrap : nullptr;

    ExpansionConfig ex;
    ex.max_iters = config.expand_max_iters;
    ex.threshold = config.tau;
    const auto fetched_before = store.size();
    auto expansion = expand_to_fixpoint(seeds, corpus, store, ex, provider.get(), gate);
    prepared.fetched += store.size() - fetched_before;
    info("expansion: {} iterations, converged={}", expansion.iterations_run, expansion.converged);
    write("codebooks.json", [&](std::ostream& o) { write_codebooks(o, expansion.codebooks); });
    write("expansion.json", [&](std::ostream& o) {
        ojson j;
        j["iterations_run"] = expansion.iterations_run;
        j["converged"] = expansion.converged;
        j["admitted_per_iteration"] = expansion.admitted_per_iteration;
        o << j.dump(2) << '\n';
    });

    const auto labeled = label_corpus(corpus, expansion.codebooks, store, config.tau, gate);
    write("assignments.jsonl", [&](std::ostream& o) { write_assignments(o, labeled.assignments); });
    write("distribution.csv", [&](std::ostream& o) { write_distribution_csv(o, labeled.table); });

    const auto lexicon = load_lexicon_or_demo(config);
    write("lexicon_kw.csv", [&](std::ostream& o) { write_lexicon_kw_csv(o, corpus, labeled.assignments, lexicon); });

    std::vector<std::string_view> fg, bg;
    for (const auto& a : labeled.assignments)
        for (const auto* c : corpus.responses_to(a.document_id)) (a.lethal ? fg : bg).push_back(c->text);
    if (fg.empty() || bg.empty()) throw Error("sage", "need responses to both lethal and non-lethal posts");
    VocabConfig vocab;
    vocab.min_count = config.sage_min_count;
    const auto sage = fit_sage(build_sage_input(fg, bg, vocab));
    if (!sage.converged) warn("SAGE stopped at max_iters without converging");
    write("sage.csv", [&](std::ostream& o) { write_sage_csv(o, top_discriminating(sage, config.sage_k)); });

    ScanConfig scan_cfg;
    scan_cfg.k_min = config.k_min;
    scan_cfg.k_max = config.k_max;
    scan_cfg.seed = config.seed;
    const auto docs = topic_documents(corpus);
    const auto scan = coherence_scan(docs, store, scan_cfg);
    info("topics: best k = {}", scan.best_k);
    write("topics.json", [&](std::ostream& o) { write_scan_json(o, scan); });

    const auto sample = sample_posts(labeled.assignments, config.per_bucket, config.seed);
    std::map<std::string, const LabelAssignment*> by_id;
    for (const auto& a : labeled.assignments) by_id[a.document_id] = &a;
    std::vector<PromptRequest> requests;
    for (const auto& s : sample)
        for (auto tier : kAllTiers)
            requests.push_back({s.post_id, tier, build_prompt(*corpus.find(s.post_id), tier, by_id.at(s.post_id))});
    write("prompts.jsonl", [&](std::ostream& o) {
        for (const auto& r : requests) {
            ojson j;
            j["post_id"] = r.post_id;
            j["tier"] = std::string(tier_name(r.tier));
            j["prompt"] = r.prompt;
            o << j.dump() << '\n';
        }
    });
    const auto responses = gather_responses(config, requests);
    if (!config.responses) write("responses.jsonl", [&](std::ostream& o) { write_responses(o, responses.responses); });
    for (const auto& k : responses.empty) warn("empty response for {}/{}", k.first, tier_name(k.second));

    const auto cmp = comparison_inputs(corpus, sample, responses);
    std::vector<TextItem> response_items;
    for (const auto& in : cmp.inputs) response_items.push_back({in.response_id, in.response_text});
    std::vector<TextItem> response_missing;
    for (const auto& item : response_items)
        if (!store.contains(item.key)) response_missing.push_back(item);
    if (!response_missing.empty()) {
        RunConfig no_file = config;
        no_file.embeddings.reset();
        auto extra = prepare_store(no_file, response_missing, provider.get());
        store.merge(extra.store);
        prepared.fetched += extra.fetched;
    }

    MetricConfig mcfg;
    mcfg.lexicon = &lexicon;
    auto scorer = make_score_provider(config);
    const auto metrics = compute_metrics(cmp.inputs, store, mcfg, scorer.get());
    for (const auto& w : metrics.warnings) warn("{}", w);
    write("metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, metrics.rows); });
    write("excluded.json", [&](std::ostream& o) {
        ojson j = ojson::array();
        for (const auto& e : cmp.excluded) j.push_back({{"post_id", e.post_id}, {"reason", e.reason}});
        o << j.dump(2) << '\n';
    });
    const auto report = comparison_report(metrics.rows);
    write("comparison.csv", [&](std::ostream& o) { write_report_csv(o, report); });
    write("comparison.json", [&](std::ostream& o) { write_report_json(o, report); });

    if (prepared.fetched > 0) write("embeddings.jsonl", [&](std::ostream& o) { write_store(o, store); });
    return std::move(write.outputs);
}

}  // namespace ipts::cli
