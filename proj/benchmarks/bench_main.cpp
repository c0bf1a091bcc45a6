#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "ipts/codebook.hpp"
#include "ipts/embedding.hpp"
#include "ipts/labeling.hpp"
#include "ipts/rake.hpp"
#include "ipts/rng.hpp"
#include "ipts/sage.hpp"
#include "ipts/topics.hpp"

namespace {

std::vector<double> random_unit(ipts::Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform() * 2 - 1;
    return v;
}

std::string random_text(ipts::Rng& rng, std::size_t words) {
    static const char* vocab[] = {"alone",   "the",  "nobody", "cares", "and",     "i",     "feel",
                                  "useless", "of",   "pain",   "night", "burden",  "to",    "my",
                                  "family",  "gun",  "empty",  "again", "without", "hope"};
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        out += vocab[rng.uniform_index(20)];
        out += rng.uniform_index(9) == 0 ? ". " : " ";
    }
    return out;
}

void BM_Cosine384(benchmark::State& state) {
    ipts::Rng rng(1);
    const auto a = random_unit(rng, 384);
    const auto b = random_unit(rng, 384);
    for (auto _ : state) benchmark::DoNotOptimize(ipts::cosine(a, b));
}
BENCHMARK(BM_Cosine384);

void BM_DimScore(benchmark::State& state) {
    ipts::Rng rng(2);
    ipts::Codebook book(ipts::Label::Loneliness);
    ipts::EmbeddingStore store;
    for (int i = 0; i < state.range(0); ++i) {
        const auto phrase = "phrase " + std::to_string(i);
        book.add(phrase, ipts::PhraseOrigin{0});
        store.insert(ipts::phrase_key(phrase), random_unit(rng, 384));
    }
    const auto post = random_unit(rng, 384);
    for (auto _ : state) benchmark::DoNotOptimize(ipts::dim_score(post, book, store));
}
BENCHMARK(BM_DimScore)->Arg(16)->Arg(256);

void BM_Rake(benchmark::State& state) {
    ipts::Rng rng(3);
    const auto text = random_text(rng, static_cast<std::size_t>(state.range(0)));
    const ipts::RakeConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(ipts::rake_extract(text, cfg));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Rake)->Arg(100)->Arg(5000);

void BM_Sage(benchmark::State& state) {
    ipts::Rng rng(4);
    ipts::SageInput in;
    for (int i = 0; i < state.range(0); ++i) {
        in.vocab.push_back("w" + std::to_string(i));
        in.fg_counts.push_back(1 + rng.uniform_index(200));
        in.bg_counts.push_back(1 + rng.uniform_index(200));
    }
    for (auto _ : state) benchmark::DoNotOptimize(ipts::fit_sage(in));
}
BENCHMARK(BM_Sage)->Arg(100)->Arg(2000);

void BM_KMeans(benchmark::State& state) {
    ipts::Rng rng(5);
    ipts::EmbeddingStore store;
    std::vector<std::string> ids;
    for (int i = 0; i < state.range(0); ++i) {
        ids.push_back("d" + std::to_string(i));
        store.insert(ids.back(), random_unit(rng, 64));
    }
    for (auto _ : state) benchmark::DoNotOptimize(ipts::cluster_topics(ids, store, 8, 7));
}
BENCHMARK(BM_KMeans)->Arg(200)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
