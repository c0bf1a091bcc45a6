#include "ipts/expansion.hpp"

#include <algorithm>

#include "ipts/error.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

constexpr const char* kModule = "codebook";

void ensure_phrase_vectors(const std::vector<std::string>& phrases, EmbeddingStore& store,
                           EmbeddingProvider* provider) {
    std::vector<TextItem> missing;
    for (const auto& p : phrases) {
        const auto key = phrase_key(p);
        if (!store.contains(key)) missing.push_back({key, p});
    }
    if (missing.empty()) return;
    if (provider == nullptr) throw Error(kModule, "no embedding available for new phrase", missing.front().text);
    try {
        store.merge(embed_texts(*provider, missing));
    } catch (const Error& e) {
        throw Error(kModule, std::string("embedding unavailable for new phrase: ") + e.what(), missing.front().text);
    }
}

}  // namespace

ExpansionResult expand_to_fixpoint(CodebookSet codebooks, const Corpus& corpus, EmbeddingStore& store,
                                   const ExpansionConfig& config, EmbeddingProvider* provider,
                                   const BootstrapClassifier* bootstrap) {
    config.rake.validate();
    ExpansionResult result;
    int base_iteration = 0;
    for (const auto& [label, book] : codebooks) base_iteration = std::max(base_iteration, book.max_iteration());

    const auto posts = corpus.posts();
    for (std::size_t pass = 1; pass <= config.max_iters; ++pass) {
        const auto labeled = label_corpus(corpus, codebooks, store, config.threshold, bootstrap);
        std::size_t admitted = 0;
        for (auto& [label, book] : codebooks) {
            std::vector<std::string_view> texts;
            for (std::size_t i = 0; i < posts.size(); ++i) {
                if (labeled.assignments[i].has(label)) texts.push_back(posts[i]->text);
            }
            if (texts.empty()) continue;

            std::vector<std::string> fresh;
            for (const auto& candidate : rake_extract(texts, config.rake)) {
                if (fresh.size() >= config.rake.top_n_per_iteration) break;
                const auto normalized = normalize_phrase(candidate.phrase);
                if (normalized.empty() || book.contains(normalized)) continue;
                if (text::split_whitespace(normalized).size() > config.max_admitted_words) continue;
                if (std::find(fresh.begin(), fresh.end(), normalized) != fresh.end()) continue;
                fresh.push_back(normalized);
            }
            ensure_phrase_vectors(fresh, store, provider);
            const PhraseOrigin origin{base_iteration + static_cast<int>(pass)};
            for (const auto& phrase : fresh) admitted += book.add(phrase, origin) ? 1 : 0;
        }
        result.iterations_run = pass;
        result.admitted_per_iteration.push_back(admitted);
        if (admitted == 0) {
            result.converged = true;
            break;
        }
    }
    result.codebooks = std::move(codebooks);
    return result;
}

}  // namespace ipts
