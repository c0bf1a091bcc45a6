#pragma once

#include <cstddef>
#include <vector>

#include "ipts/bootstrap.hpp"
#include "ipts/codebook.hpp"
#include "ipts/corpus.hpp"
#include "ipts/embedding.hpp"
#include "ipts/labeling.hpp"
#include "ipts/rake.hpp"

namespace ipts {

struct ExpansionConfig {
    RakeConfig rake;
    std::size_t max_iters = 10;
    double threshold = kDefaultThreshold;
    /// Longest admissible new phrase, in words.
    std::size_t max_admitted_words = 6;
};

struct ExpansionResult {
    CodebookSet codebooks;
    std::size_t iterations_run = 0;
    bool converged = false;
    /// Phrases admitted per iteration, summed over labels.
    std::vector<std::size_t> admitted_per_iteration;
};

/// Grows the codebooks until a full pass admits nothing or max_iters passes
/// have run. Each pass labels every post with the current codebooks, runs
/// RAKE over the posts carrying each label and admits that label's top_n
/// phrases not already in its codebook. New phrases are tagged with
/// iteration (highest existing iteration + pass number). Vectors for new
/// phrases come from `store`, falling back to `provider`; the fetched
/// vectors are added to `store`.
ExpansionResult expand_to_fixpoint(CodebookSet codebooks, const Corpus& corpus, EmbeddingStore& store,
                                   const ExpansionConfig& config, EmbeddingProvider* provider = nullptr,
                                   const BootstrapClassifier* bootstrap = nullptr);

}  // namespace ipts
