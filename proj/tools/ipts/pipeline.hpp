#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "ipts/codebook.hpp"
#include "ipts/compare.hpp"
#include "ipts/corpus.hpp"
#include "ipts/embedding.hpp"
#include "ipts/labeling.hpp"
#include "ipts/lexicon.hpp"
#include "ipts/metrics.hpp"

namespace ipts::cli {

Corpus load_corpus(const fs::path& path);

/// HTTP provider when an embed URL is set, the hashing embedder when
/// hashing_dim > 0, otherwise none.
std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& config);

std::unique_ptr<ScoreProvider> make_score_provider(const RunConfig& config);

struct PreparedStore {
    EmbeddingStore store;
    std::size_t fetched = 0;
};

/// Loads the configured embedding file and fetches vectors for every item
/// it lacks. Without a provider, lists the missing keys in the error.
PreparedStore prepare_store(const RunConfig& config, std::span<const TextItem> needed, EmbeddingProvider* provider);

std::vector<TextItem> document_items(const Corpus& corpus);
std::vector<TextItem> phrase_items(const CodebookSet& codebooks);

CodebookSet load_or_seed_codebooks(const RunConfig& config);
CategoryLexicon load_lexicon_or_demo(const RunConfig& config);

/// Responses from the configured file, or from the chat provider.
ResponseSet gather_responses(const RunConfig& config, std::span<const PromptRequest> requests);

/// Table-4-shaped category comparison of post lexicon rates across the
/// sampling buckets: per category the bucket means (x100), H and stars.
void write_lexicon_kw_csv(std::ostream& out, const Corpus& corpus, std::span<const LabelAssignment> assignments,
                          const CategoryLexicon& lexicon);

struct PipelineOutputs {
    std::vector<fs::path> files;
};

/// ingest, expand, label, lexicon, sage, topics, compare. Every artifact is
/// written atomically into config.out_dir.
PipelineOutputs run_pipeline(const RunConfig& config);

}  // namespace ipts::cli
