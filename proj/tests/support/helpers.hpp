#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ipts/bootstrap.hpp"
#include "ipts/corpus.hpp"
#include "ipts/embedding.hpp"
#include "ipts/topics.hpp"

namespace testing {

namespace fs = std::filesystem;

fs::path fixture_path(const std::string& name);

/// Fresh empty directory under the build tree.
fs::path fresh_dir(const std::string& name);

std::string slurp(const fs::path& path);

struct Fixture {
    ipts::Corpus corpus;
    ipts::EmbeddingStore store;
    ipts::BootstrapClassifier bootstrap;
};

/// The shipped synthetic fixture.
const Fixture& fixture();

struct PlantedTopics {
    std::vector<ipts::TopicDocument> docs;
    ipts::EmbeddingStore store;
};

/// `clusters` groups of `per_cluster` documents. Each group owns ten words
/// that every one of its documents uses one to three times, plus a few
/// stopwords; embeddings come from the hashing embedder.
PlantedTopics planted_topics(std::size_t clusters, std::size_t per_cluster, std::uint64_t seed);

}  // namespace testing
