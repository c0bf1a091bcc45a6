#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ipts::cli {

namespace fs = std::filesystem;

struct RunConfig {
    std::optional<fs::path> corpus;
    std::optional<fs::path> embeddings;
    std::optional<fs::path> codebooks;
    std::optional<fs::path> lexicon;
    std::optional<fs::path> scores;
    std::optional<fs::path> responses;
    std::optional<fs::path> bootstrap;
    fs::path out_dir = "ipts-out";

    double tau = 0.6;
    std::uint64_t seed = 7;
    std::size_t k_min = 5;
    std::size_t k_max = 14;
    std::size_t per_bucket = 10;
    std::size_t sage_k = 16;
    std::size_t sage_min_count = 5;
    std::size_t expand_max_iters = 10;

    std::string embed_url;
    std::string score_url;
    std::string chat_url;
    /// Dimension of the offline hashing embedder; 0 disables it.
    std::size_t hashing_dim = 0;

    /// Checks value ranges and that every configured input path exists.
    /// Touches nothing but the filesystem metadata of those paths.
    void validate() const;

    /// Throws naming each listed input that is unset.
    void require(const std::vector<std::string>& fields) const;
};

/// Relative paths in the file resolve against the file's directory.
/// Unknown keys are rejected.
RunConfig parse_run_config(const nlohmann::json& value, const fs::path& base_dir = {});
RunConfig load_run_config(const fs::path& path);

}  // namespace ipts::cli
