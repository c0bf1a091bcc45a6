#include "config.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ipts/error.hpp"
#include "ipts/io.hpp"

namespace ipts::cli {
namespace {

constexpr const char* kModule = "config";

const std::optional<fs::path>* path_field(const RunConfig& c, const std::string& name) {
    if (name == "corpus") return &c.corpus;
    if (name == "embeddings") return &c.embeddings;
    if (name == "codebooks") return &c.codebooks;
    if (name == "lexicon") return &c.lexicon;
    if (name == "scores") return &c.scores;
    if (name == "responses") return &c.responses;
    if (name == "bootstrap") return &c.bootstrap;
    return nullptr;
}

template <typename T>
T number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw Error(kModule, fmt::format("'{}' must be a number", key));
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw Error(kModule, fmt::format("'{}' must be a non-negative integer", key));
    }
    return v.get<T>();
}

std::string string(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw Error(kModule, fmt::format("'{}' must be a string", key));
    return v.get<std::string>();
}

}  // namespace

void RunConfig::validate() const {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(kModule, fmt::format("tau must lie in (0,1), got {}", tau));
    if (k_min < 2 || k_max > 50 || k_min > k_max)
        throw Error(kModule, fmt::format("k range {}..{} must satisfy 2 <= k_min <= k_max <= 50", k_min, k_max));
    if (per_bucket < 1) throw Error(kModule, "per_bucket must be >= 1");
    if (sage_k < 1) throw Error(kModule, "sage_k must be >= 1");
    if (sage_min_count < 1) throw Error(kModule, "sage_min_count must be >= 1");
    if (hashing_dim == 1) throw Error(kModule, "hashing_dim must be 0 or >= 2");
    for (const char* name : {"corpus", "embeddings", "codebooks", "lexicon", "scores", "responses", "bootstrap"}) {
        const auto& p = *path_field(*this, name);
        if (p && !fs::exists(*p)) throw Error(kModule, fmt::format("{} path does not exist", name), p->string());
    }
    if (fs::exists(out_dir) && !fs::is_directory(out_dir))
        throw Error(kModule, "out_dir exists and is not a directory", out_dir.string());
}

void RunConfig::require(const std::vector<std::string>& fields) const {
    std::vector<std::string> missing;
    for (const auto& f : fields) {
        const auto* p = path_field(*this, f);
        if (!p) throw Error(kModule, fmt::format("unknown input '{}'", f));
        if (!*p) missing.push_back(f);
    }
    if (!missing.empty()) throw Error(kModule, fmt::format("missing required input(s): {}", fmt::join(missing, ", ")));
}

RunConfig parse_run_config(const nlohmann::json& value, const fs::path& base_dir) {
    if (!value.is_object()) throw Error(kModule, "config must be a JSON object");
    RunConfig c;
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    for (const auto& [key, v] : value.items()) {
        if (auto* slot = const_cast<std::optional<fs::path>*>(path_field(c, key))) {
            *slot = resolve(string(v, key));
        } else if (key == "out_dir") {
            c.out_dir = resolve(string(v, key));
        } else if (key == "tau") {
            c.tau = number<double>(v, key);
        } else if (key == "seed") {
            c.seed = number<std::uint64_t>(v, key);
        } else if (key == "k_min") {
            c.k_min = number<std::size_t>(v, key);
        } else if (key == "k_max") {
            c.k_max = number<std::size_t>(v, key);
        } else if (key == "per_bucket") {
            c.per_bucket = number<std::size_t>(v, key);
        } else if (key == "sage_k") {
            c.sage_k = number<std::size_t>(v, key);
        } else if (key == "sage_min_count") {
            c.sage_min_count = number<std::size_t>(v, key);
        } else if (key == "expand_max_iters") {
            c.expand_max_iters = number<std::size_t>(v, key);
        } else if (key == "embed_url") {
            c.embed_url = string(v, key);
        } else if (key == "score_url") {
            c.score_url = string(v, key);
        } else if (key == "chat_url") {
            c.chat_url = string(v, key);
        } else if (key == "hashing_dim") {
            c.hashing_dim = number<std::size_t>(v, key);
        } else {
            throw Error(kModule, fmt::format("unknown config key '{}'", key));
        }
    }
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(kModule, fmt::format("malformed config: {}", e.what()), path.string());
    }
    return parse_run_config(j, path.parent_path());
}

}  // namespace ipts::cli
