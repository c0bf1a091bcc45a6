#include "helpers.hpp"

#include <fmt/format.h>

#include "ipts/io.hpp"
#include "ipts/rake.hpp"
#include "ipts/rng.hpp"

namespace testing {

fs::path fixture_path(const std::string& name) { return fs::path(IPTS_FIXTURE_DIR) / name; }

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::path(IPTS_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) { return ipts::io::read_file(path); }

const Fixture& fixture() {
    static const Fixture f = [] {
        Fixture out;
        out.corpus = ipts::ingest(fixture_path("corpus.jsonl"), {"fixture", 1}).corpus;
        out.store = ipts::load_store(fixture_path("embeddings.jsonl"));
        out.bootstrap = ipts::BootstrapClassifier::load(fixture_path("bootstrap.json"));
        return out;
    }();
    return f;
}

PlantedTopics planted_topics(std::size_t clusters, std::size_t per_cluster, std::uint64_t seed) {
    static const char* stop[] = {"the", "and", "of", "to", "a", "in"};
    ipts::Rng rng(seed);
    PlantedTopics out;
    std::vector<ipts::TextItem> items;
    for (std::size_t c = 0; c < clusters; ++c) {
        for (std::size_t d = 0; d < per_cluster; ++d) {
            std::string text;
            for (std::size_t w = 0; w < 10; ++w) {
                const auto reps = 1 + rng.uniform_index(3);
                for (std::uint64_t r = 0; r < reps; ++r) text += fmt::format("zq{}{}v ", char('a' + c), char('a' + w));
                if (rng.uniform_index(3) == 0) text += std::string(stop[rng.uniform_index(6)]) + ' ';
            }
            auto id = fmt::format("d{:02}{:03}", c, d);
            items.push_back({id, text});
            out.docs.push_back({std::move(id), std::move(text)});
        }
    }
    ipts::HashingProvider provider(64, ipts::default_stoplist());
    out.store = ipts::embed_texts(provider, items);
    return out;
}

}  // namespace testing
