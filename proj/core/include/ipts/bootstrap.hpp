#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ipts/codebook.hpp"

namespace ipts {

struct TrainingExample {
    std::string text;
    int label = 0;  // 0 or 1
};

struct TrainConfig {
    std::size_t buckets = std::size_t{1} << 18;
    std::size_t epochs = 40;
    double learning_rate = 0.1;
    double l2 = 1e-6;
    std::uint64_t seed = 7;
};

/// Binary logistic regression over hashed unigram and bigram counts.
struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    bool trained = false;

    double decision(std::string_view text) const;
    double probability(std::string_view text) const;
    /// 1 when the decision value is positive. Throws when untrained.
    int predict(std::string_view text) const;
};

struct TrainReport {
    double train_accuracy = 0.0;
    std::optional<double> test_accuracy;
};

struct TrainedModel {
    LogisticModel model;
    TrainReport report;
};

/// Deterministic SGD given config.seed. Needs >= 2 examples with both classes.
TrainedModel train_bootstrap(std::span<const TrainingExample> train, const TrainConfig& config = {},
                             std::span<const TrainingExample> test = {});

int predict_bootstrap(const LogisticModel& model, std::string_view text);

/// Sparse hashed features: (bucket, count) pairs sorted by bucket.
std::vector<std::pair<std::size_t, double>> hashed_ngram_features(std::string_view text, std::size_t buckets);

/// Per-label pre-filter in front of similarity labeling. Labels without a
/// model pass everything; AcquiredCapability is never gated.
class BootstrapClassifier {
public:
    void set_model(Label label, LogisticModel model);
    const LogisticModel* model(Label label) const;
    bool empty() const { return models_.empty(); }

    /// True when the label's dimension should be scored for this text.
    bool passes(Label label, std::string_view text) const;

    nlohmann::json to_json() const;
    static BootstrapClassifier from_json(const nlohmann::json& value);
    static BootstrapClassifier load(const std::filesystem::path& path);

private:
    std::map<Label, LogisticModel> models_;
};

}  // namespace ipts
