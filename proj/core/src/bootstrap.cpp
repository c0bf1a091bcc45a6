#include "ipts/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/rng.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

using json = nlohmann::json;
using Features = std::vector<std::pair<std::size_t, double>>;
constexpr const char* kModule = "labeling";

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(const std::vector<double>& w, const Features& x) {
    double s = 0.0;
    for (const auto& [i, v] : x) s += w[i] * v;
    return s;
}

double accuracy(const LogisticModel& model, std::span<const TrainingExample> data) {
    if (data.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& ex : data) correct += model.predict(ex.text) == ex.label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

Features hashed_ngram_features(std::string_view text, std::size_t buckets) {
    const auto tokens = text::word_tokens(text);
    std::map<std::size_t, double> counts;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        counts[text::fnv1a64("u:" + tokens[i]) % buckets] += 1.0;
        if (i + 1 < tokens.size()) counts[text::fnv1a64("b:" + tokens[i] + ' ' + tokens[i + 1]) % buckets] += 1.0;
    }
    return {counts.begin(), counts.end()};
}

double LogisticModel::decision(std::string_view text) const {
    if (!trained) throw Error(kModule, "bootstrap model is not trained");
    return bias + dot(weights, hashed_ngram_features(text, weights.size()));
}

double LogisticModel::probability(std::string_view text) const { return sigmoid(decision(text)); }

int LogisticModel::predict(std::string_view text) const { return decision(text) > 0.0 ? 1 : 0; }

TrainedModel train_bootstrap(std::span<const TrainingExample> train, const TrainConfig& config,
                             std::span<const TrainingExample> test) {
    if (train.size() < 2) throw Error(kModule, "bootstrap training needs at least 2 examples");
    bool has0 = false;
    bool has1 = false;
    for (const auto& ex : train) {
        if (ex.label != 0 && ex.label != 1) throw Error(kModule, "training labels must be 0 or 1");
        has0 |= ex.label == 0;
        has1 |= ex.label == 1;
    }
    if (!has0 || !has1) throw Error(kModule, "bootstrap training data contains a single class");
    if (config.buckets == 0) throw Error(kModule, "feature bucket count must be positive");

    std::vector<Features> features;
    features.reserve(train.size());
    for (const auto& ex : train) features.push_back(hashed_ngram_features(ex.text, config.buckets));

    LogisticModel model;
    model.weights.assign(config.buckets, 0.0);
    model.trained = true;

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(config.seed);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        const double rate = config.learning_rate / (1.0 + 0.1 * static_cast<double>(epoch));
        for (const auto i : order) {
            const auto& x = features[i];
            const double err = sigmoid(model.bias + dot(model.weights, x)) - train[i].label;
            for (const auto& [j, v] : x) model.weights[j] -= rate * (err * v + config.l2 * model.weights[j]);
            model.bias -= rate * err;
        }
    }

    TrainedModel out{std::move(model), {}};
    out.report.train_accuracy = accuracy(out.model, train);
    if (!test.empty()) out.report.test_accuracy = accuracy(out.model, test);
    return out;
}

int predict_bootstrap(const LogisticModel& model, std::string_view text) { return model.predict(text); }

void BootstrapClassifier::set_model(Label label, LogisticModel model) {
    if (!model.trained) throw Error(kModule, "cannot register an untrained bootstrap model", std::string(label_name(label)));
    models_[label] = std::move(model);
}

const LogisticModel* BootstrapClassifier::model(Label label) const {
    const auto it = models_.find(label);
    return it == models_.end() ? nullptr : &it->second;
}

bool BootstrapClassifier::passes(Label label, std::string_view text) const {
    if (label == Label::AcquiredCapability) return true;
    const auto* m = model(label);
    return m == nullptr || m->predict(text) == 1;
}

nlohmann::json BootstrapClassifier::to_json() const {
    json out = json::object();
    for (const auto& [label, m] : models_) {
        // Sparse storage: the hashed weight vector is mostly zeros.
        json weights = json::array();
        for (std::size_t i = 0; i < m.weights.size(); ++i) {
            if (m.weights[i] != 0.0) weights.push_back(json::array({i, m.weights[i]}));
        }
        out[std::string(label_name(label))] = {{"buckets", m.weights.size()}, {"bias", m.bias}, {"weights", weights}};
    }
    return out;
}

BootstrapClassifier BootstrapClassifier::from_json(const nlohmann::json& value) {
    if (!value.is_object()) throw Error(kModule, "bootstrap model file must be a JSON object");
    BootstrapClassifier out;
    for (const auto& [name, entry] : value.items()) {
        const auto label = parse_label(name);
        if (!label) throw Error(kModule, "unknown label in bootstrap model", name);
        LogisticModel m;
        const auto buckets = entry.at("buckets").get<std::size_t>();
        if (buckets == 0) throw Error(kModule, "bootstrap model has zero buckets", name);
        m.weights.assign(buckets, 0.0);
        m.bias = entry.at("bias").get<double>();
        for (const auto& pair : entry.at("weights")) {
            const auto i = pair.at(0).get<std::size_t>();
            if (i >= buckets) throw Error(kModule, "bootstrap weight index out of range", name);
            m.weights[i] = pair.at(1).get<double>();
        }
        m.trained = true;
        out.set_model(*label, std::move(m));
    }
    return out;
}

BootstrapClassifier BootstrapClassifier::load(const std::filesystem::path& path) {
    json value;
    try {
        value = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw Error(kModule, fmt::format("malformed bootstrap model: {}", e.what()), path.string());
    }
    return from_json(value);
}

}  // namespace ipts
