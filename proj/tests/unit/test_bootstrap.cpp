#include <doctest.h>

#include <nlohmann/json.hpp>

#include "ipts/bootstrap.hpp"
#include "ipts/error.hpp"

using namespace ipts;

namespace {

std::vector<TrainingExample> toy() {
    return {{"i feel so alone tonight", 1},  {"nobody is ever around me", 1}, {"alone again every day", 1},
            {"so isolated and alone", 1},    {"alone and empty", 1},          {"great game last night", 0},
            {"the recipe needs more salt", 0}, {"what a game that was", 0},   {"more salt please", 0},
            {"nice weather for a game", 0}};
}

}  // namespace

TEST_CASE("separable toy set trains to full accuracy") {
    const auto ex = toy();
    TrainConfig cfg;
    cfg.buckets = 1 << 12;
    const auto t = train_bootstrap(ex, cfg, ex);
    CHECK(t.report.train_accuracy == 1.0);
    REQUIRE(t.report.test_accuracy.has_value());
    CHECK(*t.report.test_accuracy == 1.0);
    for (const auto& e : ex) CHECK(predict_bootstrap(t.model, e.text) == e.label);
}

TEST_CASE("training is deterministic for a seed") {
    const auto ex = toy();
    TrainConfig cfg;
    cfg.buckets = 1 << 12;
    const auto a = train_bootstrap(ex, cfg);
    const auto b = train_bootstrap(ex, cfg);
    CHECK(a.model.weights == b.model.weights);
    CHECK(a.model.bias == b.model.bias);
}

TEST_CASE("empty text predicts by the bias sign") {
    const auto t = train_bootstrap(toy(), {});
    CHECK(t.model.decision("") == t.model.bias);
    CHECK(predict_bootstrap(t.model, "") == (t.model.bias > 0 ? 1 : 0));
}

TEST_CASE("training preconditions") {
    std::vector<TrainingExample> same = {{"a", 1}, {"b", 1}};
    CHECK_THROWS_AS(train_bootstrap(same), Error);
    std::vector<TrainingExample> one = {{"a", 1}};
    CHECK_THROWS_AS(train_bootstrap(one), Error);
    std::vector<TrainingExample> bad = {{"a", 1}, {"b", 2}};
    CHECK_THROWS_AS(train_bootstrap(bad), Error);
    LogisticModel untrained;
    CHECK_THROWS_AS(untrained.predict("x"), Error);
}

TEST_CASE("hashed features count unigrams and bigrams") {
    const auto f = hashed_ngram_features("Alone alone", 1 << 20);
    double total = 0;
    for (const auto& [b, c] : f) total += c;
    CHECK(total == 3.0);
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i - 1].first < f[i].first);
    CHECK(hashed_ngram_features("", 16).empty());
}

TEST_CASE("classifier gating and JSON round-trip") {
    BootstrapClassifier c;
    CHECK(c.empty());
    CHECK(c.passes(Label::SelfHate, "anything"));
    TrainConfig cfg;
    cfg.buckets = 1 << 12;
    const auto t = train_bootstrap(toy(), cfg);
    c.set_model(Label::Loneliness, t.model);
    c.set_model(Label::AcquiredCapability, t.model);
    CHECK(c.passes(Label::Loneliness, "alone again"));
    CHECK_FALSE(c.passes(Label::Loneliness, "more salt"));
    CHECK(c.passes(Label::AcquiredCapability, "more salt"));
    CHECK(c.passes(Label::Liability, "more salt"));

    const auto back = BootstrapClassifier::from_json(nlohmann::json::parse(c.to_json().dump()));
    REQUIRE(back.model(Label::Loneliness) != nullptr);
    CHECK(back.model(Label::Loneliness)->weights == t.model.weights);
    CHECK(back.passes(Label::Loneliness, "alone again"));
    CHECK(back.model(Label::SelfHate) == nullptr);
}
