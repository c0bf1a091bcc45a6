#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "ipts/error.hpp"
#include "ipts/lexicon.hpp"
#include "ipts/text.hpp"
#include "oracles.hpp"

using namespace ipts;

namespace {

CategoryLexicon parse(const std::string& s) {
    std::istringstream in(s);
    return parse_lexicon(in);
}

const char* kSmall =
    "%\n"
    "1\tposemo\n"
    "2\tsad\n"
    "3\tarticle\n"
    "%\n"
    "happ*\t1\n"
    "sad\t2\n"
    "blue\t1\t2\n"
    "the\t3\n"
    "a\t3\n";

std::string upper_case(std::string s) {
    for (auto& c : s) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
    }
    return s;
}

}  // namespace

TEST_CASE("dictionary parsing") {
    const auto lex = parse(kSmall);
    CHECK(lex.category_names() == std::vector<std::string>{"article", "posemo", "sad"});
    CHECK(lex.categories().at("posemo").count("happ*") == 1);
    CHECK(lex.match("happiness").size() == 1);
    CHECK(lex.match("happ").size() == 1);
    CHECK(lex.match("hap").empty());
    CHECK(lex.match("blue").size() == 2);
    CHECK(lex.match("sadness").empty());
}

TEST_CASE("malformed dictionaries are rejected") {
    CHECK_THROWS_AS(parse("1\tposemo\n"), Error);
    CHECK_THROWS_AS(parse("%\n1\tposemo\n"), Error);
    CHECK_THROWS_AS(parse("%\n1\tposemo\n2\tempty\n%\nhappy\t1\n"), Error);
    CHECK_THROWS_AS(parse("%\n1\tposemo\n%\nhappy\t9\n"), Error);
    CHECK_THROWS_AS(parse("%\n1\tposemo\n%\nha*ppy\t1\n"), Error);
    CHECK_THROWS_AS(parse("%\n1\tposemo\n1\tother\n%\nhappy\t1\n"), Error);
    CHECK_THROWS_AS(parse("%\n1\tposemo\n%\nhappy\n"), Error);
    using Cats = std::map<std::string, std::set<std::string>>;
    CHECK_THROWS_AS(CategoryLexicon(Cats{{"x", {"Upper"}}}), Error);
    CHECK_THROWS_AS(CategoryLexicon(Cats{{"x", {}}}), Error);
}

TEST_CASE("profile rates") {
    const auto lex = parse(kSmall);
    auto p = profile("I am sad", lex, "d1");
    CHECK(p.token_count == 3);
    CHECK(p.rate("sad") == doctest::Approx(1.0 / 3.0));
    CHECK(p.rate("posemo") == 0.0);
    CHECK_THROWS_AS(p.rate("nope"), Error);

    p = profile("", lex);
    CHECK(p.token_count == 0);
    for (const auto& [c, r] : p.rates) CHECK(r == 0.0);

    p = profile("Blue, blue happiness!", lex);
    CHECK(p.rate("posemo") == doctest::Approx(1.0));
    CHECK(p.rate("sad") == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("profiles ignore case and stay within bounds") {
    const auto& lex = demo_lexicon();
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto text = oracle::random_prose(rng, 1, 5);
        const auto lower = profile(text, lex);
        const auto upper = profile(upper_case(text), lex);
        CHECK(lower.token_count == upper.token_count);
        CHECK(lower.rates == upper.rates);
        for (const auto& [c, r] : lower.rates) {
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
        }
    }
}

TEST_CASE("CDI is linear in the weights") {
    const auto& lex = demo_lexicon();
    auto p = profile("", lex);
    CHECK(cdi(p, default_cdi_weights(), 3.5) == 3.5);

    LexiconProfile only;
    only.rates = {{"article", 0.10}};
    CHECK(cdi(only, {{"article", 1.0}}) == doctest::Approx(10.0));
    CHECK_THROWS_AS(cdi(only, {{"prep", 1.0}}), Error);

    p = profile("The cat sat on a mat and I did not like it very much", lex);
    CdiWeights neg = default_cdi_weights();
    for (auto& [c, w] : neg) w = -w;
    CHECK(cdi(p, neg, 2.0) - 2.0 == doctest::Approx(-(cdi(p, default_cdi_weights(), 2.0) - 2.0)));
    CHECK(default_cdi_weights().at("article") == 1.0);
    CHECK(default_cdi_weights().at("negate") == -1.0);
}

TEST_CASE("profile CSV has a header with every category") {
    const auto lex = parse(kSmall);
    const std::vector<LexiconProfile> ps = {profile("sad day", lex, "a")};
    std::ostringstream out;
    write_profiles_csv(out, ps, lex);
    const auto csv = out.str();
    CHECK(csv.find("posemo") != std::string::npos);
    CHECK(csv.find("article") != std::string::npos);
    CHECK(csv.find("\na,") != std::string::npos);
}
