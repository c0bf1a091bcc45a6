#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include "helpers.hpp"
#include "ipts/io.hpp"
#include "ipts/rng.hpp"
#include "ipts/text.hpp"

using namespace ipts;

TEST_CASE("utf8 decoding advances over malformed bytes") {
    const std::string s = "a\xE2\x80\x99" "b\xFF";
    auto cp = text::decode_utf8(s, 1);
    CHECK(cp.value == 0x2019);
    CHECK(cp.length == 3);
    cp = text::decode_utf8(s, 5);
    CHECK(cp.value == 0xFFFD);
    CHECK(cp.length == 1);
}

TEST_CASE("word tokens keep inner apostrophes and normalize the curly one") {
    const auto toks = text::word_tokens("Don\xE2\x80\x99t STOP, 'quoted' rock-n-roll 42");
    const std::vector<std::string> want = {"don't", "stop", "quoted", "rock", "n", "roll"};
    CHECK(toks == want);
}

TEST_CASE("whitespace splitting and normalization") {
    CHECK(text::split_whitespace("  a\tb\n c  ").size() == 3);
    CHECK(text::split_whitespace("a\xC2\xA0" "b").size() == 2);
    CHECK(text::normalize_whitespace_lower("  Living\t ALONE ") == "living alone");
    CHECK(text::trim("\n x \t") == "x");
    CHECK(text::is_blank(" \t\n"));
    CHECK_FALSE(text::is_blank(" . "));
}

TEST_CASE("letter counting treats each non-ASCII code point as one letter") {
    CHECK(text::count_letters("abc, d!") == 4);
    CHECK(text::count_letters("caf\xC3\xA9") == 4);
    CHECK(text::count_letters("1234") == 0);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(text::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(text::fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(text::to_hex(0xabcULL) == "0000000000000abc");
}

TEST_CASE("format_real is fixed six decimals without negative zero") {
    CHECK(io::format_real(1.0 / 3) == "0.333333");
    CHECK(io::format_real(-0.0) == "0.000000");
    CHECK(io::format_real(-1e-9) == "0.000000");
    CHECK(io::format_real(-2.5) == "-2.500000");
}

TEST_CASE("csv quoting round-trips") {
    const std::vector<std::string> fields = {"plain", "has,comma", "has \"quote\"", ""};
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + io::csv_field(fields[i]);
    CHECK(io::parse_csv_line(line) == fields);
}

TEST_CASE("write_atomic leaves only the final file") {
    const auto dir = testing::fresh_dir("atomic");
    io::write_atomic(dir / "out.txt", [](std::ostream& o) { o << "hello\n"; });
    CHECK(io::read_file(dir / "out.txt") == "hello\n");
    CHECK(std::distance(std::filesystem::directory_iterator(dir), {}) == 1);
    CHECK_THROWS(io::write_atomic(dir / "out2.txt", [](std::ostream&) { throw std::runtime_error("boom"); }));
    CHECK_FALSE(std::filesystem::exists(dir / "out2.txt"));
    CHECK(std::distance(std::filesystem::directory_iterator(dir), {}) == 1);
}

TEST_CASE("rng draws are reproducible and bounded") {
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.uniform_index(7);
        CHECK(x == b.uniform_index(7));
        CHECK(x < 7);
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    Rng(3).shuffle(w);
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}
