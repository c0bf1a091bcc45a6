#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ipts::text {

struct CodePoint {
    char32_t value;
    std::size_t length;
};

/// Lenient UTF-8 decode at byte offset `i`; malformed input decodes as a
/// one-byte U+FFFD so scanning always advances.
CodePoint decode_utf8(std::string_view s, std::size_t i);

bool is_space(char32_t cp);
/// ASCII letters and non-ASCII code points outside punctuation/symbol blocks.
bool is_letter(char32_t cp);
bool is_apostrophe(char32_t cp);

/// Splits on ASCII and Unicode whitespace. Punctuation stays attached.
std::vector<std::string_view> split_whitespace(std::string_view text);

/// Lowercased alphabetic runs. Apostrophes (ASCII or U+2019) are kept when
/// they sit between two letters; U+2019 is normalized to '. Non-ASCII UTF-8
/// sequences count as letters.
std::vector<std::string> word_tokens(std::string_view text);

std::string to_lower_ascii(std::string_view s);

/// Lowercase, collapse whitespace runs to one space, trim.
std::string normalize_whitespace_lower(std::string_view s);

std::string trim(std::string_view s);

bool is_blank(std::string_view s);

/// Number of letters: ASCII alphabetic bytes plus one per non-ASCII code point.
std::size_t count_letters(std::string_view s);

std::uint64_t fnv1a64(std::string_view data) noexcept;

std::string to_hex(std::uint64_t value);

}  // namespace ipts::text
