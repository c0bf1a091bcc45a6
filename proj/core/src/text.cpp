#include "ipts/text.hpp"

#include <cstdio>

namespace ipts::text {

CodePoint decode_utf8(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (i + len > s.size()) return {0xFFFD, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

bool is_space(char32_t cp) {
    return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
           cp == 0x205F || cp == 0x3000;
}

bool is_letter(char32_t cp) {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7 || cp == 0xFFFD) return false;
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols, arrows
    if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
    if (cp >= 0x1F000) return false;                 // emoji and pictographs
    return true;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    std::size_t start = std::string_view::npos;
    while (i < text.size()) {
        const auto cp = decode_utf8(text, i);
        if (is_space(cp.value)) {
            if (start != std::string_view::npos) {
                out.push_back(text.substr(start, i - start));
                start = std::string_view::npos;
            }
        } else if (start == std::string_view::npos) {
            start = i;
        }
        i += cp.length;
    }
    if (start != std::string_view::npos) out.push_back(text.substr(start));
    return out;
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto cp = decode_utf8(text, i);
        if (is_letter(cp.value)) {
            if (cp.value < 0x80) {
                current.push_back(static_cast<char>(cp.value | 0x20));
            } else {
                current.append(text.substr(i, cp.length));
            }
        } else if (is_apostrophe(cp.value) && !current.empty() && i + cp.length < text.size() &&
                   is_letter(decode_utf8(text, i + cp.length).value)) {
            current.push_back('\'');
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
        i += cp.length;
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c | 0x20);
    }
    return out;
}

std::string normalize_whitespace_lower(std::string_view s) {
    std::string out;
    for (const auto piece : split_whitespace(s)) {
        if (!out.empty()) out.push_back(' ');
        out += to_lower_ascii(piece);
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto pieces = split_whitespace(s);
    if (pieces.empty()) return {};
    const auto begin = pieces.front().data() - s.data();
    const auto end = pieces.back().data() + pieces.back().size() - s.data();
    return std::string(s.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin)));
}

bool is_blank(std::string_view s) { return split_whitespace(s).empty(); }

std::size_t count_letters(std::string_view s) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto cp = decode_utf8(s, i);
        if (is_letter(cp.value)) ++n;
        i += cp.length;
    }
    return n;
}

std::uint64_t fnv1a64(std::string_view data) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace ipts::text
