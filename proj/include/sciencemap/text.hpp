#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace sciencemap {
namespace text {

inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }

// ASCII punctuation that gets stripped from term boundaries. Internal
// hyphens and periods are kept ("e-learning", "web 2.0").
inline bool is_strippable(unsigned char c) {
    return std::ispunct(c) != 0;
}

// Lowercase, trim, collapse internal whitespace, strip surrounding
// punctuation. Input is expected in composed (NFC) form; bytes outside
// ASCII pass through unchanged.
inline std::string normalize_term(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    std::size_t b = 0, e = out.size();
    while (b < e && is_strippable(static_cast<unsigned char>(out[b]))) ++b;
    while (e > b && is_strippable(static_cast<unsigned char>(out[e - 1]))) --e;
    return out.substr(b, e - b);
}

// Whitespace-split tokens of a free-text field, each normalized like a term.
// Empty tokens (pure punctuation) are dropped.
inline std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) {
            std::string t = normalize_term(s.substr(i, j - i));
            if (!t.empty()) tokens.push_back(std::move(t));
        }
        i = j;
    }
    return tokens;
}

// Whole-token match: the term's token sequence appears as consecutive
// tokens. A single-token term never matches inside a larger token, so
// "learning" does not match "e-learning".
inline bool contains_token_seq(const std::vector<std::string>& tokens,
                               const std::vector<std::string>& term_tokens) {
    if (term_tokens.empty() || tokens.size() < term_tokens.size()) return false;
    const std::size_t m = term_tokens.size();
    for (std::size_t i = 0; i + m <= tokens.size(); ++i) {
        bool hit = true;
        for (std::size_t k = 0; k < m; ++k) {
            if (tokens[i + k] != term_tokens[k]) { hit = false; break; }
        }
        if (hit) return true;
    }
    return false;
}

inline std::string remove_chars(std::string_view s, char victim) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (c != victim) out.push_back(c);
    return out;
}

// round-half-up to the nearest integer; inputs here are non-negative percents
inline long long round_half_up(double x) {
    return static_cast<long long>(std::floor(x + 0.5));
}

} // namespace text
} // namespace sciencemap
