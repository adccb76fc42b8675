#include "kbound/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace kbound::text {

namespace {

bool is_token_char(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

char lower_ascii(char c) {
    if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
    return c;
}

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",    "an",    "the",   "and",  "or",    "but",  "of",    "in",
        "on",   "at",    "to",    "from", "by",    "with", "about", "as",
        "into", "for",   "is",    "are",  "was",   "were", "be",    "been",
        "am",   "do",    "does",  "did",  "has",   "have", "had",   "will",
        "would", "can",  "could", "may",  "might", "shall", "should",
        "who",  "whom",  "whose", "what", "which", "when", "where", "why",
        "how",  "that",  "this",  "these", "those", "it",  "its",   "he",
        "she",  "his",   "her",   "they", "them",  "their", "not",  "no",
        "s",    "t",
    };
    return words;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (is_token_char(static_cast<unsigned char>(ch))) {
            cur.push_back(lower_ascii(ch));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
}

std::size_t word_count(std::string_view s) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : s) {
        if (is_ascii_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++n;
        }
    }
    return n;
}

std::vector<Span> word_spans(std::string_view s) {
    std::vector<Span> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(s[i])) ++i;
        if (i >= s.size()) break;
        std::size_t start = i;
        while (i < s.size() && !is_ascii_space(s[i])) ++i;
        out.push_back({start, i});
    }
    return out;
}

std::vector<Span> paragraph_spans(std::string_view s) {
    std::vector<Span> out;
    std::size_t pos = 0;
    std::size_t para_begin = std::string_view::npos;
    std::size_t para_end = 0;
    while (pos <= s.size()) {
        std::size_t nl = s.find('\n', pos);
        std::size_t line_end = (nl == std::string_view::npos) ? s.size() : nl;
        std::string_view line = s.substr(pos, line_end - pos);
        bool blank = std::all_of(line.begin(), line.end(), is_ascii_space);
        if (!blank) {
            if (para_begin == std::string_view::npos) para_begin = pos;
            para_end = line_end;
        } else if (para_begin != std::string_view::npos) {
            out.push_back({para_begin, para_end});
            para_begin = std::string_view::npos;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (para_begin != std::string_view::npos) out.push_back({para_begin, para_end});
    return out;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower_ascii);
    return out;
}

bool icontains(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    if (needle.size() > haystack.size()) return false;
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(),
                          needle.end(), [](char a, char b) {
                              return lower_ascii(a) == lower_ascii(b);
                          });
    return it != haystack.end();
}

std::vector<std::string> content_words(std::string_view s) {
    auto tokens = tokenize(s);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& tok : tokens) {
        if (stopwords().count(tok) > 0) continue;
        if (seen.insert(tok).second) out.push_back(tok);
    }
    if (out.empty()) {
        for (const auto& tok : tokens) {
            if (seen.insert(tok).second) out.push_back(tok);
        }
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_ascii_space(s[b])) ++b;
    while (e > b && is_ascii_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace kbound::text
