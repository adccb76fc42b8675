#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kbound {

/// Half-open byte range into a parent string.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

namespace text {

/// Lowercased word tokens. ASCII alphanumerics are token characters, bytes
/// >= 0x80 pass through unchanged (so UTF-8 sequences stay intact), and
/// everything else separates tokens. This is the pinned normalization used
/// by the token index; it is persisted with the index so results stay
/// reproducible across runs.
std::vector<std::string> tokenize(std::string_view s);

bool is_ascii_space(char c);

/// Number of whitespace-separated words.
std::size_t word_count(std::string_view s);

/// Byte spans of whitespace-separated words, in order.
std::vector<Span> word_spans(std::string_view s);

/// Byte spans of paragraphs: maximal runs of lines that are not blank.
/// A line consisting only of whitespace counts as blank.
std::vector<Span> paragraph_spans(std::string_view s);

std::string to_lower_ascii(std::string_view s);

/// Case-insensitive (ASCII) substring test.
bool icontains(std::string_view haystack, std::string_view needle);

/// Content words of a question: lowercased tokens minus a small English
/// stopword list, deduplicated, original order. Falls back to all tokens
/// when everything is a stopword.
std::vector<std::string> content_words(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 1469598103934665603ull);

/// splitmix64 step; used to derive deterministic pseudo-random streams.
std::uint64_t splitmix64(std::uint64_t& state);

std::string trim(std::string_view s);

}  // namespace text
}  // namespace kbound
