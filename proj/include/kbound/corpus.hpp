#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kbound/errors.hpp"
#include "kbound/text.hpp"

namespace kbound {

/// One pretraining-corpus record.
struct Document {
    std::string id;
    std::string text;
    std::string source;  // optional provenance, empty when absent
};

/// A windowed slice of a parent document.
struct Chunk {
    std::string doc_id;
    std::size_t index = 0;  // 0-based ordinal within the parent
    Span span;              // byte range into the parent text
    std::string text;       // equals the parent slice at span
};

/// Streaming reader over a UTF-8 JSONL corpus file: one document per line
/// with fields `id`, `text`, and optional `source`. Memory stays bounded by
/// the longest line plus the set of ids seen (for duplicate detection).
class CorpusReader {
public:
    explicit CorpusReader(const std::string& path);

    /// Next document in file order, or nullopt at end of file.
    /// Throws ParseError on malformed lines or duplicate ids.
    std::optional<Document> next();

    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::ifstream in_;
    std::unordered_set<std::string> seen_ids_;
    std::size_t line_ = 0;
};

/// Reads a whole QA-style JSONL file of documents into memory. Convenience
/// for tests and small fixtures.
std::vector<Document> read_corpus(const std::string& path);

/// Splits text into chunks of at most max_len bytes, preferring paragraph
/// boundaries (blank lines), then line, then word, then character breaks.
/// Adjacent short fragments at the same level are merged greedily up to
/// max_len. Chunks are contiguous slices of the input; the only bytes not
/// covered by a chunk are separator whitespace.
std::vector<Chunk> split_recursive(std::string_view text, std::size_t max_len);

/// split_recursive with doc id and chunk ordinals stamped.
std::vector<Chunk> split_document(const Document& doc, std::size_t max_len);

/// Sliding-window chunks for LLM relevance judging. Each chunk is a minimal
/// run of consecutive paragraphs containing every keyword and at least one
/// answer (case-insensitive substring match); dropping the first or last
/// paragraph of the window breaks that property. Windows longer than
/// max_words whitespace-separated words are split left to right, keeping
/// only pieces that still contain all keywords plus an answer. Returns the
/// empty list when the document never contains them together.
std::vector<Chunk> chunk_for_judging(const Document& doc,
                                     const std::vector<std::string>& keywords,
                                     const std::vector<std::string>& answers,
                                     std::size_t max_words);

/// Byte-offset table for random access into a corpus file by document id.
class DocStore {
public:
    DocStore() = default;

    /// Scans the corpus file and records each document's byte extent.
    static DocStore build(const std::string& corpus_path);

    Document get(const std::string& id) const;
    bool contains(const std::string& id) const { return offsets_.count(id) > 0; }
    std::size_t size() const { return offsets_.size(); }
    const std::string& corpus_path() const { return corpus_path_; }

    void save(const std::string& path) const;
    static DocStore load(const std::string& path);

private:
    struct Extent {
        std::uint64_t offset = 0;
        std::uint64_t length = 0;
    };
    std::string corpus_path_;
    std::unordered_map<std::string, Extent> offsets_;
};

}  // namespace kbound
