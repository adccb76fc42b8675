#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "kbound/corpus.hpp"

namespace kbound {

/// A token-stage retrieval result.
struct DocHit {
    std::string doc_id;
    std::uint64_t score = 0;  // summed phrase occurrence counts, > 0
    std::vector<std::string> matched_terms;
};

struct TokenRetrieval {
    std::vector<DocHit> hits;       // top `limit`, score desc, doc id asc
    std::size_t total_matches = 0;  // all matching documents, beyond limit
};

/// Positional inverted index over normalized tokens (see text::tokenize).
/// Multi-token keywords and answers are matched as phrases: their tokens
/// must appear consecutively and in order. A document matches a query when
/// it contains every keyword phrase and at least one answer phrase; its
/// score is the sum of all keyword phrase occurrence counts plus the
/// occurrence count of the best-matching answer. Phrases that normalize to
/// zero tokens are vacuous as keywords and unsatisfiable as answers.
class TokenIndex {
public:
    /// Indexes one document. Throws ParseError on duplicate ids.
    void add(const Document& doc);

    /// Drains a corpus stream into a new index.
    static TokenIndex build(CorpusReader& reader);

    std::size_t document_count() const { return doc_ids_.size(); }

    TokenRetrieval retrieve(const std::vector<std::string>& keywords,
                            const std::vector<std::string>& answers,
                            std::size_t limit) const;

    /// Number of documents containing all keyword phrases (answers ignored).
    std::size_t count_keyword_docs(const std::vector<std::string>& keywords) const;

    void save(const std::string& path) const;
    static TokenIndex load(const std::string& path);

private:
    struct Posting {
        std::uint32_t doc = 0;
        std::vector<std::uint32_t> positions;  // token ordinals, ascending
    };

    const std::vector<Posting>* postings_for(const std::string& term) const;
    std::uint64_t phrase_count(std::uint32_t doc,
                               const std::vector<std::string>& phrase_tokens) const;
    /// Doc ordinals containing every phrase in `phrases` (token-level
    /// intersection refined by positional adjacency).
    std::vector<std::uint32_t> docs_with_phrases(
        const std::vector<std::vector<std::string>>& phrases) const;

    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> ord_by_id_;
};

}  // namespace kbound
