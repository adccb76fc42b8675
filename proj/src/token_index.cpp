#include "kbound/token_index.hpp"

#include <algorithm>
#include <fstream>

#include "binio.hpp"

namespace kbound {

namespace {

constexpr std::uint32_t kMagic = 0x4B425449;  // "KBTI"
constexpr std::uint32_t kVersion = 1;
// Normalization scheme tag persisted with the index; bump together with
// text::tokenize changes so stale indexes are rejected instead of queried
// under different token rules.
constexpr std::uint32_t kNormalization = 1;

std::vector<std::vector<std::string>> tokenize_phrases(
    const std::vector<std::string>& phrases) {
    std::vector<std::vector<std::string>> out;
    out.reserve(phrases.size());
    for (const auto& p : phrases) out.push_back(text::tokenize(p));
    return out;
}

}  // namespace

void TokenIndex::add(const Document& doc) {
    if (ord_by_id_.count(doc.id) > 0) {
        throw ParseError("duplicate document id `" + doc.id + "`");
    }
    auto ord = static_cast<std::uint32_t>(doc_ids_.size());
    ord_by_id_.emplace(doc.id, ord);
    doc_ids_.push_back(doc.id);

    auto tokens = text::tokenize(doc.text);
    for (std::uint32_t pos = 0; pos < tokens.size(); ++pos) {
        auto& plist = postings_[tokens[pos]];
        if (plist.empty() || plist.back().doc != ord) {
            plist.push_back({ord, {}});
        }
        plist.back().positions.push_back(pos);
    }
}

TokenIndex TokenIndex::build(CorpusReader& reader) {
    TokenIndex index;
    while (auto doc = reader.next()) index.add(*doc);
    return index;
}

const std::vector<TokenIndex::Posting>* TokenIndex::postings_for(
    const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

std::uint64_t TokenIndex::phrase_count(
    std::uint32_t doc, const std::vector<std::string>& phrase_tokens) const {
    if (phrase_tokens.empty()) return 0;

    std::vector<const std::vector<std::uint32_t>*> positions;
    positions.reserve(phrase_tokens.size());
    for (const auto& tok : phrase_tokens) {
        const auto* plist = postings_for(tok);
        if (plist == nullptr) return 0;
        auto it = std::lower_bound(
            plist->begin(), plist->end(), doc,
            [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (it == plist->end() || it->doc != doc) return 0;
        positions.push_back(&it->positions);
    }

    if (positions.size() == 1) return positions[0]->size();

    std::uint64_t count = 0;
    for (std::uint32_t start : *positions[0]) {
        bool match = true;
        for (std::size_t i = 1; i < positions.size(); ++i) {
            const auto& plist = *positions[i];
            if (!std::binary_search(plist.begin(), plist.end(),
                                    start + static_cast<std::uint32_t>(i))) {
                match = false;
                break;
            }
        }
        if (match) ++count;
    }
    return count;
}

std::vector<std::uint32_t> TokenIndex::docs_with_phrases(
    const std::vector<std::vector<std::string>>& phrases) const {
    // Vacuous case: no constraining tokens means every document qualifies.
    bool any_tokens = false;
    for (const auto& p : phrases) {
        if (!p.empty()) {
            any_tokens = true;
            break;
        }
    }
    if (!any_tokens) {
        std::vector<std::uint32_t> all(doc_ids_.size());
        for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }

    // Intersect posting doc lists over every token, rarest first.
    std::vector<const std::vector<Posting>*> lists;
    for (const auto& phrase : phrases) {
        for (const auto& tok : phrase) {
            const auto* plist = postings_for(tok);
            if (plist == nullptr) return {};
            lists.push_back(plist);
        }
    }
    std::sort(lists.begin(), lists.end(),
              [](const auto* a, const auto* b) { return a->size() < b->size(); });

    std::vector<std::uint32_t> candidates;
    candidates.reserve(lists.front()->size());
    for (const auto& p : *lists.front()) candidates.push_back(p.doc);
    for (std::size_t i = 1; i < lists.size() && !candidates.empty(); ++i) {
        std::vector<std::uint32_t> next;
        next.reserve(candidates.size());
        const auto& plist = *lists[i];
        for (std::uint32_t doc : candidates) {
            auto it = std::lower_bound(
                plist.begin(), plist.end(), doc,
                [](const Posting& p, std::uint32_t d) { return p.doc < d; });
            if (it != plist.end() && it->doc == doc) next.push_back(doc);
        }
        candidates.swap(next);
    }

    // Refine by phrase adjacency.
    std::vector<std::uint32_t> out;
    out.reserve(candidates.size());
    for (std::uint32_t doc : candidates) {
        bool ok = true;
        for (const auto& phrase : phrases) {
            if (phrase.empty()) continue;
            if (phrase_count(doc, phrase) == 0) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(doc);
    }
    return out;
}

TokenRetrieval TokenIndex::retrieve(const std::vector<std::string>& keywords,
                                    const std::vector<std::string>& answers,
                                    std::size_t limit) const {
    if (keywords.empty()) throw InvalidArgument("token retrieve: keywords must be non-empty");
    if (answers.empty()) throw InvalidArgument("token retrieve: answers must be non-empty");
    if (limit == 0) throw InvalidArgument("token retrieve: limit must be >= 1");

    auto keyword_tokens = tokenize_phrases(keywords);
    auto answer_tokens = tokenize_phrases(answers);

    TokenRetrieval result;
    bool any_answer_usable = false;
    for (const auto& a : answer_tokens) {
        if (!a.empty()) any_answer_usable = true;
    }
    if (!any_answer_usable) return result;

    std::vector<DocHit> matches;
    for (std::uint32_t doc : docs_with_phrases(keyword_tokens)) {
        // Best-matching answer: highest occurrence count among those present.
        std::uint64_t best_answer = 0;
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < answer_tokens.size(); ++i) {
            if (answer_tokens[i].empty()) continue;
            std::uint64_t c = phrase_count(doc, answer_tokens[i]);
            if (c > best_answer) {
                best_answer = c;
                best_idx = i;
            }
        }
        if (best_answer == 0) continue;

        DocHit hit;
        hit.doc_id = doc_ids_[doc];
        hit.score = best_answer;
        for (std::size_t i = 0; i < keyword_tokens.size(); ++i) {
            if (keyword_tokens[i].empty()) continue;
            hit.score += phrase_count(doc, keyword_tokens[i]);
            hit.matched_terms.push_back(keywords[i]);
        }
        hit.matched_terms.push_back(answers[best_idx]);
        matches.push_back(std::move(hit));
    }

    result.total_matches = matches.size();
    std::sort(matches.begin(), matches.end(), [](const DocHit& a, const DocHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (matches.size() > limit) matches.resize(limit);
    result.hits = std::move(matches);
    return result;
}

std::size_t TokenIndex::count_keyword_docs(
    const std::vector<std::string>& keywords) const {
    if (keywords.empty()) throw InvalidArgument("count_keyword_docs: keywords must be non-empty");
    return docs_with_phrases(tokenize_phrases(keywords)).size();
}

void TokenIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write token index: " + path);
    binio::write_u32(out, kMagic);
    binio::write_u32(out, kVersion);
    binio::write_u32(out, kNormalization);
    binio::write_u64(out, doc_ids_.size());
    for (const auto& id : doc_ids_) binio::write_string(out, id);

    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, _] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(),
              [](const auto* a, const auto* b) { return *a < *b; });

    binio::write_u64(out, terms.size());
    for (const auto* term : terms) {
        binio::write_string(out, *term);
        const auto& plist = postings_.at(*term);
        binio::write_u64(out, plist.size());
        for (const auto& p : plist) {
            binio::write_u32(out, p.doc);
            binio::write_u64(out, p.positions.size());
            for (std::uint32_t pos : p.positions) binio::write_u32(out, pos);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

TokenIndex TokenIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open token index: " + path);
    binio::Reader r(in, path);
    if (r.u32() != kMagic) throw ParseError("not a token index file: " + path);
    if (r.u32() != kVersion) throw ParseError("unsupported token index version: " + path);
    if (r.u32() != kNormalization) {
        throw ParseError("token index built with a different normalization: " + path);
    }

    TokenIndex index;
    std::uint64_t ndocs = r.u64();
    index.doc_ids_.reserve(ndocs);
    for (std::uint64_t i = 0; i < ndocs; ++i) {
        std::string id = r.string();
        index.ord_by_id_.emplace(id, static_cast<std::uint32_t>(i));
        index.doc_ids_.push_back(std::move(id));
    }
    std::uint64_t nterms = r.u64();
    index.postings_.reserve(nterms);
    for (std::uint64_t t = 0; t < nterms; ++t) {
        std::string term = r.string();
        std::uint64_t nposts = r.u64();
        std::vector<Posting> plist;
        plist.reserve(nposts);
        for (std::uint64_t p = 0; p < nposts; ++p) {
            Posting posting;
            posting.doc = r.u32();
            if (posting.doc >= ndocs) {
                throw ParseError("corrupt token index (bad doc ordinal): " + path);
            }
            std::uint64_t npos = r.u64();
            posting.positions.reserve(npos);
            for (std::uint64_t k = 0; k < npos; ++k) {
                posting.positions.push_back(r.u32());
            }
            plist.push_back(std::move(posting));
        }
        index.postings_.emplace(std::move(term), std::move(plist));
    }
    return index;
}

}  // namespace kbound
