#include "kbound/corpus.hpp"

#include <algorithm>
#include <cstring>

#include <json.hpp>

#include "binio.hpp"

namespace kbound {

using nlohmann::json;

namespace {

Document parse_document_line(const std::string& line, std::size_t line_no) {
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
        throw ParseError("malformed corpus record", line_no);
    }
    if (!rec.contains("id") || !rec["id"].is_string()) {
        throw ParseError("corpus record missing string `id`", line_no);
    }
    if (!rec.contains("text") || !rec["text"].is_string()) {
        throw ParseError("corpus record missing string `text`", line_no);
    }
    Document doc;
    doc.id = rec["id"].get<std::string>();
    doc.text = rec["text"].get<std::string>();
    if (rec.contains("source") && rec["source"].is_string()) {
        doc.source = rec["source"].get<std::string>();
    }
    if (doc.id.empty()) throw ParseError("corpus record has empty `id`", line_no);
    if (doc.text.empty()) throw ParseError("corpus record has empty `text`", line_no);
    return doc;
}

}  // namespace

CorpusReader::CorpusReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open corpus file: " + path);
}

std::optional<Document> CorpusReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (line.empty()) continue;
        Document doc = parse_document_line(line, line_);
        if (!seen_ids_.insert(doc.id).second) {
            throw ParseError("duplicate document id `" + doc.id + "`", line_);
        }
        return doc;
    }
    return std::nullopt;
}

std::vector<Document> read_corpus(const std::string& path) {
    CorpusReader reader(path);
    std::vector<Document> docs;
    while (auto doc = reader.next()) docs.push_back(std::move(*doc));
    return docs;
}

// ---------------------------------------------------------------------------
// Recursive splitter
// ---------------------------------------------------------------------------

namespace {

enum class Level { Paragraph, Line, Word, Character };

Level next_level(Level level) {
    switch (level) {
        case Level::Paragraph: return Level::Line;
        case Level::Line: return Level::Word;
        default: return Level::Character;
    }
}

// Sub-spans of `span` at the given separator level, separator bytes excluded.
std::vector<Span> segments_at(std::string_view text, Span span, Level level) {
    std::string_view slice = text.substr(span.begin, span.length());
    std::vector<Span> local;
    switch (level) {
        case Level::Paragraph:
            local = text::paragraph_spans(slice);
            break;
        case Level::Line: {
            std::size_t pos = 0;
            while (pos <= slice.size()) {
                std::size_t nl = slice.find('\n', pos);
                std::size_t end = (nl == std::string_view::npos) ? slice.size() : nl;
                if (end > pos) local.push_back({pos, end});
                if (nl == std::string_view::npos) break;
                pos = nl + 1;
            }
            break;
        }
        case Level::Word:
            local = text::word_spans(slice);
            break;
        case Level::Character:
            break;
    }
    for (auto& s : local) {
        s.begin += span.begin;
        s.end += span.begin;
    }
    return local;
}

void split_span(std::string_view text, Span span, Level level,
                std::size_t max_len, std::vector<Span>& out) {
    if (span.length() == 0) return;
    if (span.length() <= max_len) {
        out.push_back(span);
        return;
    }
    if (level == Level::Character) {
        for (std::size_t pos = span.begin; pos < span.end; pos += max_len) {
            out.push_back({pos, std::min(pos + max_len, span.end)});
        }
        return;
    }

    std::vector<Span> parts = segments_at(text, span, level);
    if (parts.empty()) return;  // separator-only slice, nothing to cover
    if (parts.size() == 1) {
        // No separator at this level; try the next finer one.
        split_span(text, parts.front(), next_level(level), max_len, out);
        return;
    }

    // Greedily merge adjacent short fragments (separators between them count
    // toward the merged length); recurse into fragments that do not fit.
    bool have_pending = false;
    Span pending{};
    auto flush = [&] {
        if (have_pending) {
            out.push_back(pending);
            have_pending = false;
        }
    };
    for (const Span& part : parts) {
        if (part.length() <= max_len) {
            if (!have_pending) {
                pending = part;
                have_pending = true;
            } else if (part.end - pending.begin <= max_len) {
                pending.end = part.end;
            } else {
                flush();
                pending = part;
                have_pending = true;
            }
        } else {
            flush();
            split_span(text, part, next_level(level), max_len, out);
        }
    }
    flush();
}

}  // namespace

std::vector<Chunk> split_recursive(std::string_view text, std::size_t max_len) {
    if (max_len == 0) throw InvalidArgument("split_recursive: max_len must be >= 1");
    std::vector<Span> spans;
    split_span(text, {0, text.size()}, Level::Paragraph, max_len, spans);
    std::vector<Chunk> chunks;
    chunks.reserve(spans.size());
    for (std::size_t i = 0; i < spans.size(); ++i) {
        Chunk c;
        c.index = i;
        c.span = spans[i];
        c.text = std::string(text.substr(spans[i].begin, spans[i].length()));
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::vector<Chunk> split_document(const Document& doc, std::size_t max_len) {
    auto chunks = split_recursive(doc.text, max_len);
    for (auto& c : chunks) c.doc_id = doc.id;
    return chunks;
}

// ---------------------------------------------------------------------------
// Judge-window chunking
// ---------------------------------------------------------------------------

namespace {

bool window_contains_all(std::string_view lower_text, Span window,
                         const std::vector<std::string>& lower_keywords,
                         const std::vector<std::string>& lower_answers) {
    std::string_view slice = lower_text.substr(window.begin, window.length());
    for (const auto& kw : lower_keywords) {
        if (slice.find(kw) == std::string_view::npos) return false;
    }
    for (const auto& ans : lower_answers) {
        if (slice.find(ans) != std::string_view::npos) return true;
    }
    return false;
}

}  // namespace

std::vector<Chunk> chunk_for_judging(const Document& doc,
                                     const std::vector<std::string>& keywords,
                                     const std::vector<std::string>& answers,
                                     std::size_t max_words) {
    if (keywords.empty()) throw InvalidArgument("chunk_for_judging: keywords must be non-empty");
    if (answers.empty()) throw InvalidArgument("chunk_for_judging: answers must be non-empty");
    if (max_words == 0) throw InvalidArgument("chunk_for_judging: max_words must be >= 1");

    auto paras = text::paragraph_spans(doc.text);
    if (paras.empty()) return {};

    std::string lower_text = text::to_lower_ascii(doc.text);
    std::vector<std::string> lower_keywords;
    lower_keywords.reserve(keywords.size());
    for (const auto& k : keywords) lower_keywords.push_back(text::to_lower_ascii(k));
    std::vector<std::string> lower_answers;
    lower_answers.reserve(answers.size());
    for (const auto& a : answers) lower_answers.push_back(text::to_lower_ascii(a));

    auto window_span = [&](std::size_t i, std::size_t j) {
        return Span{paras[i].begin, paras[j].end};
    };
    auto contains = [&](std::size_t i, std::size_t j) {
        return window_contains_all(lower_text, window_span(i, j), lower_keywords,
                                   lower_answers);
    };

    // Two-pointer sweep: the contains-all property is monotone under window
    // growth, so the minimal end index never moves backwards.
    const std::size_t n = paras.size();
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < i) j = i;
        while (j < n && !contains(i, j)) ++j;
        if (j == n) break;
        candidates.emplace_back(i, j);
    }

    std::vector<Chunk> chunks;
    auto emit = [&](Span span) {
        Chunk c;
        c.doc_id = doc.id;
        c.index = chunks.size();
        c.span = span;
        c.text = doc.text.substr(span.begin, span.length());
        chunks.push_back(std::move(c));
    };

    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
        // Minimal iff shrinking from the left breaks the property, i.e. the
        // next start needs a strictly larger end.
        bool minimal = (idx + 1 == candidates.size()) ||
                       (candidates[idx + 1].second > candidates[idx].second);
        if (!minimal) continue;

        Span window = window_span(candidates[idx].first, candidates[idx].second);
        std::string_view window_text =
            std::string_view(doc.text).substr(window.begin, window.length());
        auto words = text::word_spans(window_text);
        if (words.size() <= max_words) {
            emit(window);
            continue;
        }
        // Oversized window: split left to right into <= max_words pieces and
        // keep only pieces that still contain all keywords plus an answer.
        for (std::size_t w = 0; w < words.size(); w += max_words) {
            std::size_t last = std::min(w + max_words, words.size()) - 1;
            Span piece{window.begin + words[w].begin, window.begin + words[last].end};
            if (window_contains_all(lower_text, piece, lower_keywords, lower_answers)) {
                emit(piece);
            }
        }
    }
    return chunks;
}

// ---------------------------------------------------------------------------
// DocStore
// ---------------------------------------------------------------------------

DocStore DocStore::build(const std::string& corpus_path) {
    std::ifstream in(corpus_path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + corpus_path);
    DocStore store;
    store.corpus_path_ = corpus_path;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t offset = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::uint64_t consumed = line.size() + (in.eof() ? 0 : 1);
        if (!line.empty()) {
            Document doc = parse_document_line(line, line_no);
            auto [it, inserted] =
                store.offsets_.emplace(doc.id, Extent{offset, line.size()});
            if (!inserted) {
                throw ParseError("duplicate document id `" + doc.id + "`", line_no);
            }
        }
        offset += consumed;
    }
    return store;
}

Document DocStore::get(const std::string& id) const {
    auto it = offsets_.find(id);
    if (it == offsets_.end()) {
        throw StateError("document id not in doc store: " + id);
    }
    std::ifstream in(corpus_path_, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + corpus_path_);
    in.seekg(static_cast<std::streamoff>(it->second.offset));
    std::string line(it->second.length, '\0');
    in.read(line.data(), static_cast<std::streamsize>(line.size()));
    if (static_cast<std::uint64_t>(in.gcount()) != it->second.length) {
        throw IoError("corpus file shrank under doc store: " + corpus_path_);
    }
    return parse_document_line(line, 0);
}

namespace {
constexpr std::uint32_t kDocStoreMagic = 0x4B424453;  // "KBDS"
constexpr std::uint32_t kDocStoreVersion = 1;
}  // namespace

void DocStore::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write doc store: " + path);
    binio::write_u32(out, kDocStoreMagic);
    binio::write_u32(out, kDocStoreVersion);
    binio::write_string(out, corpus_path_);
    binio::write_u64(out, offsets_.size());
    // Sort for byte-stable files.
    std::vector<std::pair<std::string, Extent>> entries(offsets_.begin(),
                                                        offsets_.end());
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [id, ext] : entries) {
        binio::write_string(out, id);
        binio::write_u64(out, ext.offset);
        binio::write_u64(out, ext.length);
    }
    if (!out) throw IoError("write failed: " + path);
}

DocStore DocStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open doc store: " + path);
    binio::Reader r(in, path);
    if (r.u32() != kDocStoreMagic) throw ParseError("not a doc store file: " + path);
    if (r.u32() != kDocStoreVersion) {
        throw ParseError("unsupported doc store version: " + path);
    }
    DocStore store;
    store.corpus_path_ = r.string();
    std::uint64_t n = r.u64();
    store.offsets_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::string id = r.string();
        Extent ext;
        ext.offset = r.u64();
        ext.length = r.u64();
        store.offsets_.emplace(std::move(id), ext);
    }
    return store;
}

}  // namespace kbound
