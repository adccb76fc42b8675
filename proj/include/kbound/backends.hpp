#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbound/errors.hpp"

namespace kbound {

/// Model-access failure. The kind distinguishes retryable transport trouble
/// from permanent protocol or contract violations.
class BackendError : public Error {
public:
    enum class Kind {
        Transport,      // connection failed, retries exhausted
        Status,         // non-success HTTP status
        PromptTooLong,  // prompt exceeds the configured context budget
        Unparseable,    // model reply did not match the expected format
    };

    BackendError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Text-in/text-out model access. Implementations must be safe for
/// concurrent calls.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string chat(const std::string& prompt) = 0;
};

/// Texts-in/vectors-out model access. Output vectors are L2-normalized and
/// share one dimension across all calls.
class EmbedBackend {
public:
    virtual ~EmbedBackend() = default;
    virtual std::vector<std::vector<float>> embed(
        const std::vector<std::string>& texts) = 0;
    virtual std::size_t dimension() const = 0;
};

// ---------------------------------------------------------------------------
// HTTP implementations (chat-completions style wire protocol)
// ---------------------------------------------------------------------------

struct HttpBackendConfig {
    std::string base_url;  // e.g. http://localhost:8000
    std::string model;
    std::string chat_path = "/v1/chat/completions";
    std::string embed_path = "/v1/embeddings";
    double temperature = 0.0;
    int max_tokens = 256;
    int timeout_ms = 30000;
    int retries = 3;             // additional attempts after the first
    int retry_backoff_ms = 250;  // doubled per attempt
    std::size_t max_prompt_chars = 0;  // 0 = unlimited
    std::string api_key_env = "KBOUND_API_KEY";
    std::size_t batch_size = 16;  // embedding batch size
    std::size_t dimension = 0;    // expected embedding dim; 0 = adopt first reply
};

class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig config);
    std::string chat(const std::string& prompt) override;

private:
    HttpBackendConfig config_;
};

class HttpEmbedBackend : public EmbedBackend {
public:
    explicit HttpEmbedBackend(HttpBackendConfig config);
    std::vector<std::vector<float>> embed(
        const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dimension_; }

private:
    std::vector<std::vector<float>> embed_batch(
        const std::vector<std::string>& texts);

    HttpBackendConfig config_;
    mutable std::size_t dimension_;
};

// ---------------------------------------------------------------------------
// Deterministic mocks
// ---------------------------------------------------------------------------
// The mocks understand the rendered prompt formats from kbound/prompts.hpp,
// which makes the whole pipeline runnable and testable without any model
// server. Fixture conventions:
//   * fact tags: substrings `fact:<word>` mark which texts belong together;
//   * planted answers: the responder mock returns the text between `<<` and
//     `>>` in the document.

/// Fixed prompt->reply table with an optional fallback reply.
class ScriptedChatBackend : public ChatBackend {
public:
    explicit ScriptedChatBackend(std::map<std::string, std::string> replies,
                                 std::optional<std::string> fallback = std::nullopt);
    std::string chat(const std::string& prompt) override;

private:
    std::map<std::string, std::string> replies_;
    std::optional<std::string> fallback_;
};

/// Replies from a fixed sequence, in call order; repeats the last reply
/// once the sequence is exhausted.
class SequenceChatBackend : public ChatBackend {
public:
    explicit SequenceChatBackend(std::vector<std::string> replies);
    std::string chat(const std::string& prompt) override;

private:
    std::vector<std::string> replies_;
    std::size_t next_ = 0;
};

/// Constant reply regardless of prompt.
class FixedChatBackend : public ChatBackend {
public:
    explicit FixedChatBackend(std::string reply) : reply_(std::move(reply)) {}
    std::string chat(const std::string&) override { return reply_; }

private:
    std::string reply_;
};

/// Keyword-extractor mock: looks the question up in a table of
/// question -> comma-separated keywords. Unknown questions get the default
/// reply (empty by default, which triggers the caller's fallback).
class MockExtractorBackend : public ChatBackend {
public:
    explicit MockExtractorBackend(std::map<std::string, std::string> keywords_by_question = {},
                                  std::string default_reply = "");
    std::string chat(const std::string& prompt) override;

private:
    std::map<std::string, std::string> keywords_by_question_;
    std::string default_reply_;
};

/// Judge mock answering "yes" iff the prompt's Answer is a byte-exact
/// substring of its Document. Only valid for judge prompts (which carry the
/// answer).
class SubstringJudgeBackend : public ChatBackend {
public:
    std::string chat(const std::string& prompt) override;
};

/// Judge/classifier mock answering "yes" iff the Document and the Question
/// share a fact tag.
class TagJudgeBackend : public ChatBackend {
public:
    std::string chat(const std::string& prompt) override;
};

/// Responder mock returning the planted `<<answer>>` span of the Document,
/// or the fallback reply when none is present.
class ExtractiveResponderBackend : public ChatBackend {
public:
    explicit ExtractiveResponderBackend(std::string fallback = "");
    std::string chat(const std::string& prompt) override;

private:
    std::string fallback_;
};

/// Deterministic hash embedder. Texts sharing a fact tag map to
/// near-identical directions (weight tag_weight); texts without common tags
/// land on effectively orthogonal random directions. tag_weight 0 degrades
/// the embedder to pure content hashing (no pairing signal).
class HashEmbedBackend : public EmbedBackend {
public:
    explicit HashEmbedBackend(std::size_t dim = 64, double tag_weight = 0.98);
    std::vector<std::vector<float>> embed(
        const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dim_; }

private:
    std::vector<float> embed_one(const std::string& text) const;

    std::size_t dim_;
    double tag_weight_;
};

// ---------------------------------------------------------------------------
// Role operations
// ---------------------------------------------------------------------------

/// Extracts fact tags (`fact:<word>`) from a text. Exposed for tests.
std::vector<std::string> extract_fact_tags(std::string_view text);

/// Parses a yes/no verdict: case-insensitive leading "yes"/"no" word.
std::optional<bool> parse_yes_no(std::string_view reply);

/// Renders the keyword-extraction prompt, sends it, and splits the reply on
/// commas (trimmed, empties dropped). An empty reply yields an empty list.
std::vector<std::string> extract_keywords(ChatBackend& backend,
                                          const std::string& question);

/// Renders the relevance-judge prompt and parses the verdict. An
/// unparseable reply is retried once with the same prompt before failing
/// with BackendError::Kind::Unparseable.
bool judge_relevance(ChatBackend& backend, const std::string& document,
                     const std::string& question, const std::string& answer);

}  // namespace kbound
