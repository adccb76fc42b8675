#include "kbound/backends.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "kbound/prompts.hpp"
#include "kbound/text.hpp"

namespace kbound {

using nlohmann::json;

namespace {

std::string body_excerpt(const std::string& body) {
    constexpr std::size_t kMax = 200;
    if (body.size() <= kMax) return body;
    return body.substr(0, kMax) + "...";
}

std::string bearer_token(const std::string& env_name) {
    if (env_name.empty()) return {};
    const char* v = std::getenv(env_name.c_str());
    return v == nullptr ? std::string() : std::string(v);
}

httplib::Headers auth_headers(const HttpBackendConfig& config) {
    httplib::Headers headers;
    std::string token = bearer_token(config.api_key_env);
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    return headers;
}

/// POSTs a JSON body with retries on transport failures and retryable
/// statuses (429/5xx). Returns the response body on success.
std::string post_json(const HttpBackendConfig& config, const std::string& path,
                      const std::string& body) {
    std::string last_failure = "no attempt made";
    bool last_was_status = false;
    int last_status = 0;
    std::string last_body;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(
                static_cast<long long>(config.retry_backoff_ms) << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(config.base_url);
        client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
        client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
        client.set_write_timeout(std::chrono::milliseconds(config.timeout_ms));
        auto res = client.Post(path, auth_headers(config), body, "application/json");
        if (!res) {
            last_failure = "transport failure: " + httplib::to_string(res.error());
            last_was_status = false;
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_failure = "status " + std::to_string(res->status);
            last_was_status = true;
            last_status = res->status;
            last_body = res->body;
            continue;
        }
        if (res->status != 200) {
            throw BackendError(BackendError::Kind::Status,
                               "backend returned status " + std::to_string(res->status) +
                                   ": " + body_excerpt(res->body));
        }
        return res->body;
    }
    if (last_was_status) {
        throw BackendError(BackendError::Kind::Status,
                           "backend returned status " + std::to_string(last_status) +
                               " after " + std::to_string(config.retries + 1) +
                               " attempts: " + body_excerpt(last_body));
    }
    throw BackendError(BackendError::Kind::Transport,
                       "backend unreachable after " +
                           std::to_string(config.retries + 1) + " attempts (" +
                           config.base_url + "): " + last_failure);
}

void check_prompt_length(const HttpBackendConfig& config, const std::string& prompt) {
    if (config.max_prompt_chars > 0 && prompt.size() > config.max_prompt_chars) {
        throw BackendError(BackendError::Kind::PromptTooLong,
                           "prompt of " + std::to_string(prompt.size()) +
                               " chars exceeds configured limit of " +
                               std::to_string(config.max_prompt_chars));
    }
}

// --- mock prompt parsing ----------------------------------------------------
// The mocks recover fields from the rendered templates in prompts.cpp. The
// parsing is first-occurrence based and assumes fixture documents do not
// embed the literal field markers.

struct JudgeFields {
    std::string document;
    std::string question;
    std::string answer;
    bool has_answer = false;
};

std::optional<std::string> slice_between(std::string_view s, std::string_view from,
                                         std::string_view to, std::size_t start = 0) {
    std::size_t b = s.find(from, start);
    if (b == std::string_view::npos) return std::nullopt;
    b += from.size();
    std::size_t e = to.empty() ? s.size() : s.find(to, b);
    if (e == std::string_view::npos) return std::nullopt;
    return std::string(s.substr(b, e - b));
}

std::optional<JudgeFields> parse_judge_prompt(std::string_view prompt) {
    JudgeFields f;
    auto doc = slice_between(prompt, "Document: ", "\nQuestion: ");
    if (!doc) return std::nullopt;
    f.document = std::move(*doc);
    std::size_t qpos = prompt.find("\nQuestion: ");
    auto q_to_answer = slice_between(prompt, "\nQuestion: ", "\nAnswer: ", qpos);
    if (q_to_answer) {
        f.question = std::move(*q_to_answer);
        auto ans = slice_between(prompt, "\nAnswer: ", "\nIs the document sufficient", qpos);
        if (!ans) return std::nullopt;
        f.answer = std::move(*ans);
        f.has_answer = true;
        return f;
    }
    auto q = slice_between(prompt, "\nQuestion: ", "\nIs the document sufficient", qpos);
    if (!q) return std::nullopt;
    f.question = std::move(*q);
    return f;
}

struct ResponderFields {
    std::string document;
    std::string question;
};

std::optional<ResponderFields> parse_responder_prompt(std::string_view prompt) {
    auto doc = slice_between(prompt, "Document 1: ", "\nQuestion: ");
    if (!doc) return std::nullopt;
    auto q = slice_between(prompt, "\nQuestion: ", "\nAnswer:");
    if (!q) return std::nullopt;
    return ResponderFields{std::move(*doc), std::move(*q)};
}

// The extractor prompt ends with a blank line followed by the question.
std::string parse_extractor_question(std::string_view prompt) {
    std::size_t pos = prompt.rfind("\n\n");
    if (pos == std::string_view::npos) return std::string(prompt);
    return std::string(prompt.substr(pos + 2));
}

}  // namespace

// ---------------------------------------------------------------------------
// HTTP backends
// ---------------------------------------------------------------------------

HttpChatBackend::HttpChatBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("http chat backend: base_url required");
}

std::string HttpChatBackend::chat(const std::string& prompt) {
    if (prompt.empty()) throw InvalidArgument("chat: prompt must be non-empty");
    check_prompt_length(config_, prompt);
    json request = {
        {"model", config_.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config_.temperature},
        {"max_tokens", config_.max_tokens},
    };
    std::string body = post_json(config_, config_.chat_path, request.dump());
    json reply = json::parse(body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        !reply["choices"].is_array() || reply["choices"].empty() ||
        !reply["choices"][0].contains("message") ||
        !reply["choices"][0]["message"].contains("content")) {
        throw BackendError(BackendError::Kind::Unparseable,
                           "malformed chat response: " + body_excerpt(body));
    }
    return reply["choices"][0]["message"]["content"].get<std::string>();
}

HttpEmbedBackend::HttpEmbedBackend(HttpBackendConfig config)
    : config_(std::move(config)), dimension_(config_.dimension) {
    if (config_.base_url.empty()) throw ConfigError("http embed backend: base_url required");
    if (config_.batch_size == 0) throw ConfigError("http embed backend: batch_size must be >= 1");
}

std::vector<std::vector<float>> HttpEmbedBackend::embed_batch(
    const std::vector<std::string>& texts) {
    json request = {{"model", config_.model}, {"input", texts}};
    std::string body = post_json(config_, config_.embed_path, request.dump());
    json reply = json::parse(body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array() ||
        reply["data"].size() != texts.size()) {
        throw BackendError(BackendError::Kind::Unparseable,
                           "malformed embeddings response: " + body_excerpt(body));
    }
    std::vector<std::vector<float>> out(texts.size());
    for (const auto& item : reply["data"]) {
        if (!item.contains("embedding") || !item["embedding"].is_array()) {
            throw BackendError(BackendError::Kind::Unparseable,
                               "malformed embeddings response: " + body_excerpt(body));
        }
        std::size_t idx = item.contains("index") ? item["index"].get<std::size_t>()
                                                 : (&item - &reply["data"][0]);
        if (idx >= out.size()) {
            throw BackendError(BackendError::Kind::Unparseable,
                               "embeddings response index out of range");
        }
        auto vec = item["embedding"].get<std::vector<float>>();
        double norm = 0.0;
        for (float v : vec) norm += static_cast<double>(v) * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            throw BackendError(BackendError::Kind::Unparseable,
                               "embeddings response contains a zero vector");
        }
        for (float& v : vec) v = static_cast<float>(v / norm);
        out[idx] = std::move(vec);
    }
    for (const auto& vec : out) {
        if (dimension_ == 0) dimension_ = vec.size();
        if (vec.size() != dimension_) {
            throw BackendError(BackendError::Kind::Unparseable,
                               "embedding dimension changed across calls");
        }
    }
    return out;
}

std::vector<std::vector<float>> HttpEmbedBackend::embed(
    const std::vector<std::string>& texts) {
    if (texts.empty()) throw InvalidArgument("embed: texts must be non-empty");
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); i += config_.batch_size) {
        std::vector<std::string> batch(
            texts.begin() + static_cast<std::ptrdiff_t>(i),
            texts.begin() + static_cast<std::ptrdiff_t>(
                                std::min(i + config_.batch_size, texts.size())));
        auto vecs = embed_batch(batch);
        for (auto& v : vecs) out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mocks
// ---------------------------------------------------------------------------

ScriptedChatBackend::ScriptedChatBackend(std::map<std::string, std::string> replies,
                                         std::optional<std::string> fallback)
    : replies_(std::move(replies)), fallback_(std::move(fallback)) {}

std::string ScriptedChatBackend::chat(const std::string& prompt) {
    if (prompt.empty()) throw InvalidArgument("chat: prompt must be non-empty");
    auto it = replies_.find(prompt);
    if (it != replies_.end()) return it->second;
    if (fallback_) return *fallback_;
    throw BackendError(BackendError::Kind::Unparseable,
                       "scripted backend has no reply for prompt");
}

SequenceChatBackend::SequenceChatBackend(std::vector<std::string> replies)
    : replies_(std::move(replies)) {
    if (replies_.empty()) throw ConfigError("sequence backend: replies must be non-empty");
}

std::string SequenceChatBackend::chat(const std::string&) {
    std::size_t i = std::min(next_, replies_.size() - 1);
    ++next_;
    return replies_[i];
}

MockExtractorBackend::MockExtractorBackend(
    std::map<std::string, std::string> keywords_by_question, std::string default_reply)
    : keywords_by_question_(std::move(keywords_by_question)),
      default_reply_(std::move(default_reply)) {}

std::string MockExtractorBackend::chat(const std::string& prompt) {
    std::string question = parse_extractor_question(prompt);
    auto it = keywords_by_question_.find(question);
    return it == keywords_by_question_.end() ? default_reply_ : it->second;
}

std::string SubstringJudgeBackend::chat(const std::string& prompt) {
    auto fields = parse_judge_prompt(prompt);
    if (!fields || !fields->has_answer) {
        throw BackendError(BackendError::Kind::Unparseable,
                           "substring judge expects a judge prompt with an answer");
    }
    return fields->document.find(fields->answer) != std::string::npos ? "yes" : "no";
}

std::string TagJudgeBackend::chat(const std::string& prompt) {
    auto fields = parse_judge_prompt(prompt);
    if (!fields) {
        throw BackendError(BackendError::Kind::Unparseable,
                           "tag judge expects a judge or classifier prompt");
    }
    auto doc_tags = extract_fact_tags(fields->document);
    auto q_tags = extract_fact_tags(fields->question);
    for (const auto& t : q_tags) {
        if (std::find(doc_tags.begin(), doc_tags.end(), t) != doc_tags.end()) {
            return "yes";
        }
    }
    return "no";
}

ExtractiveResponderBackend::ExtractiveResponderBackend(std::string fallback)
    : fallback_(std::move(fallback)) {}

std::string ExtractiveResponderBackend::chat(const std::string& prompt) {
    auto fields = parse_responder_prompt(prompt);
    if (!fields) {
        throw BackendError(BackendError::Kind::Unparseable,
                           "extractive responder expects a responder prompt");
    }
    std::size_t b = fields->document.find("<<");
    if (b == std::string::npos) return fallback_;
    std::size_t e = fields->document.find(">>", b + 2);
    if (e == std::string::npos) return fallback_;
    return fields->document.substr(b + 2, e - b - 2);
}

HashEmbedBackend::HashEmbedBackend(std::size_t dim, double tag_weight)
    : dim_(dim), tag_weight_(tag_weight) {
    if (dim_ == 0) throw ConfigError("hash embedder: dim must be >= 1");
    if (tag_weight_ < 0.0 || tag_weight_ > 1.0) {
        throw ConfigError("hash embedder: tag_weight must be in [0,1]");
    }
}

std::vector<float> HashEmbedBackend::embed_one(const std::string& text) const {
    auto direction = [this](std::uint64_t seed) {
        std::vector<double> v(dim_);
        std::uint64_t state = seed;
        for (auto& x : v) {
            std::uint64_t bits = text::splitmix64(state);
            x = 2.0 * ((bits >> 11) * 0x1.0p-53) - 1.0;
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        return v;
    };

    std::vector<double> acc = direction(text::fnv1a64("text:" + text));
    auto tags = extract_fact_tags(text);
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    if (!tags.empty() && tag_weight_ > 0.0) {
        std::vector<double> tag_vec(dim_, 0.0);
        for (const auto& tag : tags) {
            auto dir = direction(text::fnv1a64("tag:" + tag));
            for (std::size_t i = 0; i < dim_; ++i) tag_vec[i] += dir[i];
        }
        double norm = 0.0;
        for (double x : tag_vec) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < dim_; ++i) {
            acc[i] = tag_weight_ * tag_vec[i] / norm + (1.0 - tag_weight_) * acc[i];
        }
    }
    double norm = 0.0;
    for (double x : acc) norm += x * x;
    norm = std::sqrt(norm);
    std::vector<float> out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = static_cast<float>(acc[i] / norm);
    }
    return out;
}

std::vector<std::vector<float>> HashEmbedBackend::embed(
    const std::vector<std::string>& texts) {
    if (texts.empty()) throw InvalidArgument("embed: texts must be non-empty");
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

// ---------------------------------------------------------------------------
// Role operations
// ---------------------------------------------------------------------------

std::vector<std::string> extract_fact_tags(std::string_view text) {
    std::vector<std::string> tags;
    constexpr std::string_view kMarker = "fact:";
    std::size_t pos = 0;
    while ((pos = text.find(kMarker, pos)) != std::string_view::npos) {
        std::size_t b = pos + kMarker.size();
        std::size_t e = b;
        while (e < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[e])) != 0 ||
                text[e] == '_')) {
            ++e;
        }
        if (e > b) tags.emplace_back(text.substr(b, e - b));
        pos = e;
    }
    return tags;
}

std::optional<bool> parse_yes_no(std::string_view reply) {
    std::size_t i = 0;
    while (i < reply.size() &&
           std::isalpha(static_cast<unsigned char>(reply[i])) == 0) {
        ++i;
    }
    std::size_t b = i;
    while (i < reply.size() &&
           std::isalpha(static_cast<unsigned char>(reply[i])) != 0) {
        ++i;
    }
    std::string word = text::to_lower_ascii(reply.substr(b, i - b));
    if (word == "yes") return true;
    if (word == "no") return false;
    return std::nullopt;
}

std::vector<std::string> extract_keywords(ChatBackend& backend,
                                          const std::string& question) {
    if (question.empty()) throw InvalidArgument("extract_keywords: question must be non-empty");
    std::string reply = backend.chat(prompts::keyword_extraction(question));
    std::vector<std::string> keywords;
    std::size_t pos = 0;
    while (pos <= reply.size()) {
        std::size_t comma = reply.find(',', pos);
        std::string_view piece =
            std::string_view(reply).substr(pos, (comma == std::string::npos ? reply.size() : comma) - pos);
        std::string trimmed = text::trim(piece);
        if (!trimmed.empty()) keywords.push_back(std::move(trimmed));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return keywords;
}

bool judge_relevance(ChatBackend& backend, const std::string& document,
                     const std::string& question, const std::string& answer) {
    if (document.empty() || question.empty() || answer.empty()) {
        throw InvalidArgument("judge_relevance: all arguments must be non-empty");
    }
    std::string prompt = prompts::relevance_judge(document, question, answer);
    std::string reply = backend.chat(prompt);
    auto verdict = parse_yes_no(reply);
    if (!verdict) {
        reply = backend.chat(prompt);
        verdict = parse_yes_no(reply);
    }
    if (!verdict) {
        throw BackendError(BackendError::Kind::Unparseable,
                           "relevance judge replied neither yes nor no: " +
                               body_excerpt(reply));
    }
    return *verdict;
}

}  // namespace kbound
