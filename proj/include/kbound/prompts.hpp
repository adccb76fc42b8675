#pragma once

#include <string>
#include <string_view>

// Prompt templates for every model role. These renderings are pinned:
// golden-file tests compare them byte for byte, and the training-data
// exports reuse them, so any change here is a format break.

namespace kbound::prompts {

/// Keyword-extractor prompt with its three in-context examples.
std::string keyword_extraction(std::string_view question);

/// Relevance-judge prompt: document + question + gold answer, yes/no.
std::string relevance_judge(std::string_view document, std::string_view question,
                            std::string_view answer);

/// Answerability-classifier prompt: document + question, yes/no. Unlike the
/// judge prompt this never sees a gold answer.
std::string answerability_classifier(std::string_view document,
                                     std::string_view question);

/// Responder prompt: answer the question from one document.
std::string responder(std::string_view document, std::string_view question);

/// Closed-book baseline prompt: answer or reply "I don't know".
std::string prompting_baseline(std::string_view question);

}  // namespace kbound::prompts
