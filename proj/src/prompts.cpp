#include "kbound/prompts.hpp"

namespace kbound::prompts {

std::string keyword_extraction(std::string_view question) {
    std::string out =
        "You are a keyword extractor. You will be given a question, your task "
        "is to generate the keyword(s) from the question. The keyword must be "
        "an entity. Output the keyword(s) separated by comma.\n"
        "\n"
        "Who was the man behind The Chipmunks?\n"
        "The Chipmunks\n"
        "\n"
        "Which Lloyd Webber musical premiered in the US on 10th December 1993?\n"
        "Lloyd Webber, 10th December 1993\n"
        "\n"
        "Who was the next British Prime Minister after Arthur Balfour?\n"
        "Arthur Balfour\n"
        "\n";
    out.append(question);
    return out;
}

std::string relevance_judge(std::string_view document, std::string_view question,
                            std::string_view answer) {
    std::string out = "Read the following document and question.\nDocument: ";
    out.append(document);
    out.append("\nQuestion: ");
    out.append(question);
    out.append("\nAnswer: ");
    out.append(answer);
    out.append(
        "\nIs the document sufficient to get the desired answer to the "
        "question? Please respond with only \"yes\" or \"no\".");
    return out;
}

std::string answerability_classifier(std::string_view document,
                                     std::string_view question) {
    std::string out = "Read the following document and question.\nDocument: ";
    out.append(document);
    out.append("\nQuestion: ");
    out.append(question);
    out.append(
        "\nIs the document sufficient to answer the question? Please respond "
        "with only \"yes\" or \"no\".");
    return out;
}

std::string responder(std::string_view document, std::string_view question) {
    std::string out = "Document 1: ";
    out.append(document);
    out.append("\nQuestion: ");
    out.append(question);
    out.append("\nAnswer:");
    return out;
}

std::string prompting_baseline(std::string_view question) {
    std::string out =
        "Answer the following question, and if you don't know the answer, "
        "only reply with \"I don't know\".\nQ: ";
    out.append(question);
    out.append("\nA:");
    return out;
}

}  // namespace kbound::prompts
