#include "msrag/corpus/tokenizer.hpp"

#include <cctype>

namespace msrag::corpus {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < n && !is_space(text[i])) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    return detokenize(tokens, 0, tokens.size());
}

std::string detokenize(const std::vector<std::string>& tokens, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i < last && i < tokens.size(); ++i) {
        if (i > first) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace msrag::corpus
