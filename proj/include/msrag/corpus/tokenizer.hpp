#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace msrag::corpus {

/// Whitespace-delimited word tokens; leading/trailing punctuation stays
/// inside the token. Deterministic, and detokenize(tokenize(t)) retokenizes
/// to the same stream.
std::vector<std::string> tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string detokenize(const std::vector<std::string>& tokens);
std::string detokenize(const std::vector<std::string>& tokens, std::size_t first, std::size_t last);

/// ASCII lowercasing, used for term matching in retrieval and entity lookup.
std::string to_lower(std::string_view s);

} // namespace msrag::corpus
