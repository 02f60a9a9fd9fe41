#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "promptreps/text.hpp"
#include "promptreps/types.hpp"

namespace promptreps {

/// Content words of a text: lowercased, stopwords/punctuation removed,
/// original order and duplicates kept.
struct WordTokenization {
  std::vector<std::string> words;
};

WordTokenization extract_words(std::string_view text, const SparsifierConfig& config);

/// Union of sub-word token strings over all words.
std::set<std::string> words_to_token_keys(const WordTokenization& words,
                                          const SubwordTokenizer& tokenizer);

/// log(1 + max(0, v)).
double saturate(double raw);

/// Round-half-to-even of value * scale.
std::int64_t quantize(double saturated, std::int32_t scale);

/// Restricts `logits` to `token_keys`, saturates, keeps the `top_k` largest
/// strictly positive values (ties by token ascending), quantizes, and drops
/// impacts <= 0.
SparseRep sparsify(const LogitMap& logits, const std::set<std::string>& token_keys,
                   const SparsifierConfig& config);

/// For pre-filtered logit pairs: the key set is every listed token.
SparseRep sparsify(const LogitMap& logits, const SparsifierConfig& config);

/// Picks entries of a vocabulary-length logit vector for the given token
/// keys. Keys missing from the vocabulary are ignored. Throws SchemaError if
/// a vocabulary id is outside the vector.
LogitMap select_vocab_logits(const std::vector<float>& vocab_logits, const Vocabulary& vocab,
                             const std::set<std::string>& token_keys);

}  // namespace promptreps
