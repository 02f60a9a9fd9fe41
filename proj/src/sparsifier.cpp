#include "promptreps/sparsifier.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>

#include "promptreps/error.hpp"

namespace promptreps {

WordTokenization extract_words(std::string_view text, const SparsifierConfig& config) {
  WordTokenization out;
  std::string normalized = config.lowercase ? to_lower_utf8(text) : std::string(text);
  for (auto& tok : word_tokenize(normalized)) {
    if (tok.empty()) continue;
    if (config.stopwords.count(tok) || config.punctuation.count(tok)) continue;
    out.words.push_back(std::move(tok));
  }
  return out;
}

std::set<std::string> words_to_token_keys(const WordTokenization& words,
                                          const SubwordTokenizer& tokenizer) {
  std::set<std::string> keys;
  for (const auto& w : words.words) {
    for (auto& piece : tokenizer.split(w)) keys.insert(std::move(piece));
  }
  return keys;
}

double saturate(double raw) { return std::log1p(std::max(0.0, raw)); }

std::int64_t quantize(double saturated, std::int32_t scale) {
  // std::nearbyint honours the current rounding mode; the default mode is
  // round-half-to-even, which is what numpy's rint does.
  const int saved = std::fegetround();
  if (saved != FE_TONEAREST) std::fesetround(FE_TONEAREST);
  auto q = static_cast<std::int64_t>(std::nearbyint(saturated * static_cast<double>(scale)));
  if (saved != FE_TONEAREST) std::fesetround(saved);
  return q;
}

SparseRep sparsify(const LogitMap& logits, const std::set<std::string>& token_keys,
                   const SparsifierConfig& config) {
  config.validate();
  struct Candidate {
    const std::string* token;
    double value;
  };
  std::vector<Candidate> positive;
  // Iterate the smaller side of the intersection.
  if (token_keys.size() < logits.size()) {
    for (const auto& key : token_keys) {
      auto it = logits.find(key);
      if (it == logits.end()) continue;
      double v = saturate(it->second);
      if (v > 0.0) positive.push_back({&it->first, v});
    }
  } else {
    for (const auto& [token, raw] : logits) {
      if (!token_keys.count(token)) continue;
      double v = saturate(raw);
      if (v > 0.0) positive.push_back({&token, v});
    }
  }
  if (positive.size() > config.top_k) {
    auto by_rank = [](const Candidate& a, const Candidate& b) {
      if (a.value != b.value) return a.value > b.value;
      return *a.token < *b.token;
    };
    std::nth_element(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(config.top_k),
                     positive.end(), by_rank);
    positive.resize(config.top_k);
  }
  SparseRep out;
  for (const auto& c : positive) {
    std::int64_t w = quantize(c.value, config.quant_scale);
    if (w > 0) out.emplace(*c.token, static_cast<std::int32_t>(w));
  }
  return out;
}

SparseRep sparsify(const LogitMap& logits, const SparsifierConfig& config) {
  std::set<std::string> keys;
  for (const auto& [token, raw] : logits) keys.insert(keys.end(), token);
  return sparsify(logits, keys, config);
}

LogitMap select_vocab_logits(const std::vector<float>& vocab_logits, const Vocabulary& vocab,
                             const std::set<std::string>& token_keys) {
  LogitMap out;
  for (const auto& key : token_keys) {
    std::int64_t id = vocab.id_of(key);
    if (id < 0) continue;
    if (static_cast<std::size_t>(id) >= vocab_logits.size()) {
      throw SchemaError("vocabulary id " + std::to_string(id) + " for \"" + key +
                        "\" exceeds logit vector length " + std::to_string(vocab_logits.size()));
    }
    out.emplace(key, vocab_logits[static_cast<std::size_t>(id)]);
  }
  return out;
}

}  // namespace promptreps
