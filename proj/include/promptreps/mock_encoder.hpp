#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "promptreps/record.hpp"
#include "promptreps/text.hpp"
#include "promptreps/types.hpp"

namespace promptreps {

/// Deterministic stand-in for the LLM encoder.
///
/// dense: normalized sum of seeded Gaussian vectors, one per content word,
///   keyed by the word's concept (lexicon entry, else the word itself), so
///   texts sharing concepts point in similar directions.
/// logits: one seeded positive value per distinct content word plus
///   `noise_entries` seeded entries over a synthetic vocabulary of
///   `vocab_size` tokens (mostly negative, so they rarely survive ReLU).
struct MockEncoderConfig {
  std::size_t dim = 64;
  std::size_t vocab_size = 1000;
  std::uint64_t seed = 0;
  std::size_t noise_entries = 4;
  /// Emit per-token sub-records for the multi-token modes.
  bool emit_tokens = false;
  /// Number of "generated" words in token sub-records.
  std::size_t generated_words = 3;
  /// word -> concept key.
  std::map<std::string, std::string> lexicon;
};

class MockEncoder {
 public:
  explicit MockEncoder(MockEncoderConfig config);

  RepresentationRecord encode(const std::string& id, std::string_view text) const;

  /// Replaces pair logits with a vocabulary-length vector. Tokens outside
  /// `vocab` are dropped; unlisted vocabulary entries get -1.
  static void to_vocab_logits(RepresentationRecord& record, const Vocabulary& vocab);

  /// Vocabulary covering every content word of `texts` plus the synthetic
  /// noise tokens, ids assigned in sorted token order.
  Vocabulary build_vocabulary(const std::vector<std::string>& texts) const;

  const MockEncoderConfig& config() const { return config_; }

 private:
  DenseVector concept_vector(const std::string& key) const;
  std::string concept_of(const std::string& word) const;

  MockEncoderConfig config_;
  SparsifierConfig words_;
};

/// Reads `word<TAB>concept` lines.
std::map<std::string, std::string> load_lexicon(const std::string& path);

}  // namespace promptreps
