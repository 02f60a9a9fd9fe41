#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace promptreps {

/// Raw (pre-saturation) logit values keyed by decoded token string.
/// Tokens not present are treated as -infinity.
using LogitMap = std::map<std::string, float>;

/// Quantized bag-of-tokens. Every stored impact is >= 1.
using SparseRep = std::map<std::string, std::int32_t>;

using DenseVector = std::vector<float>;

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

/// Orders by score descending, then doc_id ascending.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

/// Ranked list for one query. `entries` always satisfies `ranks_before`
/// ordering and holds each doc_id at most once.
struct RunList {
  std::string query_id;
  std::vector<ScoredDoc> entries;

  bool operator==(const RunList&) const = default;
};

/// Sorts entries into canonical order and truncates to `k` (0 = no limit).
void canonicalize(RunList& run, std::size_t k = 0);

/// Sparsification parameters. Defaults mirror the reference pipeline.
struct SparsifierConfig {
  std::size_t top_k = 128;
  std::int32_t quant_scale = 100;
  std::set<std::string> stopwords;
  std::set<std::string> punctuation;
  bool lowercase = true;

  /// Config populated with the embedded English stopword list and ASCII
  /// punctuation set.
  static SparsifierConfig defaults();

  /// Throws ConfigError when top_k or quant_scale is below 1.
  void validate() const;
};

enum class MissingScorePolicy { kTreatAsMin };

struct FusionConfig {
  /// One weight per input run; empty means "equal weights".
  std::vector<double> weights;
  std::size_t candidate_depth = 1000;
  MissingScorePolicy missing_score_policy = MissingScorePolicy::kTreatAsMin;

  /// Returns the weights to use for `run_count` runs. Throws ConfigError on
  /// a count mismatch, a negative weight, or all-zero weights.
  std::vector<double> resolved_weights(std::size_t run_count) const;
};

/// Representation scheme for multi-token outputs.
enum class RepMode { kFTSR, kFWSR, kMTSR, kMTMR, kMWMR };

RepMode parse_rep_mode(const std::string& name);
std::string to_string(RepMode mode);
inline bool is_multi_rep(RepMode m) { return m == RepMode::kMTMR || m == RepMode::kMWMR; }

}  // namespace promptreps
