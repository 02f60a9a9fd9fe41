#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "promptreps/record.hpp"
#include "promptreps/types.hpp"

namespace promptreps {

/// Generation cap applied on top of the closing-quote terminator.
inline constexpr std::size_t kMaxGeneratedTokens = 16;

/// One indexed representation: unit dense vector plus quantized sparse rep.
struct RepUnit {
  DenseVector dense;
  SparseRep sparse;
};

/// Ordered representations of one text (per token or per word).
struct MultiRep {
  std::vector<RepUnit> reps;
};

enum class ScoreKind { kDense, kSparse };

/// Tokens up to (excluding) the first closing-quote token, capped at
/// kMaxGeneratedTokens.
std::span<const TokenRecord> generated_tokens(std::span<const TokenRecord> tokens);

/// Contiguous groups; a new group starts at position 0 and at every token
/// whose decoded string begins with a space.
std::vector<std::span<const TokenRecord>> group_words(std::span<const TokenRecord> tokens);

struct PooledRep {
  DenseVector dense;
  LogitMap logits;
};

/// Mean of dense vectors and elementwise max of logit maps (absent = -inf).
/// Throws SchemaError on an empty token list.
PooledRep pool_tokens(std::span<const TokenRecord> tokens);

/// Single-representation view of a record under FTSR / FWSR / MTSR.
/// FTSR returns the record's own dense vector and logits.
PooledRep single_rep(const RepresentationRecord& record, RepMode mode);

/// Per-token (MTMR) or per-word (MWMR) representations. Each unit's sparse
/// rep is pruned independently with the standard pipeline.
MultiRep build_multirep(const RepresentationRecord& record, RepMode mode, const SparsifierConfig& config);

/// Sparse impact dot product.
std::int64_t sparse_dot(const SparseRep& a, const SparseRep& b);

/// Sum over query reps of the max similarity against any doc rep. Dense
/// similarity is the inner product of unit vectors.
double colbert_score(const MultiRep& query, const MultiRep& doc, ScoreKind kind);

/// Exhaustive late-interaction scan. Sparse runs keep only scores > 0.
RunList search_multirep(const std::vector<std::pair<std::string, MultiRep>>& docs, const MultiRep& query,
                        ScoreKind kind, std::size_t k, const std::string& query_id = {});

}  // namespace promptreps
