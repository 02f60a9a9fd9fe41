#include "promptreps/multirep.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "promptreps/dense_index.hpp"
#include "promptreps/error.hpp"
#include "promptreps/parallel.hpp"
#include "promptreps/sparsifier.hpp"

namespace promptreps {

namespace {

bool is_terminator(const std::string& token) {
  auto first = token.find_first_not_of(' ');
  return first != std::string::npos && token[first] == '"';
}

RepUnit make_unit(const PooledRep& pooled, const SparsifierConfig& config) {
  return RepUnit{normalized(pooled.dense), sparsify(pooled.logits, config)};
}

}  // namespace

std::span<const TokenRecord> generated_tokens(std::span<const TokenRecord> tokens) {
  std::size_t n = 0;
  while (n < tokens.size() && n < kMaxGeneratedTokens && !is_terminator(tokens[n].token)) ++n;
  return tokens.first(n);
}

std::vector<std::span<const TokenRecord>> group_words(std::span<const TokenRecord> tokens) {
  std::vector<std::span<const TokenRecord>> groups;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= tokens.size(); ++i) {
    if (i == tokens.size() || (!tokens[i].token.empty() && tokens[i].token.front() == ' ')) {
      groups.push_back(tokens.subspan(start, i - start));
      start = i;
    }
  }
  if (tokens.empty()) groups.clear();
  return groups;
}

PooledRep pool_tokens(std::span<const TokenRecord> tokens) {
  if (tokens.empty()) throw SchemaError("cannot pool an empty token list");
  const std::size_t dim = tokens.front().dense.size();
  std::vector<double> sum(dim, 0.0);
  PooledRep out;
  for (const auto& t : tokens) {
    if (t.dense.size() != dim) throw SchemaError("token dense dimensions differ");
    for (std::size_t i = 0; i < dim; ++i) sum[i] += t.dense[i];
    for (const auto& [tok, v] : t.logits) {
      auto [it, inserted] = out.logits.emplace(tok, v);
      if (!inserted) it->second = std::max(it->second, v);
    }
  }
  out.dense.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) out.dense[i] = static_cast<float>(sum[i] / static_cast<double>(tokens.size()));
  return out;
}

PooledRep single_rep(const RepresentationRecord& record, RepMode mode) {
  switch (mode) {
    case RepMode::kFTSR: return PooledRep{record.dense, record.logits};
    case RepMode::kFWSR: {
      auto groups = group_words(generated_tokens(record.tokens));
      if (groups.empty()) throw SchemaError("record \"" + record.id + "\" has no generated tokens for fwsr");
      return pool_tokens(groups.front());
    }
    case RepMode::kMTSR: {
      auto gen = generated_tokens(record.tokens);
      if (gen.empty()) throw SchemaError("record \"" + record.id + "\" has no generated tokens for mtsr");
      return pool_tokens(gen);
    }
    default: throw ConfigError(to_string(mode) + " is a multi-representation mode");
  }
}

MultiRep build_multirep(const RepresentationRecord& record, RepMode mode, const SparsifierConfig& config) {
  auto gen = generated_tokens(record.tokens);
  if (gen.empty()) throw SchemaError("record \"" + record.id + "\" has no generated tokens for " + to_string(mode));
  MultiRep out;
  try {
    if (mode == RepMode::kMTMR) {
      for (std::size_t i = 0; i < gen.size(); ++i) out.reps.push_back(make_unit(pool_tokens(gen.subspan(i, 1)), config));
    } else if (mode == RepMode::kMWMR) {
      for (auto group : group_words(gen)) out.reps.push_back(make_unit(pool_tokens(group), config));
    } else {
      throw ConfigError(to_string(mode) + " is a single-representation mode");
    }
  } catch (const BuildError& e) {
    throw BuildError("record \"" + record.id + "\": " + e.what());
  }
  return out;
}

std::int64_t sparse_dot(const SparseRep& a, const SparseRep& b) {
  const SparseRep& small = a.size() <= b.size() ? a : b;
  const SparseRep& large = a.size() <= b.size() ? b : a;
  std::int64_t s = 0;
  for (const auto& [tok, w] : small) {
    auto it = large.find(tok);
    if (it != large.end()) s += static_cast<std::int64_t>(w) * it->second;
  }
  return s;
}

double colbert_score(const MultiRep& query, const MultiRep& doc, ScoreKind kind) {
  if (doc.reps.empty()) return 0.0;
  double total = 0.0;
  for (const auto& q : query.reps) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : doc.reps) {
      double s = kind == ScoreKind::kDense ? dot(q.dense, d.dense) : static_cast<double>(sparse_dot(q.sparse, d.sparse));
      best = std::max(best, s);
    }
    total += best;
  }
  return total;
}

RunList search_multirep(const std::vector<std::pair<std::string, MultiRep>>& docs, const MultiRep& query,
                        ScoreKind kind, std::size_t k, const std::string& query_id) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<double> scores(docs.size());
  parallel_blocks(docs.size(), 256, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) scores[i] = colbert_score(query, docs[i].second, kind);
  });
  std::vector<std::size_t> order;
  order.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (kind == ScoreKind::kDense || scores[i] > 0.0) order.push_back(i);
  }
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return docs[a].first < docs[b].first;
  };
  std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), better);
  RunList run{query_id, {}};
  for (std::size_t i = 0; i < keep; ++i) run.entries.push_back({docs[order[i]].first, scores[order[i]]});
  return run;
}

}  // namespace promptreps
