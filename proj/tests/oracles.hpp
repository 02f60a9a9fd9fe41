#pragma once

// Reference implementations used only by tests. Each one follows the
// definition literally (materialize, loop, sort everything) and shares no
// code with the engine path it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "promptreps/types.hpp"

namespace oracle {

using promptreps::RunList;
using promptreps::ScoredDoc;

/// Round half to even via floor, independent of the FP rounding mode.
inline std::int64_t round_half_even(double x) {
  double r = std::floor(x);
  double diff = x - r;
  if (diff > 0.5) return static_cast<std::int64_t>(r) + 1;
  if (diff < 0.5) return static_cast<std::int64_t>(r);
  auto ri = static_cast<std::int64_t>(r);
  return (ri % 2 == 0) ? ri : ri + 1;
}

/// Materializes the masked vector over the union of tokens, applies
/// log(1 + relu(v)), keeps the top_k largest positive values (ties by token),
/// quantizes, and drops zeros.
inline std::map<std::string, std::int32_t> sparsify(const std::map<std::string, float>& logits,
                                                    const std::set<std::string>& keys, std::size_t top_k,
                                                    std::int32_t scale) {
  std::set<std::string> vocab(keys.begin(), keys.end());
  for (const auto& [t, v] : logits) vocab.insert(t);
  std::vector<std::pair<std::string, double>> vec;
  for (const auto& t : vocab) {
    double masked = 0.0;
    auto it = logits.find(t);
    if (keys.count(t) && it != logits.end()) masked = it->second;
    vec.emplace_back(t, std::log(1.0 + std::max(0.0, masked)));
  }
  std::sort(vec.begin(), vec.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::size_t positive = 0;
  for (const auto& e : vec) positive += e.second > 0.0;
  std::size_t keep = std::min(positive, top_k);
  std::map<std::string, std::int32_t> out;
  for (std::size_t i = 0; i < keep; ++i) {
    auto w = round_half_even(vec[i].second * scale);
    if (w > 0) out[vec[i].first] = static_cast<std::int32_t>(w);
  }
  return out;
}

inline void sort_and_cut(std::vector<ScoredDoc>& v, std::size_t k) {
  std::sort(v.begin(), v.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  if (v.size() > k) v.resize(k);
}

/// Dot product of every doc against the query, top k with score > 0.
inline std::vector<ScoredDoc> sparse_search(
    const std::vector<std::pair<std::string, std::map<std::string, std::int32_t>>>& docs,
    const std::map<std::string, std::int32_t>& query, std::size_t k) {
  std::vector<ScoredDoc> all;
  for (const auto& [id, rep] : docs) {
    std::int64_t s = 0;
    for (const auto& [t, w] : rep) {
      auto it = query.find(t);
      if (it != query.end()) s += static_cast<std::int64_t>(w) * it->second;
    }
    if (s > 0) all.push_back({id, static_cast<double>(s)});
  }
  sort_and_cut(all, k);
  return all;
}

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += double(a[i]) * b[i];
    aa += double(a[i]) * a[i];
    bb += double(b[i]) * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

/// Argsort of cosine similarities computed from the raw vectors.
inline std::vector<ScoredDoc> dense_search(const std::vector<std::pair<std::string, std::vector<float>>>& docs,
                                           const std::vector<float>& query, std::size_t k) {
  std::vector<ScoredDoc> all;
  for (const auto& [id, v] : docs) all.push_back({id, cosine(v, query)});
  sort_and_cut(all, k);
  return all;
}

/// Recomputes weighted min-max interpolation over the union of candidates
/// of positively weighted runs.
inline std::vector<ScoredDoc> fuse(const std::vector<std::vector<ScoredDoc>>& runs, const std::vector<double>& weights) {
  std::set<std::string> docs;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (weights[i] > 0) {
      for (const auto& e : runs[i]) docs.insert(e.doc_id);
    }
  }
  std::vector<ScoredDoc> out;
  for (const auto& d : docs) {
    double total = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].empty() || weights[i] <= 0) continue;
      double lo = runs[i][0].score, hi = lo;
      for (const auto& e : runs[i]) {
        lo = std::min(lo, e.score);
        hi = std::max(hi, e.score);
      }
      for (const auto& e : runs[i]) {
        if (e.doc_id == d && hi > lo) total += weights[i] * ((e.score - lo) / (hi - lo));
      }
    }
    out.push_back({d, total});
  }
  sort_and_cut(out, out.size());
  return out;
}

/// Standard BM25 over tokenized docs, straight from the closed form.
inline double bm25(const std::vector<std::vector<std::string>>& docs, std::size_t doc,
                   const std::vector<std::string>& query, double k1, double b) {
  const double n = static_cast<double>(docs.size());
  double total_len = 0;
  for (const auto& d : docs) total_len += static_cast<double>(d.size());
  const double avg = total_len / n;
  double score = 0.0;
  for (const auto& term : query) {
    double df = 0;
    for (const auto& d : docs) df += std::count(d.begin(), d.end(), term) > 0 ? 1 : 0;
    if (df == 0) continue;
    double tf = static_cast<double>(std::count(docs[doc].begin(), docs[doc].end(), term));
    if (tf == 0) continue;
    double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * static_cast<double>(docs[doc].size()) / avg));
  }
  return score;
}

struct Rep {
  std::vector<float> dense;
  std::map<std::string, std::int32_t> sparse;
};

/// Double loop over query x doc representations.
inline double colbert(const std::vector<Rep>& q, const std::vector<Rep>& d, bool dense) {
  double total = 0.0;
  for (const auto& qr : q) {
    double best = -1e300;
    for (const auto& dr : d) {
      double s = 0.0;
      if (dense) {
        s = cosine(qr.dense, dr.dense);
      } else {
        for (const auto& [t, w] : qr.sparse) {
          for (const auto& [t2, w2] : dr.sparse) {
            if (t == t2) s += double(w) * w2;
          }
        }
      }
      best = std::max(best, s);
    }
    total += best;
  }
  return total;
}

inline std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (auto& x : v) x = n(rng);
  return v;
}

}  // namespace oracle
