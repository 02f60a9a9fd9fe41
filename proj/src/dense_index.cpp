#include "promptreps/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "promptreps/binary_io.hpp"
#include "promptreps/error.hpp"
#include "promptreps/parallel.hpp"

namespace promptreps {

namespace {
constexpr char kDenseMagic[] = "PRDX";
constexpr std::uint32_t kDenseVersion = 1;
}  // namespace

DenseIndex::DenseIndex(DocTable docs, std::size_t dim, std::vector<float> rows)
    : docs_(std::move(docs)), dim_(dim), rows_(std::move(rows)) {
  if (rows_.size() != docs_.size() * dim_) throw BuildError("dense matrix size does not match doc_count x dim");
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

DenseVector normalized(std::span<const float> v) {
  double norm = std::sqrt(dot(v, v));
  if (!(norm > 0.0) || !std::isfinite(norm)) throw BuildError("vector has zero or non-finite norm");
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

void DenseIndex::save(const std::filesystem::path& path) const {
  binary::Writer w;
  w.bytes(std::string_view(kDenseMagic, 4));
  w.u32(kDenseVersion);
  w.u64(docs_.size());
  w.u32(static_cast<std::uint32_t>(dim_));
  for (const auto& d : docs_) w.str(d);
  for (float f : rows_) w.f32(f);
  w.save(path);
}

DenseIndex DenseIndex::load(const std::filesystem::path& path) {
  auto r = binary::Reader::open(path);
  r.expect_magic(std::string_view(kDenseMagic, 4));
  auto version = r.u32();
  if (version != kDenseVersion) r.fail("unsupported version " + std::to_string(version));
  auto n = r.u64();
  auto dim = r.u32();
  if (n > r.remaining() / 4) r.fail("doc_count exceeds file size");
  DocTable docs;
  docs.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) docs.push_back(r.str());
  if (r.remaining() != n * dim * 4) r.fail("matrix size does not match header");
  std::vector<float> rows(n * dim);
  for (auto& f : rows) f = r.f32();
  return DenseIndex(std::move(docs), dim, std::move(rows));
}

DenseIndex build_dense_index(const std::vector<std::pair<std::string, DenseVector>>& reps) {
  DocTable docs;
  std::vector<float> rows;
  std::size_t dim = reps.empty() ? 0 : reps.front().second.size();
  if (!reps.empty() && dim == 0) throw BuildError("dense vectors must not be empty");
  rows.reserve(reps.size() * dim);
  std::unordered_set<std::string> seen;
  for (const auto& [doc_id, vec] : reps) {
    if (!seen.insert(doc_id).second) throw BuildError("duplicate doc_id \"" + doc_id + "\"");
    if (vec.size() != dim) {
      throw BuildError("doc \"" + doc_id + "\" has dimension " + std::to_string(vec.size()) +
                       ", expected " + std::to_string(dim));
    }
    DenseVector unit;
    try {
      unit = normalized(vec);
    } catch (const BuildError&) {
      throw BuildError("doc \"" + doc_id + "\" has a zero-norm dense vector");
    }
    rows.insert(rows.end(), unit.begin(), unit.end());
    docs.push_back(doc_id);
  }
  return DenseIndex(std::move(docs), dim, std::move(rows));
}

RunList search_dense(const DenseIndex& index, std::span<const float> query, std::size_t k,
                     const std::string& query_id) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (index.doc_count() == 0) return RunList{query_id, {}};
  if (query.size() != index.dim()) {
    throw ConfigError("query dimension " + std::to_string(query.size()) + " != index dimension " +
                      std::to_string(index.dim()));
  }
  double norm = std::sqrt(dot(query, query));
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ConfigError("query vector has zero norm");
  std::vector<double> q(query.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = query[i] / norm;

  std::vector<double> scores(index.doc_count());
  parallel_blocks(index.doc_count(), 4096, [&](std::size_t b, std::size_t e) {
    for (std::size_t d = b; d < e; ++d) {
      auto row = index.row(d);
      double s = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) s += static_cast<double>(row[i]) * q[i];
      scores[d] = s;
    }
  });

  std::vector<std::uint32_t> order(index.doc_count());
  std::iota(order.begin(), order.end(), 0u);
  const auto& docs = index.doc_table();
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return docs[a] < docs[b];
  };
  std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), better);
  RunList run{query_id, {}};
  run.entries.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) run.entries.push_back({docs[order[i]], scores[order[i]]});
  return run;
}

}  // namespace promptreps
