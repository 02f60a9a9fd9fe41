#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "promptreps/sparse_index.hpp"
#include "promptreps/types.hpp"

namespace promptreps {

/// Flat matrix of unit-normalized embeddings, row-major float32.
class DenseIndex {
 public:
  DenseIndex() = default;
  DenseIndex(DocTable docs, std::size_t dim, std::vector<float> rows);

  std::size_t doc_count() const { return docs_.size(); }
  std::size_t dim() const { return dim_; }
  const DocTable& doc_table() const { return docs_; }
  std::span<const float> row(std::size_t ordinal) const {
    return {rows_.data() + ordinal * dim_, dim_};
  }

  void save(const std::filesystem::path& path) const;
  static DenseIndex load(const std::filesystem::path& path);

 private:
  DocTable docs_;
  std::size_t dim_ = 0;
  std::vector<float> rows_;
};

/// Unit-normalizes `v`; throws BuildError if its norm is zero or not finite.
DenseVector normalized(std::span<const float> v);

/// Inner product accumulated in double, index order 0..n-1.
double dot(std::span<const float> a, std::span<const float> b);

/// Throws BuildError on zero-norm vectors, dimension mismatch, or duplicate ids.
DenseIndex build_dense_index(const std::vector<std::pair<std::string, DenseVector>>& reps);

/// Exhaustive cosine scan. Throws ConfigError for a zero or wrong-sized query.
RunList search_dense(const DenseIndex& index, std::span<const float> query, std::size_t k,
                     const std::string& query_id = {});

}  // namespace promptreps
