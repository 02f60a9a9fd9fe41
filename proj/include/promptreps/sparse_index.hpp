#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "promptreps/types.hpp"

namespace promptreps {

namespace binary {
class Writer;
class Reader;
}  // namespace binary

struct Posting {
  std::uint32_t doc = 0;    // ordinal into the doc table
  std::uint32_t value = 0;  // impact or term frequency

  bool operator==(const Posting&) const = default;
};

/// token -> postings, ordinals strictly ascending within each list.
using PostingsMap = std::map<std::string, std::vector<Posting>>;

using DocTable = std::vector<std::string>;

/// Impact-scored inverted index. Immutable after build; concurrent
/// searches need no synchronization.
class InvertedIndex {
 public:
  InvertedIndex() = default;
  InvertedIndex(DocTable docs, PostingsMap postings);

  std::size_t doc_count() const { return docs_.size(); }
  const DocTable& doc_table() const { return docs_; }
  const PostingsMap& postings() const { return postings_; }

  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

  /// One line per token: `token<TAB>df<TAB>doc:impact doc:impact ...`.
  void dump(std::ostream& out) const;

 private:
  DocTable docs_;
  PostingsMap postings_;
};

/// Throws BuildError on a duplicate doc_id or a non-positive impact.
InvertedIndex build_sparse_index(const std::vector<std::pair<std::string, SparseRep>>& reps);

/// Exact top-k by integer impact dot product; only docs scoring > 0.
RunList search_sparse(const InvertedIndex& index, const SparseRep& query, std::size_t k,
                      const std::string& query_id = {});

namespace detail {

/// Container kinds sharing the postings file layout.
enum class PostingsKind : std::uint8_t { kImpact = 1, kTermFrequency = 2 };

inline constexpr char kPostingsMagic[] = "PRIX";
inline constexpr std::uint32_t kPostingsVersion = 1;

void write_header(binary::Writer& w, PostingsKind kind, const DocTable& docs);
DocTable read_header(binary::Reader& r, PostingsKind kind);
void write_postings(binary::Writer& w, const PostingsMap& postings);
PostingsMap read_postings(binary::Reader& r, std::size_t doc_count);

/// Selects the top k (score > 0) from a dense accumulator.
template <typename Score>
RunList top_k_from_accumulator(const std::vector<Score>& acc, const std::vector<std::uint32_t>& touched,
                               const DocTable& docs, std::size_t k, const std::string& query_id);

}  // namespace detail

}  // namespace promptreps
