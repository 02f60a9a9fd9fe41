#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptreps/sparse_index.hpp"
#include "promptreps/types.hpp"

namespace promptreps {

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
  bool remove_stopwords = false;
};

/// Term-frequency inverted index with BM25 scoring. Shares the postings
/// container layout with InvertedIndex, plus a lengths/parameters section.
class Bm25Index {
 public:
  Bm25Index() = default;
  Bm25Index(DocTable docs, std::vector<std::uint32_t> lengths, PostingsMap postings, Bm25Params params);

  std::size_t doc_count() const { return docs_.size(); }
  const DocTable& doc_table() const { return docs_; }
  const PostingsMap& postings() const { return postings_; }
  const std::vector<std::uint32_t>& doc_lengths() const { return lengths_; }
  double average_length() const { return avg_len_; }
  const Bm25Params& params() const { return params_; }

  /// ln(1 + (N - df + 0.5) / (df + 0.5)).
  double idf(std::size_t df) const;
  std::size_t document_frequency(const std::string& term) const;

  void save(const std::filesystem::path& path) const;
  static Bm25Index load(const std::filesystem::path& path);

 private:
  DocTable docs_;
  std::vector<std::uint32_t> lengths_;
  PostingsMap postings_;
  Bm25Params params_;
  double avg_len_ = 0.0;
};

/// Analyzer shared by indexing and querying: lowercase word tokenization,
/// punctuation dropped, stopwords dropped only if requested.
std::vector<std::string> bm25_terms(std::string_view text, bool remove_stopwords);

Bm25Index build_bm25(const std::vector<std::pair<std::string, std::string>>& corpus,
                     Bm25Params params = {});

/// Standard BM25 summed over query terms (repeated terms count repeatedly).
RunList search_bm25(const Bm25Index& index, std::string_view query_text, std::size_t k,
                    const std::string& query_id = {});

}  // namespace promptreps
