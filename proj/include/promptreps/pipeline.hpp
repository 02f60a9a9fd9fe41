#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "promptreps/bm25.hpp"
#include "promptreps/dense_index.hpp"
#include "promptreps/eval.hpp"
#include "promptreps/mock_encoder.hpp"
#include "promptreps/multirep.hpp"
#include "promptreps/record.hpp"
#include "promptreps/sparse_index.hpp"
#include "promptreps/text.hpp"

namespace promptreps {

struct Document {
  std::string id;
  std::string text;
};

/// BEIR JSONL: {"_id", "title", "text"}; text = title + " " + text when the
/// title is non-empty.
std::vector<Document> load_corpus(const std::filesystem::path& path);

/// TSV: `qid<TAB>query`.
std::vector<Document> load_queries(const std::filesystem::path& path);

/// Dispatches on extension: `.tsv` -> queries, anything else -> corpus.
std::vector<Document> load_texts(const std::filesystem::path& path);

/// Everything needed to re-run word extraction and sub-word tokenization for
/// records carrying full-vocabulary logits.
struct VocabContext {
  const Vocabulary* vocab = nullptr;
  const std::map<std::string, std::string>* texts = nullptr;  // id -> text
};

/// Sparse representation of a record under a single-rep mode.
SparseRep record_sparse_rep(const RepresentationRecord& record, RepMode mode, const SparsifierConfig& config,
                            const VocabContext& vocab = {});

DenseVector record_dense(const RepresentationRecord& record, RepMode mode);

DenseIndex index_dense_records(const std::vector<RepresentationRecord>& records, RepMode mode);
InvertedIndex index_sparse_records(const std::vector<RepresentationRecord>& records, RepMode mode,
                                   const SparsifierConfig& config, const VocabContext& vocab = {});
Bm25Index index_bm25_documents(const std::vector<Document>& corpus, const Bm25Params& params);

RunSet search_dense_records(const DenseIndex& index, const std::vector<RepresentationRecord>& queries,
                            RepMode mode, std::size_t k);
RunSet search_sparse_records(const InvertedIndex& index, const std::vector<RepresentationRecord>& queries,
                             RepMode mode, const SparsifierConfig& config, std::size_t k,
                             const VocabContext& vocab = {});
RunSet search_bm25_documents(const Bm25Index& index, const std::vector<Document>& queries, std::size_t k);
RunSet search_multirep_records(const std::vector<RepresentationRecord>& docs,
                               const std::vector<RepresentationRecord>& queries, RepMode mode, ScoreKind kind,
                               const SparsifierConfig& config, std::size_t k);

/// Options for the end-to-end run. Loaded from a JSON config file whose keys
/// mirror these fields (see README).
struct PipelineConfig {
  std::filesystem::path corpus;
  std::filesystem::path queries;
  std::filesystem::path qrels;
  /// When empty the mock encoder writes records into `work_dir`.
  std::filesystem::path doc_records;
  std::filesystem::path query_records;
  std::filesystem::path vocab;
  std::filesystem::path work_dir = "work";

  RepMode mode = RepMode::kFTSR;
  std::size_t k = 1000;
  SparsifierConfig sparsifier = SparsifierConfig::defaults();
  FusionConfig fusion;
  bool use_bm25 = true;
  Bm25Params bm25;
  std::vector<MetricSpec> metrics = {MetricSpec{MetricKind::kNdcg, 10},
                                     MetricSpec{MetricKind::kMrr, 10},
                                     MetricSpec{MetricKind::kRecall, 1000}};
  MockEncoderConfig mock;
  bool mock_full_vocab = false;

  /// Relative paths inside the file resolve against the file's directory.
  static PipelineConfig from_json_file(const std::filesystem::path& path);
  void validate() const;
};

struct PipelineOutputs {
  std::filesystem::path dense_run;
  std::filesystem::path sparse_run;
  std::filesystem::path hybrid_run;
  std::filesystem::path bm25_run;         // empty when BM25 is disabled
  std::filesystem::path hybrid_bm25_run;  // dense + sparse + BM25
  std::filesystem::path metrics;
  /// run name -> metric table
  std::map<std::string, MetricTable> tables;
};

/// Encodes (mock) if needed, builds every index under work_dir/index,
/// searches, fuses, and evaluates. Outputs are byte-identical across runs
/// with identical inputs.
PipelineOutputs run_pipeline(const PipelineConfig& config);

/// TSV rows `run<TAB>metric<TAB>value`, runs in the given order.
void write_pipeline_metrics(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, MetricTable>>& tables);

}  // namespace promptreps
