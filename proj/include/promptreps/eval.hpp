#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "promptreps/types.hpp"

namespace promptreps {

/// query_id -> ranked run.
using RunSet = std::map<std::string, RunList>;

/// doc_id -> grade for one query.
using Judgments = std::map<std::string, int>;

/// query_id -> judgments. Queries with no judged docs are allowed.
using Qrels = std::map<std::string, Judgments>;

enum class Gain {
  kExponential,  // 2^rel - 1
  kLinear,       // rel, as trec_eval's ndcg_cut computes it
};

double ndcg_at_k(const RunList& run, const Judgments& judgments, std::size_t k,
                 Gain gain = Gain::kExponential);

/// Reciprocal rank of the first doc with grade >= min_grade within the top k.
double mrr_at_k(const RunList& run, const Judgments& judgments, std::size_t k, int min_grade = 1);

/// |relevant in top k| / |relevant|; 0 when nothing is relevant.
double recall_at_k(const RunList& run, const Judgments& judgments, std::size_t k, int min_grade = 1);

enum class MetricKind { kNdcg, kMrr, kRecall };

struct MetricSpec {
  MetricKind kind = MetricKind::kNdcg;
  std::size_t k = 10;
  int min_grade = 1;  // relevance threshold for mrr/recall
  Gain gain = Gain::kExponential;

  /// "ndcg@10", "mrr@10", "recall@1000".
  std::string name() const;
  /// Parses the form produced by name(); throws ConfigError.
  static MetricSpec parse(const std::string& text);
};

double evaluate_query(const RunList& run, const Judgments& judgments, const MetricSpec& metric);

struct MetricTable {
  std::vector<std::string> metric_names;
  /// query_id -> one value per metric.
  std::map<std::string, std::vector<double>> per_query;
  std::vector<double> mean;
};

/// Evaluates every query present in `qrels`; a query missing from `runs`
/// scores 0 and is still counted in the mean.
MetricTable evaluate(const RunSet& runs, const Qrels& qrels, const std::vector<MetricSpec>& metrics);

double mean_metric(const RunSet& runs, const Qrels& qrels, const MetricSpec& metric);

/// TSV: `metric<TAB>query_id<TAB>value` per query, then `metric<TAB>all<TAB>mean`.
void write_metric_table(std::ostream& out, const MetricTable& table, bool per_query = true);

/// Run format: `qid Q0 docid rank score tag`. Scores printed with 6 decimals.
void write_run(std::ostream& out, const RunSet& runs, const std::string& tag);
void write_run_file(const std::filesystem::path& path, const RunSet& runs, const std::string& tag);

/// Parses a run; entries are re-sorted into canonical order. Throws
/// ParseError on malformed lines and duplicate (qid, docid) pairs.
RunSet read_run(std::istream& in, const std::string& source = {});
RunSet read_run_file(const std::filesystem::path& path);

/// Qrels format: `qid iter docid grade`.
Qrels read_qrels(std::istream& in, const std::string& source = {});
Qrels read_qrels_file(const std::filesystem::path& path);
void write_qrels(std::ostream& out, const Qrels& qrels);

}  // namespace promptreps
