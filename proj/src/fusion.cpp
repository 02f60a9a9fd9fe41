#include "promptreps/fusion.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "promptreps/error.hpp"

namespace promptreps {

RunList minmax_normalize(const RunList& run) {
  RunList out = run;
  if (out.entries.empty()) return out;
  double lo = out.entries.front().score, hi = lo;
  for (const auto& e : out.entries) {
    lo = std::min(lo, e.score);
    hi = std::max(hi, e.score);
  }
  const double span = hi - lo;
  for (auto& e : out.entries) e.score = span > 0.0 ? (e.score - lo) / span : 0.0;
  canonicalize(out);
  return out;
}

RunList fuse(const std::vector<RunList>& runs, const FusionConfig& config) {
  if (runs.empty()) throw ConfigError("fuse needs at least one run");
  const auto weights = config.resolved_weights(runs.size());
  for (const auto& r : runs) {
    if (r.query_id != runs.front().query_id) {
      throw ConfigError("fused runs disagree on query id (\"" + r.query_id + "\" vs \"" +
                        runs.front().query_id + "\")");
    }
  }
  std::map<std::string, double> fused;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    RunList truncated = runs[i];
    canonicalize(truncated, config.candidate_depth);
    for (const auto& e : minmax_normalize(truncated).entries) fused[e.doc_id] += weights[i] * e.score;
  }
  RunList out{runs.front().query_id, {}};
  out.entries.reserve(fused.size());
  for (const auto& [doc, score] : fused) out.entries.push_back({doc, score});
  canonicalize(out);
  return out;
}

RunSet fuse_run_sets(const std::vector<RunSet>& run_sets, const FusionConfig& config) {
  std::set<std::string> qids;
  for (const auto& rs : run_sets) {
    for (const auto& [qid, run] : rs) qids.insert(qid);
  }
  RunSet out;
  for (const auto& qid : qids) {
    std::vector<RunList> runs;
    runs.reserve(run_sets.size());
    for (const auto& rs : run_sets) {
      auto it = rs.find(qid);
      runs.push_back(it == rs.end() ? RunList{qid, {}} : it->second);
      runs.back().query_id = qid;
    }
    out.emplace(qid, fuse(runs, config));
  }
  return out;
}

std::vector<SweepPoint> weight_sweep(const RunSet& dense, const RunSet& sparse, const Qrels& qrels,
                                     const std::vector<double>& grid, const MetricSpec& metric,
                                     std::size_t candidate_depth) {
  std::vector<SweepPoint> out;
  for (double w : grid) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("sweep weights must lie in [0, 1]");
    FusionConfig cfg;
    cfg.weights = {w, 1.0 - w};
    cfg.candidate_depth = candidate_depth;
    out.push_back({w, mean_metric(fuse_run_sets({dense, sparse}, cfg), qrels, metric)});
  }
  return out;
}

}  // namespace promptreps
