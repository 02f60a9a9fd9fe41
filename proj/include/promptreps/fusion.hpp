#pragma once

#include <utility>
#include <vector>

#include "promptreps/eval.hpp"
#include "promptreps/types.hpp"

namespace promptreps {

/// (s - min) / (max - min). A run whose scores are all equal maps to 0.
RunList minmax_normalize(const RunList& run);

/// Weighted interpolation of min-max normalized runs for one query.
///
/// Each run is truncated to `candidate_depth` and normalized over its own
/// candidates. The candidate set is the union of doc_ids from runs with a
/// positive weight; a doc missing from a run gets that run's normalized
/// minimum, 0. Throws ConfigError on a weight/run count mismatch or
/// differing query ids.
RunList fuse(const std::vector<RunList>& runs, const FusionConfig& config);

/// Applies `fuse` to every query appearing in any run set. A query absent
/// from one run set contributes an empty run there.
RunSet fuse_run_sets(const std::vector<RunSet>& run_sets, const FusionConfig& config);

struct SweepPoint {
  double weight = 0.0;  // dense weight; sparse gets 1 - weight
  double value = 0.0;

  bool operator==(const SweepPoint&) const = default;
};

/// Scores w * dense + (1 - w) * sparse for every w in `grid` (each in [0, 1]).
std::vector<SweepPoint> weight_sweep(const RunSet& dense, const RunSet& sparse, const Qrels& qrels,
                                     const std::vector<double>& grid, const MetricSpec& metric,
                                     std::size_t candidate_depth = 1000);

}  // namespace promptreps
