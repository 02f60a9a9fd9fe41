#include "promptreps/types.hpp"

#include <algorithm>

#include "promptreps/error.hpp"
#include "promptreps/text.hpp"

namespace promptreps {

void canonicalize(RunList& run, std::size_t k) {
  std::sort(run.entries.begin(), run.entries.end(), ranks_before);
  if (k != 0 && run.entries.size() > k) run.entries.resize(k);
}

SparsifierConfig SparsifierConfig::defaults() {
  SparsifierConfig c;
  c.stopwords = english_stopwords();
  c.punctuation = ascii_punctuation();
  return c;
}

void SparsifierConfig::validate() const {
  if (top_k < 1) throw ConfigError("sparsifier top_k must be >= 1");
  if (quant_scale < 1) throw ConfigError("sparsifier quant_scale must be >= 1");
}

std::vector<double> FusionConfig::resolved_weights(std::size_t run_count) const {
  if (weights.empty()) {
    if (run_count == 0) return {};
    return std::vector<double>(run_count, 1.0 / static_cast<double>(run_count));
  }
  if (weights.size() != run_count) {
    throw ConfigError("fusion has " + std::to_string(weights.size()) + " weights for " +
                      std::to_string(run_count) + " runs");
  }
  bool any_positive = false;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("fusion weights must be non-negative");
    any_positive |= w > 0.0;
  }
  if (!any_positive) throw ConfigError("at least one fusion weight must be positive");
  return weights;
}

RepMode parse_rep_mode(const std::string& name) {
  std::string n;
  for (char c : name) n += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (n == "FTSR") return RepMode::kFTSR;
  if (n == "FWSR") return RepMode::kFWSR;
  if (n == "MTSR") return RepMode::kMTSR;
  if (n == "MTMR") return RepMode::kMTMR;
  if (n == "MWMR") return RepMode::kMWMR;
  throw ConfigError("unknown representation mode \"" + name + "\" (expected ftsr|fwsr|mtsr|mtmr|mwmr)");
}

std::string to_string(RepMode mode) {
  switch (mode) {
    case RepMode::kFTSR: return "ftsr";
    case RepMode::kFWSR: return "fwsr";
    case RepMode::kMTSR: return "mtsr";
    case RepMode::kMTMR: return "mtmr";
    case RepMode::kMWMR: return "mwmr";
  }
  return "ftsr";
}

}  // namespace promptreps
