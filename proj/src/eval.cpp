#include "promptreps/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string_view>

#include "promptreps/error.hpp"

namespace promptreps {

namespace {

int grade_of(const Judgments& j, const std::string& doc) {
  auto it = j.find(doc);
  return it == j.end() ? 0 : it->second;
}

double gain_of(int grade, Gain gain) {
  if (grade <= 0) return 0.0;
  return gain == Gain::kExponential ? std::exp2(static_cast<double>(grade)) - 1.0 : static_cast<double>(grade);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

double ndcg_at_k(const RunList& run, const Judgments& judgments, std::size_t k, Gain gain) {
  double dcg = 0.0;
  const std::size_t depth = std::min(k, run.entries.size());
  for (std::size_t i = 0; i < depth; ++i) {
    dcg += gain_of(grade_of(judgments, run.entries[i].doc_id), gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<int> grades;
  for (const auto& [doc, g] : judgments) {
    if (g > 0) grades.push_back(g);
  }
  std::sort(grades.begin(), grades.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) {
    idcg += gain_of(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double mrr_at_k(const RunList& run, const Judgments& judgments, std::size_t k, int min_grade) {
  const std::size_t depth = std::min(k, run.entries.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (grade_of(judgments, run.entries[i].doc_id) >= min_grade) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double recall_at_k(const RunList& run, const Judgments& judgments, std::size_t k, int min_grade) {
  std::size_t relevant = 0;
  for (const auto& [doc, g] : judgments) relevant += g >= min_grade;
  if (relevant == 0) return 0.0;
  std::size_t hit = 0;
  const std::size_t depth = std::min(k, run.entries.size());
  for (std::size_t i = 0; i < depth; ++i) hit += grade_of(judgments, run.entries[i].doc_id) >= min_grade;
  return static_cast<double>(hit) / static_cast<double>(relevant);
}

std::string MetricSpec::name() const {
  std::string base = kind == MetricKind::kNdcg ? "ndcg" : kind == MetricKind::kMrr ? "mrr" : "recall";
  return base + "@" + std::to_string(k);
}

MetricSpec MetricSpec::parse(const std::string& text) {
  auto at = text.find('@');
  if (at == std::string::npos) throw ConfigError("metric \"" + text + "\" must look like ndcg@10");
  MetricSpec m;
  std::string base = text.substr(0, at);
  if (base == "ndcg") {
    m.kind = MetricKind::kNdcg;
  } else if (base == "mrr") {
    m.kind = MetricKind::kMrr;
  } else if (base == "recall") {
    m.kind = MetricKind::kRecall;
  } else {
    throw ConfigError("unknown metric \"" + base + "\" (expected ndcg, mrr or recall)");
  }
  std::string depth = text.substr(at + 1);
  std::size_t k = 0;
  auto res = std::from_chars(depth.data(), depth.data() + depth.size(), k);
  if (res.ec != std::errc() || res.ptr != depth.data() + depth.size() || k == 0) {
    throw ConfigError("metric cutoff in \"" + text + "\" must be a positive integer");
  }
  m.k = k;
  return m;
}

double evaluate_query(const RunList& run, const Judgments& judgments, const MetricSpec& metric) {
  switch (metric.kind) {
    case MetricKind::kNdcg: return ndcg_at_k(run, judgments, metric.k, metric.gain);
    case MetricKind::kMrr: return mrr_at_k(run, judgments, metric.k, metric.min_grade);
    case MetricKind::kRecall: return recall_at_k(run, judgments, metric.k, metric.min_grade);
  }
  return 0.0;
}

MetricTable evaluate(const RunSet& runs, const Qrels& qrels, const std::vector<MetricSpec>& metrics) {
  MetricTable table;
  for (const auto& m : metrics) table.metric_names.push_back(m.name());
  table.mean.assign(metrics.size(), 0.0);
  const RunList empty;
  for (const auto& [qid, judgments] : qrels) {
    auto it = runs.find(qid);
    const RunList& run = it == runs.end() ? empty : it->second;
    auto& row = table.per_query[qid];
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      row.push_back(evaluate_query(run, judgments, metrics[i]));
      table.mean[i] += row.back();
    }
  }
  if (!qrels.empty()) {
    for (auto& v : table.mean) v /= static_cast<double>(qrels.size());
  }
  return table;
}

double mean_metric(const RunSet& runs, const Qrels& qrels, const MetricSpec& metric) {
  return evaluate(runs, qrels, {metric}).mean.front();
}

void write_metric_table(std::ostream& out, const MetricTable& table, bool per_query) {
  out << std::fixed << std::setprecision(4);
  for (std::size_t m = 0; m < table.metric_names.size(); ++m) {
    if (per_query) {
      for (const auto& [qid, row] : table.per_query) out << table.metric_names[m] << '\t' << qid << '\t' << row[m] << '\n';
    }
    out << table.metric_names[m] << "\tall\t" << table.mean[m] << '\n';
  }
}

void write_run(std::ostream& out, const RunSet& runs, const std::string& tag) {
  char buf[64];
  for (const auto& [qid, run] : runs) {
    for (std::size_t i = 0; i < run.entries.size(); ++i) {
      const auto& e = run.entries[i];
      std::snprintf(buf, sizeof buf, "%.6f", e.score);
      std::string_view s = buf;
      if (s == "-0.000000") s = s.substr(1);
      out << qid << " Q0 " << e.doc_id << ' ' << (i + 1) << ' ' << s << ' ' << tag << '\n';
    }
  }
}

void write_run_file(const std::filesystem::path& path, const RunSet& runs, const std::string& tag) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write run file " + path.string());
  write_run(out, runs, tag);
  if (!out) throw IoError("write failed for " + path.string());
}

RunSet read_run(std::istream& in, const std::string& source) {
  RunSet runs;
  std::map<std::string, std::set<std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto f = split_ws(line);
    if (f.size() != 6) throw ParseError("run line must have 6 fields, found " + std::to_string(f.size()), line_no, source);
    std::size_t rank = 0;
    auto rr = std::from_chars(f[3].data(), f[3].data() + f[3].size(), rank);
    if (rr.ec != std::errc() || rr.ptr != f[3].data() + f[3].size()) {
      throw ParseError("rank \"" + f[3] + "\" is not an integer", line_no, source);
    }
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(f[4], &used);
      if (used != f[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("score \"" + f[4] + "\" is not a number", line_no, source);
    }
    if (!std::isfinite(score)) throw ParseError("score must be finite", line_no, source);
    if (!seen[f[0]].insert(f[2]).second) {
      throw ParseError("duplicate doc \"" + f[2] + "\" for query \"" + f[0] + "\"", line_no, source);
    }
    auto& run = runs[f[0]];
    run.query_id = f[0];
    run.entries.push_back({f[2], score});
  }
  for (auto& [qid, run] : runs) canonicalize(run);
  return runs;
}

RunSet read_run_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run file " + path.string());
  return read_run(in, path.string());
}

Qrels read_qrels(std::istream& in, const std::string& source) {
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto f = split_ws(line);
    if (f.size() != 4) throw ParseError("qrels line must have 4 fields, found " + std::to_string(f.size()), line_no, source);
    int grade = 0;
    auto r = std::from_chars(f[3].data(), f[3].data() + f[3].size(), grade);
    if (r.ec != std::errc() || r.ptr != f[3].data() + f[3].size()) {
      throw ParseError("grade \"" + f[3] + "\" is not an integer", line_no, source);
    }
    if (grade < 0) throw ParseError("grade must be >= 0", line_no, source);
    qrels[f[0]][f[2]] = grade;
  }
  return qrels;
}

Qrels read_qrels_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open qrels file " + path.string());
  return read_qrels(in, path.string());
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
  for (const auto& [qid, j] : qrels) {
    for (const auto& [doc, g] : j) out << qid << " 0 " << doc << ' ' << g << '\n';
  }
}

}  // namespace promptreps
