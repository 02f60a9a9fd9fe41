#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "promptreps/error.hpp"
#include "promptreps/eval.hpp"

using namespace promptreps;

namespace {

RunList run_of(std::vector<std::string> docs) {
  RunList r{"q", {}};
  double s = static_cast<double>(docs.size());
  for (auto& d : docs) r.entries.push_back({d, s--});
  return r;
}

std::string fixture(const std::string& name) { return std::string(PROMPTREPS_FIXTURES) + "/" + name; }

}  // namespace

TEST(Eval, NdcgWorkedExamples) {
  EXPECT_NEAR(ndcg_at_k(run_of({"d1"}), {{"d1", 1}}, 10), 1.0, 1e-12);
  EXPECT_NEAR(ndcg_at_k(run_of({"d2", "d1"}), {{"d1", 1}}, 10), 0.63093, 1e-5);
  EXPECT_NEAR(ndcg_at_k(run_of({"d2", "d1", "d3"}), {{"d1", 3}, {"d2", 1}}, 10), 0.70981, 1e-5);
  EXPECT_EQ(ndcg_at_k(run_of({"d1"}), {}, 10), 0.0);
  EXPECT_EQ(ndcg_at_k(run_of({"d1"}), {{"d1", 0}}, 10), 0.0);
  // Linear gain: DCG = 1 + 3/log2(3), IDCG = 3 + 1/log2(3).
  double lin = (1 + 3 / std::log2(3.0)) / (3 + 1 / std::log2(3.0));
  EXPECT_NEAR(ndcg_at_k(run_of({"d2", "d1", "d3"}), {{"d1", 3}, {"d2", 1}}, 10, Gain::kLinear), lin, 1e-12);
}

TEST(Eval, NdcgIgnoresScoreValues) {
  auto a = run_of({"x", "d1", "d2"});
  auto b = a;
  for (auto& e : b.entries) e.score = e.score * 1000 - 7;
  Judgments j = {{"d1", 2}, {"d2", 1}};
  EXPECT_EQ(ndcg_at_k(a, j, 10), ndcg_at_k(b, j, 10));
}

TEST(Eval, Mrr) {
  Judgments j = {{"r", 1}};
  EXPECT_EQ(mrr_at_k(run_of({"r", "a"}), j, 10), 1.0);
  EXPECT_NEAR(mrr_at_k(run_of({"a", "b", "r"}), j, 10), 1.0 / 3, 1e-12);
  std::vector<std::string> eleven = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "r"};
  EXPECT_EQ(mrr_at_k(run_of(eleven), j, 10), 0.0);
  EXPECT_EQ(mrr_at_k(run_of({"r"}), {{"r", 1}}, 10, 2), 0.0);
}

TEST(Eval, Recall) {
  Judgments j = {{"a", 1}, {"b", 1}, {"c", 2}, {"d", 1}};
  EXPECT_EQ(recall_at_k(run_of({"a", "b", "c", "d"}), j, 1000), 1.0);
  EXPECT_EQ(recall_at_k(run_of({"x", "y"}), j, 1000), 0.0);
  EXPECT_EQ(recall_at_k(run_of({"a", "x", "c"}), j, 1000), 0.5);
  EXPECT_EQ(recall_at_k(run_of({"a", "x", "c"}), j, 1000, 2), 1.0);
  EXPECT_EQ(recall_at_k(run_of({"a"}), {}, 1000), 0.0);
}

TEST(Eval, MetricSpecParsing) {
  auto m = MetricSpec::parse("ndcg@10");
  EXPECT_EQ(m.kind, MetricKind::kNdcg);
  EXPECT_EQ(m.k, 10u);
  EXPECT_EQ(MetricSpec::parse("recall@1000").name(), "recall@1000");
  EXPECT_EQ(MetricSpec::parse("mrr@10").name(), "mrr@10");
  EXPECT_THROW(MetricSpec::parse("map@10"), ConfigError);
  EXPECT_THROW(MetricSpec::parse("ndcg@"), ConfigError);
  EXPECT_THROW(MetricSpec::parse("ndcg@0"), ConfigError);
}

// Expected values were produced by pytrec_eval on the same files.
TEST(Eval, AgreesWithTrecEvalFixture) {
  auto runs = read_run_file(fixture("trec_eval_run.txt"));
  auto qrels = read_qrels_file(fixture("trec_eval_qrels.txt"));
  std::ifstream in(fixture("trec_eval_expected.tsv"));
  ASSERT_TRUE(in);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string qid;
    double ndcg, rr, r10, r1000;
    ss >> qid >> ndcg >> rr >> r10 >> r1000;
    const auto& run = runs.at(qid);
    const auto& j = qrels.at(qid);
    EXPECT_NEAR(ndcg_at_k(run, j, 10, Gain::kLinear), ndcg, 5e-5) << qid;
    EXPECT_NEAR(mrr_at_k(run, j, 10), rr, 5e-5) << qid;
    EXPECT_NEAR(recall_at_k(run, j, 10), r10, 5e-5) << qid;
    EXPECT_NEAR(recall_at_k(run, j, 1000), r1000, 5e-5) << qid;
    ++n;
  }
  EXPECT_EQ(n, 10);
}

TEST(Eval, EvaluateCountsMissingQueries) {
  RunSet runs = {{"q1", {"q1", {{"a", 1}}}}};
  Qrels qrels = {{"q1", {{"a", 1}}}, {"q2", {{"b", 1}}}};
  auto t = evaluate(runs, qrels, {MetricSpec{MetricKind::kNdcg, 10}, MetricSpec{MetricKind::kMrr, 10}});
  EXPECT_EQ(t.metric_names, (std::vector<std::string>{"ndcg@10", "mrr@10"}));
  EXPECT_EQ(t.per_query.at("q2"), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(t.mean, (std::vector<double>{0.5, 0.5}));
  std::ostringstream out;
  write_metric_table(out, t);
  EXPECT_EQ(out.str(),
            "ndcg@10\tq1\t1.0000\nndcg@10\tq2\t0.0000\nndcg@10\tall\t0.5000\n"
            "mrr@10\tq1\t1.0000\nmrr@10\tq2\t0.0000\nmrr@10\tall\t0.5000\n");
}

TEST(Eval, RunRoundTrip) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> score(-5000000, 5000000);
  RunSet runs;
  for (int q = 0; q < 50; ++q) {
    RunList r{"q" + std::to_string(q), {}};
    for (int d = 0; d < 100; ++d) r.entries.push_back({"doc" + std::to_string(d), score(rng) / 1e6});
    canonicalize(r);
    runs[r.query_id] = r;
  }
  std::ostringstream out;
  write_run(out, runs, "tag");
  std::istringstream in(out.str());
  auto back = read_run(in);
  EXPECT_EQ(back, runs);
  std::ostringstream again;
  write_run(again, back, "tag");
  EXPECT_EQ(again.str(), out.str());
}

TEST(Eval, RunFormat) {
  RunSet runs = {{"q", {"q", {{"a", 1.5}, {"b", -0.0000001}}}}};
  std::ostringstream out;
  write_run(out, runs, "t");
  EXPECT_EQ(out.str(), "q Q0 a 1 1.500000 t\nq Q0 b 2 0.000000 t\n");
}

TEST(Eval, MalformedInputs) {
  std::istringstream bad_run("q Q0 a 1 0.5 t\nq Q0 b 2\n");
  try {
    read_run(bad_run, "x.run");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream dup("q Q0 a 1 0.5 t\nq Q0 a 2 0.4 t\n");
  EXPECT_THROW(read_run(dup), ParseError);
  std::istringstream score("q Q0 a 1 high t\n");
  EXPECT_THROW(read_run(score), ParseError);
  std::istringstream bad_qrels("q 0 a\n");
  EXPECT_THROW(read_qrels(bad_qrels), ParseError);
  std::istringstream neg("q 0 a -1\n");
  EXPECT_THROW(read_qrels(neg), ParseError);
  EXPECT_THROW(read_run_file("/nonexistent/run"), IoError);
}

TEST(Eval, QrelsRoundTrip) {
  Qrels q = {{"q1", {{"a", 0}, {"b", 3}}}, {"q2", {{"c", 1}}}};
  std::ostringstream out;
  write_qrels(out, q);
  EXPECT_EQ(out.str(), "q1 0 a 0\nq1 0 b 3\nq2 0 c 1\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_qrels(in), q);
}
