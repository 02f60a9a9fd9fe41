#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "promptreps/error.hpp"
#include "promptreps/pipeline.hpp"

using namespace promptreps;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(PROMPTREPS_FIXTURES) / "pipeline";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("promptreps_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST(Pipeline, LoadCorpusAndQueries) {
  auto docs = load_corpus(kFixture / "corpus.jsonl");
  ASSERT_EQ(docs.size(), 50u);
  EXPECT_EQ(docs[0].id, "t0d0");
  EXPECT_EQ(docs[0].text.rfind("Sea report ", 0), 0u);
  EXPECT_EQ(docs[1].text.rfind("A ", 0), 0u);  // empty title adds nothing
  auto queries = load_queries(kFixture / "queries.tsv");
  ASSERT_EQ(queries.size(), 10u);
  EXPECT_EQ(queries[0].text, "zx300 marine fish");
  EXPECT_EQ(load_texts(kFixture / "queries.tsv").size(), 10u);
}

TEST(Pipeline, InputErrors) {
  auto dir = scratch("inputs");
  write(dir / "dup.jsonl", "{\"_id\":\"a\",\"text\":\"x\"}\n{\"_id\":\"a\",\"text\":\"y\"}\n");
  EXPECT_THROW(load_corpus(dir / "dup.jsonl"), SchemaError);
  write(dir / "bad.jsonl", "{\"_id\":\"a\",\"text\":\"x\"}\nnot json\n");
  try {
    load_corpus(dir / "bad.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  write(dir / "q.tsv", "q1 no tab\n");
  EXPECT_THROW(load_queries(dir / "q.tsv"), ParseError);
  EXPECT_THROW(load_corpus(dir / "missing.jsonl"), IoError);
  fs::remove_all(dir);
}

TEST(Pipeline, ConfigParsing) {
  auto c = PipelineConfig::from_json_file(kFixture / "config.json");
  EXPECT_EQ(c.corpus, kFixture / "corpus.jsonl");
  EXPECT_EQ(c.mode, RepMode::kFTSR);
  EXPECT_EQ(c.mock.seed, 7u);
  EXPECT_EQ(c.mock.lexicon.at("ocean"), "t0c0");
  ASSERT_EQ(c.metrics.size(), 3u);
  EXPECT_EQ(c.metrics[2].name(), "recall@1000");

  auto dir = scratch("config");
  write(dir / "unknown.json", R"({"corpus":"c","queries":"q","qrels":"r","colour":1})");
  EXPECT_THROW(PipelineConfig::from_json_file(dir / "unknown.json"), ConfigError);
  write(dir / "type.json", R"({"corpus":"c","queries":"q","qrels":"r","k":"ten"})");
  EXPECT_THROW(PipelineConfig::from_json_file(dir / "type.json"), ConfigError);
  write(dir / "nested.json", R"({"corpus":"c","queries":"q","qrels":"r","sparsifier":{"topk":3}})");
  EXPECT_THROW(PipelineConfig::from_json_file(dir / "nested.json"), ConfigError);
  write(dir / "ok.json",
        R"({"corpus":"c","queries":"q","qrels":"r","mode":"mwmr","sparsifier":{"top_k":64},)"
        R"("fusion":{"weights":[0.3,0.7]},"bm25":{"enabled":false,"k1":1.2}})");
  auto ok = PipelineConfig::from_json_file(dir / "ok.json");
  EXPECT_EQ(ok.mode, RepMode::kMWMR);
  EXPECT_EQ(ok.sparsifier.top_k, 64u);
  EXPECT_EQ(ok.fusion.weights, (std::vector<double>{0.3, 0.7}));
  EXPECT_FALSE(ok.use_bm25);
  EXPECT_EQ(ok.bm25.k1, 1.2);
  EXPECT_EQ(ok.corpus, dir / "c");
  write(dir / "empty.json", R"({"corpus":"c","queries":"q","qrels":"r","doc_records":"","query_records":"",)"
                            R"("mock":{"lexicon":""}})");
  auto empty = PipelineConfig::from_json_file(dir / "empty.json");
  EXPECT_TRUE(empty.doc_records.empty());
  EXPECT_TRUE(empty.mock.lexicon.empty());
  EXPECT_THROW(PipelineConfig::from_json_file(dir / "absent.json"), IoError);
  fs::remove_all(dir);
}

TEST(Pipeline, ReproducesGoldenRuns) {
  auto c = PipelineConfig::from_json_file(kFixture / "config.json");
  c.work_dir = scratch("golden");
  auto out = run_pipeline(c);
  for (const auto& name : {"dense", "sparse", "hybrid", "bm25", "hybrid_bm25"}) {
    EXPECT_EQ(slurp(c.work_dir / "runs" / (std::string(name) + ".run")),
              slurp(kFixture / "golden" / (std::string(name) + ".run")))
        << name;
  }
  EXPECT_EQ(slurp(out.metrics), slurp(kFixture / "golden" / "metrics.tsv"));
  fs::remove_all(c.work_dir);
}

TEST(Pipeline, RecordsFromFilesMatchMockPath) {
  auto c = PipelineConfig::from_json_file(kFixture / "config.json");
  c.work_dir = scratch("mock");
  c.use_bm25 = false;
  auto first = run_pipeline(c);

  auto d = c;
  d.work_dir = scratch("records");
  d.doc_records = c.work_dir / "docs.jsonl";
  d.query_records = c.work_dir / "queries.jsonl";
  auto second = run_pipeline(d);
  EXPECT_EQ(slurp(first.hybrid_run), slurp(second.hybrid_run));
  EXPECT_TRUE(second.bm25_run.empty());
  fs::remove_all(c.work_dir);
  fs::remove_all(d.work_dir);
}

TEST(Pipeline, FullVocabularyLogitsMatchPairs) {
  auto c = PipelineConfig::from_json_file(kFixture / "config.json");
  c.work_dir = scratch("pairs");
  c.use_bm25 = false;
  auto pairs = run_pipeline(c);
  auto v = c;
  v.work_dir = scratch("vocab");
  v.mock_full_vocab = true;
  auto vocab = run_pipeline(v);
  EXPECT_EQ(slurp(pairs.sparse_run), slurp(vocab.sparse_run));
  fs::remove_all(c.work_dir);
  fs::remove_all(v.work_dir);
}

TEST(Pipeline, MultiTokenModesRun) {
  for (auto mode : {RepMode::kFWSR, RepMode::kMTSR, RepMode::kMTMR, RepMode::kMWMR}) {
    auto c = PipelineConfig::from_json_file(kFixture / "config.json");
    c.mode = mode;
    c.work_dir = scratch(to_string(mode));
    auto out = run_pipeline(c);
    const auto& t = out.tables.at("hybrid");
    ASSERT_EQ(t.mean.size(), 3u) << to_string(mode);
    for (double m : t.mean) {
      EXPECT_GE(m, 0.0);
      EXPECT_LE(m, 1.0);
    }
    auto again = run_pipeline(c);
    EXPECT_EQ(slurp(out.hybrid_run), slurp(again.hybrid_run));
    fs::remove_all(c.work_dir);
  }
}
