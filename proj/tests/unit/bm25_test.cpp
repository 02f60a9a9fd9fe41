#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "promptreps/bm25.hpp"
#include "promptreps/error.hpp"

using namespace promptreps;

namespace {

const std::vector<std::string> kWords = {"fox", "dog", "cat", "bird", "tree", "river", "stone", "cloud", "road", "lamp"};

std::vector<std::pair<std::string, std::string>> random_corpus(std::mt19937_64& rng, int n) {
  std::vector<std::pair<std::string, std::string>> c;
  for (int d = 0; d < n; ++d) {
    std::string text;
    int len = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) text += (i ? " " : "") + kWords[rng() % kWords.size()];
    c.emplace_back("d" + std::to_string(d), text);
  }
  return c;
}

std::vector<std::vector<std::string>> split(const std::vector<std::pair<std::string, std::string>>& c) {
  std::vector<std::vector<std::string>> out;
  for (const auto& [id, text] : c) {
    std::vector<std::string> words;
    std::string w;
    for (char ch : text + " ") {
      if (ch == ' ') {
        if (!w.empty()) words.push_back(w);
        w.clear();
      } else {
        w += ch;
      }
    }
    out.push_back(words);
  }
  return out;
}

}  // namespace

TEST(Bm25, TermStatistics) {
  auto idx = build_bm25({{"d", "fox fox dog"}});
  EXPECT_EQ(idx.postings().at("fox"), (std::vector<Posting>{{0, 2}}));
  EXPECT_EQ(idx.postings().at("dog"), (std::vector<Posting>{{0, 1}}));
  EXPECT_EQ(idx.doc_lengths(), (std::vector<std::uint32_t>{3}));
  EXPECT_DOUBLE_EQ(idx.average_length(), 3.0);
  EXPECT_EQ(idx.document_frequency("fox"), 1u);
  EXPECT_EQ(idx.document_frequency("cat"), 0u);
}

TEST(Bm25, EmptyCorpusAndErrors) {
  auto idx = build_bm25({});
  EXPECT_EQ(idx.doc_count(), 0u);
  EXPECT_TRUE(search_bm25(idx, "fox", 10).entries.empty());
  EXPECT_THROW(build_bm25({{"a", "x"}, {"a", "y"}}), BuildError);
}

TEST(Bm25, SearchExamples) {
  auto idx = build_bm25({{"d1", "fox"}, {"d2", "dog"}});
  auto r = search_bm25(idx, "fox", 10);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].doc_id, "d1");
  EXPECT_TRUE(search_bm25(idx, "zebra unicorn", 10).entries.empty());
}

TEST(Bm25, Analyzer) {
  EXPECT_EQ(bm25_terms("The Fox, the dog.", false), (std::vector<std::string>{"the", "fox", "the", "dog"}));
  EXPECT_EQ(bm25_terms("The Fox, the dog.", true), (std::vector<std::string>{"fox", "dog"}));
}

TEST(Bm25, FiveDocFormula) {
  std::vector<std::pair<std::string, std::string>> corpus = {
      {"a", "fox dog"}, {"b", "fox fox fox cat"}, {"c", "bird"}, {"d", "dog dog tree river"}, {"e", "fox"}};
  auto idx = build_bm25(corpus);
  auto toks = split(corpus);
  EXPECT_NEAR(idx.idf(3), std::log(1.0 + (5 - 3 + 0.5) / (3 + 0.5)), 1e-12);
  auto r = search_bm25(idx, "fox dog", 10);
  for (const auto& e : r.entries) {
    std::size_t ord = static_cast<std::size_t>(e.doc_id[0] - 'a');
    EXPECT_NEAR(e.score, oracle::bm25(toks, ord, {"fox", "dog"}, 0.9, 0.4), 1e-6);
  }
  EXPECT_EQ(r.entries.size(), 4u);
}

TEST(Bm25, TwentyDocFormula) {
  std::mt19937_64 rng(12);
  auto corpus = random_corpus(rng, 20);
  auto toks = split(corpus);
  std::vector<std::vector<std::string>> queries = {
      {"fox"}, {"dog", "cat"}, {"river", "stone", "road"}, {"lamp", "lamp"}, {"tree", "bird", "cloud", "fox"}};
  for (double k1 : {0.9, 1.2}) {
    for (double b : {0.4, 0.75}) {
      auto idx = build_bm25(corpus, {k1, b, false});
      for (const auto& q : queries) {
        std::string text;
        for (const auto& w : q) text += w + " ";
        auto r = search_bm25(idx, text, 100);
        std::size_t positive = 0;
        for (std::size_t d = 0; d < toks.size(); ++d) positive += oracle::bm25(toks, d, q, k1, b) > 0;
        EXPECT_EQ(r.entries.size(), positive);
        for (const auto& e : r.entries) {
          std::size_t ord = std::stoul(e.doc_id.substr(1));
          EXPECT_NEAR(e.score, oracle::bm25(toks, ord, q, k1, b), 1e-6);
        }
      }
    }
  }
}

TEST(Bm25, SaveLoadPreservesScores) {
  std::mt19937_64 rng(6);
  auto corpus = random_corpus(rng, 25);
  auto idx = build_bm25(corpus, {1.1, 0.6, true});
  auto path = std::filesystem::temp_directory_path() / "promptreps_bm25_test.idx";
  idx.save(path);
  auto back = Bm25Index::load(path);
  EXPECT_EQ(back.params().k1, 1.1);
  EXPECT_TRUE(back.params().remove_stopwords);
  EXPECT_EQ(search_bm25(back, "fox river", 10), search_bm25(idx, "fox river", 10));
  std::filesystem::remove(path);
}
