#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "promptreps/error.hpp"
#include "promptreps/mock_encoder.hpp"
#include "promptreps/multirep.hpp"
#include "promptreps/sparsifier.hpp"

using namespace promptreps;

TEST(MockEncoder, Deterministic) {
  MockEncoder a({}), b({});
  auto r1 = a.encode("d", "The quick brown fox jumps over the lazy dog.");
  auto r2 = b.encode("d", "The quick brown fox jumps over the lazy dog.");
  EXPECT_EQ(r1, r2);
  MockEncoderConfig other;
  other.seed = 99;
  EXPECT_NE(MockEncoder(other).encode("d", "The quick brown fox.").dense, r1.dense);
}

TEST(MockEncoder, UnitDenseAndWordLogits) {
  MockEncoder enc({});
  auto r = enc.encode("d", "Foxes chase rabbits.");
  ASSERT_EQ(r.dense.size(), 64u);
  double n = 0;
  for (float x : r.dense) n += double(x) * x;
  EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
  for (const char* w : {"foxes", "chase", "rabbits"}) {
    ASSERT_TRUE(r.logits.count(w)) << w;
    EXPECT_GE(r.logits.at(w), 1.0f);
  }
  EXPECT_EQ(r.logits.size(), 3u + 4u);
}

TEST(MockEncoder, EmptyText) {
  MockEncoder enc({});
  auto r = enc.encode("e", "");
  EXPECT_TRUE(r.logits.empty());
  ASSERT_EQ(r.dense.size(), 64u);
  double n = 0;
  for (float x : r.dense) n += double(x) * x;
  EXPECT_NEAR(n, 1.0, 1e-6);
}

TEST(MockEncoder, LexiconSharesDenseDirection) {
  MockEncoderConfig c;
  c.lexicon = {{"car", "vehicle"}, {"automobile", "vehicle"}};
  MockEncoder enc(c);
  EXPECT_EQ(enc.encode("a", "car").dense, enc.encode("b", "automobile").dense);
  EXPECT_NE(enc.encode("a", "car").logits, enc.encode("b", "automobile").logits);
}

TEST(MockEncoder, MoreSharedWordsMoreOverlap) {
  std::mt19937_64 rng(31);
  std::vector<std::string> words;
  for (int i = 0; i < 200; ++i) words.push_back("w" + std::to_string(i));
  MockEncoder enc({});
  auto cfg = SparsifierConfig::defaults();
  // Mean sparse dot product as a function of the number of shared words.
  std::vector<double> mean(5, 0.0);
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::string> pool = words;
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int shared = 0; shared < 5; ++shared) {
      std::string a, b;
      for (int i = 0; i < 6; ++i) a += pool[i] + " ";
      for (int i = 0; i < shared; ++i) b += pool[i] + " ";
      for (int i = shared; i < 6; ++i) b += pool[100 + i] + " ";
      auto ra = sparsify(enc.encode("a", a).logits, cfg);
      auto rb = sparsify(enc.encode("b", b).logits, cfg);
      mean[shared] += static_cast<double>(sparse_dot(ra, rb)) / trials;
    }
  }
  for (int s = 1; s < 5; ++s) EXPECT_GT(mean[s], mean[s - 1]);
}

TEST(MockEncoder, TokenSubRecords) {
  MockEncoderConfig c;
  c.emit_tokens = true;
  c.generated_words = 2;
  MockEncoder enc(c);
  auto r = enc.encode("d", "elephants walk slowly");
  auto gen = generated_tokens(r.tokens);
  ASSERT_FALSE(gen.empty());
  EXPECT_EQ(r.tokens.back().token, "\"");
  EXPECT_EQ(group_words(gen).size(), 2u);
  for (const auto& t : r.tokens) EXPECT_EQ(t.dense.size(), r.dense.size());
}

TEST(MockEncoder, VocabularyAndVectors) {
  MockEncoderConfig c;
  c.vocab_size = 10;
  MockEncoder enc(c);
  auto vocab = enc.build_vocabulary({"fox dog", "cat"});
  EXPECT_EQ(vocab.size(), 13u);
  EXPECT_EQ(vocab.id_of("cat"), 0);
  auto r = enc.encode("d", "fox dog");
  auto logits = r.logits;
  MockEncoder::to_vocab_logits(r, vocab);
  EXPECT_TRUE(r.logits.empty());
  ASSERT_EQ(r.vocab_logits.size(), 13u);
  EXPECT_EQ(r.vocab_logits[static_cast<std::size_t>(vocab.id_of("fox"))], logits.at("fox"));
  EXPECT_EQ(r.vocab_logits[static_cast<std::size_t>(vocab.id_of("cat"))], -1.0f);
}

TEST(MockEncoder, BadConfig) {
  MockEncoderConfig c;
  c.dim = 0;
  EXPECT_THROW(MockEncoder{c}, ConfigError);
  EXPECT_THROW(load_lexicon("/nonexistent/lexicon.tsv"), IoError);
}
