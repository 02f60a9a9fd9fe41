#include "promptreps/mock_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "promptreps/error.hpp"
#include "promptreps/sparsifier.hpp"

namespace promptreps {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic stream keyed by (seed, domain, key).
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view domain, std::string_view key)
      : state_(fnv1a(key, fnv1a(domain, fnv1a(std::to_string(seed))))) {}

  double uniform() { return static_cast<double>(splitmix(state_) >> 11) * 0x1.0p-53; }

  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t next() { return splitmix(state_); }

 private:
  std::uint64_t state_;
};

std::vector<std::string> pieces_of(const std::string& word) {
  if (word.size() > 5) return {word.substr(0, 3), word.substr(3)};
  return {word};
}

}  // namespace

MockEncoder::MockEncoder(MockEncoderConfig config) : config_(std::move(config)), words_(SparsifierConfig::defaults()) {
  if (config_.dim == 0) throw ConfigError("mock encoder dim must be >= 1");
  if (config_.vocab_size == 0) throw ConfigError("mock encoder vocab size must be >= 1");
}

std::string MockEncoder::concept_of(const std::string& word) const {
  auto it = config_.lexicon.find(word);
  return it == config_.lexicon.end() ? word : it->second;
}

DenseVector MockEncoder::concept_vector(const std::string& key) const {
  Stream s(config_.seed, "dense", key);
  DenseVector v(config_.dim);
  for (auto& x : v) x = static_cast<float>(s.gaussian());
  return v;
}

RepresentationRecord MockEncoder::encode(const std::string& id, std::string_view text) const {
  RepresentationRecord rec;
  rec.id = id;
  auto words = extract_words(text, words_).words;

  std::vector<double> sum(config_.dim, 0.0);
  if (words.empty()) {
    auto v = concept_vector("<empty>");
    for (std::size_t i = 0; i < config_.dim; ++i) sum[i] = v[i];
  }
  for (const auto& w : words) {
    auto v = concept_vector(concept_of(w));
    for (std::size_t i = 0; i < config_.dim; ++i) sum[i] += v[i];
  }
  double norm = 0.0;
  for (double x : sum) norm += x * x;
  norm = std::sqrt(norm);
  rec.dense.resize(config_.dim);
  for (std::size_t i = 0; i < config_.dim; ++i) rec.dense[i] = static_cast<float>(norm > 0 ? sum[i] / norm : 0.0);

  if (words.empty()) return rec;

  std::set<std::string> distinct(words.begin(), words.end());
  for (const auto& w : distinct) {
    Stream s(config_.seed, "logit", w);
    rec.logits[w] = static_cast<float>(1.0 + 2.5 * s.uniform());
  }
  Stream noise(config_.seed, "noise", text);
  for (std::size_t j = 0; j < config_.noise_entries; ++j) {
    std::string tok = "tok" + std::to_string(noise.next() % config_.vocab_size);
    rec.logits.emplace(tok, static_cast<float>(-2.0 + 2.3 * noise.uniform()));
  }

  if (config_.emit_tokens) {
    // "Generated" words: the highest-valued content words.
    std::vector<std::pair<float, std::string>> ranked;
    for (const auto& w : distinct) ranked.emplace_back(rec.logits.at(w), w);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    ranked.resize(std::min(ranked.size(), config_.generated_words));
    for (std::size_t wi = 0; wi < ranked.size(); ++wi) {
      const auto& word = ranked[wi].second;
      auto word_vec = concept_vector(concept_of(word));
      auto pieces = pieces_of(word);
      for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
        TokenRecord t;
        t.token = (wi > 0 && pi == 0 ? " " : "") + pieces[pi];
        auto piece_vec = concept_vector("piece:" + pieces[pi]);
        t.dense.resize(config_.dim);
        for (std::size_t i = 0; i < config_.dim; ++i) {
          t.dense[i] = static_cast<float>(word_vec[i] + 0.3 * piece_vec[i] + 0.5 * rec.dense[i]);
        }
        Stream s(config_.seed, "token", word + "#" + std::to_string(pi));
        for (const auto& [tok, v] : rec.logits) {
          float boost = tok == word ? 1.0f : static_cast<float>(-0.5 * s.uniform());
          t.logits[tok] = v + boost;
        }
        rec.tokens.push_back(std::move(t));
      }
    }
    TokenRecord end;
    end.token = "\"";
    end.dense = rec.dense;
    rec.tokens.push_back(std::move(end));
  }
  return rec;
}

void MockEncoder::to_vocab_logits(RepresentationRecord& record, const Vocabulary& vocab) {
  record.vocab_logits.assign(vocab.size(), -1.0f);
  for (const auto& [tok, v] : record.logits) {
    auto id = vocab.id_of(tok);
    if (id >= 0 && static_cast<std::size_t>(id) < vocab.size()) record.vocab_logits[static_cast<std::size_t>(id)] = v;
  }
  record.logits.clear();
}

Vocabulary MockEncoder::build_vocabulary(const std::vector<std::string>& texts) const {
  std::set<std::string> tokens;
  for (const auto& t : texts) {
    for (auto& w : extract_words(t, words_).words) tokens.insert(std::move(w));
  }
  for (std::size_t i = 0; i < config_.vocab_size; ++i) tokens.insert("tok" + std::to_string(i));
  std::map<std::string, std::int64_t> m;
  std::int64_t id = 0;
  for (const auto& t : tokens) m.emplace(t, id++);
  return Vocabulary(std::move(m));
}

std::map<std::string, std::string> load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError("lexicon line must be word<TAB>concept", line_no, path);
    }
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

}  // namespace promptreps
