#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptreps {

/// NLTK's English stopword list (179 entries), lowercase.
const std::set<std::string>& english_stopwords();

/// Python's `string.punctuation`, one single-character string per entry.
const std::set<std::string>& ascii_punctuation();

/// Reads a newline-separated word list. Blank lines and lines starting with
/// `#` plus further text are skipped; a line holding only `#` is an entry.
std::set<std::string> load_word_list(const std::filesystem::path& path);

/// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters
/// in a UTF-8 string. Other code points pass through unchanged.
std::string to_lower_utf8(std::string_view text);

/// Treebank-style word tokenization compatible with NLTK's `word_tokenize`
/// on ordinary English prose: sentence-final periods, clitics (n't, 's, 're,
/// ...), quotes (rewritten to `` and ''), brackets, and separators are split
/// off. Input case is preserved.
std::vector<std::string> word_tokenize(std::string_view text);

/// Splits one word into the sub-word token strings an LLM tokenizer would
/// produce. Implementations must be deterministic.
class SubwordTokenizer {
 public:
  virtual ~SubwordTokenizer() = default;
  virtual std::vector<std::string> split(std::string_view word) const = 0;
};

/// Every word is a single token.
class IdentityTokenizer final : public SubwordTokenizer {
 public:
  std::vector<std::string> split(std::string_view word) const override;
};

/// Explicit word -> pieces table; unlisted words map to themselves.
class TableTokenizer final : public SubwordTokenizer {
 public:
  explicit TableTokenizer(std::map<std::string, std::vector<std::string>> table)
      : table_(std::move(table)) {}
  std::vector<std::string> split(std::string_view word) const override;

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

/// Token vocabulary loaded from a JSON object {token: id}. Ids must be
/// unique; they index full-vocabulary logit vectors.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::map<std::string, std::int64_t> token_to_id);

  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return token_to_id_.size(); }
  bool contains(std::string_view token) const;
  /// -1 when absent.
  std::int64_t id_of(std::string_view token) const;
  const std::map<std::string, std::int64_t, std::less<>>& entries() const { return token_to_id_; }

 private:
  std::map<std::string, std::int64_t, std::less<>> token_to_id_;
};

/// Greedy longest-prefix segmentation over a vocabulary. Characters with no
/// matching vocabulary prefix are skipped.
class GreedyVocabTokenizer final : public SubwordTokenizer {
 public:
  explicit GreedyVocabTokenizer(const Vocabulary& vocab);
  std::vector<std::string> split(std::string_view word) const override;

 private:
  const Vocabulary& vocab_;
  std::size_t max_token_bytes_ = 0;
};

}  // namespace promptreps
