#include "promptreps/text.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "promptreps/error.hpp"

namespace promptreps {

const std::set<std::string>& english_stopwords() {
  static const std::set<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
      "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him",
      "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its",
      "itself", "they", "them", "their", "theirs", "themselves", "what", "which", "who",
      "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was",
      "were", "be", "been", "being", "have", "has", "had", "having", "do", "does", "did",
      "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
      "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
      "through", "during", "before", "after", "above", "below", "to", "from", "up",
      "down", "in", "out", "on", "off", "over", "under", "again", "further", "then",
      "once", "here", "there", "when", "where", "why", "how", "all", "any", "both",
      "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not", "only",
      "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don",
      "don't", "should", "should've", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain",
      "aren", "aren't", "couldn", "couldn't", "didn", "didn't", "doesn", "doesn't",
      "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn", "isn't", "ma",
      "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
      "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't",
      "wouldn", "wouldn't"};
  return words;
}

const std::set<std::string>& ascii_punctuation() {
  static const std::set<std::string> punct = [] {
    std::set<std::string> out;
    for (char c : std::string_view("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")) out.emplace(1, c);
    return out;
  }();
  return punct;
}

std::set<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    if (line[b] == '#' && e > b) continue;  // a lone "#" is an entry
    out.insert(line.substr(b, e - b + 1));
  }
  return out;
}

namespace {

char32_t lower_code_point(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x137 && c != 0x130) return (c % 2 == 0) ? c + 1 : c;
  if (c >= 0x139 && c <= 0x148) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return (c % 2 == 0) ? c + 1 : c;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c % 2 == 1) ? c + 1 : c;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  return c;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

struct Rule {
  std::regex pattern;
  std::string replacement;
};

Rule rule(const char* pattern, const char* replacement, bool icase = false) {
  auto flags = std::regex::ECMAScript;
  if (icase) flags |= std::regex::icase;
  return Rule{std::regex(pattern, flags), replacement};
}

void apply(std::string& text, const std::vector<Rule>& rules) {
  for (const auto& r : rules) text = std::regex_replace(text, r.pattern, r.replacement);
}

// An opening single quote not starting a clitic gets separated from the word
// that follows it.
void pad_opening_single_quotes(std::string& text) {
  static const char* clitics[] = {"re", "ve", "ll", "m", "t", "s", "d", "n"};
  std::string out;
  out.reserve(text.size() + 8);
  for (std::size_t i = 0; i < text.size(); ++i) {
    out += text[i];
    if (text[i] != '\'') continue;
    bool prev_word = i > 0 && is_word_byte(static_cast<unsigned char>(text[i - 1]));
    bool next_word = i + 1 < text.size() && is_word_byte(static_cast<unsigned char>(text[i + 1]));
    if (prev_word || !next_word) continue;
    bool clitic = false;
    for (const char* c : clitics) {
      std::size_t n = std::char_traits<char>::length(c);
      if (i + 1 + n > text.size()) continue;
      bool same = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (std::tolower(static_cast<unsigned char>(text[i + 1 + k])) != c[k]) same = false;
      }
      bool boundary = i + 1 + n == text.size() ||
                      !is_word_byte(static_cast<unsigned char>(text[i + 1 + n]));
      if (same && boundary) clitic = true;
    }
    if (!clitic) out += ' ';
  }
  text = std::move(out);
}

std::vector<std::string> tokenize_sentence(std::string text) {
  static const std::vector<Rule> starting = {
      rule("(\xC2\xAB|\xE2\x80\x9C|\xE2\x80\x98|\xE2\x80\x9E|`+)", " $1 "),
      rule("^\"", "``"),
      rule("(``)", " $1 "),
      rule("([ \\(\\[{<])(\"|'{2})", "$1 `` "),
  };
  static const std::vector<Rule> punctuation = {
      rule("([^\\.])(\\.)((?:[\\]\\)}>\"' ]|\xC2\xBB|\xE2\x80\x9D|\xE2\x80\x99)*)\\s*$",
           "$1 $2 $3 "),
      rule("([:,])([^\\d])", " $1 $2"),
      rule("([:,])$", " $1 "),
      rule("\\.{2,}", " $& "),
      rule("[;@#$%&]", " $& "),
      rule("\xE2\x80\x92|\xE2\x80\x93|\xE2\x80\x94|\xE2\x80\x95", " $& "),
      rule("([^\\.])(\\.)([\\]\\)}>\"']*)\\s*$", "$1 $2$3 "),
      rule("[?!]", " $& "),
      rule("([^'])' ", "$1 ' "),
      rule("[*]", " $& "),
      rule("[\\]\\[\\(\\)\\{\\}<>]", " $& "),
      rule("--", " -- "),
  };
  static const std::vector<Rule> ending = {
      rule("(\xC2\xBB|\xE2\x80\x9D|\xE2\x80\x99)", " $1 "),
      rule("''", " '' "),
      rule("\"", " '' "),
      rule("\\s+", " "),
      rule("([^' ])('[sS]|'[mM]|'[dD]|') ", "$1 $2 "),
      rule("([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) ", "$1 $2 "),
  };
  static const std::vector<Rule> contractions = {
      rule("\\b(can)(not)\\b", " $1 $2 ", true),
      rule("\\b(d)('ye)\\b", " $1 $2 ", true),
      rule("\\b(gim)(me)\\b", " $1 $2 ", true),
      rule("\\b(gon)(na)\\b", " $1 $2 ", true),
      rule("\\b(got)(ta)\\b", " $1 $2 ", true),
      rule("\\b(lem)(me)\\b", " $1 $2 ", true),
      rule("\\b(more)('n)\\b", " $1 $2 ", true),
      rule("\\b(wan)(na)(?=\\s)", " $1 $2 ", true),
      rule(" ('t)(is)\\b", " $1 $2 ", true),
      rule(" ('t)(was)\\b", " $1 $2 ", true),
  };

  apply(text, starting);
  pad_opening_single_quotes(text);
  apply(text, punctuation);
  text = " " + text + " ";
  apply(text, ending);
  apply(text, contractions);

  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool ends_sentence(std::string_view chunk) {
  static constexpr std::string_view closers[] = {"\"", "'", ")", "]", "}",
                                                 "\xC2\xBB", "\xE2\x80\x9D", "\xE2\x80\x99"};
  bool stripped = true;
  while (stripped && !chunk.empty()) {
    stripped = false;
    for (auto c : closers) {
      if (chunk.size() >= c.size() && chunk.substr(chunk.size() - c.size()) == c) {
        chunk.remove_suffix(c.size());
        stripped = true;
        break;
      }
    }
  }
  if (chunk.empty()) return false;
  char last = chunk.back();
  if (last == '?' || last == '!') return true;
  if (last != '.') return false;
  std::string_view core = chunk.substr(0, chunk.size() - 1);
  if (core.empty() || core.back() == '.') return false;               // ellipsis
  if (core.find('.') != std::string_view::npos) return false;         // abbreviation like u.s.
  if (core.size() == 1 && std::isalpha(static_cast<unsigned char>(core[0]))) return false;  // initial
  return true;
}

// Sentence segmentation: a sentence ends at a whitespace-delimited chunk
// closing with . ? or ! (optionally followed by closing quotes/brackets).
std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t chunk_begin = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (chunk_begin == i) break;
    if (ends_sentence(text.substr(chunk_begin, i - chunk_begin))) {
      out.push_back(text.substr(start, i - start));
      start = i;
    }
  }
  if (start < text.size()) out.push_back(text.substr(start));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string to_lower_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > text.size()) {
      out += text[i++];
      continue;
    }
    char32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
    bool valid = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) valid = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!valid) {
      out += text[i++];
      continue;
    }
    append_utf8(out, lower_code_point(cp));
    i += len;
  }
  return out;
}

std::vector<std::string> word_tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto sentence : split_sentences(text)) {
    std::string s = trim(sentence);
    if (s.empty()) continue;
    auto toks = tokenize_sentence(std::move(s));
    out.insert(out.end(), std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
  }
  return out;
}

std::vector<std::string> IdentityTokenizer::split(std::string_view word) const {
  if (word.empty()) return {};
  return {std::string(word)};
}

std::vector<std::string> TableTokenizer::split(std::string_view word) const {
  if (word.empty()) return {};
  if (auto it = table_.find(std::string(word)); it != table_.end()) return it->second;
  return {std::string(word)};
}

Vocabulary::Vocabulary(std::map<std::string, std::int64_t> token_to_id) {
  std::set<std::int64_t> ids;
  for (auto& [tok, id] : token_to_id) {
    if (id < 0) throw SchemaError("vocabulary id for \"" + tok + "\" is negative");
    if (!ids.insert(id).second) throw SchemaError("vocabulary id " + std::to_string(id) + " is duplicated");
    token_to_id_.emplace(tok, id);
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": malformed vocabulary JSON: " + e.what());
  }
  if (!j.is_object()) throw SchemaError(path.string() + ": vocabulary must be a JSON object");
  std::map<std::string, std::int64_t> m;
  for (const auto& [tok, id] : j.items()) {
    if (!id.is_number_integer()) throw SchemaError(path.string() + ": id of \"" + tok + "\" is not an integer");
    m.emplace(tok, id.get<std::int64_t>());
  }
  return Vocabulary(std::move(m));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [tok, id] : token_to_id_) j[tok] = id;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write vocabulary " + path.string());
  out << j.dump() << '\n';
}

bool Vocabulary::contains(std::string_view token) const { return token_to_id_.find(token) != token_to_id_.end(); }

std::int64_t Vocabulary::id_of(std::string_view token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? -1 : it->second;
}

GreedyVocabTokenizer::GreedyVocabTokenizer(const Vocabulary& vocab) : vocab_(vocab) {
  for (const auto& [tok, id] : vocab.entries()) max_token_bytes_ = std::max(max_token_bytes_, tok.size());
}

std::vector<std::string> GreedyVocabTokenizer::split(std::string_view word) const {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    std::size_t len = std::min(max_token_bytes_, word.size() - pos);
    for (; len > 0; --len) {
      if (vocab_.contains(word.substr(pos, len))) break;
    }
    if (len == 0) {
      // skip one UTF-8 code point
      std::size_t step = 1;
      while (pos + step < word.size() && (static_cast<unsigned char>(word[pos + step]) & 0xC0) == 0x80) ++step;
      pos += step;
      continue;
    }
    out.emplace_back(word.substr(pos, len));
    pos += len;
  }
  return out;
}

}  // namespace promptreps
