#include "promptreps/bm25.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include "promptreps/binary_io.hpp"
#include "promptreps/error.hpp"
#include "promptreps/sparsifier.hpp"
#include "promptreps/text.hpp"

namespace promptreps {

Bm25Index::Bm25Index(DocTable docs, std::vector<std::uint32_t> lengths, PostingsMap postings,
                     Bm25Params params)
    : docs_(std::move(docs)), lengths_(std::move(lengths)), postings_(std::move(postings)), params_(params) {
  if (lengths_.size() != docs_.size()) throw BuildError("bm25 length table does not match doc_count");
  double total = 0.0;
  for (auto l : lengths_) total += l;
  avg_len_ = docs_.empty() ? 0.0 : total / static_cast<double>(docs_.size());
}

double Bm25Index::idf(std::size_t df) const {
  const double n = static_cast<double>(docs_.size());
  const double d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::size_t Bm25Index::document_frequency(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

void Bm25Index::save(const std::filesystem::path& path) const {
  binary::Writer w;
  detail::write_header(w, detail::PostingsKind::kTermFrequency, docs_);
  w.f64(params_.k1);
  w.f64(params_.b);
  w.u8(params_.remove_stopwords ? 1 : 0);
  for (auto l : lengths_) w.u32(l);
  detail::write_postings(w, postings_);
  w.save(path);
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  auto r = binary::Reader::open(path);
  auto docs = detail::read_header(r, detail::PostingsKind::kTermFrequency);
  Bm25Params params;
  params.k1 = r.f64();
  params.b = r.f64();
  params.remove_stopwords = r.u8() != 0;
  std::vector<std::uint32_t> lengths(docs.size());
  for (auto& l : lengths) l = r.u32();
  auto postings = detail::read_postings(r, docs.size());
  return Bm25Index(std::move(docs), std::move(lengths), std::move(postings), params);
}

std::vector<std::string> bm25_terms(std::string_view text, bool remove_stopwords) {
  SparsifierConfig cfg;
  cfg.punctuation = ascii_punctuation();
  if (remove_stopwords) cfg.stopwords = english_stopwords();
  return extract_words(text, cfg).words;
}

Bm25Index build_bm25(const std::vector<std::pair<std::string, std::string>>& corpus, Bm25Params params) {
  DocTable docs;
  std::vector<std::uint32_t> lengths;
  PostingsMap postings;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& [doc_id, text] = corpus[i];
    if (!seen.insert(doc_id).second) throw BuildError("duplicate doc_id \"" + doc_id + "\"");
    auto terms = bm25_terms(text, params.remove_stopwords);
    std::map<std::string, std::uint32_t> tf;
    for (auto& t : terms) ++tf[t];
    for (const auto& [t, f] : tf) postings[t].push_back({static_cast<std::uint32_t>(i), f});
    docs.push_back(doc_id);
    lengths.push_back(static_cast<std::uint32_t>(terms.size()));
  }
  return Bm25Index(std::move(docs), std::move(lengths), std::move(postings), params);
}

RunList search_bm25(const Bm25Index& index, std::string_view query_text, std::size_t k,
                    const std::string& query_id) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::map<std::string, std::uint32_t> qtf;
  for (auto& t : bm25_terms(query_text, index.params().remove_stopwords)) ++qtf[t];

  const auto& p = index.params();
  const double avg = index.average_length();
  std::vector<double> acc(index.doc_count(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& [term, count] : qtf) {
    auto it = index.postings().find(term);
    if (it == index.postings().end()) continue;
    const double idf = index.idf(it->second.size());
    for (const auto& posting : it->second) {
      const double tf = posting.value;
      const double len_norm = avg > 0.0 ? index.doc_lengths()[posting.doc] / avg : 0.0;
      const double part = tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * len_norm));
      if (acc[posting.doc] == 0.0) touched.push_back(posting.doc);
      acc[posting.doc] += count * idf * part;
    }
  }
  return detail::top_k_from_accumulator(acc, touched, index.doc_table(), k, query_id);
}

}  // namespace promptreps
