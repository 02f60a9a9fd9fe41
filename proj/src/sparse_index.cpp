#include "promptreps/sparse_index.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_set>

#include "promptreps/binary_io.hpp"
#include "promptreps/error.hpp"

namespace promptreps {

namespace detail {

void write_header(binary::Writer& w, PostingsKind kind, const DocTable& docs) {
  w.bytes(std::string_view(kPostingsMagic, 4));
  w.u32(kPostingsVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u64(docs.size());
  for (const auto& d : docs) w.str(d);
}

DocTable read_header(binary::Reader& r, PostingsKind kind) {
  r.expect_magic(std::string_view(kPostingsMagic, 4));
  auto version = r.u32();
  if (version != kPostingsVersion) r.fail("unsupported version " + std::to_string(version));
  auto stored = r.u8();
  if (stored != static_cast<std::uint8_t>(kind)) {
    r.fail("index kind " + std::to_string(stored) + " does not match expected kind " +
           std::to_string(static_cast<int>(kind)));
  }
  auto n = r.u64();
  // each doc table entry needs at least its 4-byte length prefix
  if (n > r.remaining() / 4) r.fail("doc_count exceeds file size");
  DocTable docs;
  docs.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) docs.push_back(r.str());
  return docs;
}

void write_postings(binary::Writer& w, const PostingsMap& postings) {
  w.u64(postings.size());
  for (const auto& [token, list] : postings) {
    w.str(token);
    w.u64(list.size());
    std::uint32_t prev = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      w.varint(i == 0 ? list[i].doc : list[i].doc - prev);
      w.varint(list[i].value);
      prev = list[i].doc;
    }
  }
}

PostingsMap read_postings(binary::Reader& r, std::size_t doc_count) {
  PostingsMap postings;
  auto terms = r.u64();
  for (std::uint64_t t = 0; t < terms; ++t) {
    auto token = r.str();
    auto n = r.u64();
    if (n > doc_count) r.fail("postings list for \"" + token + "\" longer than doc_count");
    std::vector<Posting> list;
    list.reserve(n);
    std::uint64_t doc = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      auto delta = r.varint();
      if (i > 0 && delta == 0) r.fail("non-ascending ordinals for \"" + token + "\"");
      doc = i == 0 ? delta : doc + delta;
      auto value = r.varint();
      if (doc >= doc_count) r.fail("ordinal out of range for \"" + token + "\"");
      if (value == 0 || value > UINT32_MAX) r.fail("invalid posting value for \"" + token + "\"");
      list.push_back({static_cast<std::uint32_t>(doc), static_cast<std::uint32_t>(value)});
    }
    postings.emplace(std::move(token), std::move(list));
  }
  if (!r.at_end()) r.fail("trailing bytes");
  return postings;
}

template <typename Score>
RunList top_k_from_accumulator(const std::vector<Score>& acc, const std::vector<std::uint32_t>& touched,
                               const DocTable& docs, std::size_t k, const std::string& query_id) {
  RunList run;
  run.query_id = query_id;
  std::vector<std::uint32_t> hits;
  hits.reserve(touched.size());
  for (auto d : touched) {
    if (acc[d] > 0) hits.push_back(d);
  }
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (acc[a] != acc[b]) return acc[a] > acc[b];
    return docs[a] < docs[b];
  };
  std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);
  run.entries.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    run.entries.push_back({docs[hits[i]], static_cast<double>(acc[hits[i]])});
  }
  return run;
}

template RunList top_k_from_accumulator<std::int64_t>(const std::vector<std::int64_t>&,
                                                      const std::vector<std::uint32_t>&,
                                                      const DocTable&, std::size_t,
                                                      const std::string&);
template RunList top_k_from_accumulator<double>(const std::vector<double>&,
                                                const std::vector<std::uint32_t>&,
                                                const DocTable&, std::size_t, const std::string&);

}  // namespace detail

InvertedIndex::InvertedIndex(DocTable docs, PostingsMap postings)
    : docs_(std::move(docs)), postings_(std::move(postings)) {}

void InvertedIndex::save(const std::filesystem::path& path) const {
  binary::Writer w;
  detail::write_header(w, detail::PostingsKind::kImpact, docs_);
  detail::write_postings(w, postings_);
  w.save(path);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  auto r = binary::Reader::open(path);
  auto docs = detail::read_header(r, detail::PostingsKind::kImpact);
  auto postings = detail::read_postings(r, docs.size());
  return InvertedIndex(std::move(docs), std::move(postings));
}

void InvertedIndex::dump(std::ostream& out) const {
  out << "# docs " << docs_.size() << " terms " << postings_.size() << '\n';
  for (const auto& [token, list] : postings_) {
    out << token << '\t' << list.size() << '\t';
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i) out << ' ';
      out << docs_[list[i].doc] << ':' << list[i].value;
    }
    out << '\n';
  }
}

InvertedIndex build_sparse_index(const std::vector<std::pair<std::string, SparseRep>>& reps) {
  DocTable docs;
  docs.reserve(reps.size());
  std::unordered_set<std::string> seen;
  PostingsMap postings;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& [doc_id, rep] = reps[i];
    if (!seen.insert(doc_id).second) throw BuildError("duplicate doc_id \"" + doc_id + "\"");
    docs.push_back(doc_id);
    for (const auto& [token, weight] : rep) {
      if (weight < 1) {
        throw BuildError("doc \"" + doc_id + "\" has non-positive impact for \"" + token + "\"");
      }
      postings[token].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(weight)});
    }
  }
  return InvertedIndex(std::move(docs), std::move(postings));
}

RunList search_sparse(const InvertedIndex& index, const SparseRep& query, std::size_t k,
                      const std::string& query_id) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<std::int64_t> acc(index.doc_count(), 0);
  std::vector<std::uint32_t> touched;
  for (const auto& [token, qw] : query) {
    if (qw <= 0) continue;
    auto it = index.postings().find(token);
    if (it == index.postings().end()) continue;
    for (const auto& p : it->second) {
      if (acc[p.doc] == 0) touched.push_back(p.doc);
      acc[p.doc] += static_cast<std::int64_t>(qw) * p.value;
    }
  }
  return detail::top_k_from_accumulator(acc, touched, index.doc_table(), k, query_id);
}

}  // namespace promptreps
