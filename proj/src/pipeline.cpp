#include "promptreps/pipeline.hpp"

#include <fstream>
#include <iomanip>
#include <set>

#include <json.hpp>

#include "promptreps/error.hpp"
#include "promptreps/fusion.hpp"
#include "promptreps/sparsifier.hpp"

namespace promptreps {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Document> load_corpus(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  std::vector<Document> docs;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no, path.string());
    }
    auto id = obj.find("_id");
    if (!obj.is_object() || id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
      throw ParseError("corpus line needs a non-empty string \"_id\"", line_no, path.string());
    }
    std::string title = obj.value("title", std::string());
    std::string text = obj.value("text", std::string());
    Document d{id->get<std::string>(), title.empty() ? text : title + " " + text};
    if (!seen.insert(d.id).second) throw SchemaError(path.string() + ": duplicate _id \"" + d.id + "\"");
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Document> load_queries(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open queries " + path.string());
  std::vector<Document> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError("query line must be qid<TAB>text", line_no, path.string());
    Document q{line.substr(0, tab), line.substr(tab + 1)};
    if (!seen.insert(q.id).second) throw SchemaError(path.string() + ": duplicate query id \"" + q.id + "\"");
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Document> load_texts(const fs::path& path) {
  return path.extension() == ".tsv" ? load_queries(path) : load_corpus(path);
}

SparseRep record_sparse_rep(const RepresentationRecord& record, RepMode mode, const SparsifierConfig& config,
                            const VocabContext& vocab) {
  if (mode == RepMode::kFTSR && record.has_vocab_logits()) {
    if (vocab.vocab == nullptr || vocab.texts == nullptr) {
      throw ConfigError("record \"" + record.id +
                        "\" carries full-vocabulary logits; a vocabulary file and the source texts are required");
    }
    auto it = vocab.texts->find(record.id);
    if (it == vocab.texts->end()) throw SchemaError("no source text for record \"" + record.id + "\"");
    GreedyVocabTokenizer tokenizer(*vocab.vocab);
    auto keys = words_to_token_keys(extract_words(it->second, config), tokenizer);
    return sparsify(select_vocab_logits(record.vocab_logits, *vocab.vocab, keys), keys, config);
  }
  return sparsify(single_rep(record, mode).logits, config);
}

DenseVector record_dense(const RepresentationRecord& record, RepMode mode) {
  return single_rep(record, mode).dense;
}

DenseIndex index_dense_records(const std::vector<RepresentationRecord>& records, RepMode mode) {
  std::vector<std::pair<std::string, DenseVector>> reps;
  reps.reserve(records.size());
  for (const auto& r : records) reps.emplace_back(r.id, record_dense(r, mode));
  return build_dense_index(reps);
}

InvertedIndex index_sparse_records(const std::vector<RepresentationRecord>& records, RepMode mode,
                                   const SparsifierConfig& config, const VocabContext& vocab) {
  std::vector<std::pair<std::string, SparseRep>> reps;
  reps.reserve(records.size());
  for (const auto& r : records) reps.emplace_back(r.id, record_sparse_rep(r, mode, config, vocab));
  return build_sparse_index(reps);
}

Bm25Index index_bm25_documents(const std::vector<Document>& corpus, const Bm25Params& params) {
  std::vector<std::pair<std::string, std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& d : corpus) docs.emplace_back(d.id, d.text);
  return build_bm25(docs, params);
}

RunSet search_dense_records(const DenseIndex& index, const std::vector<RepresentationRecord>& queries,
                            RepMode mode, std::size_t k) {
  RunSet out;
  for (const auto& q : queries) out[q.id] = search_dense(index, record_dense(q, mode), k, q.id);
  return out;
}

RunSet search_sparse_records(const InvertedIndex& index, const std::vector<RepresentationRecord>& queries,
                             RepMode mode, const SparsifierConfig& config, std::size_t k,
                             const VocabContext& vocab) {
  RunSet out;
  for (const auto& q : queries) out[q.id] = search_sparse(index, record_sparse_rep(q, mode, config, vocab), k, q.id);
  return out;
}

RunSet search_bm25_documents(const Bm25Index& index, const std::vector<Document>& queries, std::size_t k) {
  RunSet out;
  for (const auto& q : queries) out[q.id] = search_bm25(index, q.text, k, q.id);
  return out;
}

RunSet search_multirep_records(const std::vector<RepresentationRecord>& docs,
                               const std::vector<RepresentationRecord>& queries, RepMode mode, ScoreKind kind,
                               const SparsifierConfig& config, std::size_t k) {
  std::vector<std::pair<std::string, MultiRep>> doc_reps;
  doc_reps.reserve(docs.size());
  for (const auto& d : docs) doc_reps.emplace_back(d.id, build_multirep(d, mode, config));
  RunSet out;
  for (const auto& q : queries) {
    out[q.id] = search_multirep(doc_reps, build_multirep(q, mode, config), kind, k, q.id);
  }
  return out;
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key \"" + key + "\" in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key \"" + std::string(key) + "\" in " + where + " has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw ConfigError("config key \"" + std::string(key) + "\" must be a path string");
  fs::path p = it->get<std::string>();
  if (p.empty()) return {};
  return p.is_absolute() ? p : base / p;
}

}  // namespace

PipelineConfig PipelineConfig::from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  const std::string where = path.string();
  check_keys(j, {"corpus", "queries", "qrels", "doc_records", "query_records", "vocab", "work_dir", "mode", "k",
                 "metrics", "recall_min_grade", "gain", "sparsifier", "fusion", "bm25", "mock"},
             where);
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  PipelineConfig c;
  c.corpus = resolve(base, j, "corpus");
  c.queries = resolve(base, j, "queries");
  c.qrels = resolve(base, j, "qrels");
  c.doc_records = resolve(base, j, "doc_records");
  c.query_records = resolve(base, j, "query_records");
  c.vocab = resolve(base, j, "vocab");
  if (auto w = resolve(base, j, "work_dir"); !w.empty()) c.work_dir = w;
  c.mode = parse_rep_mode(get_or<std::string>(j, "mode", "ftsr", where));
  c.k = get_or<std::size_t>(j, "k", c.k, where);

  int min_grade = get_or<int>(j, "recall_min_grade", 1, where);
  std::string gain = get_or<std::string>(j, "gain", "exponential", where);
  if (gain != "exponential" && gain != "linear") throw ConfigError("gain must be \"exponential\" or \"linear\"");
  if (j.contains("metrics")) {
    c.metrics.clear();
    for (const auto& m : get_or<std::vector<std::string>>(j, "metrics", {}, where)) c.metrics.push_back(MetricSpec::parse(m));
  }
  for (auto& m : c.metrics) {
    if (m.kind == MetricKind::kRecall) m.min_grade = min_grade;
    m.gain = gain == "linear" ? Gain::kLinear : Gain::kExponential;
  }

  if (auto s = j.find("sparsifier"); s != j.end()) {
    check_keys(*s, {"top_k", "quant_scale", "stopwords", "punctuation"}, where + " sparsifier");
    c.sparsifier.top_k = get_or<std::size_t>(*s, "top_k", c.sparsifier.top_k, where);
    c.sparsifier.quant_scale = get_or<std::int32_t>(*s, "quant_scale", c.sparsifier.quant_scale, where);
    if (auto p = resolve(base, *s, "stopwords"); !p.empty()) c.sparsifier.stopwords = load_word_list(p);
    if (auto p = resolve(base, *s, "punctuation"); !p.empty()) c.sparsifier.punctuation = load_word_list(p);
  }
  if (auto f = j.find("fusion"); f != j.end()) {
    check_keys(*f, {"weights", "candidate_depth"}, where + " fusion");
    c.fusion.weights = get_or<std::vector<double>>(*f, "weights", {}, where);
    c.fusion.candidate_depth = get_or<std::size_t>(*f, "candidate_depth", c.fusion.candidate_depth, where);
  }
  if (auto b = j.find("bm25"); b != j.end()) {
    check_keys(*b, {"enabled", "k1", "b", "remove_stopwords"}, where + " bm25");
    c.use_bm25 = get_or<bool>(*b, "enabled", c.use_bm25, where);
    c.bm25.k1 = get_or<double>(*b, "k1", c.bm25.k1, where);
    c.bm25.b = get_or<double>(*b, "b", c.bm25.b, where);
    c.bm25.remove_stopwords = get_or<bool>(*b, "remove_stopwords", c.bm25.remove_stopwords, where);
  }
  if (auto m = j.find("mock"); m != j.end()) {
    check_keys(*m, {"dim", "vocab_size", "seed", "noise_entries", "generated_words", "lexicon", "full_vocab"},
               where + " mock");
    c.mock.dim = get_or<std::size_t>(*m, "dim", c.mock.dim, where);
    c.mock.vocab_size = get_or<std::size_t>(*m, "vocab_size", c.mock.vocab_size, where);
    c.mock.seed = get_or<std::uint64_t>(*m, "seed", c.mock.seed, where);
    c.mock.noise_entries = get_or<std::size_t>(*m, "noise_entries", c.mock.noise_entries, where);
    c.mock.generated_words = get_or<std::size_t>(*m, "generated_words", c.mock.generated_words, where);
    if (auto p = resolve(base, *m, "lexicon"); !p.empty()) c.mock.lexicon = load_lexicon(p.string());
    c.mock_full_vocab = get_or<bool>(*m, "full_vocab", false, where);
  }
  c.validate();
  return c;
}

void PipelineConfig::validate() const {
  if (corpus.empty()) throw ConfigError("pipeline needs a corpus path");
  if (queries.empty()) throw ConfigError("pipeline needs a queries path");
  if (qrels.empty()) throw ConfigError("pipeline needs a qrels path");
  if (doc_records.empty() != query_records.empty()) {
    throw ConfigError("doc_records and query_records must be given together (or both omitted for the mock encoder)");
  }
  if (k < 1) throw ConfigError("k must be >= 1");
  if (mock_full_vocab && mode != RepMode::kFTSR) throw ConfigError("full-vocabulary logits are only supported in ftsr mode");
  sparsifier.validate();
  fusion.resolved_weights(2);
}

void write_pipeline_metrics(const fs::path& path, const std::vector<std::pair<std::string, MetricTable>>& tables) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write metrics " + path.string());
  out << "run\tmetric\tvalue\n" << std::fixed << std::setprecision(6);
  for (const auto& [name, table] : tables) {
    for (std::size_t m = 0; m < table.metric_names.size(); ++m) {
      out << name << '\t' << table.metric_names[m] << '\t' << table.mean[m] << '\n';
    }
  }
}

PipelineOutputs run_pipeline(const PipelineConfig& config) {
  config.validate();
  const auto corpus = load_corpus(config.corpus);
  const auto queries = load_queries(config.queries);
  const auto qrels = read_qrels_file(config.qrels);

  fs::create_directories(config.work_dir / "index");
  fs::create_directories(config.work_dir / "runs");

  std::vector<RepresentationRecord> doc_records, query_records;
  Vocabulary vocab;
  fs::path vocab_path = config.vocab;
  if (config.doc_records.empty()) {
    MockEncoderConfig mc = config.mock;
    mc.emit_tokens = config.mode != RepMode::kFTSR;
    MockEncoder encoder(mc);
    for (const auto& d : corpus) doc_records.push_back(encoder.encode(d.id, d.text));
    for (const auto& q : queries) query_records.push_back(encoder.encode(q.id, q.text));
    if (config.mock_full_vocab) {
      std::vector<std::string> texts;
      for (const auto& d : corpus) texts.push_back(d.text);
      for (const auto& q : queries) texts.push_back(q.text);
      vocab = encoder.build_vocabulary(texts);
      vocab_path = config.work_dir / "vocab.json";
      vocab.save(vocab_path);
      for (auto& r : doc_records) MockEncoder::to_vocab_logits(r, vocab);
      for (auto& r : query_records) MockEncoder::to_vocab_logits(r, vocab);
    }
    write_records(config.work_dir / "docs.jsonl", doc_records);
    write_records(config.work_dir / "queries.jsonl", query_records);
    // Re-read so every later stage consumes exactly the on-disk records.
    doc_records = load_records(config.work_dir / "docs.jsonl");
    query_records = load_records(config.work_dir / "queries.jsonl");
  } else {
    doc_records = load_records(config.doc_records);
    query_records = load_records(config.query_records);
    if (!vocab_path.empty()) vocab = Vocabulary::load(vocab_path);
  }
  if (!doc_records.empty() && !query_records.empty() &&
      doc_records.front().dense.size() != query_records.front().dense.size()) {
    throw SchemaError("document and query records have different dense dimensions");
  }

  std::map<std::string, std::string> texts;
  for (const auto& d : corpus) texts[d.id] = d.text;
  for (const auto& q : queries) texts[q.id] = q.text;
  VocabContext vctx;
  if (!vocab_path.empty()) vctx = VocabContext{&vocab, &texts};

  PipelineOutputs out;
  const fs::path runs = config.work_dir / "runs";
  out.dense_run = runs / "dense.run";
  out.sparse_run = runs / "sparse.run";
  out.hybrid_run = runs / "hybrid.run";
  out.metrics = config.work_dir / "metrics.tsv";

  const std::string tag = to_string(config.mode);
  if (is_multi_rep(config.mode)) {
    write_run_file(out.dense_run,
                   search_multirep_records(doc_records, query_records, config.mode, ScoreKind::kDense,
                                           config.sparsifier, config.k),
                   tag + "-dense");
    write_run_file(out.sparse_run,
                   search_multirep_records(doc_records, query_records, config.mode, ScoreKind::kSparse,
                                           config.sparsifier, config.k),
                   tag + "-sparse");
  } else {
    auto dense = index_dense_records(doc_records, config.mode);
    dense.save(config.work_dir / "index" / "dense.idx");
    auto sparse = index_sparse_records(doc_records, config.mode, config.sparsifier, vctx);
    sparse.save(config.work_dir / "index" / "sparse.idx");
    write_run_file(out.dense_run,
                   search_dense_records(DenseIndex::load(config.work_dir / "index" / "dense.idx"), query_records,
                                        config.mode, config.k),
                   tag + "-dense");
    write_run_file(out.sparse_run,
                   search_sparse_records(InvertedIndex::load(config.work_dir / "index" / "sparse.idx"),
                                         query_records, config.mode, config.sparsifier, config.k, vctx),
                   tag + "-sparse");
  }

  const RunSet dense_runs = read_run_file(out.dense_run);
  const RunSet sparse_runs = read_run_file(out.sparse_run);
  write_run_file(out.hybrid_run, fuse_run_sets({dense_runs, sparse_runs}, config.fusion), tag + "-hybrid");

  std::vector<std::pair<std::string, MetricTable>> tables;
  tables.emplace_back("dense", evaluate(dense_runs, qrels, config.metrics));
  tables.emplace_back("sparse", evaluate(sparse_runs, qrels, config.metrics));
  tables.emplace_back("hybrid", evaluate(read_run_file(out.hybrid_run), qrels, config.metrics));

  if (config.use_bm25) {
    out.bm25_run = runs / "bm25.run";
    out.hybrid_bm25_run = runs / "hybrid_bm25.run";
    auto bm25 = index_bm25_documents(corpus, config.bm25);
    bm25.save(config.work_dir / "index" / "bm25.idx");
    write_run_file(out.bm25_run,
                   search_bm25_documents(Bm25Index::load(config.work_dir / "index" / "bm25.idx"), queries, config.k),
                   "bm25");
    const RunSet bm25_runs = read_run_file(out.bm25_run);
    FusionConfig three;
    three.candidate_depth = config.fusion.candidate_depth;
    write_run_file(out.hybrid_bm25_run, fuse_run_sets({dense_runs, sparse_runs, bm25_runs}, three),
                   tag + "-hybrid-bm25");
    tables.emplace_back("bm25", evaluate(bm25_runs, qrels, config.metrics));
    tables.emplace_back("hybrid_bm25", evaluate(read_run_file(out.hybrid_bm25_run), qrels, config.metrics));
  }

  write_pipeline_metrics(out.metrics, tables);
  for (auto& [name, table] : tables) out.tables.emplace(name, std::move(table));
  return out;
}

}  // namespace promptreps
