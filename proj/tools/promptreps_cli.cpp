// promptreps: command-line front end for indexing, retrieval, fusion and
// evaluation over encoder representation records.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "promptreps/binary_io.hpp"
#include "promptreps/error.hpp"
#include "promptreps/fusion.hpp"
#include "promptreps/pipeline.hpp"
#include "promptreps/sparsifier.hpp"

namespace fs = std::filesystem;
using namespace promptreps;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kSchema = 4,
  kBuild = 5,
  kIo = 6,
};

struct SparsifierOptions {
  std::size_t top_k = 128;
  std::int32_t quant_scale = 100;
  std::string stopwords;
  std::string punctuation;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--top-k", top_k, "Max tokens kept per sparse representation")->capture_default_str();
    cmd->add_option("--quant-scale", quant_scale, "Impact quantization multiplier")->capture_default_str();
    cmd->add_option("--stopwords", stopwords, "Stopword list file (one word per line)");
    cmd->add_option("--punctuation", punctuation, "Punctuation list file (one entry per line)");
  }

  SparsifierConfig build() const {
    auto c = SparsifierConfig::defaults();
    c.top_k = top_k;
    c.quant_scale = quant_scale;
    if (!stopwords.empty()) c.stopwords = load_word_list(stopwords);
    if (!punctuation.empty()) c.punctuation = load_word_list(punctuation);
    c.validate();
    return c;
  }
};

/// Writes to `path`, or stdout for "-" / empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  fn(out);
  if (!out) throw IoError("write failed for " + path);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--grid entry \"" + item + "\" is not a number");
    }
  }
  if (out.empty()) throw ConfigError("--grid is empty");
  return out;
}

std::map<std::string, std::string> text_map(const std::string& path) {
  std::map<std::string, std::string> out;
  for (auto& d : load_texts(path)) out.emplace(std::move(d.id), std::move(d.text));
  return out;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("promptreps");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* lvl = std::getenv("PROMPTREPS_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Hybrid dense/sparse retrieval over LLM representation records"};
  app.require_subcommand(1);

  // encode-mock
  auto* enc = app.add_subcommand("encode-mock", "Deterministic mock encoder: texts -> record JSONL");
  std::string enc_in, enc_out, enc_lexicon, enc_vocab, enc_mode = "ftsr";
  MockEncoderConfig mock;
  bool enc_full_vocab = false;
  enc->add_option("--input", enc_in, "BEIR corpus JSONL or query TSV")->required();
  enc->add_option("--out", enc_out, "Output record JSONL")->required();
  enc->add_option("--dim", mock.dim, "Dense dimension")->capture_default_str();
  enc->add_option("--vocab-size", mock.vocab_size, "Synthetic noise vocabulary size")->capture_default_str();
  enc->add_option("--seed", mock.seed, "Seed")->capture_default_str();
  enc->add_option("--noise", mock.noise_entries, "Noise logit entries per text")->capture_default_str();
  enc->add_option("--mode", enc_mode, "ftsr emits single records; other modes add token sub-records")
      ->capture_default_str();
  enc->add_option("--lexicon", enc_lexicon, "word<TAB>concept file shaping the dense space");
  enc->add_flag("--full-vocab", enc_full_vocab, "Emit vocabulary-length logit vectors");
  enc->add_option("--vocab", enc_vocab, "Vocabulary JSON for --full-vocab (created when missing)");

  // index-dense
  auto* idx_dense = app.add_subcommand("index-dense", "Build a flat cosine index from records");
  std::string idd_records, idd_out, idd_mode = "ftsr";
  idx_dense->add_option("--records", idd_records)->required();
  idx_dense->add_option("--out", idd_out)->required();
  idx_dense->add_option("--mode", idd_mode, "ftsr|fwsr|mtsr")->capture_default_str();

  // index-sparse
  auto* idx_sparse = app.add_subcommand("index-sparse", "Build an impact inverted index from records");
  std::string ids_records, ids_out, ids_mode = "ftsr", ids_vocab, ids_texts;
  SparsifierOptions ids_sp;
  idx_sparse->add_option("--records", ids_records)->required();
  idx_sparse->add_option("--out", ids_out)->required();
  idx_sparse->add_option("--mode", ids_mode, "ftsr|fwsr|mtsr")->capture_default_str();
  idx_sparse->add_option("--vocab", ids_vocab, "Vocabulary JSON (full-vocabulary logits only)");
  idx_sparse->add_option("--texts", ids_texts, "Source texts (full-vocabulary logits only)");
  ids_sp.add_to(idx_sparse);

  // index-bm25
  auto* idx_bm25 = app.add_subcommand("index-bm25", "Build a BM25 index from raw texts");
  std::string idb_corpus, idb_out;
  Bm25Params bm25;
  idx_bm25->add_option("--corpus", idb_corpus)->required();
  idx_bm25->add_option("--out", idb_out)->required();
  idx_bm25->add_option("--k1", bm25.k1)->capture_default_str();
  idx_bm25->add_option("--b", bm25.b)->capture_default_str();
  idx_bm25->add_flag("--remove-stopwords", bm25.remove_stopwords);

  // search
  auto* search = app.add_subcommand("search", "Retrieve top-k documents for every query");
  std::string s_kind, s_index, s_qrecords, s_queries, s_vocab, s_mode = "ftsr", s_out = "-", s_tag, s_docs,
                                                              s_score = "dense";
  std::size_t s_k = 1000;
  SparsifierOptions s_sp;
  search->add_option("--kind", s_kind, "dense|sparse|bm25|multirep")
      ->required()
      ->check(CLI::IsMember({"dense", "sparse", "bm25", "multirep"}));
  search->add_option("--index", s_index, "Index file (dense, sparse, bm25)");
  search->add_option("--query-records", s_qrecords, "Query record JSONL (dense, sparse, multirep)");
  search->add_option("--queries", s_queries, "Query TSV (bm25, or full-vocabulary sparse)");
  search->add_option("--vocab", s_vocab, "Vocabulary JSON (full-vocabulary logits only)");
  search->add_option("--doc-records", s_docs, "Document record JSONL (multirep)");
  search->add_option("--score", s_score, "dense|sparse (multirep)")->check(CLI::IsMember({"dense", "sparse"}));
  search->add_option("--mode", s_mode)->capture_default_str();
  search->add_option("--k", s_k)->capture_default_str();
  search->add_option("--out", s_out, "Run file (default stdout)");
  search->add_option("--tag", s_tag, "Run tag column");
  s_sp.add_to(search);

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "Min-max normalize and interpolate run files");
  std::vector<std::string> f_runs;
  std::vector<double> f_weights;
  std::size_t f_depth = 1000, f_k = 0;
  std::string f_out = "-", f_tag = "hybrid";
  fuse_cmd->add_option("--run", f_runs, "Input run file (repeat)")->required();
  fuse_cmd->add_option("--weight", f_weights, "One weight per run (default equal)");
  fuse_cmd->add_option("--depth", f_depth, "Candidates taken from each run")->capture_default_str();
  fuse_cmd->add_option("--k", f_k, "Truncate fused runs (0 keeps all)")->capture_default_str();
  fuse_cmd->add_option("--out", f_out);
  fuse_cmd->add_option("--tag", f_tag)->capture_default_str();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a run against qrels");
  std::string e_run, e_qrels, e_out = "-", e_gain = "exponential";
  std::vector<std::string> e_metrics;
  int e_min_grade = 1;
  bool e_per_query = false;
  eval_cmd->add_option("--run", e_run)->required();
  eval_cmd->add_option("--qrels", e_qrels)->required();
  eval_cmd->add_option("--metric", e_metrics, "ndcg@K, mrr@K, recall@K (repeat)");
  eval_cmd->add_option("--recall-min-grade", e_min_grade, "Grade counted relevant for recall/mrr (2 for TREC DL)")
      ->capture_default_str();
  eval_cmd->add_option("--gain", e_gain, "exponential (2^rel-1) or linear (trec_eval)")
      ->check(CLI::IsMember({"exponential", "linear"}))
      ->capture_default_str();
  eval_cmd->add_flag("--per-query", e_per_query);
  eval_cmd->add_option("--out", e_out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Metric over dense/sparse interpolation weights");
  std::string w_dense, w_sparse, w_qrels, w_grid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", w_metric = "ndcg@10",
                                                w_out = "-";
  std::size_t w_depth = 1000;
  sweep->add_option("--dense", w_dense)->required();
  sweep->add_option("--sparse", w_sparse)->required();
  sweep->add_option("--qrels", w_qrels)->required();
  sweep->add_option("--grid", w_grid, "Comma-separated dense weights in [0,1]")->capture_default_str();
  sweep->add_option("--metric", w_metric)->capture_default_str();
  sweep->add_option("--depth", w_depth)->capture_default_str();
  sweep->add_option("--out", w_out);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Encode (mock), index, search, fuse and evaluate");
  std::string p_config, p_work, p_mode;
  pipe->add_option("--config", p_config, "Pipeline JSON config")->required();
  pipe->add_option("--work-dir", p_work, "Override work_dir");
  pipe->add_option("--mode", p_mode, "Override mode");

  // dump
  auto* dump = app.add_subcommand("dump", "Print an index in human-readable form");
  std::string d_index, d_out = "-";
  dump->add_option("--index", d_index)->required();
  dump->add_option("--out", d_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*enc) {
      mock.emit_tokens = parse_rep_mode(enc_mode) != RepMode::kFTSR;
      if (!enc_lexicon.empty()) mock.lexicon = load_lexicon(enc_lexicon);
      if (enc_full_vocab && enc_vocab.empty()) throw ConfigError("--full-vocab needs --vocab");
      MockEncoder encoder(mock);
      auto texts = load_texts(enc_in);
      std::vector<RepresentationRecord> records;
      records.reserve(texts.size());
      for (const auto& t : texts) records.push_back(encoder.encode(t.id, t.text));
      if (enc_full_vocab) {
        Vocabulary vocab;
        if (fs::exists(enc_vocab)) {
          vocab = Vocabulary::load(enc_vocab);
        } else {
          std::vector<std::string> raw;
          for (const auto& t : texts) raw.push_back(t.text);
          vocab = encoder.build_vocabulary(raw);
          vocab.save(enc_vocab);
          spdlog::info("wrote vocabulary of {} tokens to {}", vocab.size(), enc_vocab);
        }
        for (auto& r : records) MockEncoder::to_vocab_logits(r, vocab);
      }
      write_records(enc_out, records);
      spdlog::info("encoded {} texts into {}", records.size(), enc_out);
    } else if (*idx_dense) {
      auto index = index_dense_records(load_records(idd_records), parse_rep_mode(idd_mode));
      index.save(idd_out);
      spdlog::info("dense index: {} docs, dim {} -> {}", index.doc_count(), index.dim(), idd_out);
    } else if (*idx_sparse) {
      auto cfg = ids_sp.build();
      Vocabulary vocab;
      std::map<std::string, std::string> texts;
      VocabContext vctx;
      if (!ids_vocab.empty()) {
        if (ids_texts.empty()) throw ConfigError("--vocab needs --texts");
        vocab = Vocabulary::load(ids_vocab);
        texts = text_map(ids_texts);
        vctx = VocabContext{&vocab, &texts};
      }
      auto index = index_sparse_records(load_records(ids_records), parse_rep_mode(ids_mode), cfg, vctx);
      index.save(ids_out);
      spdlog::info("sparse index: {} docs, {} terms -> {}", index.doc_count(), index.postings().size(), ids_out);
    } else if (*idx_bm25) {
      auto index = index_bm25_documents(load_corpus(idb_corpus), bm25);
      index.save(idb_out);
      spdlog::info("bm25 index: {} docs, {} terms -> {}", index.doc_count(), index.postings().size(), idb_out);
    } else if (*search) {
      if (s_k < 1) throw ConfigError("--k must be >= 1");
      const RepMode mode = parse_rep_mode(s_mode);
      RunSet runs;
      auto need = [](const std::string& v, const char* flag, const std::string& kind) {
        if (v.empty()) throw ConfigError("search --kind " + kind + " needs " + flag);
      };
      if (s_kind == "dense") {
        need(s_index, "--index", s_kind);
        need(s_qrecords, "--query-records", s_kind);
        runs = search_dense_records(DenseIndex::load(s_index), load_records(s_qrecords), mode, s_k);
      } else if (s_kind == "sparse") {
        need(s_index, "--index", s_kind);
        need(s_qrecords, "--query-records", s_kind);
        Vocabulary vocab;
        std::map<std::string, std::string> texts;
        VocabContext vctx;
        if (!s_vocab.empty()) {
          need(s_queries, "--queries", s_kind);
          vocab = Vocabulary::load(s_vocab);
          texts = text_map(s_queries);
          vctx = VocabContext{&vocab, &texts};
        }
        runs = search_sparse_records(InvertedIndex::load(s_index), load_records(s_qrecords), mode, s_sp.build(), s_k,
                                     vctx);
      } else if (s_kind == "bm25") {
        need(s_index, "--index", s_kind);
        need(s_queries, "--queries", s_kind);
        runs = search_bm25_documents(Bm25Index::load(s_index), load_queries(s_queries), s_k);
      } else {
        need(s_docs, "--doc-records", s_kind);
        need(s_qrecords, "--query-records", s_kind);
        if (!is_multi_rep(mode)) throw ConfigError("search --kind multirep needs --mode mtmr or mwmr");
        runs = search_multirep_records(load_records(s_docs), load_records(s_qrecords), mode,
                                       s_score == "dense" ? ScoreKind::kDense : ScoreKind::kSparse, s_sp.build(), s_k);
      }
      const std::string tag = s_tag.empty() ? s_kind : s_tag;
      with_output(s_out, [&](std::ostream& out) { write_run(out, runs, tag); });
    } else if (*fuse_cmd) {
      std::vector<RunSet> sets;
      for (const auto& r : f_runs) sets.push_back(read_run_file(r));
      FusionConfig cfg;
      cfg.weights = f_weights;
      cfg.candidate_depth = f_depth;
      auto fused = fuse_run_sets(sets, cfg);
      if (f_k > 0) {
        for (auto& [qid, run] : fused) canonicalize(run, f_k);
      }
      with_output(f_out, [&](std::ostream& out) { write_run(out, fused, f_tag); });
    } else if (*eval_cmd) {
      if (e_metrics.empty()) e_metrics = {"ndcg@10", "mrr@10", "recall@1000"};
      std::vector<MetricSpec> specs;
      for (const auto& m : e_metrics) {
        auto spec = MetricSpec::parse(m);
        spec.min_grade = e_min_grade;
        spec.gain = e_gain == "linear" ? Gain::kLinear : Gain::kExponential;
        specs.push_back(spec);
      }
      auto table = evaluate(read_run_file(e_run), read_qrels_file(e_qrels), specs);
      with_output(e_out, [&](std::ostream& out) { write_metric_table(out, table, e_per_query); });
    } else if (*sweep) {
      auto points = weight_sweep(read_run_file(w_dense), read_run_file(w_sparse), read_qrels_file(w_qrels),
                                 parse_grid(w_grid), MetricSpec::parse(w_metric), w_depth);
      with_output(w_out, [&](std::ostream& out) {
        out << "weight\t" << w_metric << '\n' << std::fixed << std::setprecision(4);
        for (const auto& p : points) out << p.weight << '\t' << p.value << '\n';
      });
    } else if (*pipe) {
      auto cfg = PipelineConfig::from_json_file(p_config);
      if (!p_work.empty()) cfg.work_dir = p_work;
      if (!p_mode.empty()) cfg.mode = parse_rep_mode(p_mode);
      auto out = run_pipeline(cfg);
      spdlog::info("runs written under {}", out.dense_run.parent_path().string());
      std::ifstream metrics(out.metrics);
      std::cout << metrics.rdbuf();
    } else if (*dump) {
      std::string magic = binary::Reader::open(d_index).bytes(4);
      with_output(d_out, [&](std::ostream& out) {
        if (magic == "PRDX") {
          auto index = DenseIndex::load(d_index);
          out << "# docs " << index.doc_count() << " dim " << index.dim() << '\n';
          for (std::size_t i = 0; i < index.doc_count(); ++i) {
            out << index.doc_table()[i];
            for (float f : index.row(i)) out << ' ' << f;
            out << '\n';
          }
          return;
        }
        if (magic != "PRIX") throw IoError(d_index + ": unrecognized index format");
        try {
          InvertedIndex::load(d_index).dump(out);
        } catch (const IoError&) {
          auto index = Bm25Index::load(d_index);
          out << "# bm25 k1 " << index.params().k1 << " b " << index.params().b << " avg_len "
              << index.average_length() << '\n';
          InvertedIndex(index.doc_table(), index.postings()).dump(out);
        }
      });
    }
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kParse;
  } catch (const SchemaError& e) {
    spdlog::error("{}", e.what());
    return kSchema;
  } catch (const BuildError& e) {
    spdlog::error("{}", e.what());
    return kBuild;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const std::ios_base::failure& e) {
    spdlog::error("i/o failure: {}", e.what());
    return kIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kOk;
}
