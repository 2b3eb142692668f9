// xlingevent: command-line front end for the cross-lingual event toolkit.
// Subcommands: split, combine, knn, align, translate, decode, cluster,
// score-coref, score-cls, train-head, predict.
//
// Exit codes: 0 success, 1 usage error, 2 data error. Every command that
// writes files also drops a `<first output>.meta.json` run-metadata record.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xlingevent/align.hpp"
#include "xlingevent/bio.hpp"
#include "xlingevent/coref.hpp"
#include "xlingevent/corpus.hpp"
#include "xlingevent/embedding.hpp"
#include "xlingevent/error.hpp"
#include "xlingevent/metrics.hpp"
#include "xlingevent/mlp.hpp"
#include "xlingevent/parallel.hpp"
#include "xlingevent/rng.hpp"
#include "xlingevent/translate.hpp"
#include "xlingevent/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace xlingevent;

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

// SOURCE_DATE_EPOCH makes metadata reproducible (byte-identical reruns).
std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(sde, &end, 10);
    if (end && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunMetadata {
  std::string subcommand;
  std::string command;
  ordered_json config = ordered_json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_run_metadata(const RunMetadata& meta) {
  if (meta.outputs.empty()) return;
  ordered_json j;
  j["schema_version"] = kRunMetadataSchemaVersion;
  j["tool"] = "xlingevent";
  j["version"] = kVersion;
  j["subcommand"] = meta.subcommand;
  j["command"] = meta.command;
  j["config"] = meta.config;
  auto inputs = ordered_json::array();
  for (const auto& path : meta.inputs) {
    ordered_json rec;
    rec["path"] = path;
    rec["fnv1a64"] = fnv1a64_file(path);
    inputs.push_back(rec);
  }
  j["inputs"] = inputs;
  j["outputs"] = meta.outputs;
  j["timestamp_utc"] = timestamp_utc();

  const std::string path = meta.outputs.front() + ".meta.json";
  std::ofstream out(path);
  if (!out) throw DataError("cannot create file: " + path);
  out << j.dump(2) << '\n';
}

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

CorpusFormat parse_format(const std::string& kind, const std::string& path) {
  if (kind == "auto") return detect_format(path);
  if (kind == "doc-label") return CorpusFormat::DocLabel;
  if (kind == "sent-label") return CorpusFormat::SentLabel;
  if (kind == "coref") return CorpusFormat::Coref;
  if (kind == "bio") return CorpusFormat::Bio;
  throw UsageError("unknown kind: " + kind);
}

BioScheme scheme_or_default(const std::string& scheme_path) {
  return scheme_path.empty() ? BioScheme::default_scheme()
                             : BioScheme::load(scheme_path);
}

// BIO files carry no document structure, so a token-task split treats each
// sentence as its own unit.
Corpus wrap_sentences_as_documents(const Corpus& corpus) {
  Corpus out;
  out.languages = corpus.languages;
  for (const auto& doc : corpus.documents) {
    for (const auto& sentence : doc.sentences) {
      Document unit;
      unit.doc_id = doc.doc_id + "#" + std::to_string(sentence.sentence_id);
      unit.language = doc.language;
      unit.sentences.push_back(sentence);
      unit.sentences.back().sentence_id = 0;
      out.documents.push_back(std::move(unit));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand argument bundles

struct SplitArgs {
  std::string in, kind = "auto", scheme, train_out, valid_out;
  double fraction = 0.8;
  std::uint64_t seed = 0;
};

struct CombineArgs {
  std::vector<std::string> in;
  std::vector<std::string> langs;
  std::string kind = "auto", scheme, out;
};

struct KnnArgs {
  std::string emb, word;
  int k = 10;
  std::uint64_t max_vocab = 0;
};

struct AlignArgs {
  std::string src_emb, tgt_emb, seed_dict, out, src_lang, tgt_lang;
  int iterations = 5;
  int k = 10;
  std::uint64_t max_vocab = 200000;
  bool lowercase = false;
};

struct TranslateArgs {
  std::string in, src_emb, tgt_emb, mapping, scheme, out, src_lang, tgt_lang;
  std::string oov = "copy-through";
  int k = 10;
  std::uint64_t max_vocab = 0;
  bool no_punct = false;
  bool no_numeral = false;
};

struct DecodeArgs {
  std::string scores, tokens, scheme, out;
};

struct ClusterArgs {
  std::string scores, out;
  double threshold = 0.5;
};

struct ScoreCorefArgs {
  std::string gold, pred, aggregate = "micro";
};

struct ScoreClsArgs {
  std::string gold, pred;
  double beta = 1.0;
};

struct TrainHeadArgs {
  std::string emb, labels, out, dims = "512,256,128";
  double valid_frac = 0.2;
  double beta = 1.0;
  double lr = 0.1;
  double momentum = 0.9;
  int batch = 16;
  int epochs = 100;
  int patience = 10;
  std::uint64_t seed = 1;
};

struct PredictArgs {
  std::string model, emb, in, out;
};

// ---------------------------------------------------------------------------

int cmd_split(const SplitArgs& a, RunMetadata meta) {
  const CorpusFormat format = parse_format(a.kind, a.in);
  const BioScheme scheme = scheme_or_default(a.scheme);
  Corpus corpus = load_corpus(a.in, format, &scheme);
  if (format == CorpusFormat::Bio)
    corpus = wrap_sentences_as_documents(corpus);
  SplitConfig cfg;
  cfg.train_fraction = a.fraction;
  cfg.seed = a.seed;
  auto [train, valid] = split_train_valid(corpus, cfg);
  write_corpus(train, a.train_out, format);
  write_corpus(valid, a.valid_out, format);
  std::cout << "split " << corpus.documents.size() << " documents into "
            << train.documents.size() << " train / " << valid.documents.size()
            << " valid\n";
  meta.inputs = {a.in};
  meta.outputs = {a.train_out, a.valid_out};
  meta.config["fraction"] = a.fraction;
  meta.config["seed"] = a.seed;
  meta.config["kind"] = a.kind;
  write_run_metadata(meta);
  return 0;
}

int cmd_combine(const CombineArgs& a, RunMetadata meta) {
  if (!a.langs.empty() && a.langs.size() != a.in.size())
    throw UsageError("--langs must match --in in count");
  const BioScheme scheme = scheme_or_default(a.scheme);
  std::optional<CorpusFormat> format;
  std::vector<Corpus> corpora;
  for (std::size_t i = 0; i < a.in.size(); ++i) {
    const CorpusFormat f = parse_format(a.kind, a.in[i]);
    if (format && *format != f)
      throw DataError("inputs mix formats; pass an explicit --kind");
    format = f;
    Corpus c = load_corpus(a.in[i], f, &scheme);
    if (!a.langs.empty()) {
      c.languages = {a.langs[i]};
      for (auto& doc : c.documents) doc.language = a.langs[i];
    }
    corpora.push_back(std::move(c));
  }
  const Corpus combined = combine_corpora(corpora);
  write_corpus(combined, a.out, format.value_or(CorpusFormat::DocLabel));
  std::cout << "combined " << corpora.size() << " corpora into "
            << combined.documents.size() << " documents\n";
  meta.inputs = a.in;
  meta.outputs = {a.out};
  meta.config["kind"] = a.kind;
  if (!a.langs.empty()) meta.config["langs"] = a.langs;
  write_run_metadata(meta);
  return 0;
}

int cmd_knn(const KnnArgs& a) {
  std::optional<std::size_t> cap;
  if (a.max_vocab > 0) cap = a.max_vocab;
  const EmbeddingSpace space = normalize_rows(load_text_embeddings(a.emb, cap));
  const auto idx = space.find(a.word);
  if (!idx) throw DataError("word not in vocabulary: " + a.word);
  const auto neighbors =
      knn_cosine(space, space.row(static_cast<std::size_t>(*idx)), a.k);
  for (const auto& n : neighbors.entries) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", n.score);
    std::cout << n.word << '\t' << buf << '\n';
  }
  return 0;
}

int cmd_align(const AlignArgs& a, RunMetadata meta) {
  std::optional<std::size_t> cap;
  if (a.max_vocab > 0) cap = a.max_vocab;
  const EmbeddingSpace src = normalize_rows(load_text_embeddings(a.src_emb, cap));
  const EmbeddingSpace tgt = normalize_rows(load_text_embeddings(a.tgt_emb, cap));

  SeedDictionary seed = a.seed_dict.empty()
                            ? identical_seed(src, tgt, a.lowercase)
                            : load_seed_tsv(a.seed_dict);
  std::size_t dropped = 0;
  seed = restrict_to_vocab(seed, src, tgt, &dropped);
  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped
              << " seed pairs missing from the vocabularies\n";
  std::cout << "seed dictionary: " << seed.pairs.size() << " pairs\n";

  CslsParams params;
  params.k = a.k;
  MappingMatrix w = refine_mapping(src, tgt, seed, a.iterations, params);
  w.src_lang = a.src_lang;
  w.tgt_lang = a.tgt_lang;
  save_mapping(w, a.out);
  std::cout << "mapping " << w.dim << "x" << w.dim
            << " written; orthogonality error " << orthogonality_error(w)
            << "\n";

  meta.inputs = {a.src_emb, a.tgt_emb};
  if (!a.seed_dict.empty()) meta.inputs.push_back(a.seed_dict);
  meta.outputs = {a.out};
  meta.config["iterations"] = a.iterations;
  meta.config["k"] = a.k;
  meta.config["max_vocab"] = a.max_vocab;
  meta.config["seed_source"] =
      a.seed_dict.empty() ? "identical-strings" : "file";
  meta.config["seed_pairs"] = seed.pairs.size();
  meta.config["dropped_pairs"] = dropped;
  meta.config["lowercase"] = a.lowercase;
  write_run_metadata(meta);
  return 0;
}

int cmd_translate(const TranslateArgs& a, RunMetadata meta) {
  std::optional<std::size_t> cap;
  if (a.max_vocab > 0) cap = a.max_vocab;
  const BioScheme scheme = scheme_or_default(a.scheme);
  const Corpus corpus = load_conll_bio(a.in, scheme);
  const EmbeddingSpace src = normalize_rows(load_text_embeddings(a.src_emb, cap));
  const EmbeddingSpace tgt = normalize_rows(load_text_embeddings(a.tgt_emb, cap));
  MappingMatrix w = load_mapping(a.mapping);
  w.src_lang = a.src_lang;
  w.tgt_lang = a.tgt_lang;

  TranslationPolicy policy;
  if (a.oov == "copy-through")
    policy.oov_action = OovAction::CopyThrough;
  else if (a.oov == "drop")
    policy.oov_action = OovAction::Drop;
  else if (a.oov == "mark")
    policy.oov_action = OovAction::Mark;
  else
    throw UsageError("unknown --oov action: " + a.oov);
  policy.punct_passthrough = !a.no_punct;
  policy.numeral_passthrough = !a.no_numeral;

  CslsParams params;
  params.k = a.k;
  const WordTranslator translator(src, tgt, w, params, policy);
  write_conll_bio(translator.translate_corpus(corpus), a.out);

  meta.inputs = {a.in, a.src_emb, a.tgt_emb, a.mapping};
  meta.outputs = {a.out};
  meta.config["k"] = a.k;
  meta.config["oov"] = a.oov;
  meta.config["punct_passthrough"] = policy.punct_passthrough;
  meta.config["numeral_passthrough"] = policy.numeral_passthrough;
  meta.config["max_vocab"] = a.max_vocab;
  write_run_metadata(meta);
  return 0;
}

int cmd_decode(const DecodeArgs& a, RunMetadata meta) {
  const BioScheme scheme = scheme_or_default(a.scheme);
  const Corpus corpus = load_token_file(a.tokens);
  const auto scores = load_score_file(a.scores, scheme.num_labels());
  write_conll_bio(decode_corpus(corpus, scores, scheme), a.out);
  meta.inputs = {a.scores, a.tokens};
  if (!a.scheme.empty()) meta.inputs.push_back(a.scheme);
  meta.outputs = {a.out};
  write_run_metadata(meta);
  return 0;
}

int cmd_cluster(const ClusterArgs& a, RunMetadata meta) {
  if (a.threshold <= 0.0 || a.threshold >= 1.0)
    throw UsageError("--threshold must be in (0, 1)");
  const auto pairs = load_pair_scores_jsonl(a.scores);
  ClusterParams params;
  params.threshold = a.threshold;
  const auto clusterings = cluster_all(pairs, params);
  write_predictions_jsonl(clusterings, a.out);
  std::cout << "clustered " << clusterings.size() << " documents\n";
  meta.inputs = {a.scores};
  meta.outputs = {a.out};
  meta.config["threshold"] = a.threshold;
  write_run_metadata(meta);
  return 0;
}

void print_prf_row(const char* name, const PRF& prf) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-8s P %.4f  R %.4f  F %.4f", name,
                prf.precision, prf.recall, prf.f);
  std::cout << buf << '\n';
}

int cmd_score_coref(const ScoreCorefArgs& a) {
  Aggregate agg;
  if (a.aggregate == "micro")
    agg = Aggregate::Micro;
  else if (a.aggregate == "macro")
    agg = Aggregate::Macro;
  else
    throw UsageError("--aggregate must be micro or macro");
  const auto gold = load_clusters_jsonl(a.gold, "event_clusters");
  const auto pred = load_clusters_jsonl(a.pred, "pred_clusters");
  const CorefScore score = conll_average_corpus(gold, pred, agg);
  print_prf_row("MUC", score.muc);
  print_prf_row("B3", score.b3);
  print_prf_row("CEAFe", score.ceaf_e);
  char buf[64];
  std::snprintf(buf, sizeof buf, "CoNLL-2012 average: %.4f", score.conll_avg);
  std::cout << buf << '\n';
  return 0;
}

int cmd_score_cls(const ScoreClsArgs& a) {
  const Corpus gold = load_jsonl_docs(a.gold, RecordKind::DocLabel);
  const Corpus pred = load_jsonl_docs(a.pred, RecordKind::DocLabel);
  std::map<std::string, int> pred_labels;
  for (const auto& doc : pred.documents) {
    if (!doc.label)
      throw DataError("prediction for doc " + doc.doc_id + " has no label");
    pred_labels[doc.doc_id] = *doc.label;
  }
  std::vector<int> g, p;
  for (const auto& doc : gold.documents) {
    if (!doc.label)
      throw DataError("gold doc " + doc.doc_id + " has no label");
    auto it = pred_labels.find(doc.doc_id);
    if (it == pred_labels.end())
      throw DataError("no prediction for doc " + doc.doc_id);
    g.push_back(*doc.label);
    p.push_back(it->second);
  }
  const PRF prf = binary_f1(g, p, a.beta);
  char buf[96];
  std::snprintf(buf, sizeof buf, "P %.4f  R %.4f  F_%g %.4f  (n=%zu)",
                prf.precision, prf.recall, a.beta, prf.f, g.size());
  std::cout << buf << '\n';
  return 0;
}

std::vector<int> parse_dims(const std::string& csv) {
  std::vector<int> dims;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) {
        try {
          dims.push_back(std::stoi(cur));
        } catch (const std::exception&) {
          throw UsageError("bad --dims entry: " + cur);
        }
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  return dims;
}

int cmd_train_head(const TrainHeadArgs& a, RunMetadata meta) {
  if (a.valid_frac <= 0.0 || a.valid_frac >= 1.0)
    throw UsageError("--valid-frac must be in (0, 1)");
  const EmbeddingSpace emb = load_text_embeddings(a.emb);
  const Corpus labels = load_jsonl_docs(a.labels, RecordKind::DocLabel);

  std::vector<std::string> ids;
  LabeledVectors all;
  for (const auto& doc : labels.documents) {
    if (!doc.label)
      throw DataError("doc " + doc.doc_id + " in --labels has no label");
    const auto idx = emb.find(doc.doc_id);
    if (!idx)
      throw DataError("no embedding row for example \"" + doc.doc_id + "\"");
    const auto row = emb.row(static_cast<std::size_t>(*idx));
    all.x.emplace_back(row.begin(), row.end());
    all.y.push_back(*doc.label);
    ids.push_back(doc.doc_id);
  }
  if (all.size() < 2)
    throw DataError("need at least 2 labeled examples to split");

  // Example-level 80/20-style split, seeded like split_train_valid.
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(a.seed);
  rng.shuffle(order);
  auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(all.size()) * (1.0 - a.valid_frac)));
  n_train = std::clamp<std::size_t>(n_train, 1, all.size() - 1);
  std::vector<bool> in_train(all.size(), false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;
  LabeledVectors train_set, valid_set;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto& side = in_train[i] ? train_set : valid_set;
    side.x.push_back(all.x[i]);
    side.y.push_back(all.y[i]);
  }

  std::vector<int> dims;
  dims.push_back(emb.dim);
  for (int h : parse_dims(a.dims)) dims.push_back(h);
  dims.push_back(2);

  TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.momentum = a.momentum;
  cfg.batch_size = a.batch;
  cfg.max_epochs = a.epochs;
  cfg.patience = a.patience;
  cfg.beta = a.beta;
  cfg.seed = a.seed;

  MlpModel model = init_mlp(dims, a.seed);
  const TrainResult result = train(std::move(model), train_set, valid_set, cfg);
  for (std::size_t e = 0; e < result.history.size(); ++e) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "epoch %zu  train_loss %.6f  valid_f %.4f",
                  e, result.history[e].train_loss,
                  result.history[e].valid_fbeta);
    std::cout << buf << '\n';
  }
  std::cout << "selected epoch " << result.best_epoch << " (valid F_" << a.beta
            << " " << (result.best_epoch >= 0
                           ? result.history[result.best_epoch].valid_fbeta
                           : 0.0)
            << ")\n";
  save_model(result.model, a.out);

  meta.inputs = {a.emb, a.labels};
  meta.outputs = {a.out};
  meta.config["valid_frac"] = a.valid_frac;
  meta.config["beta"] = a.beta;
  meta.config["seed"] = a.seed;
  meta.config["dims"] = dims;
  meta.config["lr"] = a.lr;
  meta.config["momentum"] = a.momentum;
  meta.config["batch"] = a.batch;
  meta.config["epochs"] = a.epochs;
  meta.config["patience"] = a.patience;
  meta.config["train_examples"] = train_set.size();
  meta.config["valid_examples"] = valid_set.size();
  meta.config["best_epoch"] = result.best_epoch;
  write_run_metadata(meta);
  return 0;
}

int cmd_predict(const PredictArgs& a, RunMetadata meta) {
  const MlpModel model = load_model(a.model);
  const EmbeddingSpace emb = load_text_embeddings(a.emb);

  std::vector<std::string> ids;
  if (!a.in.empty()) {
    const Corpus docs = load_jsonl_docs(a.in, RecordKind::DocLabel);
    for (const auto& doc : docs.documents) ids.push_back(doc.doc_id);
  } else {
    ids = emb.words;
  }

  std::ofstream out(a.out);
  if (!out) throw DataError("cannot create file: " + a.out);
  for (const auto& id : ids) {
    const auto idx = emb.find(id);
    if (!idx) throw DataError("no embedding row for example \"" + id + "\"");
    const auto row = emb.row(static_cast<std::size_t>(*idx));
    const std::vector<double> x(row.begin(), row.end());
    const Prediction pred = predict_one(model, x);
    ordered_json j;
    j["id"] = id;
    j["label"] = pred.label;
    j["prob"] = pred.prob_positive;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + a.out);

  meta.inputs = {a.model, a.emb};
  if (!a.in.empty()) meta.inputs.push_back(a.in);
  meta.outputs = {a.out};
  write_run_metadata(meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xlingevent: multilingual event-extraction pipeline toolkit"};
  app.set_version_flag("--version", kVersion);
  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "Cap worker threads (0 = all cores; outputs do not depend "
                 "on this)");
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Deterministic train/valid split");
  split->add_option("--in", split_args.in, "Input corpus")->required();
  split->add_option("--kind", split_args.kind,
                    "auto|doc-label|sent-label|coref|bio");
  split->add_option("--fraction", split_args.fraction, "Train fraction");
  split->add_option("--seed", split_args.seed, "Shuffle seed");
  split->add_option("--scheme", split_args.scheme, "BIO scheme file");
  split->add_option("--train-out", split_args.train_out)->required();
  split->add_option("--valid-out", split_args.valid_out)->required();

  CombineArgs combine_args;
  auto* combine =
      app.add_subcommand("combine", "Concatenate corpora across languages");
  combine->add_option("--in", combine_args.in, "Input corpora")->required();
  combine->add_option("--langs", combine_args.langs,
                      "Language code per input (same order as --in)");
  combine->add_option("--kind", combine_args.kind,
                      "auto|doc-label|sent-label|coref|bio");
  combine->add_option("--scheme", combine_args.scheme, "BIO scheme file");
  combine->add_option("--out", combine_args.out)->required();

  KnnArgs knn_args;
  auto* knn = app.add_subcommand("knn", "Cosine nearest neighbors of a word");
  knn->add_option("--emb", knn_args.emb, "Embedding file")->required();
  knn->add_option("--word", knn_args.word)->required();
  knn->add_option("--k", knn_args.k);
  knn->add_option("--max-vocab", knn_args.max_vocab);

  AlignArgs align_args;
  auto* align = app.add_subcommand(
      "align", "Learn an orthogonal source-to-target embedding mapping");
  align->add_option("--src-emb", align_args.src_emb)->required();
  align->add_option("--tgt-emb", align_args.tgt_emb)->required();
  align->add_option("--seed-dict", align_args.seed_dict,
                    "Seed TSV (default: identical strings)");
  align->add_option("--iterations", align_args.iterations,
                    "CSLS refinement iterations");
  align->add_option("--k", align_args.k, "CSLS neighborhood size");
  align->add_option("--max-vocab", align_args.max_vocab);
  align->add_flag("--lowercase", align_args.lowercase,
                  "Match identical strings case-insensitively (ASCII)");
  align->add_option("--src-lang", align_args.src_lang);
  align->add_option("--tgt-lang", align_args.tgt_lang);
  align->add_option("--out", align_args.out, "Mapping file")->required();

  TranslateArgs translate_args;
  auto* translate = app.add_subcommand(
      "translate", "Word-by-word translation with label copy");
  translate->add_option("--in", translate_args.in, "Tagged BIO file")
      ->required();
  translate->add_option("--src-emb", translate_args.src_emb)->required();
  translate->add_option("--tgt-emb", translate_args.tgt_emb)->required();
  translate->add_option("--mapping", translate_args.mapping)->required();
  translate->add_option("--k", translate_args.k, "CSLS neighborhood size");
  translate->add_option("--oov", translate_args.oov,
                        "copy-through|drop|mark");
  translate->add_flag("--no-punct-passthrough", translate_args.no_punct);
  translate->add_flag("--no-numeral-passthrough", translate_args.no_numeral);
  translate->add_option("--scheme", translate_args.scheme, "BIO scheme file");
  translate->add_option("--max-vocab", translate_args.max_vocab);
  translate->add_option("--src-lang", translate_args.src_lang);
  translate->add_option("--tgt-lang", translate_args.tgt_lang);
  translate->add_option("--out", translate_args.out)->required();

  DecodeArgs decode_args;
  auto* decode = app.add_subcommand(
      "decode", "BIO-constrained Viterbi decode of per-token scores");
  decode->add_option("--scores", decode_args.scores)->required();
  decode->add_option("--tokens", decode_args.tokens)->required();
  decode->add_option("--scheme", decode_args.scheme, "BIO scheme file");
  decode->add_option("--out", decode_args.out)->required();

  ClusterArgs cluster_args;
  auto* cluster = app.add_subcommand(
      "cluster", "Greedy coreference clustering of scored sentence pairs");
  cluster->add_option("--scores", cluster_args.scores)->required();
  cluster->add_option("--threshold", cluster_args.threshold);
  cluster->add_option("--out", cluster_args.out)->required();

  ScoreCorefArgs score_coref_args;
  auto* score_coref = app.add_subcommand(
      "score-coref", "MUC, B3, CEAFe and the CoNLL-2012 average");
  score_coref->add_option("--gold", score_coref_args.gold)->required();
  score_coref->add_option("--pred", score_coref_args.pred)->required();
  score_coref->add_option("--aggregate", score_coref_args.aggregate,
                          "micro|macro");

  ScoreClsArgs score_cls_args;
  auto* score_cls =
      app.add_subcommand("score-cls", "Binary classification P/R/F_beta");
  score_cls->add_option("--gold", score_cls_args.gold)->required();
  score_cls->add_option("--pred", score_cls_args.pred)->required();
  score_cls->add_option("--beta", score_cls_args.beta);

  TrainHeadArgs train_args;
  auto* train_head = app.add_subcommand(
      "train-head", "Train the MLP classification head on embeddings");
  train_head->add_option("--emb", train_args.emb, "Per-example embedding file")
      ->required();
  train_head->add_option("--labels", train_args.labels, "JSONL with id+label")
      ->required();
  train_head->add_option("--valid-frac", train_args.valid_frac);
  train_head->add_option("--beta", train_args.beta);
  train_head->add_option("--seed", train_args.seed);
  train_head->add_option("--dims", train_args.dims,
                         "Hidden widths, comma separated");
  train_head->add_option("--lr", train_args.lr);
  train_head->add_option("--momentum", train_args.momentum);
  train_head->add_option("--batch", train_args.batch);
  train_head->add_option("--epochs", train_args.epochs);
  train_head->add_option("--patience", train_args.patience);
  train_head->add_option("--out", train_args.out, "Model JSON")->required();

  PredictArgs predict_args;
  auto* predict =
      app.add_subcommand("predict", "Apply a trained head to embeddings");
  predict->add_option("--model", predict_args.model)->required();
  predict->add_option("--emb", predict_args.emb)->required();
  predict->add_option("--in", predict_args.in,
                      "JSONL restricting/ordering the example ids");
  predict->add_option("--out", predict_args.out)->required();

  // Let global flags (--threads) appear after the subcommand name too.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  set_thread_limit(threads);
  RunMetadata meta;
  meta.command = join_argv(argc, argv);

  try {
    if (app.got_subcommand(split)) {
      meta.subcommand = "split";
      return cmd_split(split_args, std::move(meta));
    }
    if (app.got_subcommand(combine)) {
      meta.subcommand = "combine";
      return cmd_combine(combine_args, std::move(meta));
    }
    if (app.got_subcommand(knn)) return cmd_knn(knn_args);
    if (app.got_subcommand(align)) {
      meta.subcommand = "align";
      return cmd_align(align_args, std::move(meta));
    }
    if (app.got_subcommand(translate)) {
      meta.subcommand = "translate";
      return cmd_translate(translate_args, std::move(meta));
    }
    if (app.got_subcommand(decode)) {
      meta.subcommand = "decode";
      return cmd_decode(decode_args, std::move(meta));
    }
    if (app.got_subcommand(cluster)) {
      meta.subcommand = "cluster";
      return cmd_cluster(cluster_args, std::move(meta));
    }
    if (app.got_subcommand(score_coref)) return cmd_score_coref(score_coref_args);
    if (app.got_subcommand(score_cls)) return cmd_score_cls(score_cls_args);
    if (app.got_subcommand(train_head)) {
      meta.subcommand = "train-head";
      return cmd_train_head(train_args, std::move(meta));
    }
    if (app.got_subcommand(predict)) {
      meta.subcommand = "predict";
      return cmd_predict(predict_args, std::move(meta));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cerr << "unknown subcommand\n";
  return 1;
}
