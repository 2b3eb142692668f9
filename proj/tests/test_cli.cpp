#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "testutil.hpp"

using testutil::ScratchDir;
using testutil::read_file;
using testutil::write_file;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CmdResult run_cli(const ScratchDir& dir, const std::string& args) {
  static int counter = 0;
  const std::string out_path = dir.file("stdout_" + std::to_string(counter));
  const std::string err_path = dir.file("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd = "SOURCE_DATE_EPOCH=1700000000 " +
                          std::string(XLE_CLI_BIN) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

std::string data_file(const std::string& name) {
  return std::string(XLE_TEST_DATA) + "/" + name;
}

const std::string kToyVec =
    "5 3\n"
    "hotel 1 0 0\n"
    "radio 0 1 0\n"
    "metro 0 0 1\n"
    "taxi 0.7 0.7 0\n"
    ". 0.5 -0.5 0.7\n";

}  // namespace

TEST_CASE("cli: --version prints the semver") {
  ScratchDir dir("cli");
  const auto r = run_cli(dir, "--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("cli: usage errors exit 1") {
  ScratchDir dir("cli");
  CHECK(run_cli(dir, "no-such-command").exit_code == 1);
  CHECK(run_cli(dir, "knn --bogus-flag x").exit_code == 1);
  CHECK(run_cli(dir, "").exit_code == 1);
}

TEST_CASE("cli: data errors exit 2") {
  ScratchDir dir("cli");
  const auto r = run_cli(dir, "knn --emb /nonexistent.vec --word hotel");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("cli: score-coref identity prints 1.0000") {
  ScratchDir dir("cli");
  const auto r = run_cli(dir, "score-coref --gold " + data_file("coref_gold.jsonl") +
                                  " --pred " + data_file("golden_clusters.jsonl"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("CoNLL-2012 average: 1.0000") != std::string::npos);
}

TEST_CASE("cli: cluster reproduces the golden predictions with metadata") {
  ScratchDir dir("cli");
  const std::string out = dir.file("pred.jsonl");
  const auto r = run_cli(dir, "cluster --scores " + data_file("pair_scores.jsonl") +
                                  " --threshold 0.5 --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(read_file(out) == read_file(data_file("golden_clusters.jsonl")));
  const std::string meta = read_file(out + ".meta.json");
  CHECK(meta.find("\"subcommand\": \"cluster\"") != std::string::npos);
  CHECK(meta.find("\"fnv1a64\"") != std::string::npos);
  CHECK(meta.find("2023-11-14") != std::string::npos);  // SOURCE_DATE_EPOCH
}

TEST_CASE("cli: decode matches the golden fixture") {
  ScratchDir dir("cli");
  const std::string out = dir.file("decoded.bio");
  const auto r = run_cli(
      dir, "decode --scores " + data_file("sample_scores.txt") + " --tokens " +
               data_file("sample_tokens.txt") + " --scheme " +
               data_file("scheme_small.txt") + " --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(read_file(out) == read_file(data_file("golden_decoded.bio")));
}

TEST_CASE("cli: split is deterministic and partitions the corpus") {
  ScratchDir dir("cli");
  std::string jsonl;
  for (int i = 0; i < 10; ++i)
    jsonl += "{\"id\":\"d" + std::to_string(i) + "\",\"text\":\"t\",\"label\":" +
             std::to_string(i % 2) + "}\n";
  write_file(dir.file("docs.jsonl"), jsonl);
  const std::string args = "split --in " + dir.file("docs.jsonl") +
                           " --fraction 0.8 --seed 7 --train-out " +
                           dir.file("train.jsonl") + " --valid-out " +
                           dir.file("valid.jsonl");
  CHECK(run_cli(dir, args).exit_code == 0);
  const std::string train_1 = read_file(dir.file("train.jsonl"));
  const std::string valid_1 = read_file(dir.file("valid.jsonl"));
  CHECK(std::count(train_1.begin(), train_1.end(), '\n') == 8);
  CHECK(std::count(valid_1.begin(), valid_1.end(), '\n') == 2);

  CHECK(run_cli(dir, args).exit_code == 0);
  CHECK(read_file(dir.file("train.jsonl")) == train_1);
  CHECK(read_file(dir.file("valid.jsonl")) == valid_1);
}

TEST_CASE("cli: split works on BIO files at sentence granularity") {
  ScratchDir dir("cli");
  const std::string args = "split --in " + data_file("sample.bio") +
                           " --fraction 0.8 --seed 1 --train-out " +
                           dir.file("train.bio") + " --valid-out " +
                           dir.file("valid.bio");
  CHECK(run_cli(dir, args).exit_code == 0);
  const std::string train_bio = read_file(dir.file("train.bio"));
  const std::string valid_bio = read_file(dir.file("valid.bio"));
  CHECK(!train_bio.empty());
  CHECK(!valid_bio.empty());
}

TEST_CASE("cli: combine prefixes ids with the given languages") {
  ScratchDir dir("cli");
  write_file(dir.file("en.jsonl"), "{\"id\":\"a\",\"text\":\"x\",\"label\":1}\n");
  write_file(dir.file("es.jsonl"), "{\"id\":\"a\",\"text\":\"y\",\"label\":0}\n");
  const auto r = run_cli(dir, "combine --in " + dir.file("en.jsonl") + " " +
                                  dir.file("es.jsonl") +
                                  " --langs en es --out " + dir.file("all.jsonl"));
  CHECK(r.exit_code == 0);
  const std::string all = read_file(dir.file("all.jsonl"));
  CHECK(all.find("\"en:a\"") != std::string::npos);
  CHECK(all.find("\"es:a\"") != std::string::npos);
}

TEST_CASE("cli: knn ranks the word itself first") {
  ScratchDir dir("cli");
  write_file(dir.file("toy.vec"), kToyVec);
  const auto r =
      run_cli(dir, "knn --emb " + dir.file("toy.vec") + " --word hotel --k 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("hotel\t1.000000", 0) == 0);

  const auto miss =
      run_cli(dir, "knn --emb " + dir.file("toy.vec") + " --word zzz");
  CHECK(miss.exit_code == 2);
}

TEST_CASE("cli: align then translate keeps tags and token counts") {
  ScratchDir dir("cli");
  write_file(dir.file("src.vec"), kToyVec);
  write_file(dir.file("tgt.vec"), kToyVec);
  const auto align = run_cli(
      dir, "align --src-emb " + dir.file("src.vec") + " --tgt-emb " +
               dir.file("tgt.vec") + " --iterations 2 --k 2 --out " +
               dir.file("w.map"));
  CHECK(align.exit_code == 0);
  CHECK(std::filesystem::exists(dir.file("w.map.meta.json")));

  write_file(dir.file("in.bio"),
             "hotel\tB-place\nradio\tO\nksrtc\tB-participant\n7\tO\n.\tO\n");
  const auto translate = run_cli(
      dir, "translate --in " + dir.file("in.bio") + " --src-emb " +
               dir.file("src.vec") + " --tgt-emb " + dir.file("tgt.vec") +
               " --mapping " + dir.file("w.map") + " --k 2 --out " +
               dir.file("out.bio"));
  CHECK(translate.exit_code == 0);
  const std::string out = read_file(dir.file("out.bio"));
  // Identical spaces: every in-vocabulary word maps back to itself.
  CHECK(out ==
        "hotel\tB-place\nradio\tO\nksrtc\tB-participant\n7\tO\n.\tO\n");
}

TEST_CASE("cli: combined-language training is a single call") {
  ScratchDir dir("cli");
  // Three per-language label files, one combine, one train-head.
  write_file(dir.file("en.jsonl"),
             "{\"id\":\"a\",\"label\":1}\n{\"id\":\"b\",\"label\":0}\n");
  write_file(dir.file("es.jsonl"),
             "{\"id\":\"a\",\"label\":1}\n{\"id\":\"b\",\"label\":0}\n");
  write_file(dir.file("pt.jsonl"),
             "{\"id\":\"a\",\"label\":0}\n{\"id\":\"b\",\"label\":1}\n");
  const auto combined = run_cli(
      dir, "combine --in " + dir.file("en.jsonl") + " " + dir.file("es.jsonl") +
               " " + dir.file("pt.jsonl") + " --langs en es pt --out " +
               dir.file("all.jsonl"));
  CHECK(combined.exit_code == 0);

  // Embeddings keyed by the combined (language-prefixed) example ids.
  write_file(dir.file("all.vec"),
             "6 2\n"
             "en:a 1 0.2\nen:b -1 0.1\n"
             "es:a 0.9 -0.1\nes:b -0.8 0.2\n"
             "pt:a -0.7 -0.2\npt:b 1.1 0.3\n");
  const auto trained = run_cli(
      dir, "train-head --emb " + dir.file("all.vec") + " --labels " +
               dir.file("all.jsonl") +
               " --valid-frac 0.34 --seed 2 --dims 3 --epochs 5 --patience 5 "
               "--out " +
               dir.file("m.json"));
  CHECK(trained.exit_code == 0);
  CHECK(std::filesystem::exists(dir.file("m.json")));
}

TEST_CASE("cli: unknown --kind is a usage error") {
  ScratchDir dir("cli");
  write_file(dir.file("x.jsonl"), "{\"id\":\"a\",\"label\":1}\n");
  const auto r = run_cli(dir, "split --in " + dir.file("x.jsonl") +
                                  " --kind bogus --train-out " +
                                  dir.file("t") + " --valid-out " +
                                  dir.file("v"));
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli: train-head and predict round trip") {
  ScratchDir dir("cli");
  const std::string train_args =
      "train-head --emb " + data_file("head_emb.vec") + " --labels " +
      data_file("head_labels.jsonl") +
      " --valid-frac 0.25 --beta 1.0 --seed 1 --dims 4 --lr 0.5 --batch 4 "
      "--epochs 40 --patience 40 --out " +
      dir.file("model.json");
  const auto trained = run_cli(dir, train_args);
  CHECK(trained.exit_code == 0);
  CHECK(trained.out.find("selected epoch") != std::string::npos);

  const auto predicted = run_cli(
      dir, "predict --model " + dir.file("model.json") + " --emb " +
               data_file("head_emb.vec") + " --out " + dir.file("pred.jsonl"));
  CHECK(predicted.exit_code == 0);
  const std::string pred = read_file(dir.file("pred.jsonl"));
  CHECK(pred.find("{\"id\":\"e0\",\"label\":1") != std::string::npos);
  CHECK(pred.find("{\"id\":\"e7\",\"label\":0") != std::string::npos);

  // Identical inputs and seeds: byte-identical artifacts, metadata included.
  const std::string model_1 = read_file(dir.file("model.json"));
  const std::string meta_1 = read_file(dir.file("model.json.meta.json"));
  CHECK(run_cli(dir, train_args).exit_code == 0);
  CHECK(read_file(dir.file("model.json")) == model_1);
  CHECK(read_file(dir.file("model.json.meta.json")) == meta_1);

  const auto scored = run_cli(dir, "score-cls --gold " +
                                       data_file("head_labels.jsonl") +
                                       " --pred " + dir.file("pred.jsonl") +
                                       " --beta 1.0");
  CHECK(scored.exit_code == 0);
  CHECK(scored.out.find("F_1") != std::string::npos);
}
