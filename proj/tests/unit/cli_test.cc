#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "judgment_corpus.h"
#include "legalattr/cli.h"
#include "legalattr/corpus.h"
#include "legalattr/emission.h"
#include "synthetic.h"
#include "test_util.h"

namespace legalattr {
namespace cli {
namespace {

using nlohmann::json;
using testing::DataPath;
using testing::ReadAll;
using testing::TempDir;
using testing::WriteAll;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "legalattr");
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool Exists(const std::string &path) { return std::filesystem::exists(path); }

TEST_CASE("convert") {
  TempDir dir("convert");
  SUBCASE("fixture matches the golden TSV and records a manifest") {
    const std::string out = dir.File("fixture.tsv");
    const Result r = Invoke({"convert", "--annotations",
                             DataPath("projection_fixture.jsonl"), "--out", out});
    CHECK(r.code == kExitOk);
    CHECK(ReadAll(out) == ReadAll(DataPath("projection_golden.tsv")));
    const json manifest = json::parse(ReadAll(out + ".manifest.json"));
    CHECK(manifest["command"] == "convert");
    CHECK(manifest["version"] == kVersion);
    CHECK(manifest["outputs"][0] == out);
    CHECK(manifest["config"]["label_scheme"] == "IO");
    CHECK(manifest.contains("duration_seconds"));
    CHECK(manifest["arguments"].size() == 6);
    CHECK(manifest["arguments"][1] == "convert");
  }
  SUBCASE("overlapping spans exit 2 naming the document") {
    const std::string in = dir.File("bad.jsonl");
    WriteAll(in,
             R"({"id":"case-17","text":"abcdefghijkl","spans":[{"start":0,"end":5,"tag":"Riot"},{"start":3,"end":9,"tag":"Riot"}]})"
             "\n");
    const Result r =
        Invoke({"convert", "--annotations", in, "--out", dir.File("o.tsv")});
    CHECK(r.code == kExitBadInput);
    CHECK(r.err.find("case-17") != std::string::npos);
  }
  SUBCASE("empty input gives an empty TSV") {
    const std::string in = dir.File("empty.jsonl");
    WriteAll(in, "");
    const std::string out = dir.File("empty.tsv");
    CHECK(Invoke({"convert", "--annotations", in, "--out", out}).code == kExitOk);
    CHECK(Exists(out));
    CHECK(ReadAll(out).empty());
  }
  SUBCASE("bio flag") {
    const std::string out = dir.File("bio.tsv");
    CHECK(Invoke({"convert", "--annotations", DataPath("projection_fixture.jsonl"),
                  "--out", out, "--bio"})
              .code == kExitOk);
    CHECK(ReadAll(out).find("B-Assault") != std::string::npos);
  }
  SUBCASE("the input is left untouched") {
    const std::string in = dir.File("copy.jsonl");
    const std::string original = ReadAll(DataPath("projection_fixture.jsonl"));
    WriteAll(in, original);
    Invoke({"convert", "--annotations", in, "--out", dir.File("x.tsv")});
    CHECK(ReadAll(in) == original);
  }
}

TEST_CASE("stats") {
  TempDir dir("stats");
  SUBCASE("fixture") {
    const Result r =
        Invoke({"stats", "--input", "fixture=" + DataPath("projection_fixture.jsonl")});
    CHECK(r.code == kExitOk);
    CHECK(r.out == ReadAll(DataPath("projection_stats_golden.tsv")));
  }
  SUBCASE("token TSV input gives the same counts") {
    const Result r =
        Invoke({"stats", "--input", "fixture=" + DataPath("projection_golden.tsv")});
    CHECK(r.out == ReadAll(DataPath("projection_stats_golden.tsv")));
  }
  SUBCASE("empty corpus") {
    const std::string in = dir.File("empty.jsonl");
    WriteAll(in, "");
    const std::string out = dir.File("stats.tsv");
    const Result r =
        Invoke({"stats", "--input", in, "--format", "tsv", "--out", out});
    CHECK(r.code == kExitOk);
    CHECK(r.out ==
          "# split = all\ntag\tsentences\ttokens\n"
          "ExpertWittest\t0\t0\nWittest\t0\t0\nHomicide\t0\t0\n"
          "Assault\t0\t0\nImprisonment\t0\t0\nRiot\t0\t0\nEvidence\t0\t0\n");
    CHECK(ReadAll(out) == r.out);
    CHECK(Exists(out + ".manifest.json"));
  }
  SUBCASE("unknown tag") {
    const std::string in = dir.File("bad.jsonl");
    WriteAll(in, R"({"id":"a","text":"abc","spans":[{"start":0,"end":3,"tag":"Murder"}]})");
    const Result r = Invoke({"stats", "--input", in});
    CHECK(r.code == kExitBadInput);
    CHECK(r.err.find("Murder") != std::string::npos);
  }
}

TEST_CASE("train, tag and eval") {
  TempDir dir("pipeline");
  const std::string train_tsv = dir.File("train.tsv");
  const std::string test_tsv = dir.File("test.tsv");
  WriteAll(train_tsv, corpus::ExportConll(synthetic::Generate(150, 1, "tr")));
  WriteAll(test_tsv, corpus::ExportConll(synthetic::Generate(40, 2, "te")));
  const std::string model = dir.File("model.bin");

  const Result trained = Invoke({"train", "--train", train_tsv, "--epochs", "4",
                                 "--seed", "7", "--out", model});
  REQUIRE(trained.code == kExitOk);
  const json manifest = json::parse(ReadAll(model + ".manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["config"]["epochs"] == 4);

  const std::string tagged = dir.File("tagged.tsv");
  const std::string spans = dir.File("spans.jsonl");
  REQUIRE(Invoke({"tag", "--model", model, "--input", test_tsv, "--out", tagged,
                  "--spans", spans})
              .code == kExitOk);
  const json first = json::parse(ReadAll(spans).substr(0, ReadAll(spans).find('\n')));
  CHECK(first["doc_id"] == "te0");
  CHECK(first["spans"].size() >= 1);

  const std::string report = dir.File("report.json");
  const Result ev = Invoke({"eval", "--pred", tagged, "--out", report});
  REQUIRE(ev.code == kExitOk);
  CHECK(ev.out.rfind("Method ", 0) == 0);
  const json j = json::parse(ReadAll(report));
  CHECK(j["overall_incl_notag"].get<double>() >= 0.95);

  SUBCASE("explicit gold file") {
    const Result ev2 = Invoke({"eval", "--gold", test_tsv, "--pred", tagged});
    CHECK(ev2.code == kExitOk);
    CHECK(ev2.out == ev.out);
  }
  SUBCASE("reruns are byte identical") {
    const std::string model2 = dir.File("model2.bin");
    Invoke({"train", "--train", train_tsv, "--epochs", "4", "--seed", "7",
            "--out", model2});
    CHECK(ReadAll(model2) == ReadAll(model));
    const std::string tagged2 = dir.File("tagged2.tsv");
    Invoke({"tag", "--model", model2, "--input", test_tsv, "--out", tagged2});
    CHECK(ReadAll(tagged2) == ReadAll(tagged));
  }
  SUBCASE("misaligned gold exits 2") {
    const std::string other = dir.File("other.tsv");
    WriteAll(other, corpus::ExportConll(synthetic::Generate(3, 9, "zz")));
    CHECK(Invoke({"eval", "--gold", other, "--pred", tagged}).code ==
          kExitBadInput);
  }
  SUBCASE("corrupted model exits 2") {
    std::string bytes = ReadAll(model);
    bytes[bytes.size() / 2] ^= 1;
    const std::string bad = dir.File("bad.bin");
    WriteAll(bad, bytes);
    const Result r =
        Invoke({"tag", "--model", bad, "--input", test_tsv, "--out", dir.File("x")});
    CHECK(r.code == kExitBadInput);
    CHECK(r.err.find("checksum") != std::string::npos);
  }
}

TEST_CASE("dense training exits 3 when the objective overflows") {
  TempDir dir("numerical");
  const auto seqs = synthetic::Generate(20, 1, "n");
  emission::EmbeddingTable table(1, "huge");
  for (const auto &seq : seqs) {
    for (size_t i = 0; i < seq.size(); ++i) {
      table.Insert({seq.doc_id, static_cast<uint32_t>(seq.sentence_index),
                    static_cast<uint32_t>(i)},
                   {3.0e38f});
    }
  }
  const std::string emb = dir.File("emb.lxem");
  WriteAll(emb, emission::WriteEmbeddings(table));
  const std::string train = dir.File("train.tsv");
  WriteAll(train, corpus::ExportConll(seqs));
  const Result r = Invoke({"train", "--train", train, "--mode", "dense",
                           "--embeddings", emb, "--out", dir.File("m.bin")});
  CHECK(r.code == kExitNumerical);
  CHECK(r.err.find("epoch") != std::string::npos);
}

TEST_CASE("bad invocations exit 2") {
  TempDir dir("bad");
  CHECK(Invoke({}).code == kExitBadInput);
  CHECK(Invoke({"frobnicate"}).code == kExitBadInput);
  CHECK(Invoke({"train", "--train", dir.File("missing.tsv"), "--out",
                dir.File("m")})
            .code == kExitBadInput);
  CHECK(Invoke({"train", "--train", DataPath("projection_fixture.jsonl"),
                "--mode", "dense", "--out", dir.File("m")})
            .code == kExitBadInput);
  CHECK(Invoke({"train", "--train", DataPath("projection_fixture.jsonl"),
                "--epochs", "0", "--out", dir.File("m")})
            .code == kExitBadInput);
  CHECK(Invoke({"stats", "--input", DataPath("projection_fixture.jsonl"),
                "--format", "xml"})
            .code == kExitBadInput);
  const Result version = Invoke({"--version"});
  CHECK(version.code == kExitOk);
  CHECK(version.out.find(kVersion) != std::string::npos);
}

TEST_CASE("judge runs all three modes") {
  TempDir dir("judge");
  synthetic::JudgmentCorpusOptions options;
  options.documents = 60;
  const auto train = synthetic::JudgmentCorpus(options, "tr");
  options.seed = 2;
  options.documents = 30;
  const auto test = synthetic::JudgmentCorpus(options, "te");
  WriteAll(dir.File("train.jsonl"), corpus::WriteAnnotations(train));
  WriteAll(dir.File("test.jsonl"), corpus::WriteAnnotations(test));
  REQUIRE(Invoke({"train", "--train", dir.File("train.jsonl"), "--epochs", "3",
                  "--out", dir.File("crf.bin")})
              .code == kExitOk);
  WriteAll(dir.File("exp.json"),
           R"({"train": "train.jsonl", "test": "test.jsonl",
               "crf_model": "crf.bin",
               "embedding": {"source": "hashed", "dimension": 32}})");
  const std::string out = dir.File("results.json");
  const Result r =
      Invoke({"judge", "--manifest", dir.File("exp.json"), "--out", out});
  REQUIRE(r.code == kExitOk);
  const json rows = json::parse(ReadAll(out))["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["input_format"] == "Text");
  CHECK(rows[1]["input_format"] == "Text+Tag");
  CHECK(rows[2]["input_format"] == "Text+Span");
  CHECK(rows[2]["embedding"] == "hashed-32");
  CHECK(r.out.rfind("Embedding", 0) == 0);
  CHECK(Exists(out + ".manifest.json"));

  const std::string again = dir.File("again.json");
  Invoke({"judge", "--manifest", dir.File("exp.json"), "--out", again});
  CHECK(ReadAll(again) == ReadAll(out));

  WriteAll(dir.File("broken.json"), R"({"train": "train.jsonl"})");
  CHECK(Invoke({"judge", "--manifest", dir.File("broken.json"), "--out",
                dir.File("x.json")})
            .code == kExitBadInput);
}

}  // namespace
}  // namespace cli
}  // namespace legalattr
