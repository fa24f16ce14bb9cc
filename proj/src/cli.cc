#include "legalattr/cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "legalattr/corpus.h"
#include "legalattr/crf.h"
#include "legalattr/error.h"
#include "legalattr/eval.h"
#include "legalattr/judgment.h"

namespace legalattr {
namespace cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string &path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::kInvalidInput, "failed writing " + path);
}

bool LooksLikeJsonLines(std::string_view data) {
  const size_t first = data.find_first_not_of(" \t\r\n");
  return first != std::string_view::npos && data[first] == '{';
}

// Annotation JSON lines are projected to sentences; anything else is read as
// token TSV.
std::vector<corpus::LabeledSequence> LoadSequences(const std::string &path) {
  const std::string data = ReadFile(path);
  if (LooksLikeJsonLines(data)) {
    return corpus::ProjectCorpus(corpus::ParseAnnotations(data));
  }
  return corpus::ImportConll(data);
}

bool IsTaggedTsv(std::string_view data) {
  size_t pos = 0;
  while (pos < data.size()) {
    size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) eol = data.size();
    std::string_view line = data.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line.find('\t') == std::string_view::npos) continue;
    return std::count(line.begin(), line.end(), '\t') == 2;
  }
  return false;
}

// Records one invocation next to its primary output.
class RunManifest {
 public:
  RunManifest(std::string command, const std::vector<std::string> &args)
      : command_(std::move(command)),
        args_(args),
        start_(std::chrono::steady_clock::now()) {}

  void Config(const std::string &key, json value) { config_[key] = value; }
  void Input(const std::string &path) { inputs_.push_back(path); }
  void Output(const std::string &path) { outputs_.push_back(path); }
  void Seed(uint64_t seed) { seed_ = seed; }

  void Write(const std::string &primary_output) const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    json manifest = {{"command", command_},
                     {"arguments", args_},
                     {"config", config_},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"seed", seed_ ? json(*seed_) : json(nullptr)},
                     {"version", kVersion},
                     {"duration_seconds", seconds}};
    WriteFile(primary_output + ".manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  json config_ = json::object();
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::optional<uint64_t> seed_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------

struct ConvertOptions {
  std::string annotations;
  std::string out;
  bool bio = false;
};

void Convert(const ConvertOptions &opt, const std::vector<std::string> &args) {
  RunManifest manifest("convert", args);
  const auto docs = corpus::ParseAnnotations(ReadFile(opt.annotations));
  const auto seqs = corpus::ProjectCorpus(docs);
  WriteFile(opt.out, corpus::ExportConll(seqs, opt.bio ? corpus::LabelScheme::kBIO
                                                       : corpus::LabelScheme::kIO));
  manifest.Config("label_scheme", opt.bio ? "BIO" : "IO");
  manifest.Input(opt.annotations);
  manifest.Output(opt.out);
  manifest.Write(opt.out);
}

struct StatsOptions {
  std::vector<std::string> inputs;
  std::string format = "table";
  std::string out;
};

void Stats(const StatsOptions &opt, const std::vector<std::string> &args,
           std::ostream &out) {
  RunManifest manifest("stats", args);
  std::vector<corpus::StatsReport> reports;
  for (const std::string &input : opt.inputs) {
    std::string name = "all";
    std::string path = input;
    if (auto eq = input.find('='); eq != std::string::npos) {
      name = input.substr(0, eq);
      path = input.substr(eq + 1);
    }
    reports.push_back(corpus::ComputeStats(LoadSequences(path), name));
    manifest.Input(path);
  }
  std::string text;
  if (opt.format == "table") {
    text = corpus::RenderStatsTable(reports);
  } else {
    for (const corpus::StatsReport &report : reports) {
      text += "# split = " + report.split + "\n" +
              corpus::RenderStatsTsv(report);
    }
  }
  out << text;
  if (!opt.out.empty()) {
    WriteFile(opt.out, text);
    manifest.Config("format", opt.format);
    manifest.Output(opt.out);
    manifest.Write(opt.out);
  }
}

struct TrainOptions {
  std::string train;
  std::string dev;
  std::string mode = "sparse";
  std::string embeddings;
  std::string out;
  crf::TrainConfig config;
};

void Train(const TrainOptions &opt, const std::vector<std::string> &args,
           std::ostream &out) {
  RunManifest manifest("train", args);
  crf::EmissionSource source;
  std::optional<emission::EmbeddingTable> table;
  if (opt.mode == "dense") {
    if (opt.embeddings.empty()) {
      throw Error(ErrorKind::kInvalidInput, "--mode dense needs --embeddings");
    }
    table = emission::LoadEmbeddings(ReadFile(opt.embeddings));
    source.mode = crf::EmissionMode::kDense;
    source.embeddings = &*table;
    manifest.Input(opt.embeddings);
  }
  const auto train = LoadSequences(opt.train);
  manifest.Input(opt.train);
  std::vector<corpus::LabeledSequence> dev;
  if (!opt.dev.empty()) {
    dev = LoadSequences(opt.dev);
    manifest.Input(opt.dev);
  }
  const crf::CrfModel model = crf::TrainModel(train, dev, source, opt.config);
  WriteFile(opt.out, crf::SerializeModel(model));

  const crf::TrainConfig &c = opt.config;
  manifest.Config("mode", opt.mode);
  manifest.Config("epochs", c.epochs);
  manifest.Config("batch", c.batch_size);
  manifest.Config("lr", c.learning_rate);
  manifest.Config("decay", c.decay);
  manifest.Config("l2", c.l2);
  manifest.Config("clip", c.clip_norm);
  manifest.Config("patience", c.patience);
  manifest.Config("epochs_run", model.metadata.epochs_run);
  manifest.Config("final_objective", model.metadata.final_objective);
  manifest.Seed(c.seed);
  manifest.Output(opt.out);
  manifest.Write(opt.out);
  out << "trained " << crf::EmissionModeName(source.mode) << " model: "
      << model.metadata.epochs_run << " epochs, objective "
      << model.metadata.final_objective << "\n";
}

struct TagOptions {
  std::string model;
  std::string input;
  std::string embeddings;
  std::string out;
  std::string spans;
};

void Tag(const TagOptions &opt, const std::vector<std::string> &args) {
  RunManifest manifest("tag", args);
  const crf::CrfModel model = crf::DeserializeModel(ReadFile(opt.model));
  manifest.Input(opt.model);
  crf::EmissionSource source;
  source.mode = model.params.mode;
  std::optional<emission::EmbeddingTable> table;
  if (source.mode == crf::EmissionMode::kSparse) {
    source.feature_dimension = model.params.sparse_weights.rows();
  } else {
    if (opt.embeddings.empty()) {
      throw Error(ErrorKind::kInvalidInput,
                  "a dense-mode model needs --embeddings");
    }
    table = emission::LoadEmbeddings(ReadFile(opt.embeddings));
    source.embeddings = &*table;
    manifest.Input(opt.embeddings);
  }

  const auto seqs = LoadSequences(opt.input);
  manifest.Input(opt.input);
  std::vector<std::vector<int>> predicted;
  std::string sidecar;
  json doc_spans;
  std::string current_doc;
  auto flush = [&]() {
    if (!doc_spans.is_null()) sidecar += doc_spans.dump() + "\n";
  };
  for (const corpus::LabeledSequence &seq : seqs) {
    std::vector<int> labels;
    if (seq.size() > 0) {
      labels = model.Predict(crf::BuildInput(seq, source)).labels;
    }
    if (doc_spans.is_null() || seq.doc_id != current_doc) {
      flush();
      current_doc = seq.doc_id;
      doc_spans = {{"doc_id", seq.doc_id}, {"spans", json::array()}};
    }
    for (const crf::ExtractedSpan &span : crf::ExtractSpans(seq.tokens, labels)) {
      doc_spans["spans"].push_back(
          {{"tag", TagSet::Legal().name(span.tag)}, {"text", span.text}});
    }
    predicted.push_back(std::move(labels));
  }
  flush();

  WriteFile(opt.out, corpus::ExportTagged(seqs, predicted));
  manifest.Output(opt.out);
  if (!opt.spans.empty()) {
    WriteFile(opt.spans, sidecar);
    manifest.Output(opt.spans);
  }
  manifest.Config("mode", crf::EmissionModeName(source.mode));
  manifest.Write(opt.out);
}

struct EvalOptions {
  std::string gold;
  std::string pred;
  std::string method = "SeqLabel (CRF)";
  std::string out;
};

void Eval(const EvalOptions &opt, const std::vector<std::string> &args,
          std::ostream &out) {
  RunManifest manifest("eval", args);
  const std::string pred_data = ReadFile(opt.pred);
  manifest.Input(opt.pred);
  std::vector<corpus::LabeledSequence> gold;
  std::vector<corpus::LabeledSequence> predicted;
  if (IsTaggedTsv(pred_data)) {
    corpus::TaggedCorpus tagged = corpus::ImportTagged(pred_data);
    predicted = std::move(tagged.predicted);
    gold = std::move(tagged.gold);
  } else {
    predicted = corpus::ImportConll(pred_data);
  }
  if (!opt.gold.empty()) {
    gold = LoadSequences(opt.gold);
    manifest.Input(opt.gold);
  } else if (gold.empty() && !predicted.empty()) {
    throw Error(ErrorKind::kInvalidInput,
                "--gold is required unless --pred is tagging output");
  }
  const eval::TagReport report = eval::TokenAccuracy(gold, predicted);
  const std::string table = eval::RenderReport(report, opt.method);
  out << table;
  if (!opt.out.empty()) {
    json result = eval::ReportToJson(report);
    result["method"] = opt.method;
    WriteFile(opt.out, result.dump(2) + "\n");
    manifest.Config("method", opt.method);
    manifest.Output(opt.out);
    manifest.Write(opt.out);
  }
}

struct JudgeOptions {
  std::string manifest;
  std::string out;
  uint64_t seed = 1;
};

std::string Resolve(const fs::path &base, const std::string &path) {
  fs::path p(path);
  return p.is_absolute() ? path : (base / p).string();
}

void Judge(const JudgeOptions &opt, const std::vector<std::string> &args,
           std::ostream &out) {
  RunManifest run("judge", args);
  run.Seed(opt.seed);
  run.Input(opt.manifest);
  json config;
  try {
    config = json::parse(ReadFile(opt.manifest));
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kInvalidInput,
                "experiment manifest: " + std::string(e.what()));
  }
  const fs::path base = fs::path(opt.manifest).parent_path();

  try {
    auto path = [&](const char *key) {
      const std::string resolved = Resolve(base, config.at(key).get<std::string>());
      run.Input(resolved);
      return resolved;
    };
    const auto train = corpus::ParseAnnotations(ReadFile(path("train")));
    const auto test = corpus::ParseAnnotations(ReadFile(path("test")));
    const crf::CrfModel model = crf::DeserializeModel(ReadFile(path("crf_model")));

    crf::EmissionSource crf_source;
    crf_source.mode = model.params.mode;
    crf_source.feature_dimension = model.params.sparse_weights.rows();
    std::optional<emission::EmbeddingTable> crf_table;
    if (model.params.mode == crf::EmissionMode::kDense) {
      crf_table = emission::LoadEmbeddings(ReadFile(path("crf_embeddings")));
      crf_source.embeddings = &*crf_table;
    }

    std::vector<judgment::CompositionMode> modes;
    if (config.contains("modes")) {
      for (const json &m : config["modes"]) {
        modes.push_back(judgment::ParseCompositionMode(m.get<std::string>()));
      }
    } else {
      modes = {judgment::CompositionMode::kText,
               judgment::CompositionMode::kTextPlusTag,
               judgment::CompositionMode::kTextPlusSpan};
    }

    const json embedding = config.value("embedding", json::object());
    const std::string kind = embedding.value("source", "hashed");
    std::unique_ptr<judgment::EmbeddingSource> hashed;
    std::optional<emission::EmbeddingTable> table;
    std::unique_ptr<judgment::EmbeddingSource> source;
    if (kind == "hashed") {
      source = std::make_unique<judgment::HashedEmbeddingSource>(
          embedding.value("dimension", 64u), opt.seed);
    } else if (kind == "table") {
      const std::string table_path =
          Resolve(base, embedding.at("path").get<std::string>());
      run.Input(table_path);
      table = emission::LoadEmbeddings(ReadFile(table_path));
      if (embedding.value("fallback", true)) {
        hashed = std::make_unique<judgment::HashedEmbeddingSource>(
            table->dimension(), opt.seed);
      }
      source = std::make_unique<judgment::TableEmbeddingSource>(*table,
                                                                hashed.get());
    } else {
      throw Error(ErrorKind::kInvalidInput,
                  "unknown embedding source '" + kind + "'");
    }

    judgment::LogRegConfig logreg;
    const json lr = config.value("logreg", json::object());
    logreg.epochs = lr.value("epochs", logreg.epochs);
    logreg.learning_rate = lr.value("rate", logreg.learning_rate);
    logreg.l2 = lr.value("l2", logreg.l2);
    logreg.seed = opt.seed;

    std::vector<judgment::ExperimentRow> rows;
    for (judgment::CompositionMode mode : modes) {
      rows.push_back(judgment::RunExperiment(train, test, model, crf_source,
                                             mode, *source, logreg));
    }
    out << judgment::RenderResults(rows);
    WriteFile(opt.out, judgment::ResultsToJson(rows).dump(2) + "\n");
    run.Config("experiment", config);
    run.Output(opt.out);
    run.Write(opt.out);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kInvalidInput,
                "experiment manifest: " + std::string(e.what()));
  }
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Legal attribute extraction with a linear-chain CRF",
               "legalattr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ConvertOptions convert;
  auto *convert_cmd =
      app.add_subcommand("convert", "Project span annotations to token TSV");
  convert_cmd->add_option("--annotations", convert.annotations)->required();
  convert_cmd->add_option("--out", convert.out)->required();
  convert_cmd->add_flag("--bio", convert.bio, "Write B-/I-/O labels");

  StatsOptions stats;
  auto *stats_cmd = app.add_subcommand("stats", "Per-tag dataset statistics");
  stats_cmd
      ->add_option("--input", stats.inputs,
                   "Annotation JSONL or token TSV, optionally NAME=PATH")
      ->required();
  stats_cmd->add_option("--format", stats.format)
      ->check(CLI::IsMember({"table", "tsv"}));
  stats_cmd->add_option("--out", stats.out);

  TrainOptions train;
  auto *train_cmd = app.add_subcommand("train", "Train a CRF tagger");
  train_cmd->add_option("--train", train.train)->required();
  train_cmd->add_option("--dev", train.dev);
  train_cmd->add_option("--mode", train.mode)
      ->check(CLI::IsMember({"sparse", "dense"}));
  train_cmd->add_option("--embeddings", train.embeddings);
  train_cmd->add_option("--epochs", train.config.epochs);
  train_cmd->add_option("--batch", train.config.batch_size);
  train_cmd->add_option("--lr", train.config.learning_rate);
  train_cmd->add_option("--l2", train.config.l2);
  train_cmd->add_option("--clip", train.config.clip_norm);
  train_cmd->add_option("--seed", train.config.seed);
  train_cmd->add_option("--out", train.out)->required();

  TagOptions tag;
  auto *tag_cmd = app.add_subcommand("tag", "Tag sentences with a trained model");
  tag_cmd->add_option("--model", tag.model)->required();
  tag_cmd->add_option("--input", tag.input)->required();
  tag_cmd->add_option("--embeddings", tag.embeddings);
  tag_cmd->add_option("--out", tag.out)->required();
  tag_cmd->add_option("--spans", tag.spans, "JSON-lines span sidecar");

  EvalOptions eval_opt;
  auto *eval_cmd = app.add_subcommand("eval", "Per-tag token accuracy");
  eval_cmd->add_option("--gold", eval_opt.gold);
  eval_cmd->add_option("--pred", eval_opt.pred)->required();
  eval_cmd->add_option("--method", eval_opt.method);
  eval_cmd->add_option("--out", eval_opt.out, "JSON report");

  JudgeOptions judge;
  auto *judge_cmd =
      app.add_subcommand("judge", "Judgment prediction experiment");
  judge_cmd->add_option("--manifest", judge.manifest)->required();
  judge_cmd->add_option("--out", judge.out)->required();
  judge_cmd->add_option("--seed", judge.seed);

  std::vector<const char *> argv;
  for (const std::string &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*convert_cmd) Convert(convert, args);
    if (*stats_cmd) Stats(stats, args, out);
    if (*train_cmd) Train(train, args, out);
    if (*tag_cmd) Tag(tag, args);
    if (*eval_cmd) Eval(eval_opt, args, out);
    if (*judge_cmd) Judge(judge, args, out);
  } catch (const Error &e) {
    err << "legalattr: " << ErrorKindName(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::kNumerical ? kExitNumerical : kExitBadInput;
  } catch (const std::exception &e) {
    err << "legalattr: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace cli
}  // namespace legalattr
