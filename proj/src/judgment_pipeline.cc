#include <cstdio>

#include "legalattr/error.h"
#include "legalattr/judgment.h"

namespace legalattr {
namespace judgment {
namespace {

std::vector<JudgmentExample> BuildExamples(
    std::span<const corpus::Document> docs, const crf::CrfModel &model,
    const crf::EmissionSource &crf_source, CompositionMode mode,
    const EmbeddingSource &source) {
  std::vector<JudgmentExample> examples;
  for (const corpus::Document &doc : docs) {
    if (!doc.judgment) {
      throw Error(ErrorKind::kInvalidInput,
                  "document '" + doc.id + "' has no judgment label");
    }
    const std::vector<corpus::LabeledSequence> sentences =
        corpus::ProjectSpans(doc);
    std::vector<TokenRef> tokens = DocumentTokens(sentences);
    if (tokens.empty()) {
      throw Error(ErrorKind::kInvalidInput,
                  "document '" + doc.id + "' has no tokens");
    }
    std::vector<DocumentSpan> spans;
    if (mode != CompositionMode::kText) {
      spans = PredictSpans(sentences, model, crf_source);
    }
    const std::vector<TokenRef> composed = ComposeInput(tokens, mode, spans);
    examples.push_back(
        {doc.id, DocumentVector(composed, source), *doc.judgment});
  }
  return examples;
}

std::string Format(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *value);
  return buf;
}

nlohmann::json ToJson(std::optional<double> value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::string Pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::vector<DocumentSpan> PredictSpans(
    std::span<const corpus::LabeledSequence> sentences,
    const crf::CrfModel &model, const crf::EmissionSource &crf_source) {
  std::vector<DocumentSpan> spans;
  for (const corpus::LabeledSequence &seq : sentences) {
    if (seq.size() == 0) continue;
    const crf::TagPrediction prediction =
        model.Predict(crf::BuildInput(seq, crf_source));
    for (const crf::ExtractedSpan &span :
         crf::ExtractSpans(seq.tokens, prediction.labels)) {
      DocumentSpan out;
      out.tag = span.tag;
      for (size_t i = span.begin; i < span.end; ++i) {
        out.tokens.push_back(
            {seq.tokens[i].surface,
             emission::EmbeddingKey{seq.doc_id,
                                    static_cast<uint32_t>(seq.sentence_index),
                                    static_cast<uint32_t>(i)}});
      }
      spans.push_back(std::move(out));
    }
  }
  return spans;
}

ExperimentRow RunExperiment(std::span<const corpus::Document> train,
                            std::span<const corpus::Document> test,
                            const crf::CrfModel &model,
                            const crf::EmissionSource &crf_source,
                            CompositionMode mode, const EmbeddingSource &source,
                            const LogRegConfig &config) {
  if (test.empty()) {
    throw Error(ErrorKind::kInvalidInput, "empty judgment test set");
  }
  const std::vector<JudgmentExample> train_examples =
      BuildExamples(train, model, crf_source, mode, source);
  const std::vector<JudgmentExample> test_examples =
      BuildExamples(test, model, crf_source, mode, source);
  const LogRegModel classifier = TrainLogReg(train_examples, config);

  std::vector<int> gold;
  std::vector<int> predicted;
  for (const JudgmentExample &ex : test_examples) {
    gold.push_back(ex.label);
    predicted.push_back(PredictLogReg(classifier, ex.features).label);
  }
  return {source.Describe(), mode, ComputeMetrics(gold, predicted)};
}

std::string RenderResults(std::span<const ExperimentRow> rows) {
  size_t width = 10;
  for (const ExperimentRow &row : rows) {
    width = std::max(width, row.embedding.size() + 2);
  }
  std::string out = Pad("Embedding", width) + Pad("Input Format", 14) +
                    "P(0)  R(0)  P(1)  R(1)  Acc\n";
  for (const ExperimentRow &row : rows) {
    out += Pad(row.embedding, width) +
           Pad(CompositionModeName(row.mode), 14) +
           Pad(Format(row.metrics.precision0), 6) +
           Pad(Format(row.metrics.recall0), 6) +
           Pad(Format(row.metrics.precision1), 6) +
           Pad(Format(row.metrics.recall1), 6) +
           Format(row.metrics.accuracy) + "\n";
  }
  return out;
}

nlohmann::json ResultsToJson(std::span<const ExperimentRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const ExperimentRow &row : rows) {
    out.push_back({{"embedding", row.embedding},
                   {"input_format", CompositionModeName(row.mode)},
                   {"class0_precision", ToJson(row.metrics.precision0)},
                   {"class0_recall", ToJson(row.metrics.recall0)},
                   {"class1_precision", ToJson(row.metrics.precision1)},
                   {"class1_recall", ToJson(row.metrics.recall1)},
                   {"accuracy", row.metrics.accuracy}});
  }
  return {{"rows", out}};
}

}  // namespace judgment
}  // namespace legalattr
