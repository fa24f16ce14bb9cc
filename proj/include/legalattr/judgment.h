#ifndef LEGALATTR_JUDGMENT_H_
#define LEGALATTR_JUDGMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "legalattr/corpus.h"
#include "legalattr/crf.h"
#include "legalattr/emission.h"

namespace legalattr {
namespace judgment {

inline constexpr size_t kWindowTokens = 510;

enum class CompositionMode { kText, kTextPlusTag, kTextPlusSpan };

const char *CompositionModeName(CompositionMode mode);  // "Text", "Text+Tag", ...
// Accepts the display names plus "text", "text+tag", "text+span".
CompositionMode ParseCompositionMode(std::string_view name);

// A token of a composed judgment input. Tokens copied from the document keep
// their embedding key; appended tag names have none.
struct TokenRef {
  std::string surface;
  std::optional<emission::EmbeddingKey> key;

  bool operator==(const TokenRef &) const = default;
};

// A predicted span in document order.
struct DocumentSpan {
  int tag = kNoTag;
  std::vector<TokenRef> tokens;
};

// Every token of the document in reading order, keyed by
// (doc_id, sentence, token).
std::vector<TokenRef> DocumentTokens(
    std::span<const corpus::LabeledSequence> sentences);

// Text: the document tokens. TextPlusTag: then one tag-name token per
// distinct predicted tag in tag-set order. TextPlusSpan: then, for every span
// in document order, its tag name followed by its tokens.
std::vector<TokenRef> ComposeInput(std::span<const TokenRef> tokens,
                                   CompositionMode mode,
                                   std::span<const DocumentSpan> spans);

// ---------------------------------------------------------------------------
// Token embeddings.

class EmbeddingSource {
 public:
  virtual ~EmbeddingSource() = default;
  virtual uint32_t dimension() const = 0;
  // Throws ErrorKind::kInvalidInput naming the token when none is available.
  virtual std::vector<double> Embed(const TokenRef &token) const = 0;
  virtual std::string Describe() const = 0;
};

// Deterministic pseudo-random vector per surface: components uniform in
// [-1, 1) from a splitmix64 stream seeded by FNV-1a(surface) and `seed`.
class HashedEmbeddingSource : public EmbeddingSource {
 public:
  HashedEmbeddingSource(uint32_t dimension, uint64_t seed)
      : dimension_(dimension), seed_(seed) {}

  uint32_t dimension() const override { return dimension_; }
  std::vector<double> Embed(const TokenRef &token) const override;
  std::string Describe() const override;

 private:
  uint32_t dimension_;
  uint64_t seed_;
};

// Looks tokens up by key; tokens without a key or absent from the table go
// to `fallback` when one is given.
class TableEmbeddingSource : public EmbeddingSource {
 public:
  TableEmbeddingSource(const emission::EmbeddingTable &table,
                       const EmbeddingSource *fallback = nullptr);

  uint32_t dimension() const override { return table_.dimension(); }
  std::vector<double> Embed(const TokenRef &token) const override;
  std::string Describe() const override;

 private:
  const emission::EmbeddingTable &table_;
  const EmbeddingSource *fallback_;
};

// Mean embedding of the last min(window, |tokens|) tokens.
std::vector<double> DocumentVector(std::span<const TokenRef> tokens,
                                   const EmbeddingSource &source,
                                   size_t window = kWindowTokens);

// ---------------------------------------------------------------------------
// Logistic regression.

struct JudgmentExample {
  std::string doc_id;
  std::vector<double> features;
  int label = 0;
};

struct LogRegConfig {
  int epochs = 2000;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  uint64_t seed = 1;
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  uint64_t seed = 0;
  int iterations = 0;
  double final_loss = 0.0;
};

// mean_i log(1 + exp(-s_i (w.x_i + b))) + l2 * ||w||^2 with s_i = 2y_i - 1;
// the bias is not penalized.
double LogRegLoss(std::span<const JudgmentExample> examples,
                  const LogRegModel &model, double l2);

// Full-batch gradient descent from zero. Stops when the gradient norm drops
// below 1e-6 or after config.epochs steps.
LogRegModel TrainLogReg(std::span<const JudgmentExample> examples,
                        const LogRegConfig &config);

struct Prediction {
  double probability = 0.0;
  int label = 0;  // probability >= 0.5
};

Prediction PredictLogReg(const LogRegModel &model,
                         std::span<const double> features);

// Per-class precision and recall plus accuracy. Precision is undefined for a
// class that is never predicted and recall for a class that never occurs.
struct JudgmentMetrics {
  std::optional<double> precision0;
  std::optional<double> recall0;
  std::optional<double> precision1;
  std::optional<double> recall1;
  double accuracy = 0.0;
};

JudgmentMetrics ComputeMetrics(std::span<const int> gold,
                               std::span<const int> predicted);

// ---------------------------------------------------------------------------
// Experiment pipeline.

struct ExperimentRow {
  std::string embedding;
  CompositionMode mode = CompositionMode::kText;
  JudgmentMetrics metrics;
};

// Tags every document with `model`, composes the inputs for `mode`, trains
// the classifier on `train` and scores it on `test`. Every document needs a
// judgment label.
ExperimentRow RunExperiment(std::span<const corpus::Document> train,
                            std::span<const corpus::Document> test,
                            const crf::CrfModel &model,
                            const crf::EmissionSource &crf_source,
                            CompositionMode mode, const EmbeddingSource &source,
                            const LogRegConfig &config);

// Predicted spans of a document, in document order.
std::vector<DocumentSpan> PredictSpans(
    std::span<const corpus::LabeledSequence> sentences,
    const crf::CrfModel &model, const crf::EmissionSource &crf_source);

// Fixed-width table with columns Embedding, Input Format, P(0), R(0), P(1),
// R(1), Acc.
std::string RenderResults(std::span<const ExperimentRow> rows);
nlohmann::json ResultsToJson(std::span<const ExperimentRow> rows);

}  // namespace judgment
}  // namespace legalattr

#endif  // LEGALATTR_JUDGMENT_H_
