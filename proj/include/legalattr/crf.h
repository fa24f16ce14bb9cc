#ifndef LEGALATTR_CRF_H_
#define LEGALATTR_CRF_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "legalattr/corpus.h"
#include "legalattr/emission.h"
#include "legalattr/matrix.h"
#include "legalattr/tagset.h"

namespace legalattr {
namespace crf {

// Pairwise and boundary scores of a linear chain over L labels.
// transitions(i, j) scores label j directly following label i.
struct ChainScores {
  ChainScores() = default;
  explicit ChainScores(int num_labels)
      : transitions(num_labels, num_labels),
        start(num_labels, 0.0),
        stop(num_labels, 0.0) {}

  int num_labels() const { return static_cast<int>(start.size()); }

  Matrix transitions;
  std::vector<double> start;
  std::vector<double> stop;

  bool operator==(const ChainScores &) const = default;
};

// ---------------------------------------------------------------------------
// Inference. All dynamic programming runs in log space; every function
// expects an n x L emission matrix with n >= 1 and L matching the chain.

// start[y0] + sum_i emissions(i, y_i) + sum_i transitions(y_{i-1}, y_i)
//   + stop[y_{n-1}]
double ScoreSequence(const Matrix &emissions, const ChainScores &chain,
                     std::span<const int> labels);

// log of the sum of exp(ScoreSequence) over all L^n label sequences.
double LogPartition(const Matrix &emissions, const ChainScores &chain);

struct ForwardBackward {
  double log_partition = 0.0;
  Matrix log_alpha;  // n x L
  Matrix log_beta;   // n x L
  Matrix marginals;  // n x L, P(y_i = t)
  // L x L, sum over positions of P(y_{i-1} = s, y_i = t).
  Matrix expected_transitions;
};

ForwardBackward RunForwardBackward(const Matrix &emissions,
                                   const ChainScores &chain);

Matrix Marginals(const Matrix &emissions, const ChainScores &chain);

struct TagPrediction {
  std::vector<int> labels;
  double score = 0.0;
  std::optional<Matrix> marginals;
};

// Highest-scoring label sequence. Ties go to the lowest label index at every
// comparison, so an all-zero model decodes to all zeros.
TagPrediction Viterbi(const Matrix &emissions, const ChainScores &chain);

// ---------------------------------------------------------------------------
// Parameters and training instances.

enum class EmissionMode : uint8_t { kSparse = 0, kDense = 1 };

const char *EmissionModeName(EmissionMode mode);

// Chain scores plus exactly one emission block: sparse hashed-feature weights
// (D x L) or a dense projection (d x L) with per-label bias.
struct CrfParameters {
  static CrfParameters Sparse(int num_labels, uint64_t feature_dimension);
  static CrfParameters Dense(int num_labels, uint32_t embedding_dimension);

  int num_labels() const { return chain.num_labels(); }

  EmissionMode mode = EmissionMode::kSparse;
  ChainScores chain;
  Matrix sparse_weights;
  Matrix projection;
  std::vector<double> bias;

  bool operator==(const CrfParameters &) const = default;
};

// Per-token model input: hashed features or an n x d embedding matrix.
using SequenceInput =
    std::variant<std::vector<emission::SparseFeatureVector>, Matrix>;

size_t InputLength(const SequenceInput &input);

struct Instance {
  SequenceInput input;
  std::vector<int> labels;
};

Matrix ComputeEmissions(const CrfParameters &params,
                        const SequenceInput &input);

// sum over the batch of (score - log Z) - l2 * ||theta||^2, where theta
// covers every parameter.
double LogLikelihood(std::span<const Instance> batch,
                     const CrfParameters &params, double l2);

// Gradient of LogLikelihood with respect to every parameter, returned in the
// same shape as `params`.
CrfParameters Gradient(std::span<const Instance> batch,
                       const CrfParameters &params, double l2);

double SquaredNorm(const CrfParameters &params);

// ---------------------------------------------------------------------------
// Training.

struct TrainConfig {
  int epochs = 30;
  int batch_size = 16;
  double learning_rate = 0.5;
  // Epoch e uses learning_rate / (1 + decay * e).
  double decay = 0.1;
  double l2 = 1e-4;
  // The mean data gradient of a batch is rescaled to this norm when larger.
  double clip_norm = 5.0;
  uint64_t seed = 1;
  // Stop after this many epochs without a held-out improvement; 0 disables.
  int patience = 0;
  // Keep sentences whose labels are all NoTag in the training set.
  bool include_untagged = false;
};

// Throws ErrorKind::kInvalidInput describing the first bad field.
void ValidateConfig(const TrainConfig &config);

struct TrainingMetadata {
  uint64_t seed = 0;
  uint32_t epochs_run = 0;
  double final_objective = 0.0;

  bool operator==(const TrainingMetadata &) const = default;
};

struct TrainResult {
  CrfParameters params;
  TrainingMetadata metadata;
};

// Mini-batch gradient ascent from all-zero parameters shaped like `shape`.
// Every epoch visits the training set in a seeded shuffled order; the L2 term
// is applied as a proximal shrink after each step. Returns the parameters with
// the best held-out log-likelihood seen (the initial parameters included).
// Without held-out data the last parameters are returned. Throws
// ErrorKind::kNumerical naming the epoch and batch when the objective stops
// being finite.
TrainResult Train(std::span<const Instance> train,
                  std::span<const Instance> dev, const CrfParameters &shape,
                  const TrainConfig &config);

// ---------------------------------------------------------------------------
// Models over the legal tag set.

struct EmissionSource {
  EmissionMode mode = EmissionMode::kSparse;
  uint64_t feature_dimension = emission::kDefaultHashDimension;
  const emission::EmbeddingTable *embeddings = nullptr;  // dense mode only
};

SequenceInput BuildInput(const corpus::LabeledSequence &seq,
                         const EmissionSource &source);

std::vector<Instance> BuildInstances(
    std::span<const corpus::LabeledSequence> seqs,
    const EmissionSource &source);

struct CrfModel {
  TagSet tags = TagSet::Legal();
  CrfParameters params;
  TrainingMetadata metadata;

  // Viterbi labels, optionally with marginals.
  TagPrediction Predict(const SequenceInput &input,
                        bool with_marginals = false) const;

  bool operator==(const CrfModel &) const = default;
};

// Builds the training and held-out instances and trains a model. Training
// sentences without highlighted tokens are dropped unless
// config.include_untagged is set.
CrfModel TrainModel(std::span<const corpus::LabeledSequence> train,
                    std::span<const corpus::LabeledSequence> dev,
                    const EmissionSource &source, const TrainConfig &config);

// Model file: "LXCRF" | version u16 | mode u8 | tag names (u32 count, each
// u32 length + bytes) | L u32 | emission rows u64 | seed u64 | epochs u32 |
// objective f64 | transitions, start, stop, emission block (and bias in dense
// mode) as little-endian f64 | CRC-32 of everything before it.
inline constexpr uint16_t kModelFormatVersion = 1;

std::string SerializeModel(const CrfModel &model);
CrfModel DeserializeModel(std::string_view bytes);

// ---------------------------------------------------------------------------
// Span extraction.

struct ExtractedSpan {
  int tag = kNoTag;
  size_t begin = 0;  // token range [begin, end)
  size_t end = 0;
  std::string text;  // surfaces joined by single spaces

  bool operator==(const ExtractedSpan &) const = default;
};

// Maximal runs of one non-NoTag label.
std::vector<ExtractedSpan> ExtractSpans(std::span<const corpus::Token> tokens,
                                        std::span<const int> labels,
                                        int no_tag = kNoTag);

}  // namespace crf
}  // namespace legalattr

#endif  // LEGALATTR_CRF_H_
