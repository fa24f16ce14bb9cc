#include <cmath>

#include "crf_internal.h"
#include "legalattr/error.h"

namespace legalattr {
namespace crf {

using internal::ComputeStatistics;
using internal::ForEachBlock;
using internal::ForEachEmissionGradient;
using internal::SequenceStatistics;

const char *EmissionModeName(EmissionMode mode) {
  return mode == EmissionMode::kSparse ? "sparse" : "dense";
}

CrfParameters CrfParameters::Sparse(int num_labels,
                                    uint64_t feature_dimension) {
  CrfParameters params;
  params.mode = EmissionMode::kSparse;
  params.chain = ChainScores(num_labels);
  params.sparse_weights = Matrix(feature_dimension, num_labels);
  return params;
}

CrfParameters CrfParameters::Dense(int num_labels,
                                   uint32_t embedding_dimension) {
  CrfParameters params;
  params.mode = EmissionMode::kDense;
  params.chain = ChainScores(num_labels);
  params.projection = Matrix(embedding_dimension, num_labels);
  params.bias.assign(num_labels, 0.0);
  return params;
}

size_t InputLength(const SequenceInput &input) {
  if (const auto *features =
          std::get_if<std::vector<emission::SparseFeatureVector>>(&input)) {
    return features->size();
  }
  return std::get<Matrix>(input).rows();
}

Matrix ComputeEmissions(const CrfParameters &params,
                        const SequenceInput &input) {
  if (const auto *features =
          std::get_if<std::vector<emission::SparseFeatureVector>>(&input)) {
    if (params.mode != EmissionMode::kSparse) {
      throw Error(ErrorKind::kInvalidInput,
                  "sparse features given to a dense-mode model");
    }
    return emission::SparseEmissions(params.sparse_weights, *features);
  }
  if (params.mode != EmissionMode::kDense) {
    throw Error(ErrorKind::kInvalidInput,
                "embeddings given to a sparse-mode model");
  }
  return emission::DenseEmissions(params.projection, params.bias,
                                  std::get<Matrix>(input));
}

namespace internal {

SequenceStatistics ComputeStatistics(const Instance &instance,
                                     const CrfParameters &params) {
  const Matrix emissions = ComputeEmissions(params, instance.input);
  const ChainScores &chain = params.chain;
  const double score = ScoreSequence(emissions, chain, instance.labels);
  ForwardBackward fb = RunForwardBackward(emissions, chain);

  const size_t n = emissions.rows();
  SequenceStatistics stats;
  stats.log_likelihood = score - fb.log_partition;
  stats.residual = Matrix(n, emissions.cols());
  for (size_t i = 0; i < n; ++i) {
    for (size_t t = 0; t < emissions.cols(); ++t) {
      stats.residual(i, t) = -fb.marginals(i, t);
    }
    stats.residual(i, instance.labels[i]) += 1.0;
  }

  stats.chain_residual = ChainScores(chain.num_labels());
  for (size_t t = 0; t < emissions.cols(); ++t) {
    stats.chain_residual.start[t] = stats.residual(0, t);
    stats.chain_residual.stop[t] = stats.residual(n - 1, t);
    for (size_t s = 0; s < emissions.cols(); ++s) {
      stats.chain_residual.transitions(s, t) = -fb.expected_transitions(s, t);
    }
  }
  for (size_t i = 1; i < n; ++i) {
    stats.chain_residual.transitions(instance.labels[i - 1],
                                     instance.labels[i]) += 1.0;
  }
  return stats;
}

void ForEachEmissionGradient(
    const SequenceInput &input, const Matrix &residual,
    const std::function<void(size_t, size_t, double)> &fn) {
  const size_t labels = residual.cols();
  if (const auto *features =
          std::get_if<std::vector<emission::SparseFeatureVector>>(&input)) {
    for (size_t i = 0; i < features->size(); ++i) {
      for (const emission::FeatureEntry &e : (*features)[i].entries) {
        for (size_t t = 0; t < labels; ++t) {
          fn(e.index, t, e.value * residual(i, t));
        }
      }
    }
    return;
  }
  const Matrix &embeddings = std::get<Matrix>(input);
  for (size_t i = 0; i < embeddings.rows(); ++i) {
    for (size_t k = 0; k < embeddings.cols(); ++k) {
      for (size_t t = 0; t < labels; ++t) {
        fn(k, t, embeddings(i, k) * residual(i, t));
      }
    }
    for (size_t t = 0; t < labels; ++t) {
      fn(embeddings.cols(), t, residual(i, t));
    }
  }
}

void ForEachBlock(CrfParameters &params,
                  const std::function<void(std::span<double>)> &fn) {
  fn(params.chain.transitions.values());
  fn(params.chain.start);
  fn(params.chain.stop);
  fn(params.sparse_weights.values());
  fn(params.projection.values());
  fn(params.bias);
}

void ForEachBlock(const CrfParameters &params,
                  const std::function<void(std::span<const double>)> &fn) {
  fn(params.chain.transitions.values());
  fn(params.chain.start);
  fn(params.chain.stop);
  fn(params.sparse_weights.values());
  fn(params.projection.values());
  fn(params.bias);
}

}  // namespace internal

double SquaredNorm(const CrfParameters &params) {
  double sum = 0.0;
  ForEachBlock(params, [&](std::span<const double> block) {
    for (double v : block) sum += v * v;
  });
  return sum;
}

double LogLikelihood(std::span<const Instance> batch,
                     const CrfParameters &params, double l2) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidInput, "empty batch");
  double total = 0.0;
  for (const Instance &instance : batch) {
    const Matrix emissions = ComputeEmissions(params, instance.input);
    total += ScoreSequence(emissions, params.chain, instance.labels) -
             LogPartition(emissions, params.chain);
  }
  return total - l2 * SquaredNorm(params);
}

CrfParameters Gradient(std::span<const Instance> batch,
                       const CrfParameters &params, double l2) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidInput, "empty batch");
  CrfParameters grad = params;
  ForEachBlock(grad, [](std::span<double> block) {
    std::fill(block.begin(), block.end(), 0.0);
  });
  for (const Instance &instance : batch) {
    const SequenceStatistics stats = ComputeStatistics(instance, params);
    const ChainScores &r = stats.chain_residual;
    for (size_t k = 0; k < r.transitions.size(); ++k) {
      grad.chain.transitions.values()[k] += r.transitions.values()[k];
    }
    for (size_t t = 0; t < r.start.size(); ++t) {
      grad.chain.start[t] += r.start[t];
      grad.chain.stop[t] += r.stop[t];
    }
    if (params.mode == EmissionMode::kSparse) {
      ForEachEmissionGradient(instance.input, stats.residual,
                              [&](size_t row, size_t t, double v) {
                                grad.sparse_weights(row, t) += v;
                              });
    } else {
      const size_t d = params.projection.rows();
      ForEachEmissionGradient(instance.input, stats.residual,
                              [&](size_t row, size_t t, double v) {
                                if (row == d) {
                                  grad.bias[t] += v;
                                } else {
                                  grad.projection(row, t) += v;
                                }
                              });
    }
  }
  if (l2 != 0.0) {
    std::vector<std::span<const double>> theta;
    ForEachBlock(params,
                 [&](std::span<const double> block) { theta.push_back(block); });
    size_t b = 0;
    ForEachBlock(grad, [&](std::span<double> block) {
      for (size_t k = 0; k < block.size(); ++k) {
        block[k] -= 2.0 * l2 * theta[b][k];
      }
      ++b;
    });
  }
  return grad;
}

}  // namespace crf
}  // namespace legalattr
