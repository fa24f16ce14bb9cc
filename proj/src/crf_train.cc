#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "crf_internal.h"
#include "legalattr/error.h"

namespace legalattr {
namespace crf {
namespace {

using internal::ComputeStatistics;
using internal::ForEachBlock;
using internal::ForEachEmissionGradient;
using internal::SequenceStatistics;

// Data gradient of one mini-batch. Sparse emission rows are accumulated only
// where features fire.
struct BatchGradient {
  BatchGradient(const CrfParameters &params)
      : chain(params.num_labels()),
        projection(params.projection.rows(), params.projection.cols()),
        bias(params.bias.size(), 0.0) {}

  double SquaredNorm() const {
    double sum = 0.0;
    for (double v : chain.transitions.values()) sum += v * v;
    for (double v : chain.start) sum += v * v;
    for (double v : chain.stop) sum += v * v;
    for (const auto &[row, values] : sparse_rows) {
      for (double v : values) sum += v * v;
    }
    for (double v : projection.values()) sum += v * v;
    for (double v : bias) sum += v * v;
    return sum;
  }

  ChainScores chain;
  std::map<uint32_t, std::vector<double>> sparse_rows;
  Matrix projection;
  std::vector<double> bias;
};

void Accumulate(const Instance &instance, const SequenceStatistics &stats,
                const CrfParameters &params, BatchGradient *grad) {
  const ChainScores &r = stats.chain_residual;
  for (size_t k = 0; k < r.transitions.size(); ++k) {
    grad->chain.transitions.values()[k] += r.transitions.values()[k];
  }
  for (size_t t = 0; t < r.start.size(); ++t) {
    grad->chain.start[t] += r.start[t];
    grad->chain.stop[t] += r.stop[t];
  }
  const size_t labels = static_cast<size_t>(params.num_labels());
  const size_t d = params.projection.rows();
  ForEachEmissionGradient(
      instance.input, stats.residual, [&](size_t row, size_t t, double v) {
        if (params.mode == EmissionMode::kSparse) {
          auto [it, inserted] = grad->sparse_rows.try_emplace(
              static_cast<uint32_t>(row), labels, 0.0);
          it->second[t] += v;
        } else if (row == d) {
          grad->bias[t] += v;
        } else {
          grad->projection(row, t) += v;
        }
      });
}

void ApplyStep(const BatchGradient &grad, double step, CrfParameters *params) {
  auto axpy = [step](std::span<const double> g, std::span<double> theta) {
    for (size_t k = 0; k < g.size(); ++k) theta[k] += step * g[k];
  };
  axpy(grad.chain.transitions.values(), params->chain.transitions.values());
  axpy(grad.chain.start, params->chain.start);
  axpy(grad.chain.stop, params->chain.stop);
  for (const auto &[row, values] : grad.sparse_rows) {
    axpy(values, params->sparse_weights.row(row));
  }
  axpy(grad.projection.values(), params->projection.values());
  axpy(grad.bias, params->bias);
}

void Scale(double factor, CrfParameters *params) {
  ForEachBlock(*params, [factor](std::span<double> block) {
    for (double &v : block) v *= factor;
  });
}

double HeldOutLogLikelihood(std::span<const Instance> dev,
                            const CrfParameters &params) {
  double total = 0.0;
  for (const Instance &instance : dev) {
    const Matrix emissions = ComputeEmissions(params, instance.input);
    total += ScoreSequence(emissions, params.chain, instance.labels) -
             LogPartition(emissions, params.chain);
  }
  return total;
}

Error NumericalAbort(int epoch, size_t batch, const std::string &detail) {
  return Error(ErrorKind::kNumerical,
               "non-finite objective at epoch " + std::to_string(epoch) +
                   ", batch " + std::to_string(batch) + ": " + detail);
}

}  // namespace

void ValidateConfig(const TrainConfig &config) {
  auto fail = [](const std::string &what) {
    throw Error(ErrorKind::kInvalidInput, "invalid training config: " + what);
  };
  if (config.epochs < 1) fail("epochs must be positive");
  if (config.batch_size < 1) fail("batch size must be positive");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    fail("learning rate must be positive");
  }
  if (!(config.decay >= 0.0)) fail("decay must be non-negative");
  if (!(config.l2 >= 0.0) || !std::isfinite(config.l2)) {
    fail("l2 must be non-negative");
  }
  if (!(config.clip_norm > 0.0)) fail("clip norm must be positive");
  if (config.patience < 0) fail("patience must be non-negative");
}

TrainResult Train(std::span<const Instance> train,
                  std::span<const Instance> dev, const CrfParameters &shape,
                  const TrainConfig &config) {
  ValidateConfig(config);
  if (train.empty()) {
    throw Error(ErrorKind::kInvalidInput, "empty training set");
  }
  if (config.patience > 0 && dev.empty()) {
    throw Error(ErrorKind::kInvalidInput,
                "early stopping requested without held-out data");
  }

  CrfParameters params = shape;
  ForEachBlock(params, [](std::span<double> block) {
    std::fill(block.begin(), block.end(), 0.0);
  });

  double best_dev = -std::numeric_limits<double>::infinity();
  CrfParameters best;
  if (!dev.empty()) {
    best_dev = HeldOutLogLikelihood(dev, params);
    best = params;
  }

  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t batch_size = static_cast<size_t>(config.batch_size);
  const double n = static_cast<double>(train.size());

  TrainingMetadata metadata;
  metadata.seed = config.seed;
  double objective = 0.0;
  int stale = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with the raw engine output keeps the order identical
    // across standard library implementations.
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    const double rate = config.learning_rate / (1.0 + config.decay * epoch);
    double epoch_log_likelihood = 0.0;

    for (size_t begin = 0, batch = 0; begin < order.size();
         begin += batch_size, ++batch) {
      const size_t end = std::min(order.size(), begin + batch_size);
      BatchGradient grad(params);
      double batch_log_likelihood = 0.0;
      for (size_t k = begin; k < end; ++k) {
        const Instance &instance = train[order[k]];
        SequenceStatistics stats;
        try {
          stats = ComputeStatistics(instance, params);
        } catch (const Error &e) {
          if (e.kind() == ErrorKind::kNumerical) {
            throw NumericalAbort(epoch, batch, e.what());
          }
          throw;
        }
        batch_log_likelihood += stats.log_likelihood;
        Accumulate(instance, stats, params, &grad);
      }
      if (!std::isfinite(batch_log_likelihood)) {
        throw NumericalAbort(epoch, batch, "log-likelihood is not finite");
      }
      epoch_log_likelihood += batch_log_likelihood;

      const double size = static_cast<double>(end - begin);
      const double norm = std::sqrt(grad.SquaredNorm()) / size;
      if (!std::isfinite(norm)) {
        throw NumericalAbort(epoch, batch, "gradient is not finite");
      }
      double step = rate / size;
      if (norm > config.clip_norm) step *= config.clip_norm / norm;
      ApplyStep(grad, step, &params);
      if (config.l2 > 0.0) {
        Scale(1.0 / (1.0 + 2.0 * rate * config.l2 * size / n), &params);
      }
    }

    objective = epoch_log_likelihood - config.l2 * SquaredNorm(params);
    metadata.epochs_run = static_cast<uint32_t>(epoch + 1);
    if (!std::isfinite(objective)) {
      throw NumericalAbort(epoch, order.size() / batch_size,
                           "epoch objective is not finite");
    }
    if (!dev.empty()) {
      const double held_out = HeldOutLogLikelihood(dev, params);
      if (!std::isfinite(held_out)) {
        throw NumericalAbort(epoch, order.size() / batch_size,
                             "held-out log-likelihood is not finite");
      }
      if (held_out > best_dev) {
        best_dev = held_out;
        best = params;
        stale = 0;
      } else if (config.patience > 0 && ++stale >= config.patience) {
        break;
      }
    }
  }

  if (dev.empty()) {
    metadata.final_objective = objective;
    return {std::move(params), metadata};
  }
  metadata.final_objective = best_dev;
  return {std::move(best), metadata};
}

}  // namespace crf
}  // namespace legalattr
