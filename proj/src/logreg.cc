#include <cmath>

#include "legalattr/error.h"
#include "legalattr/judgment.h"

namespace legalattr {
namespace judgment {
namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
double Softplus(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

double Margin(const LogRegModel &model, std::span<const double> x) {
  double z = model.bias;
  for (size_t k = 0; k < x.size(); ++k) z += model.weights[k] * x[k];
  return z;
}

void CheckExamples(std::span<const JudgmentExample> examples, size_t dim) {
  for (const JudgmentExample &ex : examples) {
    if (ex.features.size() != dim) {
      throw Error(ErrorKind::kInvalidInput,
                  "example '" + ex.doc_id + "' has " +
                      std::to_string(ex.features.size()) +
                      " features, expected " + std::to_string(dim));
    }
    if (ex.label != 0 && ex.label != 1) {
      throw Error(ErrorKind::kInvalidInput,
                  "example '" + ex.doc_id + "' has a non-binary label");
    }
    for (double v : ex.features) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kInvalidInput,
                    "example '" + ex.doc_id + "' has non-finite features");
      }
    }
  }
}

}  // namespace

double LogRegLoss(std::span<const JudgmentExample> examples,
                  const LogRegModel &model, double l2) {
  double loss = 0.0;
  for (const JudgmentExample &ex : examples) {
    const double sign = ex.label == 1 ? 1.0 : -1.0;
    loss += Softplus(sign * Margin(model, ex.features));
  }
  loss /= static_cast<double>(examples.size());
  double norm = 0.0;
  for (double w : model.weights) norm += w * w;
  return loss + l2 * norm;
}

LogRegModel TrainLogReg(std::span<const JudgmentExample> examples,
                        const LogRegConfig &config) {
  if (examples.empty()) {
    throw Error(ErrorKind::kInvalidInput, "no judgment examples");
  }
  const size_t dim = examples.front().features.size();
  CheckExamples(examples, dim);
  bool has0 = false;
  bool has1 = false;
  for (const JudgmentExample &ex : examples) {
    (ex.label == 1 ? has1 : has0) = true;
  }
  if (!has0 || !has1) {
    throw Error(ErrorKind::kInvalidInput,
                "judgment training data contains a single class");
  }
  if (config.epochs < 1 || !(config.learning_rate > 0.0) ||
      !(config.l2 >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "invalid logistic regression config");
  }

  LogRegModel model;
  model.weights.assign(dim, 0.0);
  model.seed = config.seed;
  const double n = static_cast<double>(examples.size());
  std::vector<double> grad(dim);
  for (int it = 0; it < config.epochs; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (const JudgmentExample &ex : examples) {
      const double residual = Sigmoid(Margin(model, ex.features)) - ex.label;
      for (size_t k = 0; k < dim; ++k) grad[k] += residual * ex.features[k];
      grad_bias += residual;
    }
    double norm = 0.0;
    for (size_t k = 0; k < dim; ++k) {
      grad[k] = grad[k] / n + 2.0 * config.l2 * model.weights[k];
      norm += grad[k] * grad[k];
    }
    grad_bias /= n;
    norm = std::sqrt(norm + grad_bias * grad_bias);
    if (norm < 1e-6) break;
    for (size_t k = 0; k < dim; ++k) {
      model.weights[k] -= config.learning_rate * grad[k];
    }
    model.bias -= config.learning_rate * grad_bias;
    model.iterations = it + 1;
  }
  model.final_loss = LogRegLoss(examples, model, config.l2);
  if (!std::isfinite(model.final_loss)) {
    throw Error(ErrorKind::kNumerical, "logistic regression diverged");
  }
  return model;
}

Prediction PredictLogReg(const LogRegModel &model,
                         std::span<const double> features) {
  if (features.size() != model.weights.size()) {
    throw Error(ErrorKind::kInvalidInput,
                "feature vector has " + std::to_string(features.size()) +
                    " entries, model expects " +
                    std::to_string(model.weights.size()));
  }
  Prediction p;
  p.probability = Sigmoid(Margin(model, features));
  p.label = p.probability >= 0.5 ? 1 : 0;
  return p;
}

JudgmentMetrics ComputeMetrics(std::span<const int> gold,
                               std::span<const int> predicted) {
  if (gold.empty() || gold.size() != predicted.size()) {
    throw Error(ErrorKind::kInvalidInput,
                "gold and predicted judgment lists must be non-empty and "
                "equally long");
  }
  // counts[g][p]
  int64_t counts[2][2] = {{0, 0}, {0, 0}};
  for (size_t i = 0; i < gold.size(); ++i) {
    if ((gold[i] != 0 && gold[i] != 1) ||
        (predicted[i] != 0 && predicted[i] != 1)) {
      throw Error(ErrorKind::kInvalidInput, "judgment labels must be 0 or 1");
    }
    ++counts[gold[i]][predicted[i]];
  }
  auto ratio = [](int64_t num, int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  JudgmentMetrics m;
  m.precision0 = ratio(counts[0][0], counts[0][0] + counts[1][0]);
  m.recall0 = ratio(counts[0][0], counts[0][0] + counts[0][1]);
  m.precision1 = ratio(counts[1][1], counts[1][1] + counts[0][1]);
  m.recall1 = ratio(counts[1][1], counts[1][1] + counts[1][0]);
  m.accuracy = static_cast<double>(counts[0][0] + counts[1][1]) /
               static_cast<double>(gold.size());
  return m;
}

}  // namespace judgment
}  // namespace legalattr
