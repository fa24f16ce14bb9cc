#include <algorithm>
#include <cmath>
#include <limits>

#include "legalattr/crf.h"
#include "legalattr/error.h"

namespace legalattr {
namespace crf {
namespace {

void CheckShape(const Matrix &emissions, const ChainScores &chain) {
  const size_t labels = static_cast<size_t>(chain.num_labels());
  if (emissions.rows() == 0) {
    throw Error(ErrorKind::kInvalidInput, "empty sequence");
  }
  if (emissions.cols() != labels || chain.transitions.rows() != labels ||
      chain.transitions.cols() != labels || chain.stop.size() != labels) {
    throw Error(ErrorKind::kInvalidInput,
                "emission matrix has " + std::to_string(emissions.cols()) +
                    " columns for a chain over " + std::to_string(labels) +
                    " labels");
  }
  for (size_t i = 0; i < emissions.rows(); ++i) {
    for (size_t t = 0; t < labels; ++t) {
      if (!std::isfinite(emissions(i, t))) {
        throw Error(ErrorKind::kNumerical,
                    "non-finite emission at token " + std::to_string(i) +
                        ", label " + std::to_string(t));
      }
    }
  }
}

double LogSumExp(std::span<const double> values) {
  const double max = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

Matrix Forward(const Matrix &emissions, const ChainScores &chain) {
  const size_t n = emissions.rows();
  const size_t labels = emissions.cols();
  Matrix alpha(n, labels);
  for (size_t t = 0; t < labels; ++t) {
    alpha(0, t) = chain.start[t] + emissions(0, t);
  }
  std::vector<double> terms(labels);
  for (size_t i = 1; i < n; ++i) {
    for (size_t t = 0; t < labels; ++t) {
      for (size_t s = 0; s < labels; ++s) {
        terms[s] = alpha(i - 1, s) + chain.transitions(s, t);
      }
      alpha(i, t) = LogSumExp(terms) + emissions(i, t);
    }
  }
  return alpha;
}

Matrix Backward(const Matrix &emissions, const ChainScores &chain) {
  const size_t n = emissions.rows();
  const size_t labels = emissions.cols();
  Matrix beta(n, labels);
  for (size_t t = 0; t < labels; ++t) beta(n - 1, t) = chain.stop[t];
  std::vector<double> terms(labels);
  for (size_t i = n - 1; i-- > 0;) {
    for (size_t s = 0; s < labels; ++s) {
      for (size_t t = 0; t < labels; ++t) {
        terms[t] = chain.transitions(s, t) + emissions(i + 1, t) +
                   beta(i + 1, t);
      }
      beta(i, s) = LogSumExp(terms);
    }
  }
  return beta;
}

double FinalLogSum(const Matrix &alpha, const ChainScores &chain) {
  const size_t last = alpha.rows() - 1;
  std::vector<double> terms(alpha.cols());
  for (size_t t = 0; t < alpha.cols(); ++t) {
    terms[t] = alpha(last, t) + chain.stop[t];
  }
  return LogSumExp(terms);
}

}  // namespace

double ScoreSequence(const Matrix &emissions, const ChainScores &chain,
                     std::span<const int> labels) {
  CheckShape(emissions, chain);
  if (labels.size() != emissions.rows()) {
    throw Error(ErrorKind::kInvalidInput,
                "label sequence length " + std::to_string(labels.size()) +
                    " differs from emission rows " +
                    std::to_string(emissions.rows()));
  }
  const int num_labels = chain.num_labels();
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_labels) {
      throw Error(ErrorKind::kInvalidInput,
                  "label " + std::to_string(labels[i]) + " at position " +
                      std::to_string(i) + " out of range");
    }
  }
  double score = chain.start[labels[0]];
  for (size_t i = 0; i < labels.size(); ++i) {
    score += emissions(i, labels[i]);
    if (i > 0) score += chain.transitions(labels[i - 1], labels[i]);
  }
  return score + chain.stop[labels.back()];
}

double LogPartition(const Matrix &emissions, const ChainScores &chain) {
  CheckShape(emissions, chain);
  return FinalLogSum(Forward(emissions, chain), chain);
}

ForwardBackward RunForwardBackward(const Matrix &emissions,
                                   const ChainScores &chain) {
  CheckShape(emissions, chain);
  const size_t n = emissions.rows();
  const size_t labels = emissions.cols();
  ForwardBackward fb;
  fb.log_alpha = Forward(emissions, chain);
  fb.log_beta = Backward(emissions, chain);
  fb.log_partition = FinalLogSum(fb.log_alpha, chain);
  const double log_z = fb.log_partition;

  fb.marginals = Matrix(n, labels);
  for (size_t i = 0; i < n; ++i) {
    for (size_t t = 0; t < labels; ++t) {
      fb.marginals(i, t) =
          std::exp(fb.log_alpha(i, t) + fb.log_beta(i, t) - log_z);
    }
  }
  fb.expected_transitions = Matrix(labels, labels);
  for (size_t i = 1; i < n; ++i) {
    for (size_t s = 0; s < labels; ++s) {
      for (size_t t = 0; t < labels; ++t) {
        fb.expected_transitions(s, t) +=
            std::exp(fb.log_alpha(i - 1, s) + chain.transitions(s, t) +
                     emissions(i, t) + fb.log_beta(i, t) - log_z);
      }
    }
  }
  return fb;
}

Matrix Marginals(const Matrix &emissions, const ChainScores &chain) {
  return RunForwardBackward(emissions, chain).marginals;
}

TagPrediction Viterbi(const Matrix &emissions, const ChainScores &chain) {
  CheckShape(emissions, chain);
  const size_t n = emissions.rows();
  const size_t labels = emissions.cols();
  Matrix best(n, labels);
  std::vector<int> backpointers(n * labels, 0);
  for (size_t t = 0; t < labels; ++t) {
    best(0, t) = chain.start[t] + emissions(0, t);
  }
  for (size_t i = 1; i < n; ++i) {
    for (size_t t = 0; t < labels; ++t) {
      int arg = 0;
      double max = best(i - 1, 0) + chain.transitions(0, t);
      for (size_t s = 1; s < labels; ++s) {
        const double v = best(i - 1, s) + chain.transitions(s, t);
        if (v > max) {
          max = v;
          arg = static_cast<int>(s);
        }
      }
      best(i, t) = max + emissions(i, t);
      backpointers[i * labels + t] = arg;
    }
  }
  int arg = 0;
  double max = best(n - 1, 0) + chain.stop[0];
  for (size_t t = 1; t < labels; ++t) {
    const double v = best(n - 1, t) + chain.stop[t];
    if (v > max) {
      max = v;
      arg = static_cast<int>(t);
    }
  }
  TagPrediction prediction;
  prediction.labels.assign(n, 0);
  prediction.labels[n - 1] = arg;
  for (size_t i = n - 1; i > 0; --i) {
    prediction.labels[i - 1] =
        backpointers[i * labels + static_cast<size_t>(prediction.labels[i])];
  }
  prediction.score = ScoreSequence(emissions, chain, prediction.labels);
  return prediction;
}

}  // namespace crf
}  // namespace legalattr
