#ifndef LEGALATTR_SRC_CRF_INTERNAL_H_
#define LEGALATTR_SRC_CRF_INTERNAL_H_

#include <functional>

#include "legalattr/crf.h"

namespace legalattr {
namespace crf {
namespace internal {

// Empirical-minus-expected statistics of one labeled sequence.
struct SequenceStatistics {
  double log_likelihood = 0.0;  // score - log Z
  Matrix residual;              // n x L: [y_i = t] - P(y_i = t)
  ChainScores chain_residual;   // same shape as the chain scores
};

SequenceStatistics ComputeStatistics(const Instance &instance,
                                     const CrfParameters &params);

// Applies `fn(row, label, amount)` for every emission-parameter coordinate
// touched by the instance, with amount = input value * residual. In dense
// mode row indexes the projection and the bias is reported as row == d.
void ForEachEmissionGradient(
    const SequenceInput &input, const Matrix &residual,
    const std::function<void(size_t, size_t, double)> &fn);

// Visits every parameter block as a flat span, in serialization order.
void ForEachBlock(CrfParameters &params,
                  const std::function<void(std::span<double>)> &fn);
void ForEachBlock(const CrfParameters &params,
                  const std::function<void(std::span<const double>)> &fn);

}  // namespace internal
}  // namespace crf
}  // namespace legalattr

#endif  // LEGALATTR_SRC_CRF_INTERNAL_H_
