#pragma once

#include <cmath>
#include <utility>

#include "agc/error.hpp"
#include "agc/graph.hpp"

namespace agc {

/// p(lambda) = (1 - lambda/2)^k, the low-pass response of the k-order
/// filter. Defined for lambda in [0, 2]; k = 0 is the identity filter.
inline double frequency_response(double lambda, int k) {
  if (k < 0) throw ValidationError("filter order must be nonnegative");
  if (!(lambda >= 0.0 && lambda <= 2.0))
    throw DomainError("frequency must lie in [0, 2]");
  const double base = 1.0 - 0.5 * lambda;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

/// One filtering step: (X + S X) / 2.
inline FeatureMatrix convolve_step(const PropagationOperator& op,
                                   const FeatureMatrix& x) {
  return 0.5 * (x + op.apply(x));
}

/// k-order graph convolution by repeated sparse propagation; the filter
/// matrix is never formed. k = 0 returns X unchanged. Cost O(N d k).
inline FeatureMatrix convolve_k(const PropagationOperator& op,
                                FeatureMatrix x, int k) {
  if (k < 0) throw ValidationError("filter order must be nonnegative");
  if (x.rows() != op.size())
    throw ValidationError("feature row count does not match node count");
  for (int i = 0; i < k; ++i) x = convolve_step(op, x);
  return x;
}

enum class SmoothnessForm {
  quadratic,  // (f'f - f'Sf) / f'f
  edge_sum,   // 1/2 sum_ij a_ij (f_i/sqrt(d_i) - f_j/sqrt(d_j))^2 / f'f
};

/// Smoothness of the normalized signal f/||f||, i.e. f' L_s f / ||f||^2.
/// Lies in [0, 2] up to rounding; 0 for the constant-degree eigenvector.
///
/// The edge-sum route adds f_i^2 for isolated nodes, where L_s acts as the
/// identity; without that term the two routes would disagree on graphs with
/// isolated nodes.
inline double smoothness(const PropagationOperator& op, const Vector& f,
                         SmoothnessForm form = SmoothnessForm::quadratic) {
  if (f.size() != op.size())
    throw ValidationError("signal length does not match node count");
  const double norm2 = f.squaredNorm();
  if (norm2 == 0.0) throw DomainError("smoothness of the zero signal is undefined");

  if (form == SmoothnessForm::quadratic) {
    const Vector sf = op.apply(f);
    return (norm2 - f.dot(sf)) / norm2;
  }

  const auto& g = op.graph();
  const Vector& isd = op.inv_sqrt_degrees();
  double acc = 0.0;
  for (Index u = 0; u < g.num_nodes(); ++u) {
    auto cols = g.neighbors(u);
    auto ws = g.weights(u);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      const double diff = f[u] * isd[u] - f[cols[p]] * isd[cols[p]];
      acc += ws[p] * diff * diff;
    }
  }
  acc *= 0.5;
  for (Index u = 0; u < g.num_nodes(); ++u)
    if (op.is_isolated(u)) acc += f[u] * f[u];
  return acc / norm2;
}

}  // namespace agc
