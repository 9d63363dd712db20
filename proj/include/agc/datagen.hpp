#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "agc/error.hpp"
#include "agc/graph.hpp"
#include "agc/partition.hpp"
#include "agc/rng.hpp"

namespace agc {

/// Stochastic block model with Gaussian features: desk-scale instances with
/// known ground truth for end-to-end tests.
struct SbmSpec {
  Index n = 300;
  int m = 3;           // blocks
  double p_in = 0.1;   // intra-block edge probability
  double p_out = 0.01; // inter-block edge probability
  Index d = 8;         // feature dimension
  double mu_sep = 1.0; // pairwise distance between block centers
  double sigma = 0.1;  // feature noise std
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw ValidationError("sbm: n must be positive");
    if (m < 1 || static_cast<Index>(m) > n)
      throw ValidationError("sbm: block count must be in [1, n]");
    if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0))
      throw ValidationError("sbm: edge probabilities must lie in [0, 1]");
    if (d < static_cast<Index>(m))
      throw ValidationError("sbm: feature dimension must be >= block count "
                            "for the simplex center layout");
    if (!(sigma >= 0.0)) throw ValidationError("sbm: sigma must be >= 0");
    if (!(mu_sep >= 0.0)) throw ValidationError("sbm: mu_sep must be >= 0");
  }
};

struct SbmInstance {
  SparseGraph graph;
  FeatureMatrix features;
  ClusterPartition labels;
};

/// Nodes are assigned to blocks of size n/m (remainder to the last block).
/// Each node pair draws one uniform variate in a fixed (i, j>i) order; block
/// centers sit at scaled standard-basis vectors -- a regular simplex with
/// pairwise center distance mu_sep -- and features add N(0, sigma^2) noise
/// drawn row-major. Everything is a pure function of spec.seed.
inline SbmInstance gen_sbm(const SbmSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const Index base = spec.n / spec.m;
  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) {
    const Index block = base > 0 ? std::min<Index>(i / base, spec.m - 1)
                                 : static_cast<Index>(spec.m - 1);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(block);
  }

  std::vector<WeightedEdge> edges;
  for (Index i = 0; i < spec.n; ++i) {
    for (Index j = i + 1; j < spec.n; ++j) {
      const bool same = labels[static_cast<std::size_t>(i)] ==
                        labels[static_cast<std::size_t>(j)];
      const double p = same ? spec.p_in : spec.p_out;
      if (rng.uniform() < p) edges.push_back({i, j, 1.0});
    }
  }

  // Regular simplex via scaled basis vectors: centers mu_sep/sqrt(2) * e_b
  // are pairwise exactly mu_sep apart.
  const double scale = spec.mu_sep / std::sqrt(2.0);
  FeatureMatrix features(spec.n, spec.d);
  for (Index i = 0; i < spec.n; ++i) {
    const int block = labels[static_cast<std::size_t>(i)];
    for (Index t = 0; t < spec.d; ++t) {
      const double center = t == static_cast<Index>(block) ? scale : 0.0;
      features(i, t) = center + spec.sigma * rng.normal();
    }
  }

  return {SparseGraph::from_edges(std::move(edges), spec.n),
          std::move(features),
          ClusterPartition::from_labels(std::move(labels), spec.m)};
}

}  // namespace agc
