#pragma once

#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "agc/convolve.hpp"
#include "agc/error.hpp"
#include "agc/graph.hpp"
#include "agc/metrics.hpp"
#include "agc/partition.hpp"
#include "agc/rng.hpp"
#include "agc/spectral.hpp"

namespace agc {

struct AgcConfig {
  int m = 2;          // cluster count
  int max_iter = 60;  // maximum filter order tried
  std::uint64_t seed = 0;
  KMeansConfig kmeans{};
  bool row_normalize = false;
  bool scale_by_eigenvalues = false;
  EigsOptions eigs{};
  NmiNorm nmi_norm = NmiNorm::geometric;  // pass-through for sweep metrics

  void validate() const {
    if (m < 2) throw ValidationError("cluster count must be at least 2");
    if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  }

  SpectralOptions spectral_options(std::uint64_t iteration_seed) const {
    SpectralOptions opt;
    opt.seed = iteration_seed;
    opt.kmeans = kmeans;
    opt.row_normalize = row_normalize;
    opt.scale_by_eigenvalues = scale_by_eigenvalues;
    opt.eigs = eigs;
    return opt;
  }
};

enum class StopReason { local_minimum, max_iter };

inline const char* to_string(StopReason r) {
  return r == StopReason::local_minimum ? "local-minimum" : "max-iter";
}

struct AgcIteration {
  int t = 0;  // filter order k = t
  double intra = 0.0;
  double d_intra = 0.0;  // intra_t - intra_{t-1}; -inf at t = 1
  std::uint64_t partition_digest = 0;
};

struct AgcTrace {
  std::vector<AgcIteration> iterations;
  int selected_k = 0;
  StopReason stop_reason = StopReason::max_iter;
};

struct AgcResult {
  ClusterPartition partition;  // the partition produced at order k
  int k = 0;
  AgcTrace trace;
  FeatureMatrix filtered;  // Xbar at order k
};

namespace detail {

inline std::string format_trace(const AgcTrace& trace) {
  std::ostringstream os;
  for (const auto& it : trace.iterations)
    os << "  t=" << it.t << " intra=" << it.intra << " d_intra=" << it.d_intra
       << "\n";
  return os.str();
}

}  // namespace detail

/// The adaptive loop: starting from t = 1, filter one more order each
/// iteration (reusing the previous Xbar, never refiltering from scratch),
/// cluster, and track the intra-cluster distance. Stops at its first local
/// minimum -- the first t with intra(t) > intra(t-1) -- returning the
/// partition of order k = t-1. If no local minimum appears within max_iter
/// iterations, the max_iter-order partition is returned with
/// stop_reason = max-iter.
///
/// Iteration t clusters with a seed derived from (cfg.seed, t), so earlier
/// iterations are unaffected by max_iter.
inline AgcResult run_agc(const SparseGraph& g, const FeatureMatrix& x,
                         const AgcConfig& cfg) {
  cfg.validate();
  if (x.rows() != g.num_nodes())
    throw ValidationError("feature row count does not match node count");
  if (x.size() == 0 || x.norm() == 0.0)
    throw ValidationError("feature matrix is empty or all zeros");

  const PropagationOperator op(g);
  AgcTrace trace;
  FeatureMatrix xbar = x;
  FeatureMatrix prev_xbar;
  ClusterPartition prev_partition;
  double prev_intra = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= cfg.max_iter; ++t) {
    xbar = convolve_step(op, xbar);
    ClusterPartition partition = spectral_cluster(
        xbar, cfg.m, cfg.spectral_options(derive_seed(cfg.seed, static_cast<std::uint64_t>(t))));
    double intra;
    try {
      intra = intra_distance(xbar, partition);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at iteration t=" +
                        std::to_string(t) + "; trace so far:\n" +
                        detail::format_trace(trace));
    }
    trace.iterations.push_back({t, intra, intra - prev_intra,
                                partition.digest()});

    if (intra > prev_intra) {
      trace.selected_k = t - 1;
      trace.stop_reason = StopReason::local_minimum;
      return {std::move(prev_partition), t - 1, std::move(trace),
              std::move(prev_xbar)};
    }
    prev_xbar = xbar;
    prev_partition = std::move(partition);
    prev_intra = intra;
  }

  trace.selected_k = cfg.max_iter;
  trace.stop_reason = StopReason::max_iter;
  return {std::move(prev_partition), cfg.max_iter, std::move(trace),
          std::move(prev_xbar)};
}

struct SweepRow {
  int k = 0;
  double intra = 0.0;
  double d_intra = 0.0;
  std::optional<double> acc;
  std::optional<double> nmi;
  std::optional<double> f1;
};

/// Full evaluation at every order k = 1..k_max; external metrics are filled
/// when a ground truth is supplied. Uses the same per-iteration seeds as
/// run_agc, so row k reproduces the driver's iteration t = k exactly.
inline std::vector<SweepRow> sweep_k(const SparseGraph& g,
                                     const FeatureMatrix& x, int k_max,
                                     const AgcConfig& cfg,
                                     const ClusterPartition* truth = nullptr) {
  cfg.validate();
  if (k_max < 1) throw ValidationError("k_max must be at least 1");
  if (x.rows() != g.num_nodes())
    throw ValidationError("feature row count does not match node count");
  if (truth != nullptr && static_cast<Index>(truth->size()) != x.rows())
    throw ValidationError("ground-truth length does not match node count");

  const PropagationOperator op(g);
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(k_max));
  FeatureMatrix xbar = x;
  double prev_intra = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    xbar = convolve_step(op, xbar);
    ClusterPartition partition = spectral_cluster(
        xbar, cfg.m, cfg.spectral_options(derive_seed(cfg.seed, static_cast<std::uint64_t>(k))));
    SweepRow row;
    row.k = k;
    row.intra = intra_distance(xbar, partition);
    row.d_intra = row.intra - prev_intra;
    if (truth != nullptr) {
      row.acc = accuracy(partition, *truth).first;
      row.nmi = nmi(partition, *truth, cfg.nmi_norm);
      row.f1 = macro_f1(partition, *truth);
    }
    rows.push_back(row);
    prev_intra = row.intra;
  }
  return rows;
}

}  // namespace agc
