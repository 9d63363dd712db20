#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "agc/error.hpp"
#include "agc/graph.hpp"
#include "agc/parallel.hpp"
#include "agc/partition.hpp"
#include "agc/rng.hpp"

namespace agc {

/// W = |K| with K = Xbar Xbar', i.e. 1/2(|K| + |K'|) for a symmetric K.
/// Symmetric and nonnegative exactly: each entry is computed once and
/// mirrored.
inline Eigen::MatrixXd linear_kernel(const FeatureMatrix& xbar) {
  const Index n = xbar.rows();
  if (n < 2) throw ValidationError("linear kernel needs at least 2 rows");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.selfadjointView<Eigen::Lower>().rankUpdate(xbar);
  for (Index j = 0; j < n; ++j) {
    w(j, j) = std::abs(w(j, j));
    for (Index i = j + 1; i < n; ++i) {
      const double v = std::abs(w(i, j));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

/// Eigenvectors of a symmetric matrix for the m largest eigenvalues.
/// Columns are orthonormal, ordered by descending eigenvalue (ties keep the
/// solver's index order), and sign-fixed so each column's largest-magnitude
/// entry is positive.
struct SpectralEmbedding {
  Eigen::MatrixXd vectors;  // n x m
  Eigen::VectorXd values;   // descending
};

struct EigsOptions {
  /// Dense symmetric eigendecomposition up to this size; Lanczos above.
  /// The cutoff keeps the per-iteration cost at O(n^2 m): a full dense solve
  /// at Cora scale (n = 2708) already takes ~20 s per call on one core.
  Index dense_cutoff = 1024;
  /// Start-vector seed for the iterative path.
  std::uint64_t seed = 0x1f3a5c7e9b2d4f60ull;
  double tolerance = 1e-10;  // residual / ||W||
};

namespace detail {

inline void fix_column_signs(Eigen::MatrixXd& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

inline SpectralEmbedding dense_top_eigenvectors(const Eigen::MatrixXd& w,
                                                int m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense symmetric eigensolve failed");
  const Index n = w.rows();
  // Stable descending order: equal eigenvalues keep ascending solver index.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return solver.eigenvalues()[a] > solver.eigenvalues()[b];
  });
  SpectralEmbedding e;
  e.vectors.resize(n, m);
  e.values.resize(m);
  for (int c = 0; c < m; ++c) {
    e.vectors.col(c) = solver.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    e.values[c] = solver.eigenvalues()[order[static_cast<std::size_t>(c)]];
  }
  fix_column_signs(e.vectors);
  return e;
}

/// Lanczos with full reorthogonalization. The Krylov basis grows until the
/// top-m Ritz pairs reach the residual tolerance (or the basis spans the
/// whole space, at which point the result is exact). Deterministic given
/// the seed.
inline SpectralEmbedding lanczos_top_eigenvectors(const Eigen::MatrixXd& w,
                                                  int m,
                                                  const EigsOptions& opt) {
  const Index n = w.rows();
  Rng rng(opt.seed);
  Eigen::MatrixXd basis(n, std::min<Index>(n, 2 * m + 32));
  std::vector<double> alpha, beta;  // beta[j] links v_j and v_{j+1}

  auto random_unit = [&]() {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
  };
  auto reorthogonalize = [&](Vector& v, Index cols) {
    for (int pass = 0; pass < 2; ++pass)
      v -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * v);
  };

  Vector v = random_unit();
  v.normalize();
  basis.col(0) = v;
  Index j = 0;  // number of completed Lanczos steps == alpha.size()

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri_solver;
  SpectralEmbedding result;

  while (true) {
    Vector wv = w * basis.col(j);
    const double a = basis.col(j).dot(wv);
    alpha.push_back(a);
    wv -= a * basis.col(j);
    if (j > 0) wv -= beta[static_cast<std::size_t>(j) - 1] * basis.col(j - 1);
    reorthogonalize(wv, j + 1);
    double b = wv.norm();
    ++j;

    const bool spanned = j >= n;
    bool check_now = spanned || j >= std::max<Index>(m + 2, 8);
    check_now = check_now && (spanned || j % 8 == 0 || b <= 1e-13);
    if (check_now) {
      // Ritz pairs of the current tridiagonal section.
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j, j);
      for (Index i = 0; i < j; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < j) {
          t(i, i + 1) = beta[static_cast<std::size_t>(i)];
          t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
      }
      tri_solver.compute(t);
      if (j >= m) {
        const double scale =
            std::max(std::abs(tri_solver.eigenvalues()[j - 1]),
                     std::abs(tri_solver.eigenvalues()[0]));
        bool converged = true;
        for (int c = 0; c < m && converged; ++c) {
          const double resid =
              b * std::abs(tri_solver.eigenvectors()(j - 1, j - 1 - c));
          if (resid > opt.tolerance * std::max(scale, 1e-300)) converged = false;
        }
        if (converged || spanned) {
          // A single Krylov start vector sees one direction per eigenspace,
          // so a clean residual can still hide a second copy of a degenerate
          // leading eigenvalue. Power-iterate a deflated random probe; any
          // spectral mass above the accepted window forces more iterations
          // with the probe injected into the basis.
          bool missed = false;
          Vector probe;
          if (!spanned) {
            probe = random_unit();
            reorthogonalize(probe, j);
            if (probe.norm() > 1e-10) {
              probe.normalize();
              const double window_floor = tri_solver.eigenvalues()[j - m];
              double rq = 0.0;
              for (int it = 0; it < 20; ++it) {
                Vector wp = w * probe;
                rq = probe.dot(wp);
                reorthogonalize(wp, j);
                const double norm = wp.norm();
                if (norm <= 1e-300) break;
                probe = wp / norm;
              }
              missed = rq > window_floor + 1e-9 * std::max(scale, 1.0);
            }
          }
          if (!missed) {
            result.vectors.resize(n, m);
            result.values.resize(m);
            for (int c = 0; c < m; ++c) {
              result.values[c] = tri_solver.eigenvalues()[j - 1 - c];
              result.vectors.col(c) =
                  basis.leftCols(j) * tri_solver.eigenvectors().col(j - 1 - c);
              result.vectors.col(c).normalize();
            }
            fix_column_signs(result.vectors);
            return result;
          }
          if (j + 1 > basis.cols())
            basis.conservativeResize(n, std::min(n, 2 * basis.cols()));
          beta.push_back(0.0);
          basis.col(j) = probe;
          continue;
        }
      }
    }
    // j < n here: at j == n the section above is exact and always returns.
    if (j + 1 > basis.cols())
      basis.conservativeResize(n, std::min(n, 2 * basis.cols()));

    if (b <= 1e-13) {
      // Invariant subspace found; restart with a fresh direction.
      Vector fresh = random_unit();
      reorthogonalize(fresh, j);
      const double norm = fresh.norm();
      if (norm <= 1e-13) {
        // No independent direction left numerically; pad and finish.
        b = 0.0;
        fresh.setZero();
        fresh[j % n] = 1.0;
        reorthogonalize(fresh, j);
        if (fresh.norm() <= 1e-13) {
          fresh = random_unit();
          reorthogonalize(fresh, j);
        }
      }
      fresh.normalize();
      beta.push_back(0.0);
      basis.col(j) = fresh;
    } else {
      beta.push_back(b);
      basis.col(j) = wv / b;
    }
  }
}

}  // namespace detail

/// Top-m eigenpairs of the symmetric similarity matrix W.
inline SpectralEmbedding top_eigenvectors(const Eigen::MatrixXd& w, int m,
                                          const EigsOptions& opt = {}) {
  const Index n = w.rows();
  if (w.cols() != n) throw ValidationError("similarity matrix must be square");
  if (m < 1 || m > n)
    throw ValidationError("eigenpair count must be in [1, n]");
  if (n <= opt.dense_cutoff) return detail::dense_top_eigenvectors(w, m);
  return detail::lanczos_top_eigenvectors(w, m, opt);
}

struct KMeansConfig {
  int restarts = 10;
  int max_iters = 300;
  double tol = 1e-6;  // relative inertia change
};

namespace detail {

struct KMeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

inline KMeansRun kmeans_single(const Eigen::MatrixXd& points, int m,
                               std::uint64_t seed, const KMeansConfig& cfg) {
  const Index n = points.rows();
  Rng rng(seed);

  // k-means++ seeding.
  Eigen::MatrixXd centroids(m, points.cols());
  centroids.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector dist2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < m; ++c) {
    const double total = dist2.sum();
    Index pick;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<Index> counts(static_cast<std::size_t>(m), 0);
  Vector own_dist2(n);
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // Assignment; ties go to the lowest centroid index.
    bool changed = false;
    std::fill(counts.begin(), counts.end(), Index{0});
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < m; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
      own_dist2[i] = best_d;
      counts[static_cast<std::size_t>(best)]++;
    }

    // Empty-cluster repair: reseed at the point farthest from its centroid.
    for (int c = 0; c < m; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = -1;
      double far_d = 0.0;
      for (Index i = 0; i < n; ++i) {
        const int owner = labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        if (own_dist2[i] > far_d) {
          far_d = own_dist2[i];
          far = i;
        }
      }
      if (far < 0) continue;  // all points coincide with their centroids
      counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])]--;
      labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)]++;
      centroids.row(c) = points.row(far);
      own_dist2[far] = 0.0;
      changed = true;
    }

    const double inertia = own_dist2.sum();
    if (inertia > prev_inertia * (1.0 + 1e-12) + 1e-12)
      throw std::logic_error("k-means objective increased");

    // Update step.
    centroids.setZero();
    for (Index i = 0; i < n; ++i)
      centroids.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < m; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    const bool tiny_change =
        std::abs(prev_inertia - inertia) <=
        cfg.tol * std::max(inertia, std::numeric_limits<double>::min());
    prev_inertia = inertia;
    if (!changed || tiny_change) break;
  }

  // Final inertia under the final centroids/assignment.
  double inertia = 0.0;
  for (Index i = 0; i < n; ++i)
    inertia +=
        (points.row(i) - centroids.row(labels[static_cast<std::size_t>(i)]))
            .squaredNorm();
  return {std::move(labels), inertia};
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ initialization and `restarts`
/// independently seeded runs; the best inertia wins, ties by restart index.
/// Deterministic given (seed, cfg); restarts may execute in parallel.
inline ClusterPartition kmeans(const Eigen::MatrixXd& points, int m,
                               std::uint64_t seed,
                               const KMeansConfig& cfg = {}) {
  if (m < 1) throw ValidationError("cluster count must be at least 1");
  if (points.rows() < 1) throw ValidationError("no points to cluster");
  if (points.rows() < m)
    throw ValidationError("fewer points than clusters");
  const int restarts = std::max(1, cfg.restarts);
  std::vector<detail::KMeansRun> runs(static_cast<std::size_t>(restarts));
  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t r) {
    runs[r] = detail::kmeans_single(points, m, derive_seed(seed, r), cfg);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  return ClusterPartition::from_labels(std::move(runs[best].labels), m);
}

struct SpectralOptions {
  std::uint64_t seed = 0;
  KMeansConfig kmeans{};
  /// Row-normalize the embedding before k-means (normalized-cut variant).
  /// Off by default: plain k-means on the eigenvectors.
  bool row_normalize = false;
  /// Scale eigenvector columns by their eigenvalues before k-means.
  /// Off by default: plain unscaled eigenvectors.
  bool scale_by_eigenvalues = false;
  EigsOptions eigs{};
};

/// Clusters on a precomputed similarity matrix: top-m eigenvectors of W,
/// then seeded k-means on the embedding rows.
inline ClusterPartition cluster_similarity(const Eigen::MatrixXd& w, int m,
                                           const SpectralOptions& opt = {}) {
  SpectralEmbedding e = top_eigenvectors(w, m, opt.eigs);
  Eigen::MatrixXd points = std::move(e.vectors);
  if (opt.scale_by_eigenvalues)
    for (Index c = 0; c < points.cols(); ++c) points.col(c) *= e.values[c];
  if (opt.row_normalize)
    for (Index i = 0; i < points.rows(); ++i) {
      const double norm = points.row(i).norm();
      if (norm > 0.0) points.row(i) /= norm;
    }
  return kmeans(points, m, opt.seed, opt.kmeans);
}

/// linear_kernel -> top_eigenvectors -> kmeans.
inline ClusterPartition spectral_cluster(const FeatureMatrix& xbar, int m,
                                         const SpectralOptions& opt = {}) {
  return cluster_similarity(linear_kernel(xbar), m, opt);
}

}  // namespace agc
