#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agc/error.hpp"
#include "agc/graph.hpp"
#include "agc/parallel.hpp"
#include "agc/partition.hpp"

namespace agc {

namespace detail {

/// Confusion counts: entry (p, t) is |{i : pred_i = p, truth_i = t}|.
inline Eigen::MatrixXd confusion_counts(const ClusterPartition& pred,
                                        const ClusterPartition& truth) {
  if (pred.size() != truth.size())
    throw ValidationError("partitions have different lengths");
  Eigen::MatrixXd conf = Eigen::MatrixXd::Zero(pred.m, truth.m);
  for (std::size_t i = 0; i < pred.size(); ++i)
    conf(pred.labels[i], truth.labels[i]) += 1.0;
  return conf;
}

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// potentials, O(n^3)). Returns row -> column.
inline std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);  // col -> row
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<std::size_t>(j)] > 0)
      row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] =
          j - 1;
  return row_to_col;
}

}  // namespace detail

/// Optimal-matching clustering accuracy: the best label bijection between
/// predicted and true labels (optimal assignment on the confusion matrix),
/// as the fraction of correctly matched nodes. The returned vector maps each
/// predicted label to its matched true label (-1 when a predicted label has
/// no real counterpart).
inline std::pair<double, std::vector<int>> accuracy(
    const ClusterPartition& pred, const ClusterPartition& truth) {
  const Eigen::MatrixXd conf = detail::confusion_counts(pred, truth);
  const int mm = std::max(pred.m, truth.m);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(mm, mm);
  cost.topLeftCorner(pred.m, truth.m) = -conf;
  // Matched counts are integers, so ties between accuracy-optimal matchings
  // are real; break them toward the matching with the best macro-F1 (the
  // per-pair F1 is additive over matched pairs). The perturbation total
  // stays below 1/2, so the count-optimal set is never left. This makes the
  // reported metric values invariant under relabeling.
  const double delta = 0.25 / static_cast<double>(mm);
  for (int p = 0; p < pred.m; ++p)
    for (int t = 0; t < truth.m; ++t) {
      const double denom = conf.row(p).sum() + conf.col(t).sum();
      if (denom > 0.0) cost(p, t) -= delta * (2.0 * conf(p, t) / denom);
    }
  const std::vector<int> assign = detail::hungarian_min(cost);
  std::vector<int> matching(static_cast<std::size_t>(pred.m), -1);
  double matched = 0.0;
  for (int p = 0; p < pred.m; ++p) {
    const int t = assign[static_cast<std::size_t>(p)];
    if (t >= 0 && t < truth.m) {
      matching[static_cast<std::size_t>(p)] = t;
      matched += conf(p, t);
    }
  }
  return {matched / static_cast<double>(pred.size()), std::move(matching)};
}

enum class NmiNorm { geometric, arithmetic, max };

/// Normalized mutual information from the joint count table with natural-log
/// entropies. Defaults to the geometric-mean normalization
/// I / sqrt(H(pred) H(truth)); 0 when exactly one entropy is zero, 1 when
/// both are (both partitions are then single clusters).
inline double nmi(const ClusterPartition& pred, const ClusterPartition& truth,
                  NmiNorm norm = NmiNorm::geometric) {
  const Eigen::MatrixXd conf = detail::confusion_counts(pred, truth);
  const double n = static_cast<double>(pred.size());
  if (n == 0.0) throw ValidationError("empty partitions");
  const Eigen::VectorXd row = conf.rowwise().sum();
  const Eigen::VectorXd col = conf.colwise().sum();

  auto entropy = [n](const Eigen::VectorXd& counts) {
    double h = 0.0;
    for (Index i = 0; i < counts.size(); ++i)
      if (counts[i] > 0.0) h -= counts[i] / n * std::log(counts[i] / n);
    return h;
  };
  const double hp = entropy(row);
  const double ht = entropy(col);
  if (hp == 0.0 && ht == 0.0) return 1.0;
  if (hp == 0.0 || ht == 0.0) return 0.0;

  double mi = 0.0;
  for (Index p = 0; p < conf.rows(); ++p)
    for (Index t = 0; t < conf.cols(); ++t)
      if (conf(p, t) > 0.0)
        mi += conf(p, t) / n *
              std::log(conf(p, t) * n / (row[p] * col[t]));

  double denom = 0.0;
  switch (norm) {
    case NmiNorm::geometric: denom = std::sqrt(hp * ht); break;
    case NmiNorm::arithmetic: denom = 0.5 * (hp + ht); break;
    case NmiNorm::max: denom = std::max(hp, ht); break;
  }
  return std::clamp(mi / denom, 0.0, 1.0);
}

/// Macro-averaged F1 after the optimal-matching label bijection from
/// accuracy(). Averaged unweighted over the true classes that occur; a true
/// class with no matched predicted label scores 0.
inline double macro_f1(const ClusterPartition& pred,
                       const ClusterPartition& truth) {
  const Eigen::MatrixXd conf = detail::confusion_counts(pred, truth);
  const std::vector<int> matching = accuracy(pred, truth).second;
  std::vector<int> pred_of_true(static_cast<std::size_t>(truth.m), -1);
  for (int p = 0; p < pred.m; ++p)
    if (matching[static_cast<std::size_t>(p)] >= 0)
      pred_of_true[static_cast<std::size_t>(matching[static_cast<std::size_t>(p)])] = p;

  const Eigen::VectorXd row = conf.rowwise().sum();
  const Eigen::VectorXd col = conf.colwise().sum();
  double total = 0.0;
  int classes = 0;
  for (int t = 0; t < truth.m; ++t) {
    if (col[t] == 0.0) continue;  // label id unused in the ground truth
    ++classes;
    const int p = pred_of_true[static_cast<std::size_t>(t)];
    if (p < 0) continue;
    const double tp = conf(p, t);
    const double denom = 2.0 * tp + (row[p] - tp) + (col[t] - tp);
    if (denom > 0.0) total += 2.0 * tp / denom;
  }
  return classes > 0 ? total / classes : 0.0;
}

/// Mean intra-cluster pairwise distance (compactness):
///   (1/|C'|) sum_{C in C'} [1/(|C||C|-1|)] sum_{i != j in C} ||x_i - x_j||
/// where C' excludes singleton (and empty) clusters, so the measure stays
/// defined mid-search when k-means produces tiny clusters. Throws when every
/// cluster is a singleton. Exact pairwise distances, O(n^2 d / m) typical.
inline double intra_distance(const FeatureMatrix& xbar,
                             const ClusterPartition& part) {
  if (static_cast<Index>(part.size()) != xbar.rows())
    throw ValidationError("partition does not cover the feature rows");
  const auto sizes = part.cluster_sizes();
  std::vector<int> eligible;
  for (int c = 0; c < part.m; ++c)
    if (sizes[static_cast<std::size_t>(c)] >= 2) eligible.push_back(c);
  if (eligible.empty())
    throw DomainError("intra-cluster distance undefined: all clusters are singletons");

  std::vector<double> cluster_mean(eligible.size(), 0.0);
  parallel_for(eligible.size(), [&](std::size_t e) {
    const int c = eligible[e];
    const auto sz = static_cast<Index>(sizes[static_cast<std::size_t>(c)]);
    Eigen::MatrixXd rows(sz, xbar.cols());
    Index r = 0;
    for (std::size_t i = 0; i < part.size(); ++i)
      if (part.labels[i] == c) rows.row(r++) = xbar.row(static_cast<Index>(i));
    const Eigen::VectorXd sq = rows.rowwise().squaredNorm();

    // Pairwise distances from blocked Gram products; keeps memory at
    // O(block * |C|) instead of |C|^2.
    constexpr Index kBlock = 128;
    double sum = 0.0;
    for (Index b = 0; b < sz; b += kBlock) {
      const Index h = std::min(kBlock, sz - b);
      const Eigen::MatrixXd gram = rows.middleRows(b, h) * rows.transpose();
      for (Index r2 = 0; r2 < h; ++r2) {
        const Index i = b + r2;
        for (Index j = i + 1; j < sz; ++j) {
          const double d2 = sq[i] + sq[j] - 2.0 * gram(r2, j);
          sum += std::sqrt(std::max(0.0, d2));
        }
      }
    }
    cluster_mean[e] =
        2.0 * sum / (static_cast<double>(sz) * static_cast<double>(sz - 1));
  });

  double total = 0.0;
  for (double v : cluster_mean) total += v;
  return total / static_cast<double>(eligible.size());
}

/// Metric bundle for one partition. Fields are present when computed:
/// external metrics need a ground truth, intra needs features, k_selected is
/// set by the adaptive driver.
struct MetricsReport {
  std::optional<double> acc;
  std::optional<double> nmi;
  std::optional<double> macro_f1;
  std::optional<double> intra;
  std::vector<int> matching;
  std::optional<int> k_selected;

  nlohmann::json to_json() const {
    nlohmann::json j;
    if (acc) j["acc"] = *acc;
    if (nmi) j["nmi"] = *nmi;
    if (macro_f1) j["macro_f1"] = *macro_f1;
    if (intra) j["intra"] = *intra;
    if (!matching.empty()) j["matching"] = matching;
    if (k_selected) j["k_selected"] = *k_selected;
    return j;
  }
};

inline MetricsReport evaluate(const ClusterPartition& pred,
                              const ClusterPartition* truth,
                              const FeatureMatrix* xbar,
                              NmiNorm norm = NmiNorm::geometric) {
  MetricsReport report;
  if (truth != nullptr) {
    auto [acc_value, matching] = accuracy(pred, *truth);
    report.acc = acc_value;
    report.matching = std::move(matching);
    report.nmi = nmi(pred, *truth, norm);
    report.macro_f1 = macro_f1(pred, *truth);
  }
  if (xbar != nullptr) report.intra = intra_distance(*xbar, pred);
  return report;
}

}  // namespace agc
