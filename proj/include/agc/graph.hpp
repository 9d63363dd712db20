#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "agc/error.hpp"
#include "agc/parallel.hpp"

namespace agc {

using Index = Eigen::Index;

/// Dense n x d matrix of node attributes; row i holds the features of node i.
/// Columns are graph signals.
using FeatureMatrix = Eigen::MatrixXd;

using Vector = Eigen::VectorXd;

struct WeightedEdge {
  Index u = 0;
  Index v = 0;
  double w = 1.0;
};

/// Undirected weighted graph stored as the CSR form of its symmetric
/// adjacency matrix. Node ids are dense 0..n-1; column indices within a row
/// are sorted, which fixes the traversal (and hence accumulation) order.
class SparseGraph {
 public:
  SparseGraph() : row_ptr_(1, 0) {}

  /// Builds the symmetric adjacency from directed entries:
  ///  - duplicate same-direction entries coalesce by summing their weights;
  ///  - the result is symmetrized as a_ij = max(sum_ij, sum_ji), i.e. each
  ///    edge is inserted in both directions unless the input already lists
  ///    the reverse. Order-independent by construction.
  /// n is max node id + 1, or n_hint if larger.
  static SparseGraph from_edges(std::vector<WeightedEdge> edges,
                                Index n_hint = 0) {
    Index n = n_hint;
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0)
        throw ValidationError("edge endpoints must be nonnegative node ids");
      if (!(e.w >= 0.0) || !std::isfinite(e.w))
        throw ValidationError("edge weights must be finite and nonnegative");
      n = std::max(n, std::max(e.u, e.v) + 1);
    }

    // Coalesce same-direction duplicates.
    std::sort(edges.begin(), edges.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) {
                return a.u != b.u ? a.u < b.u : a.v < b.v;
              });
    std::vector<WeightedEdge> directed;
    directed.reserve(edges.size());
    for (const auto& e : edges) {
      if (!directed.empty() && directed.back().u == e.u &&
          directed.back().v == e.v) {
        directed.back().w += e.w;
      } else {
        directed.push_back(e);
      }
    }

    // Symmetrize by elementwise max of the directed matrix and its
    // transpose. Merging the forward list with its (sorted) reverse.
    std::vector<WeightedEdge> reversed(directed.size());
    std::transform(directed.begin(), directed.end(), reversed.begin(),
                   [](const WeightedEdge& e) {
                     return WeightedEdge{e.v, e.u, e.w};
                   });
    std::sort(reversed.begin(), reversed.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) {
                return a.u != b.u ? a.u < b.u : a.v < b.v;
              });

    std::vector<WeightedEdge> entries;
    entries.reserve(directed.size() + reversed.size());
    std::size_t i = 0, j = 0;
    while (i < directed.size() || j < reversed.size()) {
      if (j == reversed.size() ||
          (i < directed.size() &&
           (directed[i].u != reversed[j].u ? directed[i].u < reversed[j].u
                                           : directed[i].v < reversed[j].v))) {
        entries.push_back(directed[i++]);
      } else if (i == directed.size() || reversed[j].u != directed[i].u ||
                 reversed[j].v != directed[i].v) {
        entries.push_back(reversed[j++]);
      } else {
        entries.push_back(
            {directed[i].u, directed[i].v, std::max(directed[i].w, reversed[j].w)});
        ++i;
        ++j;
      }
    }

    SparseGraph g;
    g.n_ = n;
    g.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : entries) g.row_ptr_[static_cast<std::size_t>(e.u) + 1]++;
    for (std::size_t r = 1; r < g.row_ptr_.size(); ++r)
      g.row_ptr_[r] += g.row_ptr_[r - 1];
    g.col_.resize(entries.size());
    g.val_.resize(entries.size());
    std::vector<Index> cursor(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
    for (const auto& e : entries) {
      const Index pos = cursor[static_cast<std::size_t>(e.u)]++;
      g.col_[static_cast<std::size_t>(pos)] = e.v;
      g.val_[static_cast<std::size_t>(pos)] = e.w;
    }
    return g;
  }

  Index num_nodes() const { return n_; }

  /// Stored nonzeros (both triangles; self-loops counted once).
  Index num_entries() const { return static_cast<Index>(col_.size()); }

  /// Undirected edge count: off-diagonal entries / 2 + self-loops.
  Index num_undirected_edges() const {
    Index loops = 0;
    for (Index u = 0; u < n_; ++u)
      for (Index p = row_ptr_[u]; p < row_ptr_[u + 1]; ++p)
        if (col_[static_cast<std::size_t>(p)] == u) ++loops;
    return (num_entries() - loops) / 2 + loops;
  }

  std::span<const Index> neighbors(Index u) const {
    return {col_.data() + row_ptr_[static_cast<std::size_t>(u)],
            static_cast<std::size_t>(row_len(u))};
  }

  std::span<const double> weights(Index u) const {
    return {val_.data() + row_ptr_[static_cast<std::size_t>(u)],
            static_cast<std::size_t>(row_len(u))};
  }

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_indices() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  /// Dense adjacency; intended for tests and small-n inspection only.
  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (Index u = 0; u < n_; ++u) {
      auto cols = neighbors(u);
      auto ws = weights(u);
      for (std::size_t p = 0; p < cols.size(); ++p) a(u, cols[p]) = ws[p];
    }
    return a;
  }

 private:
  Index row_len(Index u) const {
    return row_ptr_[static_cast<std::size_t>(u) + 1] -
           row_ptr_[static_cast<std::size_t>(u)];
  }

  Index n_ = 0;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_;
  std::vector<double> val_;
};

/// Parses the edge-list text format: one edge per line as
/// "u v" or "u v w" (whitespace-separated), `#`-prefixed comment lines and
/// blank lines skipped. See SparseGraph::from_edges for symmetrization.
inline SparseGraph load_edge_list(std::istream& in, Index n_hint = 0) {
  std::vector<WeightedEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u = -1, v = -1;
    double w = 1.0;
    if (!(ls >> u >> v)) throw ParseError("expected \"u v [w]\"", lineno);
    if (u < 0 || v < 0)
      throw ParseError("node ids must be nonnegative integers", lineno);
    if (u > 50'000'000 || v > 50'000'000)
      throw ValidationError("node id " + std::to_string(std::max(u, v)) +
                            " is implausibly large; densify ids first "
                            "(see the remap-ids subcommand)");
    std::string third;
    if (ls >> third) {
      std::size_t consumed = 0;
      try {
        w = std::stod(third, &consumed);
      } catch (const std::exception&) {
        throw ParseError("bad weight \"" + third + "\"", lineno);
      }
      if (consumed != third.size())
        throw ParseError("bad weight \"" + third + "\"", lineno);
      std::string extra;
      if (ls >> extra) throw ParseError("trailing tokens after weight", lineno);
    }
    if (!std::isfinite(w) || w < 0.0)
      throw ValidationError("negative or non-finite weight at line " +
                            std::to_string(lineno));
    edges.push_back({static_cast<Index>(u), static_cast<Index>(v), w});
  }
  return SparseGraph::from_edges(std::move(edges), n_hint);
}

/// d_i = sum_j a_ij.
inline Vector degree_vector(const SparseGraph& g) {
  Vector d = Vector::Zero(g.num_nodes());
  for (Index u = 0; u < g.num_nodes(); ++u) {
    double acc = 0.0;
    for (double w : g.weights(u)) acc += w;
    d[u] = acc;
  }
  return d;
}

/// The symmetric-normalized propagation operator S = D^{-1/2} A D^{-1/2},
/// applied implicitly (never materialized densely). Rows and columns of
/// isolated nodes (d_i = 0) are zero, so L_s = I - S acts as the identity
/// there; pre-add self-loops if different behaviour is wanted.
///
/// Holds a pointer to the graph; the graph must outlive the operator.
class PropagationOperator {
 public:
  explicit PropagationOperator(const SparseGraph& g)
      : g_(&g), deg_(degree_vector(g)), inv_sqrt_deg_(g.num_nodes()) {
    for (Index i = 0; i < g.num_nodes(); ++i)
      inv_sqrt_deg_[i] = deg_[i] > 0.0 ? 1.0 / std::sqrt(deg_[i]) : 0.0;
    scaled_.resize(g.values().size());
    for (Index u = 0; u < g.num_nodes(); ++u) {
      auto cols = g.neighbors(u);
      auto ws = g.weights(u);
      const Index base = g.row_ptr()[static_cast<std::size_t>(u)];
      for (std::size_t p = 0; p < cols.size(); ++p)
        scaled_[static_cast<std::size_t>(base) + p] =
            ws[p] * inv_sqrt_deg_[u] * inv_sqrt_deg_[cols[p]];
    }
  }

  Index size() const { return g_->num_nodes(); }
  const SparseGraph& graph() const { return *g_; }
  const Vector& degrees() const { return deg_; }
  const Vector& inv_sqrt_degrees() const { return inv_sqrt_deg_; }
  bool is_isolated(Index i) const { return deg_[i] == 0.0; }

  /// y = S x for one signal. CSR row order, so accumulation order is fixed.
  void apply(const double* x, double* y) const {
    const auto& row_ptr = g_->row_ptr();
    const auto& col = g_->col_indices();
    for (Index u = 0; u < size(); ++u) {
      double acc = 0.0;
      for (Index p = row_ptr[static_cast<std::size_t>(u)];
           p < row_ptr[static_cast<std::size_t>(u) + 1]; ++p)
        acc += scaled_[static_cast<std::size_t>(p)] *
               x[col[static_cast<std::size_t>(p)]];
      y[u] = acc;
    }
  }

  Vector apply(const Vector& x) const {
    if (x.size() != size())
      throw ValidationError("signal length does not match node count");
    Vector y(size());
    apply(x.data(), y.data());
    return y;
  }

  /// Y = S X, column-signals independently (parallel across columns).
  FeatureMatrix apply(const FeatureMatrix& x) const {
    if (x.rows() != size())
      throw ValidationError("feature row count does not match node count");
    FeatureMatrix y(x.rows(), x.cols());
    parallel_for(static_cast<std::size_t>(x.cols()), [&](std::size_t c) {
      apply(x.col(static_cast<Index>(c)).data(),
            y.col(static_cast<Index>(c)).data());
    });
    return y;
  }

 private:
  const SparseGraph* g_;
  Vector deg_;
  Vector inv_sqrt_deg_;
  std::vector<double> scaled_;  // a_ij / sqrt(d_i d_j), CSR layout
};

inline PropagationOperator propagation_operator(const SparseGraph& g) {
  return PropagationOperator(g);
}

}  // namespace agc
