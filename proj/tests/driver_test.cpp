#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "agc/datagen.hpp"
#include "agc/driver.hpp"
#include "support/test_support.hpp"

using namespace agc;
using Catch::Approx;

namespace {

/// Two disjoint cliques with block-constant features: the filter fixes the
/// features exactly, so intra never changes and no local minimum appears.
std::pair<SparseGraph, FeatureMatrix> fixed_point_instance() {
  std::vector<WeightedEdge> edges;
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) {
      edges.push_back({i, j, 1.0});
      edges.push_back({i + 4, j + 4, 1.0});
    }
  FeatureMatrix x(8, 2);
  for (Index i = 0; i < 8; ++i) {
    x(i, 0) = i < 4 ? 1.0 : 0.0;
    x(i, 1) = i < 4 ? 0.0 : 1.0;
  }
  return {SparseGraph::from_edges(std::move(edges), 8), x};
}

AgcConfig small_config(int m, int max_iter = 10, std::uint64_t seed = 0) {
  AgcConfig cfg;
  cfg.m = m;
  cfg.max_iter = max_iter;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("run_agc terminates at max_iter when intra never rises", "[driver]") {
  auto [g, x] = fixed_point_instance();
  const AgcResult result = run_agc(g, x, small_config(2, 5));
  CHECK(result.k == 5);
  CHECK(result.trace.stop_reason == StopReason::max_iter);
  CHECK(result.trace.selected_k == 5);
  CHECK(result.trace.iterations.size() == 5);
  CHECK(result.k >= 1);
  // Block-constant features are a fixed point of the filter.
  CHECK((result.filtered - x).lpNorm<Eigen::Infinity>() < 1e-12);
  // And the partition separates the two cliques.
  CHECK(result.partition.labels[0] == result.partition.labels[3]);
  CHECK(result.partition.labels[4] == result.partition.labels[7]);
  CHECK(result.partition.labels[0] != result.partition.labels[4]);
}

TEST_CASE("run_agc validates its inputs", "[driver]") {
  auto [g, x] = fixed_point_instance();
  CHECK_THROWS_AS(run_agc(g, x, small_config(1)), ValidationError);
  AgcConfig bad_iter = small_config(2);
  bad_iter.max_iter = 0;
  CHECK_THROWS_AS(run_agc(g, x, bad_iter), ValidationError);
  CHECK_THROWS_AS(run_agc(g, FeatureMatrix::Zero(8, 2), small_config(2)),
                  ValidationError);
  CHECK_THROWS_AS(run_agc(g, FeatureMatrix::Ones(5, 2), small_config(2)),
                  ValidationError);
}

TEST_CASE("run_agc recovers SBM communities and selects a sensible k", "[driver][oracle]") {
  // Enough inter-block mixing that over-smoothing eventually raises the
  // intra-cluster distance, so the first-local-minimum rule fires.
  SbmSpec spec;
  spec.n = 90;
  spec.m = 3;
  spec.p_in = 0.2;
  spec.p_out = 0.05;
  spec.d = 6;
  spec.mu_sep = 1.0;
  spec.sigma = 0.5;
  spec.seed = 3;
  const SbmInstance inst = gen_sbm(spec);

  const AgcResult result = run_agc(inst.graph, inst.features, small_config(3, 35, 5));
  CHECK(result.k >= 1);
  CHECK(result.k <= 30);
  CHECK(accuracy(result.partition, inst.labels).first >= 0.9);

  // The driver's stop matches an independent sweep of the same seeds.
  const auto rows = sweep_k(inst.graph, inst.features, result.k + 1,
                            small_config(3, 35, 5), &inst.labels);
  for (int k = 1; k < result.k; ++k)
    CHECK(rows[static_cast<std::size_t>(k)].d_intra <= 0.0);
  if (result.trace.stop_reason == StopReason::local_minimum)
    CHECK(rows[static_cast<std::size_t>(result.k)].d_intra > 0.0);
}

TEST_CASE("trace records a strict local-minimum stop", "[driver]") {
  SbmSpec spec;
  spec.n = 90;
  spec.m = 3;
  spec.p_in = 0.2;
  spec.p_out = 0.05;
  spec.d = 6;
  spec.sigma = 0.75;
  spec.seed = 0;
  const SbmInstance inst = gen_sbm(spec);
  const AgcResult result = run_agc(inst.graph, inst.features, small_config(3, 40, 5));
  REQUIRE(result.trace.stop_reason == StopReason::local_minimum);
  const auto& its = result.trace.iterations;
  REQUIRE(its.size() == static_cast<std::size_t>(result.k) + 1);
  // intra non-increasing up to the selected order, then a strict rise.
  for (std::size_t s = 1; s + 1 < its.size(); ++s)
    CHECK(its[s].intra <= its[s - 1].intra);
  CHECK(its.back().intra > its[its.size() - 2].intra);
  CHECK(its.back().d_intra > 0.0);
  // d_intra bookkeeping: intra_t - intra_{t-1}, with a -inf sentinel at t=1.
  CHECK(std::isinf(its.front().d_intra));
  for (std::size_t s = 1; s < its.size(); ++s)
    CHECK(its[s].d_intra == Approx(its[s].intra - its[s - 1].intra).margin(1e-15));
}

TEST_CASE("filtered features equal from-scratch convolution at the selected order",
          "[driver][property]") {
  SbmSpec spec;
  spec.n = 120;
  spec.sigma = 0.75;
  spec.seed = 3;
  const SbmInstance inst = gen_sbm(spec);
  const AgcResult result = run_agc(inst.graph, inst.features, small_config(3, 20, 9));
  const PropagationOperator op(inst.graph);
  const FeatureMatrix scratch = convolve_k(op, inst.features, result.k);
  CHECK((result.filtered - scratch).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("run_agc is deterministic", "[driver]") {
  SbmSpec spec;
  spec.n = 90;
  spec.sigma = 0.75;
  spec.seed = 21;
  const SbmInstance inst = gen_sbm(spec);
  const AgcResult a = run_agc(inst.graph, inst.features, small_config(3, 15, 77));
  const AgcResult b = run_agc(inst.graph, inst.features, small_config(3, 15, 77));
  CHECK(a.k == b.k);
  CHECK(a.partition.labels == b.partition.labels);
  REQUIRE(a.trace.iterations.size() == b.trace.iterations.size());
  for (std::size_t s = 0; s < a.trace.iterations.size(); ++s) {
    CHECK(a.trace.iterations[s].intra == b.trace.iterations[s].intra);
    CHECK(a.trace.iterations[s].partition_digest ==
          b.trace.iterations[s].partition_digest);
  }
}

TEST_CASE("earlier iterations are independent of max_iter", "[driver]") {
  SbmSpec spec;
  spec.n = 90;
  spec.sigma = 0.75;
  spec.seed = 23;
  const SbmInstance inst = gen_sbm(spec);
  const AgcResult shallow = run_agc(inst.graph, inst.features, small_config(3, 2, 4));
  const AgcResult deep = run_agc(inst.graph, inst.features, small_config(3, 12, 4));
  const std::size_t shared =
      std::min(shallow.trace.iterations.size(), deep.trace.iterations.size());
  for (std::size_t s = 0; s < shared; ++s) {
    CHECK(shallow.trace.iterations[s].intra == deep.trace.iterations[s].intra);
    CHECK(shallow.trace.iterations[s].partition_digest ==
          deep.trace.iterations[s].partition_digest);
  }
}

TEST_CASE("loop never exceeds max_iter iterations", "[driver][property]") {
  Rng rng(555);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 20 + static_cast<Index>(rng.below(30));
    const SparseGraph g = test::random_connected_graph(rng, n, 0.1);
    const FeatureMatrix x = test::random_features(rng, n, 4);
    const int max_iter = 1 + static_cast<int>(rng.below(6));
    const AgcResult result = run_agc(g, x, small_config(2, max_iter, trial));
    CHECK(result.trace.iterations.size() <= static_cast<std::size_t>(max_iter));
    CHECK(result.k >= 1);
    CHECK((result.trace.stop_reason == StopReason::local_minimum ||
           result.trace.stop_reason == StopReason::max_iter));
  }
}

TEST_CASE("sweep_k with k_max = 1 yields a single row", "[driver]") {
  auto [g, x] = fixed_point_instance();
  const auto rows = sweep_k(g, x, 1, small_config(2));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].k == 1);
  CHECK_FALSE(rows[0].acc.has_value());
}

TEST_CASE("sweep_k fills external metrics when truth is given", "[driver]") {
  auto [g, x] = fixed_point_instance();
  const ClusterPartition truth =
      ClusterPartition::from_labels({0, 0, 0, 0, 1, 1, 1, 1}, 2);
  const auto rows = sweep_k(g, x, 3, small_config(2), &truth);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    REQUIRE(row.acc.has_value());
    CHECK(*row.acc == 1.0);
    CHECK(*row.nmi == 1.0);
    CHECK(*row.f1 == 1.0);
  }
}

TEST_CASE("sweep_k rows reproduce the driver's iterations", "[driver]") {
  SbmSpec spec;
  spec.n = 90;
  spec.sigma = 0.75;
  spec.seed = 29;
  const SbmInstance inst = gen_sbm(spec);
  const AgcConfig cfg = small_config(3, 10, 31);
  const AgcResult result = run_agc(inst.graph, inst.features, cfg);
  const auto rows = sweep_k(inst.graph, inst.features,
                            static_cast<int>(result.trace.iterations.size()), cfg);
  for (std::size_t s = 0; s < result.trace.iterations.size(); ++s)
    CHECK(rows[s].intra == result.trace.iterations[s].intra);
}
