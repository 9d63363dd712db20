// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. The two Cora criteria need the
// locally supplied dataset (see README) and are skipped with a warning when
// it is absent. Exits nonzero iff any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "agc/agc.hpp"
#include "support/test_support.hpp"

namespace {

using namespace agc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void check(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + what;
  }
}

void run_criterion(const std::string& name, double budget_seconds,
                   const std::function<Outcome()>& fn) {
  const auto start = Clock::now();
  Outcome outcome;
  try {
    outcome = fn();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0 && elapsed >= budget_seconds) {
    outcome.pass = false;
    outcome.detail += (outcome.detail.empty() ? "" : "; ") + std::string("runtime ") +
                      std::to_string(elapsed) + " s exceeds budget " +
                      std::to_string(budget_seconds) + " s";
  }
  std::printf("[%s] %-28s (%.2f s)%s%s\n", outcome.pass ? "PASS" : "FAIL",
              name.c_str(), elapsed, outcome.detail.empty() ? "" : " -- ",
              outcome.detail.c_str());
  std::fflush(stdout);
  if (!outcome.pass) ++g_failures;
}

void skip_criterion(const std::string& name, const std::string& why) {
  std::printf("[SKIP] %-28s -- warning: %s\n", name.c_str(), why.c_str());
  std::fflush(stdout);
}

// --------------------------------------------------------------------------
// Theorem 1: filtering with the low-pass k-order filter never increases the
// smoothness of the normalized signal, for k = 0..20 over 100 seeded random
// (graph, signal) pairs with n <= 100.
Outcome theorem1_monotonicity() {
  Outcome o;
  Rng rng(20250810);
  for (int pair = 0; pair < 100; ++pair) {
    const Index n = 2 + static_cast<Index>(rng.below(99));
    const double p = rng.uniform(0.02, 0.5);
    const SparseGraph g = test::random_graph(rng, n, p, pair % 4 == 0);
    const PropagationOperator op(g);
    Vector f = test::random_signal(rng, n);
    double prev = smoothness(op, f);
    for (int k = 1; k <= 20; ++k) {
      Vector next(n);
      op.apply(f.data(), next.data());
      f = 0.5 * (f + next);
      const double cur = smoothness(op, f);
      check(o, cur <= prev + 1e-9,
            "pair " + std::to_string(pair) + " k=" + std::to_string(k) +
                ": smoothness rose " + std::to_string(prev) + " -> " +
                std::to_string(cur));
      prev = cur;
      if (!o.pass) return o;
    }
  }
  return o;
}

// --------------------------------------------------------------------------
// Iterative convolution matches the dense spectral route
// U (I - Lambda/2)^k U' X within 1e-8 relative Frobenius error.
Outcome filter_oracle_equivalence() {
  Outcome o;
  Rng rng(8125);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(49));
    const Index d = 1 + static_cast<Index>(rng.below(6));
    const SparseGraph g = test::random_graph(rng, n, rng.uniform(0.05, 0.6),
                                             trial % 3 == 0);
    const PropagationOperator op(g);
    const test::SpectralOracle oracle(g);
    check(o, oracle.reconstruction_error() <= 1e-8,
          "oracle reconstruction drifted");
    const FeatureMatrix x = test::random_features(rng, n, d);
    FeatureMatrix iterative = x;
    for (int k = 0; k <= 20; ++k) {
      if (k > 0) iterative = convolve_step(op, iterative);
      const FeatureMatrix spectral = oracle.filter(x, k);
      const double scale = std::max(spectral.norm(), 1e-30);
      check(o, (iterative - spectral).norm() / scale <= 1e-8,
            "trial " + std::to_string(trial) + " k=" + std::to_string(k) +
                " relative error " +
                std::to_string((iterative - spectral).norm() / scale));
      if (!o.pass) return o;
    }
  }
  return o;
}

// --------------------------------------------------------------------------
// Hungarian accuracy is exactly the exhaustive-permutation optimum; NMI,
// macro-F1 and intra-distance match brute-force oracles within 1e-10.
Outcome metric_oracles() {
  Outcome o;
  Rng rng(6021023);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 8 + rng.below(30);
    const int mp = 1 + static_cast<int>(rng.below(6));
    const int mt = 1 + static_cast<int>(rng.below(6));
    std::vector<int> pl(n), tl(n);
    for (auto& l : pl) l = static_cast<int>(rng.below(mp));
    for (auto& l : tl) l = static_cast<int>(rng.below(mt));
    const ClusterPartition pred = ClusterPartition::from_labels(pl, mp);
    const ClusterPartition truth = ClusterPartition::from_labels(tl, mt);

    const auto [acc_fast, matching] = accuracy(pred, truth);
    check(o, acc_fast == test::bf_accuracy(pred, truth),
          "trial " + std::to_string(trial) + ": Hungarian acc != exhaustive");

    check(o, std::abs(nmi(pred, truth) - test::bf_nmi(pred, truth)) <= 1e-10,
          "trial " + std::to_string(trial) + ": nmi mismatch");
    check(o,
          std::abs(macro_f1(pred, truth) -
                   test::bf_macro_f1(pred, truth, matching)) <= 1e-10,
          "trial " + std::to_string(trial) + ": macro_f1 mismatch");

    const FeatureMatrix x =
        test::random_features(rng, static_cast<Index>(n), 4);
    check(o,
          std::abs(intra_distance(x, pred) - test::bf_intra_distance(x, pred)) <=
              1e-10,
          "trial " + std::to_string(trial) + ": intra mismatch");
    if (!o.pass) return o;
  }
  return o;
}

// --------------------------------------------------------------------------
// SBM end to end: with noise pinned so raw-feature k-means stays at or below
// 0.8 accuracy, the adaptive driver reaches 0.9 accuracy with k >= 1 on at
// least 8 of 10 seeds.
Outcome sbm_end_to_end() {
  Outcome o;
  double raw_acc_sum = 0.0;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SbmSpec spec;
    spec.n = 300;
    spec.m = 3;
    spec.p_in = 0.1;
    spec.p_out = 0.01;
    spec.d = 8;
    spec.mu_sep = 1.0;
    spec.sigma = 0.75;
    spec.seed = derive_seed(4242, seed);
    const SbmInstance inst = gen_sbm(spec);

    const ClusterPartition raw = kmeans(inst.features, 3, seed);
    raw_acc_sum += accuracy(raw, inst.labels).first;

    AgcConfig cfg;
    cfg.m = 3;
    // This instance is assortative enough that intra keeps falling for a
    // long time; 20 orders are plenty for the accuracy target and keep the
    // criterion inside its runtime budget.
    cfg.max_iter = 20;
    cfg.seed = seed;
    const AgcResult result = run_agc(inst.graph, inst.features, cfg);
    const double acc = accuracy(result.partition, inst.labels).first;
    if (acc >= 0.9 && result.k >= 1) ++good;
  }
  const double raw_mean = raw_acc_sum / 10.0;
  check(o, raw_mean <= 0.8,
        "raw-feature k-means baseline too easy: mean acc " +
            std::to_string(raw_mean));
  check(o, good >= 8,
        "AGC reached acc >= 0.9 on only " + std::to_string(good) +
            "/10 seeds");
  o.detail = "raw kmeans mean acc " + std::to_string(raw_mean) + ", AGC good " +
             std::to_string(good) + "/10" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// --------------------------------------------------------------------------
// Cora reproduction (optional local dataset).

struct CoraFiles {
  fs::path edges, features, labels;
};

std::optional<CoraFiles> find_cora() {
  fs::path dir = "data/cora";
  if (const char* env = std::getenv("AGC_CORA_DIR")) dir = env;
  CoraFiles files{dir / "cora.edges", dir / "cora.features.csv",
                  dir / "cora.labels"};
  if (fs::exists(files.edges) && fs::exists(files.features) &&
      fs::exists(files.labels))
    return files;
  return std::nullopt;
}

Outcome cora_reproduction(const CoraFiles& files) {
  Outcome o;
  std::ifstream ef(files.edges);
  const SparseGraph g = load_edge_list(ef);
  std::ifstream xf(files.features);
  const FeatureMatrix x = read_features_csv(xf);
  std::ifstream lf(files.labels);
  const ClusterPartition truth = ClusterPartition::from_labels(read_labels(lf));

  double acc_sum = 0, nmi_sum = 0, f1_sum = 0, k_sum = 0;
  double first_run_seconds = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AgcConfig cfg;
    cfg.m = 7;
    cfg.max_iter = 60;
    cfg.seed = seed;
    const auto start = Clock::now();
    const AgcResult result = run_agc(g, x, cfg);
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (seed == 0) first_run_seconds = elapsed;
    acc_sum += accuracy(result.partition, truth).first;
    nmi_sum += nmi(result.partition, truth);
    f1_sum += macro_f1(result.partition, truth);
    k_sum += result.k;
  }
  const double acc = 100.0 * acc_sum / 10.0;
  const double nmi_pct = 100.0 * nmi_sum / 10.0;
  const double f1 = 100.0 * f1_sum / 10.0;
  const double mean_k = k_sum / 10.0;
  check(o, std::abs(acc - 68.92) <= 3.0, "Acc " + std::to_string(acc));
  check(o, std::abs(nmi_pct - 53.68) <= 3.0, "NMI " + std::to_string(nmi_pct));
  check(o, std::abs(f1 - 65.61) <= 3.0, "F1 " + std::to_string(f1));
  check(o, mean_k >= 8.0 && mean_k <= 16.0, "mean k " + std::to_string(mean_k));
  check(o, first_run_seconds < 60.0,
        "single run took " + std::to_string(first_run_seconds) + " s");
  std::ostringstream s;
  s << "Acc " << acc << ", NMI " << nmi_pct << ", F1 " << f1 << ", mean k "
    << mean_k << ", first run " << first_run_seconds << " s";
  o.detail = s.str() + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome cora_spectral_f(const CoraFiles& files) {
  Outcome o;
  std::ifstream xf(files.features);
  const FeatureMatrix x = read_features_csv(xf);
  std::ifstream lf(files.labels);
  const ClusterPartition truth = ClusterPartition::from_labels(read_labels(lf));
  SpectralOptions opt;
  opt.seed = 0;
  const ClusterPartition part = spectral_cluster(x, 7, opt);
  const double acc = 100.0 * accuracy(part, truth).first;
  check(o, std::abs(acc - 36.26) <= 4.0, "Spectral-f Acc " + std::to_string(acc));
  o.detail = "Acc " + std::to_string(acc) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// --------------------------------------------------------------------------
// The CLI produces byte-identical label files across thread counts.
Outcome determinism_across_threads() {
  Outcome o;
  test::TempDir dir;
  SbmSpec spec;
  spec.n = 200;
  spec.sigma = 0.6;
  spec.seed = 1234;
  const SbmInstance inst = gen_sbm(spec);
  atomic_write_file(dir.file("g.edges"), [&](std::ostream& out) {
    for (Index u = 0; u < inst.graph.num_nodes(); ++u) {
      auto cols = inst.graph.neighbors(u);
      for (std::size_t p = 0; p < cols.size(); ++p)
        if (cols[p] >= u) out << u << '\t' << cols[p] << '\n';
    }
  });
  atomic_write_file(dir.file("x.csv"), [&](std::ostream& out) {
    write_features_csv(out, inst.features);
  });

  std::string reference;
  for (int threads : {1, 4, 8}) {
    const std::string out = dir.file("pred" + std::to_string(threads)).string();
    const test::CliResult r = test::run_cli(
        "--threads " + std::to_string(threads) + " run --edges " +
        dir.file("g.edges").string() + " --features " + dir.file("x.csv").string() +
        " --clusters 3 --max-iter 25 --seed 3 --out-labels " + out);
    check(o, r.exit_code == 0,
          "cli exited " + std::to_string(r.exit_code) + " with " +
              std::to_string(threads) + " threads");
    if (!o.pass) return o;
    const std::string bytes = test::read_file(out);
    if (reference.empty())
      reference = bytes;
    else
      check(o, bytes == reference,
            "labels differ between thread counts (at --threads " +
                std::to_string(threads) + ")");
  }
  return o;
}

}  // namespace

int main() {
  run_criterion("theorem1-monotonicity", 10.0, theorem1_monotonicity);
  run_criterion("filter-oracle-equivalence", 5.0, filter_oracle_equivalence);
  run_criterion("metric-oracles", 10.0, metric_oracles);
  run_criterion("sbm-end-to-end", 30.0, sbm_end_to_end);

  if (const auto cora = find_cora()) {
    run_criterion("cora-reproduction", 0.0, [&] { return cora_reproduction(*cora); });
    run_criterion("cora-spectral-f-baseline", 0.0, [&] { return cora_spectral_f(*cora); });
  } else {
    const std::string why =
        "Cora dataset not found (looked in $AGC_CORA_DIR, then data/cora/); "
        "supply cora.edges, cora.features.csv, cora.labels to enable";
    skip_criterion("cora-reproduction", why);
    skip_criterion("cora-spectral-f-baseline", why);
  }

  run_criterion("determinism-across-threads", 0.0, determinism_across_threads);

  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
