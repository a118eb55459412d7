#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sprt/table.hpp"

namespace sprt {

struct EnsembleOptions {
  std::int64_t trials = 100000;  // per hypothesis
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0: hardware concurrency
  // Pair the X=-1 branch with the X=+1 noise streams, negated. Exchange
  // symmetry then holds exactly (bit-for-bit) instead of statistically.
  bool antithetic = false;
  bool keep_traces = false;
  std::size_t memory_budget_bytes = std::size_t(2) << 30;
  std::int64_t count_floor = 100;
};

// Runs `trials` trajectories per hypothesis with per-trajectory engines
// seeded from (master_seed, trajectory index): the resulting counts are
// bit-identical for any thread count. Throws resource_error when tracing
// is requested beyond the memory budget.
EnsembleTable run_ensemble(const TestConfig& config,
                           const EnsembleOptions& opts = {});
EnsembleTable run_ensemble(const TestConfig& config, std::int64_t trials,
                           std::uint64_t master_seed);

struct TracedEnsemble {
  EnsembleTable table;
  std::vector<Trajectory> plus;   // trial order, X = +1
  std::vector<Trajectory> minus;  // trial order, X = -1
};

TracedEnsemble run_ensemble_traced(const TestConfig& config,
                                   const EnsembleOptions& opts);

struct SymmetryEntry {
  double residual = 0.0;  // absolute difference at the worst step
  int k = 0;              // where the worst step is
  double sigma = 0.0;     // pooled two-proportion standard error there
};

// Residuals of the symmetry relations the tables must satisfy: the
// conditional mirrors across hypotheses, the unconditional boundary
// balance, the per-step conditional balance, and the hypothesis
// independence of survival. On count-bearing tables the worst step is
// the one with the largest z-score under the pooled null; on exact
// tables it is the largest raw difference. sigma_defined is false when
// a standard error cannot be formed (oracle tables, single-trial
// ensembles).
struct SymmetryReport {
  SymmetryEntry decision_mirror;   // P(U_k=+1|X=+1) vs P(U_k=-1|X=-1)
  SymmetryEntry cross_mirror;      // P(U_k=+1|X=-1) vs P(U_k=-1|X=+1)
  SymmetryEntry boundary_balance;  // P(U_k=+1) vs P(U_k=-1)
  SymmetryEntry step_balance;      // same on per-step conditionals
  SymmetryEntry erasure_match;     // P(U_k=eps|X=+1) vs P(U_k=eps|X=-1)
  bool sigma_defined = false;
};

SymmetryReport symmetry_report(const EnsembleTable& t);

struct DecisionTimeStats {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (level, k)
  double censored_fraction = 0.0;
  double wald_approximation = 0.0;  // (1 - 2 alpha) T / (2 rho)
};

// Moments and quantiles of the decision time over decided trajectories;
// censored ones are excluded and reported via censored_fraction. Works on
// both Monte Carlo counts (exactly) and oracle masses. Throws
// std::domain_error when nothing decided.
DecisionTimeStats decision_time_stats(const EnsembleTable& t);

}  // namespace sprt
