#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <limits>

#include "sprt/engine.hpp"

namespace sprt {

enum class TableSource { monte_carlo, oracle };

// Index helpers for the 2x2 (hypothesis, boundary) blocks.
constexpr int xi(Hypothesis x) { return x == Hypothesis::plus ? 0 : 1; }
constexpr int bi(TernaryState a) { return a == TernaryState::plus ? 0 : 1; }
constexpr Hypothesis hyp_at(int i) {
  return i == 0 ? Hypothesis::plus : Hypothesis::minus;
}
constexpr TernaryState boundary_at(int i) {
  return i == 0 ? TernaryState::plus : TernaryState::minus;
}

using CountArray = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>;

// State-probability tables over k = 0..horizon conditioned on the
// hypothesis. Primary data: newly[x][a][k], the probability of absorbing at
// boundary a exactly at step k given X = x, and surv[x][k], the probability
// of still being undecided at k. Cumulative sums are precomputed by
// finalize(). Monte Carlo tables carry the integer counts behind every
// estimate (counts are the authoritative data; masses are counts/trials);
// oracle tables carry exact masses and empty counts.
struct EnsembleTable {
  TableSource source = TableSource::monte_carlo;
  int horizon = 0;
  std::int64_t trials_per_hypothesis = 0;
  double rho = 0.0;
  double alpha = 0.0;
  double threshold = 0.0;
  double censored_fraction = 0.0;

  // Oracle provenance; NaN / 0 on Monte Carlo tables.
  double mass_residual = 0.0;
  double tail_error_bound = std::numeric_limits<double>::quiet_NaN();

  std::array<std::array<Eigen::ArrayXd, 2>, 2> newly;  // [xi][bi], size horizon+1
  std::array<std::array<Eigen::ArrayXd, 2>, 2> cum;    // running sums of newly
  std::array<Eigen::ArrayXd, 2> surv;                  // [xi], surv[x][0] = 1

  std::array<std::array<CountArray, 2>, 2> count_newly;  // empty on oracle
  std::array<CountArray, 2> count_surv;

  // Denominator-support floors for ratio analyses (per-step conditional
  // probabilities divide by survival at k-1).
  std::int64_t count_floor = 100;
  double mass_floor = 1e-6;

  bool is_oracle() const { return source == TableSource::oracle; }
  bool has_counts() const { return count_newly[0][0].size() > 0; }

  // P(U_k = a | U_{k-1} = erasure, X = x); NaN when k = 0 or the
  // denominator has no support.
  double term_at(int k, Hypothesis x, TernaryState a) const;

  // P(U_k = a | X = x).
  double term_upto(int k, Hypothesis x, TernaryState a) const;

  double survive_given(int k, Hypothesis x) const;
  double survive(int k) const;  // pooled over both hypotheses

  // P(U_k = u | X = x) for any ternary u.
  double p_state(int k, Hypothesis x, TernaryState u) const;

  // Whether the step-k conditional cell clears the support floor.
  bool confident_at(int k, Hypothesis x) const;

  // Recompute cum from newly, derive count_surv from count_newly when
  // counts are present, and validate shapes. Throws std::invalid_argument
  // on inconsistent sizes.
  void finalize();
};

// Exact integer conservation: for every k >= 1 and each hypothesis,
// survivors(k-1) = survivors(k) + newly_plus(k) + newly_minus(k).
// Returns the max absolute defect in counts (0 when the table is sound).
std::int64_t count_conservation_defect(const EnsembleTable& t);

// Mass analogue on the real arrays; max over k of the absolute defect.
double mass_conservation_defect(const EnsembleTable& t);

// Max over (k, x, a) of a cumulative-monotonicity violation, 0 when sound.
double monotonicity_defect(const EnsembleTable& t);

}  // namespace sprt
