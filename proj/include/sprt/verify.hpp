#pragma once

#include <string>
#include <vector>

#include "sprt/ensemble.hpp"
#include "sprt/info.hpp"
#include "sprt/table.hpp"

namespace sprt {

// One verification battery entry. Informational rows (gated = false)
// quantify idealization residuals that are not expected to vanish at
// finite rho; they never fail a run, only report.
struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool gated = true;
  bool pass = true;
  std::string note;
};

bool all_gated_pass(const std::vector<CheckResult>& checks);

struct SeriesCheck {
  Eigen::ArrayXd residual;       // per k, NaN outside the window
  double max_over_window = 0.0;  // NaN when the window is empty
  int argmax = -1;
  int cells = 0;
  // Range of the underlying density over the window endpoints; the
  // accumulated counterpart of the per-step residual.
  double total_drift = 0.0;
};

// Residuals of the chain rule
//   i(x; u_k) = i(x; u_{k-1}) + i(x; u_k | u_{k-1})
// split by the (u_k, u_{k-1}) case. Rows with an absorbed predecessor
// have an exactly-zero conditional term, so their residual is the
// step-to-step drift of the decided state's information density; rows
// with a surviving predecessor compare the cumulative against the
// newly-absorbed posterior. Both hypotheses are scanned; each series
// keeps the worse of the two per k.
struct RecursionReport {
  SeriesCheck step_plus;     // (u_k, u_{k-1}) = (+1, +1)
  SeriesCheck step_minus;    // (-1, -1)
  SeriesCheck interior_plus;   // (+1, eps)
  SeriesCheck interior_minus;  // (-1, eps)
  SeriesCheck interior_erasure;  // (eps, eps), an arithmetic identity
  double absorbing_factor_max = 0.0;  // conditional term on absorbed rows
  double first_step_max = 0.0;        // k = 1 rows reduce to identities
  double overall_max = 0.0;           // across all positive-probability rows
};

RecursionReport verify_density_recursion(const EnsembleTable& t,
                                         const AnalysisWindow& w = {});

// I(X; U_{k-1} | U_k) per step, from the reconstructed consecutive-pair
// joint. Zero iff the decided posterior carries no decision-time
// information; the residual shrinks with rho.
struct MarkovReport {
  Eigen::ArrayXd cond_mi;  // bits, NaN outside the window
  double max_over_window = 0.0;
  int argmax = -1;
};

MarkovReport verify_markov_chain(const EnsembleTable& t,
                                 const AnalysisWindow& w = {});

struct MiEvolutionReport {
  double alpha_hat = 0.0;
  double mi_final = 0.0;          // at alpha_hat
  double mi_final_nominal = 0.0;  // at the configured alpha
  // max |I(X;U_k) - P(U_k=1|X=1)/(1-alpha_hat) * mi_final| over k.
  double linearity_max_abs = 0.0;
  double linearity_max_rel = 0.0;  // relative to mi_final
  double chain_sum_max = 0.0;   // telescoped increments vs direct MI
  double increment_max = 0.0;   // full increment vs its erasure row
  double closed_vs_direct_max = 0.0;
  double expectation_identity_max = 0.0;  // density expectation vs MI
  double monotonicity_defect = 0.0;
  double horizon_gap = 0.0;  // |I(X;U_horizon) - mi_final|
};

MiEvolutionReport verify_mi_evolution(const EnsembleTable& t,
                                      const AnalysisWindow& w = {});

// Full single-table battery: conservation, monotonicity, symmetry,
// recursion, Markov, MI evolution, boundary-ratio flatness.
std::vector<CheckResult> verify_table_checks(const EnsembleTable& t,
                                             const AnalysisWindow& w = {});

// Monte Carlo vs oracle cross-validation; residuals are in binomial
// standard-error units except where noted.
std::vector<CheckResult> verify_pair_checks(const EnsembleTable& mc,
                                            const EnsembleTable& oracle,
                                            const AnalysisWindow& w = {});

// One residual tracked across the rho sweep; gated series must decrease
// strictly as rho shrinks.
struct SweepSeries {
  std::string name;
  std::vector<double> rho;    // descending
  std::vector<double> value;
  double defect = 0.0;        // max increase between consecutive entries
  bool decreasing = false;    // strict
  bool gated = true;
};

std::vector<SweepSeries> sweep_decay_series(
    const std::vector<EnsembleTable>& oracles, const AnalysisWindow& w = {});

}  // namespace sprt
