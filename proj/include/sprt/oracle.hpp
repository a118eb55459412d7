#pragma once

#include <Eigen/Dense>

#include "sprt/table.hpp"

namespace sprt {

struct OracleOptions {
  int grid_points = 4096;
  int steps = 0;             // 0: config.max_steps
  double stop_mass = 1e-12;  // stop early once survival drops below this
  double mass_tolerance = 1e-9;
  // Rerun at half resolution and report the observed delta of every
  // cumulative probability as tail_error_bound (a Richardson-style bound
  // that dominates the error of the fine grid).
  bool refine_error_bound = true;
};

// Discretized surviving mass of the cumulative log-likelihood ratio between
// the absorbing boundaries, given X = +1, with the absorbed-mass ledger per
// step. Masses live at cell centers; transition and absorption integrals
// are exact Gaussian interval/tail probabilities, so conservation holds to
// rounding and the only discretization error is the cell-center placement.
struct OracleGrid {
  int grid_points = 0;
  double spacing = 0.0;
  double threshold = 0.0;  // support is (-threshold, +threshold)
  double rho = 0.0;
  double alpha = 0.0;
  int steps_run = 0;  // may stop before the requested horizon once
                      // survival falls below stop_mass

  Eigen::ArrayXd absorbed_plus;      // mass newly absorbed at +T at step k
  Eigen::ArrayXd absorbed_minus;     // same at -T; index 0 unused (= 0)
  Eigen::ArrayXd survival;           // survival[k], survival[0] = 1
  Eigen::ArrayXd surviving_density;  // final density (mass / spacing)

  double mass_residual = 0.0;  // max over k of the conservation defect
  double tail_error_bound = 0.0;
};

// Exact propagation for Gaussian noise (increment ~ Normal(2 rho, 4 rho)
// under X = +1; the first step is taken from the point mass at 0, so step-1
// absorption is an exact Gaussian tail). Throws std::domain_error for
// non-Gaussian noise or grid_points < 3, numerical_error when the
// conservation residual exceeds the tolerance.
OracleGrid propagate(const TestConfig& config, const OracleOptions& opts = {});
OracleGrid propagate(const TestConfig& config, int steps, int grid_points);

// Exact table in the shared shape: X = -1 entries filled by the mirror
// symmetry of the +1 propagation, survival hypothesis-independent.
EnsembleTable oracle_tables(const OracleGrid& g);

}  // namespace sprt
