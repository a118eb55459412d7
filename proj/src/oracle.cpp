#include "sprt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sprt/errors.hpp"
#include "sprt/normal.hpp"

namespace sprt {
namespace {

struct Ledger {
  std::vector<double> abs_plus;  // [0] = 0, entries for k = 1..steps_run
  std::vector<double> abs_minus;
  std::vector<double> survival;  // [0] = 1
  Eigen::ArrayXd final_mass;     // surviving cell masses after the last step
  double max_residual = 0.0;
};

Ledger propagate_masses(double rho, double threshold, int n, int steps,
                        double stop_mass) {
  const double mu = 2.0 * rho;
  const double sig = 2.0 * std::sqrt(rho);
  const double T = threshold;
  const double h = 2.0 * T / n;

  // Toeplitz transition kernel between cell centers, K[d + n - 1] for
  // destination-minus-source offset d; entries are exact interval
  // probabilities, the complementary tails are the absorption integrals.
  Eigen::ArrayXd K(2 * n - 1);
  int dlo = n, dhi = -n;
  for (int d = -(n - 1); d <= n - 1; ++d) {
    const double v = phi_interval(((d - 0.5) * h - mu) / sig,
                                  ((d + 0.5) * h - mu) / sig);
    K[d + n - 1] = v;
    if (v > 0.0) {
      dlo = std::min(dlo, d);
      dhi = std::max(dhi, d);
    }
  }
  Eigen::ArrayXd tail_plus(n), tail_minus(n);
  for (int j = 0; j < n; ++j) {
    const double c = -T + (j + 0.5) * h;
    tail_plus[j] = phi_sf((T - c - mu) / sig);
    tail_minus[j] = phi_cdf((-T - c - mu) / sig);
  }

  Ledger L;
  L.abs_plus.assign(1, 0.0);
  L.abs_minus.assign(1, 0.0);
  L.survival.assign(1, 1.0);

  // Step 1 from the point mass at 0: exact tails, exact cell masses.
  L.abs_plus.push_back(phi_sf((T - mu) / sig));
  L.abs_minus.push_back(phi_cdf((-T - mu) / sig));
  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(n), g = Eigen::ArrayXd::Zero(n);
  int s0 = n, s1 = -1;
  for (int i = 0; i < n; ++i) {
    f[i] = phi_interval((-T + i * h - mu) / sig, (-T + (i + 1) * h - mu) / sig);
    if (f[i] > 0.0) {
      s0 = std::min(s0, i);
      s1 = std::max(s1, i);
    }
  }
  double surv = f.sum();
  double absorbed = L.abs_plus[1] + L.abs_minus[1];
  L.survival.push_back(surv);
  L.max_residual = std::abs(surv + absorbed - 1.0);

  int k = 1;
  while (surv > stop_mass && k < steps && s0 <= s1) {
    const int len = s1 - s0 + 1;
    const double ap = (f.segment(s0, len) * tail_plus.segment(s0, len)).sum();
    const double am = (f.segment(s0, len) * tail_minus.segment(s0, len)).sum();
    L.abs_plus.push_back(ap);
    L.abs_minus.push_back(am);
    absorbed += ap + am;

    const int t0 = std::max(0, s0 + dlo);
    const int t1 = std::min(n - 1, s1 + dhi);
    for (int i = t0; i <= t1; ++i) {
      const int j0 = std::max(s0, i - dhi);
      const int j1 = std::min(s1, i - dlo);
      if (j0 > j1) {
        g[i] = 0.0;
        continue;
      }
      const int m = j1 - j0 + 1;
      // K index decreases as j increases, hence the reversed segment.
      g[i] = (f.segment(j0, m) * K.segment(i - j1 + n - 1, m).reverse()).sum();
    }
    if (s0 <= s1) f.segment(s0, len).setZero();
    s0 = t0;
    s1 = t1;
    f.segment(t0, t1 - t0 + 1) = g.segment(t0, t1 - t0 + 1);

    surv = s0 <= s1 ? f.segment(s0, s1 - s0 + 1).sum() : 0.0;
    L.survival.push_back(surv);
    L.max_residual = std::max(L.max_residual, std::abs(surv + absorbed - 1.0));
    ++k;
  }
  L.final_mass = f;
  return L;
}

// Largest pointwise gap between two runs' cumulative ledgers.
double ledger_delta(const Ledger& a, const Ledger& b) {
  const std::size_t m = std::min(a.abs_plus.size(), b.abs_plus.size());
  double worst = 0.0;
  double cpa = 0.0, cma = 0.0, cpb = 0.0, cmb = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    cpa += a.abs_plus[k];
    cma += a.abs_minus[k];
    cpb += b.abs_plus[k];
    cmb += b.abs_minus[k];
    worst = std::max({worst, std::abs(cpa - cpb), std::abs(cma - cmb),
                      std::abs(a.survival[k] - b.survival[k])});
  }
  // Final limits, regardless of where each run stopped.
  for (std::size_t k = m; k < a.abs_plus.size(); ++k) {
    cpa += a.abs_plus[k];
    cma += a.abs_minus[k];
  }
  for (std::size_t k = m; k < b.abs_plus.size(); ++k) {
    cpb += b.abs_plus[k];
    cmb += b.abs_minus[k];
  }
  return std::max({worst, std::abs(cpa - cpb), std::abs(cma - cmb)});
}

}  // namespace

OracleGrid propagate(const TestConfig& config, const OracleOptions& opts) {
  if (!config.noise.is_gaussian())
    throw std::domain_error("oracle propagation requires Gaussian noise");
  if (opts.grid_points < 3)
    throw std::domain_error("grid_points must be >= 3");
  if (!(config.rho > 0.0) || !(config.threshold > 0.0))
    throw std::domain_error("invalid test configuration");
  const int steps = opts.steps > 0 ? opts.steps : config.max_steps;
  if (steps < 1) throw std::domain_error("steps must be >= 1");

  Ledger L = propagate_masses(config.rho, config.threshold, opts.grid_points,
                              steps, opts.stop_mass);
  if (L.max_residual > opts.mass_tolerance)
    throw numerical_error("mass conservation residual " +
                          std::to_string(L.max_residual) +
                          " exceeds tolerance (grid too coarse)");

  OracleGrid g;
  g.grid_points = opts.grid_points;
  g.threshold = config.threshold;
  g.spacing = 2.0 * config.threshold / opts.grid_points;
  g.rho = config.rho;
  g.alpha = config.alpha;
  g.steps_run = static_cast<int>(L.abs_plus.size()) - 1;
  g.absorbed_plus = Eigen::Map<Eigen::ArrayXd>(L.abs_plus.data(), L.abs_plus.size());
  g.absorbed_minus =
      Eigen::Map<Eigen::ArrayXd>(L.abs_minus.data(), L.abs_minus.size());
  g.survival = Eigen::Map<Eigen::ArrayXd>(L.survival.data(), L.survival.size());
  g.surviving_density = L.final_mass / g.spacing;
  g.mass_residual = L.max_residual;

  if (opts.refine_error_bound && opts.grid_points >= 6) {
    Ledger coarse = propagate_masses(config.rho, config.threshold,
                                     opts.grid_points / 2, steps, opts.stop_mass);
    g.tail_error_bound = ledger_delta(L, coarse);
  } else {
    g.tail_error_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return g;
}

OracleGrid propagate(const TestConfig& config, int steps, int grid_points) {
  OracleOptions o;
  o.steps = steps;
  o.grid_points = grid_points;
  return propagate(config, o);
}

EnsembleTable oracle_tables(const OracleGrid& g) {
  EnsembleTable t;
  t.source = TableSource::oracle;
  t.horizon = g.steps_run;
  t.trials_per_hypothesis = 0;
  t.rho = g.rho;
  t.alpha = g.alpha;
  t.threshold = g.threshold;
  t.mass_residual = g.mass_residual;
  t.tail_error_bound = g.tail_error_bound;

  t.newly[xi(Hypothesis::plus)][bi(TernaryState::plus)] = g.absorbed_plus;
  t.newly[xi(Hypothesis::plus)][bi(TernaryState::minus)] = g.absorbed_minus;
  // Mirror image: under X = -1 the boundary roles swap.
  t.newly[xi(Hypothesis::minus)][bi(TernaryState::plus)] = g.absorbed_minus;
  t.newly[xi(Hypothesis::minus)][bi(TernaryState::minus)] = g.absorbed_plus;
  t.surv[0] = g.survival;
  t.surv[1] = g.survival;
  t.finalize();
  t.censored_fraction = g.survival[g.steps_run];
  return t;
}

}  // namespace sprt
