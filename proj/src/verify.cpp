#include "sprt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sprt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// NaN-skipping max tracker.
struct MaxTracker {
  double value = kNaN;
  int arg = -1;
  int cells = 0;
  void see(double v, int k) {
    if (std::isnan(v)) return;
    if (cells == 0 || v > value) {
      value = v;
      arg = k;
    }
    ++cells;
  }
};

struct RangeTracker {
  double lo = kNaN, hi = kNaN;
  void see(double v) {
    if (std::isnan(v)) return;
    if (std::isnan(lo) || v < lo) lo = v;
    if (std::isnan(hi) || v > hi) hi = v;
  }
  double range() const { return std::isnan(lo) ? kNaN : hi - lo; }
};

// Support floor for the absorbed-mass denominator of the step rows; the
// erasure denominator is covered by EnsembleTable::confident_at.
bool cum_support_ok(const EnsembleTable& t, double mass) {
  if (t.has_counts())
    return mass * static_cast<double>(t.trials_per_hypothesis) >=
           static_cast<double>(t.count_floor) - 0.5;
  return mass >= t.mass_floor;
}

double nan_to(double v, double fallback) {
  return std::isnan(v) ? fallback : v;
}

}  // namespace

bool all_gated_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (c.gated && !c.pass) return false;
  return true;
}

RecursionReport verify_density_recursion(const EnsembleTable& t,
                                         const AnalysisWindow& w) {
  RecursionReport r;
  const int h = t.horizon;
  const InfoCurve c = build_info_curve(t, w);

  auto init = [&](SeriesCheck& s) {
    s.residual = Eigen::ArrayXd::Constant(h + 1, kNaN);
    s.max_over_window = kNaN;
    s.total_drift = kNaN;
  };
  init(r.step_plus);
  init(r.step_minus);
  init(r.interior_plus);
  init(r.interior_minus);
  init(r.interior_erasure);

  MaxTracker step[2], interior[2], erasure, absorbing, first;
  RangeTracker drift[2][2];  // [bi][xi]
  const int eps = ui(TernaryState::erasure);

  // k = 1 rows: the predecessor is the certain erasure, so the chain rule
  // reduces to an identity between identical table entries.
  for (int hx = 0; hx < 2 && h >= 1; ++hx) {
    for (int u = 0; u < 3; ++u) {
      const double lhs = c.density[hx][u](1);
      const double cond = c.cond_density[hx][eps][u](1);
      if (std::isnan(lhs) || std::isinf(lhs) || std::isnan(cond)) continue;
      first.see(std::abs(lhs - c.density[hx][eps](0) - cond), 1);
    }
  }
  r.first_step_max = nan_to(first.value, 0.0);

  for (int k = std::max(1, w.transient_skip); k <= h; ++k) {
    for (int hx = 0; hx < 2; ++hx) {
      const Hypothesis x = hyp_at(hx);
      const bool interior_ok = t.confident_at(k, x);
      for (int b = 0; b < 2; ++b) {
        const int u = b;  // ui and bi agree on decided states
        // (a, a) rows: conditional term is identically zero.
        if (cum_support_ok(t, t.cum[hx][b](k - 1))) {
          const double cond = c.cond_density[hx][u][u](k);
          const double lhs = c.density[hx][u](k);
          const double prev = c.density[hx][u](k - 1);
          if (!std::isnan(cond)) {
            absorbing.see(std::abs(cond), k);
            const double res = std::abs(lhs - prev - cond);
            auto& s = (b == 0 ? r.step_plus : r.step_minus);
            s.residual(k) = std::isnan(s.residual(k))
                                ? res
                                : std::max(s.residual(k), res);
            step[b].see(res, k);
            drift[b][hx].see(lhs);
            drift[b][hx].see(prev);
          }
        }
        // (eps, a) rows: newly-absorbed posterior vs cumulative posterior.
        if (interior_ok && t.newly[hx][b](k) > 0.0) {
          const double cond = c.cond_density[hx][eps][u](k);
          const double res =
              std::abs(c.density[hx][u](k) - c.density[hx][eps](k - 1) - cond);
          if (!std::isnan(res) && !std::isinf(res)) {
            auto& s = (b == 0 ? r.interior_plus : r.interior_minus);
            s.residual(k) = std::isnan(s.residual(k))
                                ? res
                                : std::max(s.residual(k), res);
            interior[b].see(res, k);
          }
        }
      }
      // (eps, eps) row: an arithmetic identity on any consistent table.
      if (t.surv[hx](k) > 0.0) {
        const double res = std::abs(c.density[hx][eps](k) -
                                    c.density[hx][eps](k - 1) -
                                    c.cond_density[hx][eps][eps](k));
        if (!std::isnan(res)) {
          r.interior_erasure.residual(k) =
              std::isnan(r.interior_erasure.residual(k))
                  ? res
                  : std::max(r.interior_erasure.residual(k), res);
          erasure.see(res, k);
        }
      }
    }
  }

  auto finish = [](SeriesCheck& s, const MaxTracker& m) {
    s.max_over_window = m.value;
    s.argmax = m.arg;
    s.cells = m.cells;
  };
  finish(r.step_plus, step[0]);
  finish(r.step_minus, step[1]);
  finish(r.interior_plus, interior[0]);
  finish(r.interior_minus, interior[1]);
  finish(r.interior_erasure, erasure);
  r.step_plus.total_drift =
      std::max(nan_to(drift[0][0].range(), 0.0), nan_to(drift[0][1].range(), 0.0));
  r.step_minus.total_drift =
      std::max(nan_to(drift[1][0].range(), 0.0), nan_to(drift[1][1].range(), 0.0));
  r.absorbing_factor_max = nan_to(absorbing.value, 0.0);

  r.overall_max = std::max({nan_to(r.step_plus.max_over_window, 0.0),
                            nan_to(r.step_minus.max_over_window, 0.0),
                            nan_to(r.interior_plus.max_over_window, 0.0),
                            nan_to(r.interior_minus.max_over_window, 0.0),
                            nan_to(r.interior_erasure.max_over_window, 0.0),
                            r.first_step_max, r.absorbing_factor_max});
  return r;
}

MarkovReport verify_markov_chain(const EnsembleTable& t,
                                 const AnalysisWindow& w) {
  MarkovReport r;
  const int h = t.horizon;
  r.cond_mi = Eigen::ArrayXd::Constant(h + 1, kNaN);
  r.max_over_window = kNaN;
  MaxTracker m;
  for (int k = 1; k <= h; ++k) {
    const auto jp = consecutive_joint(t, k, Hypothesis::plus);
    const auto jm = consecutive_joint(t, k, Hypothesis::minus);
    double total = 0.0;
    for (int b = 0; b < 3; ++b) {
      double mass_plus = 0.0, mass_minus = 0.0;
      double prev_mass[3];
      for (int a = 0; a < 3; ++a) {
        mass_plus += 0.5 * jp[a][b];
        mass_minus += 0.5 * jm[a][b];
        prev_mass[a] = 0.5 * (jp[a][b] + jm[a][b]);
      }
      const double mass = mass_plus + mass_minus;
      if (!(mass > 0.0)) continue;
      for (int a = 0; a < 3; ++a) {
        const double wp = 0.5 * jp[a][b];
        const double wm = 0.5 * jm[a][b];
        if (wp > 0.0)
          total += wp * std::log2(wp * mass / (mass_plus * prev_mass[a]));
        if (wm > 0.0)
          total += wm * std::log2(wm * mass / (mass_minus * prev_mass[a]));
      }
    }
    r.cond_mi(k) = total;
    if (k >= w.transient_skip && t.confident_at(k, Hypothesis::plus) &&
        t.confident_at(k, Hypothesis::minus))
      m.see(std::abs(total), k);
  }
  r.max_over_window = m.value;
  r.argmax = m.arg;
  return r;
}

MiEvolutionReport verify_mi_evolution(const EnsembleTable& t,
                                      const AnalysisWindow& w) {
  MiEvolutionReport r;
  const InfoCurve c = build_info_curve(t, w);
  const int h = t.horizon;
  r.alpha_hat = c.alpha_hat;
  r.mi_final = c.mi_final;
  r.mi_final_nominal = final_mi_from_alpha(t.alpha);
  const double denom = 1.0 - r.alpha_hat;
  const bool have_final = !std::isnan(r.mi_final) && denom > 0.0;

  double run = 0.0;
  for (int k = 0; k <= h; ++k) {
    if (have_final) {
      const double pred =
          t.term_upto(k, Hypothesis::plus, TernaryState::plus) / denom *
          r.mi_final;
      r.linearity_max_abs =
          std::max(r.linearity_max_abs, std::abs(c.mi(k) - pred));
    }
    if (k >= 1) {
      run += c.mi_increment(k);
      r.chain_sum_max = std::max(r.chain_sum_max, std::abs(c.mi(k) - run));
      r.increment_max =
          std::max(r.increment_max,
                   std::abs(c.mi_increment(k) - c.mi_increment_erasure(k)));
      r.monotonicity_defect =
          std::max(r.monotonicity_defect, c.mi(k - 1) - c.mi(k));
    }
    r.closed_vs_direct_max =
        std::max(r.closed_vs_direct_max, std::abs(c.mi(k) - c.mi_closed(k)));
    double expect = 0.0;
    for (int u = 0; u < 3; ++u) {
      const TernaryState s = state_at(u);
      const double pp = t.p_state(k, Hypothesis::plus, s);
      const double pm = t.p_state(k, Hypothesis::minus, s);
      if (pp > 0.0) expect += 0.5 * (pp * c.density[0][u](k));
      if (pm > 0.0) expect += 0.5 * (pm * c.density[1][u](k));
    }
    r.expectation_identity_max =
        std::max(r.expectation_identity_max, std::abs(expect - c.mi(k)));
  }
  r.monotonicity_defect = std::max(0.0, r.monotonicity_defect);
  r.linearity_max_rel =
      have_final && r.mi_final > 0.0 ? r.linearity_max_abs / r.mi_final : kNaN;
  r.horizon_gap = have_final ? std::abs(c.mi(h) - r.mi_final) : kNaN;
  return r;
}

std::vector<CheckResult> verify_table_checks(const EnsembleTable& t,
                                             const AnalysisWindow& w) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double res, double tol, bool gated,
                 std::string note = "") {
    CheckResult c{std::move(name), res, tol, gated, true, std::move(note)};
    if (gated) c.pass = !std::isnan(res) && res <= tol;
    out.push_back(std::move(c));
  };

  if (t.has_counts())
    add("count_conservation",
        static_cast<double>(count_conservation_defect(t)), 0.0, true,
        "integer survivor balance at every step");
  add("mass_conservation", mass_conservation_defect(t), 1e-9, true);
  add("cumulative_monotonicity", monotonicity_defect(t), 0.0, true);

  const SymmetryReport sym = symmetry_report(t);
  auto sym_row = [&](const char* name, const SymmetryEntry& e) {
    if (sym.sigma_defined) {
      const double z =
          e.sigma > 0.0 ? e.residual / e.sigma : (e.residual > 0.0 ? kInf : 0.0);
      add(name, z, 4.0, true,
          "standard-error units, worst k=" + std::to_string(e.k));
    } else {
      add(name, e.residual, 1e-12, true,
          "probability units, worst k=" + std::to_string(e.k));
    }
  };
  sym_row("symmetry_decision_mirror", sym.decision_mirror);
  sym_row("symmetry_cross_mirror", sym.cross_mirror);
  sym_row("symmetry_boundary_balance", sym.boundary_balance);
  sym_row("symmetry_step_balance", sym.step_balance);
  sym_row("symmetry_survival_pooling", sym.erasure_match);

  const RecursionReport rec = verify_density_recursion(t, w);
  add("recursion_absorbing_rows", rec.absorbing_factor_max, 0.0, true,
      "conditional term on decided rows");
  add("recursion_first_step", rec.first_step_max, 0.0, true);
  add("recursion_erasure_row", nan_to(rec.interior_erasure.max_over_window, 0.0),
      1e-12, true);
  add("recursion_interior_plus", rec.interior_plus.max_over_window, kNaN, false,
      "idealization residual, bits; worst k=" +
          std::to_string(rec.interior_plus.argmax));
  add("recursion_interior_minus", rec.interior_minus.max_over_window, kNaN,
      false,
      "idealization residual, bits; worst k=" +
          std::to_string(rec.interior_minus.argmax));
  add("recursion_step_plus", rec.step_plus.max_over_window, kNaN, false,
      "per-step decided-posterior drift; window total " +
          fmt(rec.step_plus.total_drift));
  add("recursion_step_minus", rec.step_minus.max_over_window, kNaN, false,
      "per-step decided-posterior drift; window total " +
          fmt(rec.step_minus.total_drift));

  const MarkovReport mk = verify_markov_chain(t, w);
  add("markov_conditional_mi", mk.max_over_window, kNaN, false,
      "bits; worst k=" + std::to_string(mk.argmax));

  const MiEvolutionReport mi = verify_mi_evolution(t, w);
  add("mi_expectation_identity", mi.expectation_identity_max, 1e-10, true);
  add("mi_increment_erasure_identity", mi.increment_max, 0.0, true,
      "decided rows contribute exactly zero");
  if (t.is_oracle()) {
    add("mi_closed_vs_direct", mi.closed_vs_direct_max, 1e-12, true);
    add("mi_monotone", mi.monotonicity_defect, 1e-9, true);
    add("mi_linearity_rel", mi.linearity_max_rel, 0.01, true,
        "vs scaled termination-probability curve");
  } else {
    add("mi_closed_vs_direct", mi.closed_vs_direct_max, kNaN, false,
        "statistical on Monte Carlo tables");
    add("mi_monotone", mi.monotonicity_defect, kNaN, false,
        "statistical on Monte Carlo tables");
    add("mi_linearity_rel", mi.linearity_max_rel, kNaN, false,
        "statistical on Monte Carlo tables");
  }
  add("mi_chain_sum", mi.chain_sum_max, kNaN, false,
      "accumulated decision-posterior drift, bits");
  add("mi_horizon_gap", mi.horizon_gap, kNaN, false,
      "distance of I(X;U_k) at the horizon from its limit");
  if (std::abs(t.alpha - 0.1) < 1e-12)
    add("mi_final_formula_nominal",
        std::abs(mi.mi_final_nominal - 0.5310044064107188), 1e-10, true,
        "binary-entropy complement at the nominal error rate");

  const KappaSeries ks = kappa_series(t, w);
  const bool ref_params = t.is_oracle() && std::abs(t.rho - 0.04) < 1e-12 &&
                          std::abs(t.alpha - 0.1) < 1e-12;
  add("kappa_flatness", ks.flatness, ref_params ? 0.02 : kNaN, ref_params,
      "median " + fmt(ks.median) + " over " +
          std::to_string(ks.window.size()) + " cells" +
          (ref_params ? "" : "; informational away from reference parameters"));
  add("kappa_median_gap", ks.median_gap, kNaN, false,
      "idealized ratio " + fmt(ks.idealized));

  if (t.is_oracle()) {
    add("oracle_mass_residual", t.mass_residual, 1e-9, true);
    if (!std::isnan(t.tail_error_bound))
      add("oracle_tail_error_bound", t.tail_error_bound, kNaN, false,
          "grid-refinement bound on the absorbed-mass limits");
  }
  add("censored_fraction", t.censored_fraction, kNaN, false);
  return out;
}

std::vector<CheckResult> verify_pair_checks(const EnsembleTable& mc,
                                            const EnsembleTable& oracle,
                                            const AnalysisWindow& w) {
  if (!mc.has_counts() || !oracle.is_oracle())
    throw std::invalid_argument(
        "verify_pair_checks expects a Monte Carlo table and an oracle table");

  std::vector<CheckResult> out;
  auto add = [&](std::string name, double res, double tol, bool gated,
                 std::string note = "") {
    CheckResult c{std::move(name), res, tol, gated, true, std::move(note)};
    if (gated) c.pass = !std::isnan(res) && res <= tol;
    out.push_back(std::move(c));
  };

  const double param_gap =
      std::max({std::abs(mc.rho - oracle.rho), std::abs(mc.alpha - oracle.alpha),
                std::abs(mc.threshold - oracle.threshold)});
  add("pair_parameters", param_gap, 1e-12, true);
  if (param_gap > 1e-12) return out;

  const int h = std::min(mc.horizon, oracle.horizon);
  const double n = static_cast<double>(mc.trials_per_hypothesis);

  MaxTracker cum_z, step_z, kappa_z;
  std::string cum_cell, step_cell, kappa_cell;
  for (int k = 1; k <= h; ++k) {
    for (int hx = 0; hx < 2; ++hx) {
      for (int b = 0; b < 2; ++b) {
        const double p = oracle.cum[hx][b](k);
        if (p * n >= 100.0 && (1.0 - p) * n >= 100.0) {
          const double z =
              std::abs(mc.cum[hx][b](k) - p) / std::sqrt(p * (1.0 - p) / n);
          if (std::isnan(cum_z.value) || z > cum_z.value)
            cum_cell = "k=" + std::to_string(k) + " x=" + (hx ? "-1" : "+1") +
                       " u=" + (b ? "-1" : "+1");
          cum_z.see(z, k);
        }
        const double m = static_cast<double>(mc.count_surv[hx](k - 1));
        const double a = oracle.term_at(k, hyp_at(hx), boundary_at(b));
        if (k >= w.transient_skip && !std::isnan(a) && m * a >= 100.0 &&
            m * (1.0 - a) >= 100.0) {
          const double z = std::abs(mc.term_at(k, hyp_at(hx), boundary_at(b)) -
                                    a) /
                           std::sqrt(a * (1.0 - a) / m);
          if (std::isnan(step_z.value) || z > step_z.value)
            step_cell = "k=" + std::to_string(k) + " x=" + (hx ? "-1" : "+1") +
                        " u=" + (b ? "-1" : "+1");
          step_z.see(z, k);
        }
      }
    }
    // boundary-ratio cells via the log-ratio delta method
    const double m = static_cast<double>(mc.count_surv[0](k - 1));
    const double a = oracle.term_at(k, Hypothesis::plus, TernaryState::plus);
    const double b = oracle.term_at(k, Hypothesis::plus, TernaryState::minus);
    if (k >= w.transient_skip && !std::isnan(a) && !std::isnan(b) &&
        m * b >= 100.0 && m * a >= 100.0) {
      const double np = mc.newly[0][0](k), nm = mc.newly[0][1](k);
      if (nm > 0.0) {
        const double kap_mc = np / nm;
        const double kap = a / b;
        const double var =
            (1.0 - a) / (a * m) + (1.0 - b) / (b * m) + 2.0 / m;
        const double z = std::abs(kap_mc - kap) / (kap * std::sqrt(var));
        if (std::isnan(kappa_z.value) || z > kappa_z.value)
          kappa_cell = "k=" + std::to_string(k);
        kappa_z.see(z, k);
      }
    }
  }
  add("pair_cumulative_cells", nan_to(cum_z.value, 0.0), 4.0, true,
      std::to_string(cum_z.cells) + " cells; worst " + cum_cell);
  add("pair_step_cells", nan_to(step_z.value, 0.0), 4.0, true,
      std::to_string(step_z.cells) + " cells; worst " + step_cell);
  add("pair_kappa_cells", nan_to(kappa_z.value, 0.0), 4.0, true,
      std::to_string(kappa_z.cells) + " cells; worst " + kappa_cell);

  // limiting error probability
  const double a_o = empirical_alpha(oracle);
  const double a_m = empirical_alpha(mc);
  double decided = 0.0;
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b)
      decided += static_cast<double>(mc.count_newly[hx][b].sum());
  if (!std::isnan(a_o) && !std::isnan(a_m) && decided > 0.0 && a_o > 0.0 &&
      a_o < 1.0) {
    const double z =
        std::abs(a_m - a_o) / std::sqrt(a_o * (1.0 - a_o) / decided);
    add("pair_alpha_hat", z, 4.0, true,
        "limits " + fmt(a_m) + " vs " + fmt(a_o));
  } else {
    add("pair_alpha_hat", kNaN, 4.0, true, "undefined limit");
  }

  const DecisionTimeStats st_m = decision_time_stats(mc);
  const DecisionTimeStats st_o = decision_time_stats(oracle);
  const double se = std::sqrt(st_m.variance / std::max(1.0, decided));
  const double mean_z = se > 0.0 ? std::abs(st_m.mean - st_o.mean) / se : kInf;
  add("pair_mean_time", mean_z, 4.0, true,
      "means " + fmt(st_m.mean) + " vs " + fmt(st_o.mean));
  const double wald = st_o.wald_approximation;
  const double wald_gap =
      wald > 0.0 ? std::max(std::abs(st_m.mean / wald - 1.0),
                            std::abs(st_o.mean / wald - 1.0))
                 : kNaN;
  add("pair_wald_gap", wald_gap, kNaN, false,
      "zero-overshoot approximation " + fmt(wald) + "; informational");

  const double c_o = 0.5 * (oracle.surv[0](h) + oracle.surv[1](h));
  const double c_m = 0.5 * (mc.surv[0](h) + mc.surv[1](h));
  const double c_sigma = std::sqrt(std::max(0.0, c_o * (1.0 - c_o)) / (2.0 * n));
  const double c_z =
      c_sigma > 0.0 ? std::abs(c_m - c_o) / c_sigma : (c_m > 0.0 ? kInf : 0.0);
  add("pair_censored", c_z, 4.0, true,
      "survival at k=" + std::to_string(h) + ": " + fmt(c_m) + " vs " +
          fmt(c_o));
  return out;
}

std::vector<SweepSeries> sweep_decay_series(
    const std::vector<EnsembleTable>& oracles, const AnalysisWindow& w) {
  if (oracles.size() < 2)
    throw std::invalid_argument("sweep needs at least two tables");
  std::vector<const EnsembleTable*> ts;
  ts.reserve(oracles.size());
  for (const auto& t : oracles) ts.push_back(&t);
  std::sort(ts.begin(), ts.end(),
            [](const EnsembleTable* a, const EnsembleTable* b) {
              return a->rho > b->rho;
            });

  struct Row {
    double rho, flat, med_gap, lin, interior, markov, drift, step_max, chain;
  };
  std::vector<Row> rows;
  for (const EnsembleTable* t : ts) {
    const KappaSeries ks = kappa_series(*t, w);
    const RecursionReport rec = verify_density_recursion(*t, w);
    const MiEvolutionReport mie = verify_mi_evolution(*t, w);
    const MarkovReport mk = verify_markov_chain(*t, w);
    rows.push_back({t->rho, ks.flatness, ks.median_gap, mie.linearity_max_rel,
                    std::max(nan_to(rec.interior_plus.max_over_window, 0.0),
                             nan_to(rec.interior_minus.max_over_window, 0.0)),
                    nan_to(mk.max_over_window, kNaN),
                    std::max(rec.step_plus.total_drift,
                             rec.step_minus.total_drift),
                    std::max(nan_to(rec.step_plus.max_over_window, 0.0),
                             nan_to(rec.step_minus.max_over_window, 0.0)),
                    mie.chain_sum_max});
  }

  auto make = [&](const char* name, auto getter, bool gated) {
    SweepSeries s;
    s.name = name;
    s.gated = gated;
    s.decreasing = true;
    for (const Row& r : rows) {
      s.rho.push_back(r.rho);
      s.value.push_back(getter(r));
    }
    for (std::size_t i = 1; i < s.value.size(); ++i) {
      const double prev = s.value[i - 1], cur = s.value[i];
      if (std::isnan(prev) || std::isnan(cur) || !(cur < prev))
        s.decreasing = false;
      if (!std::isnan(prev) && !std::isnan(cur))
        s.defect = std::max(s.defect, cur - prev);
    }
    return s;
  };

  std::vector<SweepSeries> out;
  out.push_back(make("kappa_flatness", [](const Row& r) { return r.flat; }, true));
  out.push_back(
      make("kappa_median_gap", [](const Row& r) { return r.med_gap; }, true));
  out.push_back(
      make("mi_linearity_rel", [](const Row& r) { return r.lin; }, true));
  out.push_back(make("recursion_interior_max",
                     [](const Row& r) { return r.interior; }, true));
  out.push_back(make("recursion_step_total_drift",
                     [](const Row& r) { return r.drift; }, true));
  out.push_back(make("markov_conditional_mi",
                     [](const Row& r) { return r.markov; }, false));
  out.push_back(make("recursion_step_max",
                     [](const Row& r) { return r.step_max; }, false));
  out.push_back(
      make("mi_chain_sum", [](const Row& r) { return r.chain; }, false));
  return out;
}

}  // namespace sprt
