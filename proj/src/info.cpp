#include "sprt/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sprt/errors.hpp"

namespace sprt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double xlog2(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// p * log2(p / q) with the 0 log 0 = 0 convention; q >= p / 2 by
// construction wherever this is called, so q > 0 whenever p > 0.
double xlogratio(double p, double q) {
  return p > 0.0 ? p * (std::log2(p) - std::log2(q)) : 0.0;
}

void check_k(const EnsembleTable& t, int k, int lo) {
  if (k < lo || k > t.horizon)
    throw std::invalid_argument("time index out of table range");
}

using Joint = std::array<std::array<double, 3>, 3>;

double info_density_or_nan(const EnsembleTable& t, int k, Hypothesis x,
                           TernaryState u) {
  const double cond = t.p_state(k, x, u);
  const double pool =
      0.5 * (t.p_state(k, Hypothesis::plus, u) +
             t.p_state(k, Hypothesis::minus, u));
  if (!(pool > 0.0)) return kNaN;
  if (!(cond > 0.0)) return -kInf;
  return std::log2(cond) - std::log2(pool);
}

double cond_info_density_or_nan(const EnsembleTable& t, int k, Hypothesis x,
                                TernaryState u_prev, TernaryState u) {
  const Joint jx = consecutive_joint(t, k, x);
  const Joint jo = consecutive_joint(t, k, flip(x));
  const int a = ui(u_prev);
  const int b = ui(u);
  const double prev_x = t.p_state(k - 1, x, u_prev);
  const double prev_pool =
      0.5 * (prev_x + t.p_state(k - 1, flip(x), u_prev));
  if (!(prev_x > 0.0) || !(prev_pool > 0.0)) return kNaN;
  const double den = 0.5 * (jx[a][b] + jo[a][b]) / prev_pool;
  if (!(den > 0.0)) return kNaN;
  const double num = jx[a][b] / prev_x;
  if (!(num > 0.0)) return -kInf;
  return std::log2(num) - std::log2(den);
}

}  // namespace

Joint consecutive_joint(const EnsembleTable& t, int k, Hypothesis x) {
  check_k(t, k, 1);
  Joint j{};
  const int h = xi(x);
  j[ui(TernaryState::erasure)][ui(TernaryState::erasure)] = t.surv[h](k);
  j[ui(TernaryState::erasure)][ui(TernaryState::plus)] = t.newly[h][0](k);
  j[ui(TernaryState::erasure)][ui(TernaryState::minus)] = t.newly[h][1](k);
  j[ui(TernaryState::plus)][ui(TernaryState::plus)] = t.cum[h][0](k - 1);
  j[ui(TernaryState::minus)][ui(TernaryState::minus)] = t.cum[h][1](k - 1);
  return j;
}

double info_density(const EnsembleTable& t, int k, Hypothesis x,
                    TernaryState u) {
  check_k(t, k, 0);
  const double v = info_density_or_nan(t, k, x, u);
  if (std::isnan(v))
    throw undefined_cell("info_density: state has zero probability");
  return v;
}

double cond_info_density(const EnsembleTable& t, int k, Hypothesis x,
                         TernaryState u_prev, TernaryState u) {
  check_k(t, k, 1);
  const double v = cond_info_density_or_nan(t, k, x, u_prev, u);
  if (std::isnan(v))
    throw undefined_cell(
        "cond_info_density: conditioning pair has zero probability");
  return v;
}

MiValue mutual_information(const EnsembleTable& t, int k) {
  check_k(t, k, 0);
  MiValue m;
  for (int u = 0; u < 3; ++u) {
    const TernaryState s = state_at(u);
    const double pp = t.p_state(k, Hypothesis::plus, s);
    const double pm = t.p_state(k, Hypothesis::minus, s);
    const double pool = 0.5 * (pp + pm);
    m.direct += 0.5 * xlogratio(pp, pool) + 0.5 * xlogratio(pm, pool);
  }
  const double p1 = t.term_upto(k, Hypothesis::plus, TernaryState::plus);
  const double pm = t.term_upto(k, Hypothesis::plus, TernaryState::minus);
  const double c = p1 + pm;
  m.closed_form = (c > 0.0 ? c * (1.0 - std::log2(c)) : 0.0) + xlog2(p1) +
                  xlog2(pm);
  m.discrepancy = std::abs(m.closed_form - m.direct);
  return m;
}

double final_mi_from_alpha(double a) {
  if (!(a >= 0.0) || a > 1.0) return kNaN;
  return 1.0 + xlog2(a) + xlog2(1.0 - a);
}

double empirical_alpha(const EnsembleTable& t) {
  const int h = t.horizon;
  const double wrong = 0.5 * (t.cum[0][1](h) + t.cum[1][0](h));
  const double right = 0.5 * (t.cum[0][0](h) + t.cum[1][1](h));
  if (!(wrong + right > 0.0)) return kNaN;
  return wrong / (wrong + right);
}

KappaSeries kappa_series(const EnsembleTable& t, const AnalysisWindow& w) {
  KappaSeries s;
  const int h = t.horizon;
  s.at = Eigen::ArrayXd::Constant(h + 1, kNaN);
  s.upto = Eigen::ArrayXd::Constant(h + 1, kNaN);
  s.idealized = (1.0 - t.alpha) / t.alpha;
  for (int k = 1; k <= h; ++k) {
    const double np = t.newly[0][0](k);
    const double nm = t.newly[0][1](k);
    if (nm > 0.0)
      s.at(k) = np / nm;
    else if (np > 0.0)
      s.at(k) = kInf;
    const double cp = t.cum[0][0](k);
    const double cm = t.cum[0][1](k);
    if (cm > 0.0) s.upto(k) = cp / cm;
    if (k >= w.transient_skip && t.confident_at(k, Hypothesis::plus)) {
      if (np > 0.0 && nm > 0.0)
        s.window.push_back(k);
      else
        s.skipped.push_back(k);
    }
  }
  if (s.window.empty()) {
    s.median = s.flatness = s.median_gap = kNaN;
    return s;
  }
  std::vector<double> v;
  v.reserve(s.window.size());
  for (int k : s.window) v.push_back(s.at(k));
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  for (int k : s.window)
    s.flatness = std::max(s.flatness, std::abs(s.at(k) / s.median - 1.0));
  s.median_gap = std::abs(s.median - s.idealized);
  return s;
}

InfoCurve build_info_curve(const EnsembleTable& t, const AnalysisWindow& w) {
  InfoCurve c;
  const int h = t.horizon;
  c.horizon = h;
  c.alpha_hat = empirical_alpha(t);
  c.mi_final = final_mi_from_alpha(c.alpha_hat);
  c.mi.resize(h + 1);
  c.mi_closed.resize(h + 1);
  c.mi_increment = Eigen::ArrayXd::Zero(h + 1);
  c.mi_increment_erasure = Eigen::ArrayXd::Zero(h + 1);
  for (int k = 0; k <= h; ++k) {
    const MiValue m = mutual_information(t, k);
    c.mi(k) = m.direct;
    c.mi_closed(k) = m.closed_form;
  }

  // I(X;U_k | U_{k-1}) = sum over (x, u', u) of P(x, u', u)
  // log2(P(u|u',x) / P(u|u')); rows with an absorbed u' contribute exactly
  // zero because both conditionals are 1.
  for (int k = 1; k <= h; ++k) {
    const Joint jp = consecutive_joint(t, k, Hypothesis::plus);
    const Joint jm = consecutive_joint(t, k, Hypothesis::minus);
    double inc = 0.0;
    double inc_eps = 0.0;
    for (int a = 0; a < 3; ++a) {
      const TernaryState up = state_at(a);
      const double prev_p = t.p_state(k - 1, Hypothesis::plus, up);
      const double prev_m = t.p_state(k - 1, Hypothesis::minus, up);
      const double prev_pool = 0.5 * (prev_p + prev_m);
      if (!(prev_pool > 0.0)) continue;
      double row = 0.0;
      for (int b = 0; b < 3; ++b) {
        const double trans_pool = 0.5 * (jp[a][b] + jm[a][b]) / prev_pool;
        if (!(trans_pool > 0.0)) continue;
        if (jp[a][b] > 0.0)
          row += 0.5 * jp[a][b] *
                 (std::log2(jp[a][b] / prev_p) - std::log2(trans_pool));
        if (jm[a][b] > 0.0)
          row += 0.5 * jm[a][b] *
                 (std::log2(jm[a][b] / prev_m) - std::log2(trans_pool));
      }
      inc += row;
      if (up == TernaryState::erasure) inc_eps = row;
    }
    c.mi_increment(k) = inc;
    c.mi_increment_erasure(k) = inc_eps;
  }

  const KappaSeries ks = kappa_series(t, w);
  c.kappa_at = ks.at;
  c.kappa_upto = ks.upto;

  for (int hx = 0; hx < 2; ++hx) {
    const Hypothesis x = hyp_at(hx);
    for (int u = 0; u < 3; ++u) {
      c.density[hx][u] = Eigen::ArrayXd::Constant(h + 1, kNaN);
      for (int k = 0; k <= h; ++k)
        c.density[hx][u](k) = info_density_or_nan(t, k, x, state_at(u));
      for (int a = 0; a < 3; ++a) {
        c.cond_density[hx][a][u] = Eigen::ArrayXd::Constant(h + 1, kNaN);
        for (int k = 1; k <= h; ++k)
          c.cond_density[hx][a][u](k) =
              cond_info_density_or_nan(t, k, x, state_at(a), state_at(u));
      }
    }
  }
  return c;
}

}  // namespace sprt
