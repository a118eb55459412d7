#pragma once

#include <array>
#include <vector>

#include "sprt/table.hpp"

namespace sprt {

// All information quantities are in bits; the log-likelihood ratio and the
// thresholds stay in natural-log units.
constexpr double bits_to_nats(double b) { return b * 0.6931471805599453; }
constexpr double nats_to_bits(double n) { return n * 1.4426950408889634; }

constexpr int ui(TernaryState u) {
  return u == TernaryState::plus ? 0 : (u == TernaryState::minus ? 1 : 2);
}
constexpr TernaryState state_at(int i) {
  return i == 0 ? TernaryState::plus
                : (i == 1 ? TernaryState::minus : TernaryState::erasure);
}

// Ratio analyses skip the initial transient and any cell whose conditional
// denominator lacks support (table count/mass floors).
struct AnalysisWindow {
  int transient_skip = 5;  // smallest time index admitted
};

// log2 P(U_k=u | X=x) / P(U_k=u), the unconditional probability taken as
// the equal-prior average over both hypotheses. Throws undefined_cell when
// P(U_k=u) = 0; returns -infinity when only the conditional vanishes.
double info_density(const EnsembleTable& t, int k, Hypothesis x,
                    TernaryState u);

// Joint distribution of (U_{k-1}, U_k) given X = x for k >= 1, indexed by
// ui(). Reconstructed exactly from the absorption ledger: a trajectory is
// in (eps, eps) iff it survives step k, in (eps, a) iff it absorbs at a
// exactly at k, and in (a, a) iff it absorbed at a by k-1.
std::array<std::array<double, 3>, 3> consecutive_joint(const EnsembleTable& t,
                                                       int k, Hypothesis x);

// log2 P(U_k=u | U_{k-1}=u', X=x) / P(U_k=u | U_{k-1}=u') on the
// reconstructed joint. Throws undefined_cell when the pair (u', u) has no
// probability.
double cond_info_density(const EnsembleTable& t, int k, Hypothesis x,
                         TernaryState u_prev, TernaryState u);

struct MiValue {
  double closed_form = 0.0;  // boundary-mass expression, bits
  double direct = 0.0;       // joint-table mutual information, bits
  double discrepancy = 0.0;  // |closed_form - direct|; direct is authoritative
};

// I(X;U_k) both ways. The two agree to arithmetic precision on tables with
// exact hypothesis symmetry (oracle, antithetic); on independent Monte
// Carlo tables the discrepancy is statistical.
MiValue mutual_information(const EnsembleTable& t, int k);

// 1 + a log2 a + (1-a) log2(1-a); the limit of I(X;U_k) for error
// probability a.
double final_mi_from_alpha(double a);

// Error probability measured from the table's own limit: mass at the wrong
// boundary renormalized over decided mass, NaN if nothing decided.
double empirical_alpha(const EnsembleTable& t);

struct KappaSeries {
  Eigen::ArrayXd at;    // per-step boundary ratio, NaN where undefined
  Eigen::ArrayXd upto;  // cumulative boundary ratio
  std::vector<int> skipped;  // zero-denominator cells
  std::vector<int> window;   // cells admitted to the flatness report
  double median = 0.0;
  double flatness = 0.0;  // max relative deviation from the median
  double idealized = 0.0;  // (1 - alpha) / alpha
  double median_gap = 0.0;  // |median - idealized|
};

// kappa_at[k] = P(U_k=+1|U_{k-1}=eps,X=+1) / P(U_k=-1|U_{k-1}=eps,X=+1)
// and the cumulative analogue.
KappaSeries kappa_series(const EnsembleTable& t, const AnalysisWindow& w = {});

// Per-k information quantities bundled for export.
struct InfoCurve {
  int horizon = 0;
  double alpha_hat = 0.0;
  double mi_final = 0.0;  // bits, at alpha_hat
  Eigen::ArrayXd mi;          // direct I(X;U_k)
  Eigen::ArrayXd mi_closed;   // closed-form I(X;U_k)
  Eigen::ArrayXd mi_increment;  // I(X;U_k|U_{k-1})
  // The erasure row alone: I(X;U_k|U_{k-1}=eps) P(U_{k-1}=eps). Absorbed
  // rows contribute exactly zero, so this must equal mi_increment.
  Eigen::ArrayXd mi_increment_erasure;
  Eigen::ArrayXd kappa_at;
  Eigen::ArrayXd kappa_upto;
  // [xi][ui] and [xi][ui(prev)][ui]; NaN marks undefined cells and -inf
  // marks zero conditionals.
  std::array<std::array<Eigen::ArrayXd, 3>, 2> density;
  std::array<std::array<std::array<Eigen::ArrayXd, 3>, 3>, 2> cond_density;
};

InfoCurve build_info_curve(const EnsembleTable& t, const AnalysisWindow& w = {});

}  // namespace sprt
