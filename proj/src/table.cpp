#include "sprt/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sprt {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double EnsembleTable::term_at(int k, Hypothesis x, TernaryState a) const {
  if (k < 1 || k > horizon) return kNaN;
  const double denom = surv[xi(x)][k - 1];
  if (!(denom > 0.0)) return kNaN;
  return newly[xi(x)][bi(a)][k] / denom;
}

double EnsembleTable::term_upto(int k, Hypothesis x, TernaryState a) const {
  return cum[xi(x)][bi(a)][k];
}

double EnsembleTable::survive_given(int k, Hypothesis x) const {
  return surv[xi(x)][k];
}

double EnsembleTable::survive(int k) const {
  return 0.5 * (surv[0][k] + surv[1][k]);
}

double EnsembleTable::p_state(int k, Hypothesis x, TernaryState u) const {
  if (u == TernaryState::erasure) return survive_given(k, x);
  return term_upto(k, x, u);
}

bool EnsembleTable::confident_at(int k, Hypothesis x) const {
  if (k < 1 || k > horizon) return false;
  if (has_counts()) return count_surv[xi(x)][k - 1] >= count_floor;
  return surv[xi(x)][k - 1] >= mass_floor;
}

void EnsembleTable::finalize() {
  const int n = horizon + 1;
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < 2; ++a) {
      if (newly[x][a].size() != n)
        throw std::invalid_argument("table arrays must have horizon+1 entries");
      cum[x][a] = Eigen::ArrayXd(n);
      double run = 0.0;
      for (int k = 0; k < n; ++k) {
        run += newly[x][a][k];
        cum[x][a][k] = run;
      }
    }
    if (surv[x].size() != n)
      throw std::invalid_argument("table arrays must have horizon+1 entries");
  }
  if (has_counts()) {
    for (int x = 0; x < 2; ++x) {
      if (count_newly[x][0].size() != n || count_newly[x][1].size() != n)
        throw std::invalid_argument("count arrays must have horizon+1 entries");
      count_surv[x] = CountArray(n);
      std::int64_t alive = trials_per_hypothesis;
      count_surv[x][0] = alive;
      for (int k = 1; k < n; ++k) {
        alive -= count_newly[x][0][k] + count_newly[x][1][k];
        count_surv[x][k] = alive;
      }
      if (alive < 0)
        throw std::invalid_argument("absorption counts exceed trials");
    }
  }
}

std::int64_t count_conservation_defect(const EnsembleTable& t) {
  if (!t.has_counts()) return 0;
  std::int64_t worst = 0;
  for (int x = 0; x < 2; ++x)
    for (int k = 1; k <= t.horizon; ++k) {
      const std::int64_t defect =
          t.count_surv[x][k - 1] - t.count_surv[x][k] -
          t.count_newly[x][0][k] - t.count_newly[x][1][k];
      worst = std::max(worst, std::abs(defect));
    }
  return worst;
}

double mass_conservation_defect(const EnsembleTable& t) {
  double worst = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int k = 1; k <= t.horizon; ++k) {
      const double defect = t.surv[x][k - 1] - t.surv[x][k] -
                            t.newly[x][0][k] - t.newly[x][1][k];
      worst = std::max(worst, std::abs(defect));
    }
  return worst;
}

double monotonicity_defect(const EnsembleTable& t) {
  double worst = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      for (int k = 1; k <= t.horizon; ++k)
        worst = std::max(worst, t.cum[x][a][k - 1] - t.cum[x][a][k]);
  return std::max(worst, 0.0);
}

}  // namespace sprt
