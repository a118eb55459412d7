#include "sprt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sprt/errors.hpp"
#include "sprt/rng.hpp"

namespace sprt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int requested, std::int64_t trials) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  return static_cast<int>(std::min<std::int64_t>(n, std::max<std::int64_t>(trials, 1)));
}

struct Tally {
  std::array<std::array<CountArray, 2>, 2> newly;
  Tally(int horizon) {
    for (auto& row : newly)
      for (auto& a : row) a = CountArray::Zero(horizon + 1);
  }
  void merge(const Tally& other) {
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a) newly[x][a] += other.newly[x][a];
  }
};

// Stream id layout: X=+1 trajectories use their index; X=-1 trajectories
// use trials+index, or the same index as their X=+1 partner when
// antithetic pairing is on.
std::uint64_t stream_id(Hypothesis x, std::int64_t idx, std::int64_t trials,
                        bool antithetic) {
  if (x == Hypothesis::plus || antithetic) return static_cast<std::uint64_t>(idx);
  return static_cast<std::uint64_t>(trials + idx);
}

void run_block(const TestConfig& config, const EnsembleOptions& opts,
               std::int64_t begin, std::int64_t end, Tally& tally,
               std::vector<Trajectory>* traces_plus,
               std::vector<Trajectory>* traces_minus) {
  TestConfig minus_config = config;
  if (opts.antithetic) minus_config.noise = config.noise.negated();
  const bool keep = traces_plus != nullptr;

  for (std::int64_t i = begin; i < end; ++i) {
    for (Hypothesis x : {Hypothesis::plus, Hypothesis::minus}) {
      const TestConfig& c = x == Hypothesis::plus ? config : minus_config;
      Engine rng = make_engine(opts.master_seed,
                               stream_id(x, i, opts.trials, opts.antithetic));
      Trajectory t = run_trajectory(x, c, rng, keep);
      if (t.outcome) {
        const Decision& d = *t.outcome;
        ++tally.newly[xi(x)][bi(to_state(d.value))][d.decided_at];
      }
      if (keep)
        (x == Hypothesis::plus ? traces_plus : traces_minus)->at(i) = std::move(t);
    }
  }
}

EnsembleTable build_table(const TestConfig& config, const EnsembleOptions& opts,
                          Tally&& tally) {
  EnsembleTable t;
  t.source = TableSource::monte_carlo;
  t.horizon = config.max_steps;
  t.trials_per_hypothesis = opts.trials;
  t.rho = config.rho;
  t.alpha = config.alpha;
  t.threshold = config.threshold;
  t.tail_error_bound = kNaN;
  t.count_floor = opts.count_floor;

  // Divide rather than multiply by a reciprocal: rereading a stored table
  // rebuilds masses as count / trials and must land on identical doubles.
  const double n = static_cast<double>(opts.trials);
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < 2; ++a) {
      t.count_newly[x][a] = std::move(tally.newly[x][a]);
      t.newly[x][a] = t.count_newly[x][a].cast<double>() / n;
    }
    t.surv[x] = Eigen::ArrayXd::Zero(t.horizon + 1);
  }
  t.finalize();
  for (int x = 0; x < 2; ++x)
    t.surv[x] = t.count_surv[x].cast<double>() / n;
  t.censored_fraction =
      static_cast<double>(t.count_surv[0][t.horizon] + t.count_surv[1][t.horizon]) /
      static_cast<double>(2 * opts.trials);
  return t;
}

TracedEnsemble run_impl(const TestConfig& config, const EnsembleOptions& opts,
                        bool keep_traces) {
  if (opts.trials < 1) throw std::domain_error("trials must be >= 1");
  if (keep_traces) {
    const std::size_t bytes = sizeof(SprtState) *
                              static_cast<std::size_t>(config.max_steps + 1) *
                              static_cast<std::size_t>(opts.trials) * 2;
    if (bytes > opts.memory_budget_bytes)
      throw resource_error("trace retention would need " +
                           std::to_string(bytes) + " bytes, budget is " +
                           std::to_string(opts.memory_budget_bytes));
  }

  TracedEnsemble out;
  if (keep_traces) {
    out.plus.resize(opts.trials);
    out.minus.resize(opts.trials);
  }
  auto* tp = keep_traces ? &out.plus : nullptr;
  auto* tm = keep_traces ? &out.minus : nullptr;

  const int workers = resolve_threads(opts.threads, opts.trials);
  Tally total(config.max_steps);
  if (workers == 1) {
    run_block(config, opts, 0, opts.trials, total, tp, tm);
  } else {
    std::vector<Tally> parts(workers, Tally(config.max_steps));
    std::vector<std::thread> pool;
    const std::int64_t chunk = (opts.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min<std::int64_t>(opts.trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        run_block(config, opts, begin, end, parts[w], tp, tm);
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : parts) total.merge(p);
  }

  out.table = build_table(config, opts, std::move(total));
  return out;
}

// Standard error of p1 - p2 under the pooled null p1 = p2; zero only
// when the pooled estimate is degenerate, which forces p1 = p2 as well.
double binom_sigma_diff(double p1, std::int64_t n1, double p2, std::int64_t n2) {
  if (n1 < 1 || n2 < 1) return kNaN;
  const double pooled =
      (p1 * static_cast<double>(n1) + p2 * static_cast<double>(n2)) /
      static_cast<double>(n1 + n2);
  return std::sqrt(std::max(pooled * (1.0 - pooled), 0.0) *
                   (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
}

}  // namespace

EnsembleTable run_ensemble(const TestConfig& config, const EnsembleOptions& opts) {
  EnsembleOptions o = opts;
  o.keep_traces = false;
  return run_impl(config, o, false).table;
}

EnsembleTable run_ensemble(const TestConfig& config, std::int64_t trials,
                           std::uint64_t master_seed) {
  EnsembleOptions o;
  o.trials = trials;
  o.master_seed = master_seed;
  return run_ensemble(config, o);
}

TracedEnsemble run_ensemble_traced(const TestConfig& config,
                                   const EnsembleOptions& opts) {
  return run_impl(config, opts, true);
}

SymmetryReport symmetry_report(const EnsembleTable& t) {
  SymmetryReport r;
  const std::int64_t n = t.trials_per_hypothesis;
  r.sigma_defined = t.has_counts() && n >= 2;

  auto scan = [&](auto&& value1, auto&& value2, auto&& n1, auto&& n2) {
    SymmetryEntry e;
    e.sigma = kNaN;
    double worst_z = -1.0;
    for (int k = 0; k <= t.horizon; ++k) {
      const double v1 = value1(k);
      const double v2 = value2(k);
      const double d = std::abs(v1 - v2);
      if (std::isnan(d)) continue;
      if (r.sigma_defined) {
        const double sigma = binom_sigma_diff(v1, n1(k), v2, n2(k));
        if (std::isnan(sigma)) continue;
        const double z = sigma > 0.0 ? d / sigma : 0.0;
        if (z > worst_z) {
          worst_z = z;
          e.residual = d;
          e.k = k;
          e.sigma = sigma;
        }
      } else if (d >= e.residual) {
        e.residual = d;
        e.k = k;
      }
    }
    return e;
  };

  auto full = [&](int) { return n; };
  r.decision_mirror = scan(
      [&](int k) { return t.term_upto(k, Hypothesis::plus, TernaryState::plus); },
      [&](int k) { return t.term_upto(k, Hypothesis::minus, TernaryState::minus); },
      full, full);
  r.cross_mirror = scan(
      [&](int k) { return t.term_upto(k, Hypothesis::minus, TernaryState::plus); },
      [&](int k) { return t.term_upto(k, Hypothesis::plus, TernaryState::minus); },
      full, full);

  // Pooled unconditional P(U_k = a) = avg over hypotheses.
  auto pooled_upto = [&](TernaryState a) {
    return [&t, a](int k) {
      return 0.5 * (t.term_upto(k, Hypothesis::plus, a) +
                    t.term_upto(k, Hypothesis::minus, a));
    };
  };
  auto two_n = [&](int) { return 2 * n; };
  r.boundary_balance =
      scan(pooled_upto(TernaryState::plus), pooled_upto(TernaryState::minus),
           two_n, two_n);

  // Pooled per-step conditional P(U_k = a | U_{k-1} = eps).
  auto pooled_at = [&](TernaryState a) {
    return [&t, a](int k) -> double {
      if (k < 1) return kNaN;
      const double denom = t.surv[0][k - 1] + t.surv[1][k - 1];
      if (!(denom > 0.0)) return kNaN;
      return (t.newly[0][bi(a)][k] + t.newly[1][bi(a)][k]) / denom;
    };
  };
  auto surv_n = [&](int k) -> std::int64_t {
    return k >= 1 && t.has_counts()
               ? t.count_surv[0][k - 1] + t.count_surv[1][k - 1]
               : 0;
  };
  r.step_balance = scan(pooled_at(TernaryState::plus),
                        pooled_at(TernaryState::minus), surv_n, surv_n);

  r.erasure_match = scan(
      [&](int k) { return t.survive_given(k, Hypothesis::plus); },
      [&](int k) { return t.survive_given(k, Hypothesis::minus); }, full, full);
  return r;
}

DecisionTimeStats decision_time_stats(const EnsembleTable& t) {
  DecisionTimeStats s;
  s.censored_fraction = t.censored_fraction;
  s.wald_approximation =
      (1.0 - 2.0 * t.alpha) * t.threshold / (2.0 * t.rho);

  // Pooled decided-time distribution; exact integer sums when counts exist.
  double total = 0.0, sum = 0.0, sum2 = 0.0;
  Eigen::ArrayXd weight(t.horizon + 1);
  for (int k = 0; k <= t.horizon; ++k) {
    double w;
    if (t.has_counts())
      w = static_cast<double>(t.count_newly[0][0][k] + t.count_newly[0][1][k] +
                              t.count_newly[1][0][k] + t.count_newly[1][1][k]);
    else
      w = t.newly[0][0][k] + t.newly[0][1][k] + t.newly[1][0][k] +
          t.newly[1][1][k];
    weight[k] = w;
    total += w;
    sum += w * k;
    sum2 += w * static_cast<double>(k) * k;
  }
  if (!(total > 0.0)) throw std::domain_error("all trajectories censored");
  s.mean = sum / total;
  s.variance = sum2 / total - s.mean * s.mean;

  for (double q : {0.25, 0.5, 0.75, 0.9, 0.99}) {
    double run = 0.0;
    int kq = t.horizon;
    for (int k = 0; k <= t.horizon; ++k) {
      run += weight[k];
      if (run >= q * total) {
        kq = k;
        break;
      }
    }
    s.quantiles.emplace_back(q, static_cast<double>(kq));
  }
  return s;
}

}  // namespace sprt
