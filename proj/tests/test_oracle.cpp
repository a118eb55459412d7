#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "sprt/ensemble.hpp"
#include "sprt/info.hpp"
#include "sprt/oracle.hpp"
#include "sprt/verify.hpp"

using namespace sprt;

namespace {

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double cum_limit(const OracleGrid& g) {
  return g.absorbed_plus.sum() + g.absorbed_minus.sum();
}

}  // namespace

TEST_CASE("first-step absorption is an exact gaussian tail") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  OracleOptions o;
  o.steps = 3;
  o.refine_error_bound = false;
  const OracleGrid g = propagate(c, o);
  const double mu = 2.0 * 0.04;
  const double sd = 2.0 * std::sqrt(0.04);
  CHECK(g.absorbed_plus[0] == 0.0);
  CHECK(g.absorbed_minus[0] == 0.0);
  CHECK(g.survival[0] == 1.0);
  CHECK(g.absorbed_plus[1] ==
        doctest::Approx(normal_sf((c.threshold - mu) / sd)).epsilon(1e-13));
  CHECK(g.absorbed_minus[1] ==
        doctest::Approx(normal_sf((c.threshold + mu) / sd)).epsilon(1e-13));
  CHECK(g.survival[1] ==
        doctest::Approx(1.0 - g.absorbed_plus[1] - g.absorbed_minus[1])
            .epsilon(1e-12));
}

TEST_CASE("propagation conserves mass and reproduces frozen references") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  const OracleGrid g = propagate(c);
  CHECK(g.mass_residual <= 1e-9);
  CHECK(g.tail_error_bound > 0.0);
  CHECK(g.tail_error_bound < 1e-5);
  for (int k = 1; k <= g.steps_run; ++k)
    CHECK(g.survival[k] <= g.survival[k - 1]);
  CHECK(g.survival[g.steps_run] <= 1e-6);

  const EnsembleTable t = oracle_tables(g);
  CHECK(t.is_oracle());
  CHECK_FALSE(t.has_counts());
  CHECK(t.horizon == g.steps_run);
  CHECK(monotonicity_defect(t) == 0.0);
  CHECK(mass_conservation_defect(t) < 1e-12);

  // frozen references; the grid refinement bound dominates both deltas
  CHECK(empirical_alpha(t) == doctest::Approx(0.080910387).epsilon(1e-6));
  CHECK(decision_time_stats(t).mean ==
        doctest::Approx(25.719407).epsilon(1e-5));
  CHECK(t.term_upto(t.horizon, Hypothesis::plus, TernaryState::plus) ==
        doctest::Approx(0.91908961).epsilon(1e-6));
}

TEST_CASE("the mirror table swaps boundary roles across hypotheses") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  const EnsembleTable t = oracle_tables(propagate(c, 120, 1024));
  CHECK((t.newly[0][0] == t.newly[1][1]).all());
  CHECK((t.newly[0][1] == t.newly[1][0]).all());
  CHECK((t.surv[0] == t.surv[1]).all());
  const SymmetryReport r = symmetry_report(t);
  CHECK_FALSE(r.sigma_defined);
  CHECK(r.decision_mirror.residual == 0.0);
  CHECK(r.boundary_balance.residual == 0.0);
}

TEST_CASE("grid refinement converges and the reported bound dominates") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  auto run = [&](int grid, bool refine) {
    OracleOptions o;
    o.grid_points = grid;
    o.steps = 150;
    o.refine_error_bound = refine;
    return propagate(c, o);
  };
  const OracleGrid g512 = run(512, false);
  const OracleGrid g1024 = run(1024, false);
  const OracleGrid g2048 = run(2048, true);
  const OracleGrid g4096 = run(4096, false);

  const double d1 = std::abs(cum_limit(g512) - cum_limit(g1024));
  const double d2 = std::abs(cum_limit(g1024) - cum_limit(g2048));
  const double d3 = std::abs(cum_limit(g2048) - cum_limit(g4096));
  CHECK(d2 < d1);
  CHECK(d3 < d2);
  CHECK(std::abs(cum_limit(g2048) - cum_limit(g4096)) <= g2048.tail_error_bound);
}

TEST_CASE("propagation stops once the survival is exhausted") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  OracleOptions o;
  o.stop_mass = 1e-3;
  o.refine_error_bound = false;
  const OracleGrid g = propagate(c, o);
  CHECK(g.steps_run < c.max_steps);
  CHECK(g.survival[g.steps_run] <= 1e-3);
  CHECK(g.survival[g.steps_run - 1] > 1e-3);
}

TEST_CASE("propagation is defined for gaussian noise on a usable grid") {
  const TestConfig z = TestConfig::from_alpha(0.04, 0.1, NoiseModel::zero());
  CHECK_THROWS_AS(propagate(z), std::domain_error);
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  OracleOptions o;
  o.grid_points = 2;
  CHECK_THROWS_AS(propagate(c, o), std::domain_error);
}

TEST_CASE("monte carlo ensembles cross-validate against the oracle") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  const EnsembleTable orc = oracle_tables(propagate(c));
  EnsembleOptions o;
  o.trials = 5000;
  o.master_seed = 21;
  o.threads = 1;
  const EnsembleTable mc = run_ensemble(c, o);

  const auto checks = verify_pair_checks(mc, orc);
  CHECK(all_gated_pass(checks));

  // wrong roles are rejected outright
  CHECK_THROWS_AS(verify_pair_checks(mc, mc), std::invalid_argument);
  CHECK_THROWS_AS(verify_pair_checks(orc, orc), std::invalid_argument);

  // a parameter mismatch is a gated failure, not silent tolerance
  const EnsembleTable other =
      oracle_tables(propagate(TestConfig::from_alpha(0.05, 0.1), 200, 1024));
  CHECK_FALSE(all_gated_pass(verify_pair_checks(mc, other)));
}
