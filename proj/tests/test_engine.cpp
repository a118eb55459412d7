#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "sprt/engine.hpp"

using namespace sprt;

TEST_CASE("the initial state is undecided at the origin") {
  const SprtState s = init_state();
  CHECK(s.k == 0);
  CHECK(s.cum_llr == 0.0);
  CHECK(s.state == TernaryState::erasure);
  CHECK_FALSE(s.absorbed_at.has_value());
  CHECK_FALSE(s.overshoot.has_value());
}

TEST_CASE("steps accumulate and absorb on threshold crossings") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  SprtState s = step_state(init_state(), 2.0, c);
  CHECK(s.k == 1);
  CHECK(s.cum_llr == 2.0);
  CHECK(s.state == TernaryState::erasure);

  const SprtState hit = step_state(s, 0.3, c);
  CHECK(hit.k == 2);
  CHECK(hit.state == TernaryState::plus);
  CHECK(hit.cum_llr == 2.3);
  CHECK(hit.absorbed_at == 2);
  CHECK(hit.overshoot.value() ==
        doctest::Approx(2.3 - std::log(9.0)).epsilon(1e-13));

  // absorbed states pass through; only the clock advances
  const SprtState after = step_state(hit, -100.0, c);
  CHECK(after.k == 3);
  CHECK(after.state == TernaryState::plus);
  CHECK(after.cum_llr == 2.3);
  CHECK(after.absorbed_at == 2);
  CHECK(after.overshoot == hit.overshoot);

  // exact threshold equality absorbs
  const SprtState m = step_state(init_state(), -c.threshold, c);
  CHECK(m.state == TernaryState::minus);
  CHECK(m.overshoot.value() == 0.0);
}

TEST_CASE("decision extraction requires absorption") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  CHECK_THROWS_AS(Decision::from_state(init_state()), std::logic_error);

  const SprtState s = step_state(init_state(), 3.0, c);
  const Decision d = Decision::from_state(s);
  CHECK(d.value == Hypothesis::plus);
  CHECK(d.decided_at == 1);
  CHECK(d.overshoot == doctest::Approx(3.0 - std::log(9.0)).epsilon(1e-13));
}

TEST_CASE("zero-noise walks absorb at the deterministic step") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1, NoiseModel::zero());
  const Trajectory t = run_trajectory(Hypothesis::plus, c, 5u, true);
  REQUIRE(t.outcome.has_value());
  CHECK(t.outcome->value == Hypothesis::plus);
  CHECK(t.outcome->decided_at == 28);  // ceil(T / (2 rho)) steps of 2 rho
  CHECK(t.steps == 28);
  REQUIRE(t.trace.size() == 29);
  for (int k = 0; k < 28; ++k) CHECK(t.trace[k].state == TernaryState::erasure);
  CHECK(t.trace[28].state == TernaryState::plus);
  CHECK(t.final_llr == doctest::Approx(28 * 0.08).epsilon(1e-12));

  const Trajectory m = run_trajectory(Hypothesis::minus, c, 5u);
  REQUIRE(m.outcome.has_value());
  CHECK(m.outcome->value == Hypothesis::minus);
  CHECK(m.outcome->decided_at == 28);
  CHECK(m.trace.empty());
}

TEST_CASE("trajectories are bit-reproducible from the seed") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1);
  const Trajectory a = run_trajectory(Hypothesis::plus, c, 123u, true);
  const Trajectory b = run_trajectory(Hypothesis::plus, c, 123u, true);
  CHECK(a.steps == b.steps);
  CHECK(a.final_llr == b.final_llr);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i)
    CHECK(a.trace[i].cum_llr == b.trace[i].cum_llr);

  const Trajectory other = run_trajectory(Hypothesis::plus, c, 124u);
  CHECK(a.final_llr != other.final_llr);
}

TEST_CASE("negated noise streams mirror the walk bit for bit") {
  const TestConfig base = TestConfig::from_alpha(0.04, 0.1);
  TestConfig mirrored = base;
  mirrored.noise = base.noise.negated();
  Engine e1 = make_engine(7, 3);
  Engine e2 = make_engine(7, 3);
  const Trajectory p = run_trajectory(Hypothesis::plus, base, e1, true);
  const Trajectory m = run_trajectory(Hypothesis::minus, mirrored, e2, true);
  CHECK(p.steps == m.steps);
  CHECK(p.final_llr == -m.final_llr);
  REQUIRE(p.outcome.has_value());
  REQUIRE(m.outcome.has_value());
  CHECK(p.outcome->value == flip(m.outcome->value));
  CHECK(p.outcome->overshoot == m.outcome->overshoot);
  REQUIRE(p.trace.size() == m.trace.size());
  for (std::size_t i = 0; i < p.trace.size(); ++i)
    CHECK(p.trace[i].cum_llr == -m.trace[i].cum_llr);
}

TEST_CASE("the horizon censors undecided walks") {
  const TestConfig c = TestConfig::from_alpha(0.04, 0.1, NoiseModel::zero(), 5);
  const Trajectory t = run_trajectory(Hypothesis::plus, c, 1u);
  CHECK_FALSE(t.outcome.has_value());
  CHECK(t.steps == 5);
  CHECK(t.final_llr == doctest::Approx(5 * 0.08).epsilon(1e-12));
}

TEST_CASE("absorption ends the walk with the threshold cleared") {
  const TestConfig c = TestConfig::from_alpha(0.2, 0.25);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Trajectory t = run_trajectory(Hypothesis::plus, c, seed, true);
    REQUIRE(t.trace.size() == static_cast<std::size_t>(t.steps) + 1);
    for (int k = 0; k < t.steps; ++k) {
      CHECK(t.trace[k].k == k);
      CHECK_FALSE(is_absorbed(t.trace[k].state));
    }
    if (t.outcome) {
      CHECK(is_absorbed(t.trace.back().state));
      CHECK(std::abs(t.final_llr) >= c.threshold);
      CHECK(t.outcome->overshoot >= 0.0);
      CHECK(t.outcome->decided_at == t.steps);
    }
  }
}
