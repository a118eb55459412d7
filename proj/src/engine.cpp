#include "sprt/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace sprt {

Decision Decision::from_state(const SprtState& s) {
  if (!is_absorbed(s.state) || !s.absorbed_at || !s.overshoot)
    throw std::logic_error("decision requires an absorbed state");
  return Decision{
      s.state == TernaryState::plus ? Hypothesis::plus : Hypothesis::minus,
      *s.absorbed_at, *s.overshoot};
}

SprtState init_state() { return SprtState{}; }

SprtState step_state(const SprtState& s, double llr, const TestConfig& config) {
  SprtState next = s;
  next.k = s.k + 1;
  if (is_absorbed(s.state)) return next;

  next.cum_llr = s.cum_llr + llr;
  if (next.cum_llr >= config.threshold) {
    next.state = TernaryState::plus;
  } else if (next.cum_llr <= -config.threshold) {
    next.state = TernaryState::minus;
  } else {
    return next;
  }
  next.absorbed_at = next.k;
  next.overshoot = std::abs(next.cum_llr) - config.threshold;
  return next;
}

Trajectory run_trajectory(Hypothesis x, const TestConfig& config, Engine& rng,
                          bool keep_trace) {
  Trajectory out;
  SprtState s = init_state();
  if (keep_trace) {
    out.trace.reserve(64);
    out.trace.push_back(s);
  }
  while (!is_absorbed(s.state) && s.k < config.max_steps) {
    const double y = sample_observation(x, config.rho, config.noise, rng);
    s = step_state(s, llr_increment(y, config), config);
    if (keep_trace) out.trace.push_back(s);
  }
  out.steps = s.k;
  out.final_llr = s.cum_llr;
  if (is_absorbed(s.state)) out.outcome = Decision::from_state(s);
  return out;
}

Trajectory run_trajectory(Hypothesis x, const TestConfig& config,
                          std::uint64_t seed, bool keep_trace) {
  Engine rng(seed);
  return run_trajectory(x, config, rng, keep_trace);
}

}  // namespace sprt
