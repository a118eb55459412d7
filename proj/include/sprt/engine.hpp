#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sprt/model.hpp"

namespace sprt {

enum class TernaryState : int { minus = -1, erasure = 0, plus = 1 };

constexpr bool is_absorbed(TernaryState u) { return u != TernaryState::erasure; }

constexpr TernaryState to_state(Hypothesis x) {
  return x == Hypothesis::plus ? TernaryState::plus : TernaryState::minus;
}

// One trajectory's public state at time k: cumulative log-likelihood ratio
// and the ternary decision state. plus/minus are absorbing; cum_llr freezes
// at its absorption value.
struct SprtState {
  int k = 0;
  double cum_llr = 0.0;
  TernaryState state = TernaryState::erasure;
  std::optional<int> absorbed_at;
  std::optional<double> overshoot;  // |cum_llr| - threshold at absorption, >= 0
};

struct Decision {
  Hypothesis value = Hypothesis::plus;
  int decided_at = 0;
  double overshoot = 0.0;

  // Throws std::logic_error unless s is absorbed.
  static Decision from_state(const SprtState& s);
};

// k = 0, S = 0, undecided.
SprtState init_state();

// Absorbed states pass through unchanged except for the time index.
// Otherwise accumulate the increment and absorb on reaching a threshold;
// exact equality with +-threshold absorbs (deterministic for test doubles,
// probability zero under continuous noise).
SprtState step_state(const SprtState& s, double llr, const TestConfig& config);

struct Trajectory {
  std::optional<Decision> outcome;  // nullopt: censored at the horizon
  int steps = 0;                    // observations consumed
  double final_llr = 0.0;
  std::vector<SprtState> trace;     // states k = 0..steps when requested
};

// Draw observations until absorption or config.max_steps. Bit-exactly
// reproducible from (x, config, engine seed); the engine is never shared
// between trajectories.
Trajectory run_trajectory(Hypothesis x, const TestConfig& config, Engine& rng,
                          bool keep_trace = false);
Trajectory run_trajectory(Hypothesis x, const TestConfig& config,
                          std::uint64_t seed, bool keep_trace = false);

}  // namespace sprt
