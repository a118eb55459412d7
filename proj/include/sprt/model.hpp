#pragma once

#include <functional>

#include "sprt/rng.hpp"

namespace sprt {

enum class Hypothesis : int { minus = -1, plus = 1 };

constexpr int sign_of(Hypothesis x) { return static_cast<int>(x); }
constexpr Hypothesis flip(Hypothesis x) {
  return x == Hypothesis::plus ? Hypothesis::minus : Hypothesis::plus;
}

// Zero-mean, unit-variance, symmetric observation noise as a
// (density, sampler) pair. Custom models are validated at construction
// instead of trusted: density symmetry and quadrature moments, plus a
// sampled-moment cross-check against the claimed density.
class NoiseModel {
 public:
  using Density = std::function<double(double)>;
  using Sampler = std::function<double(Engine&)>;

  static NoiseModel gaussian();

  // Degenerate deterministic double: every sample is exactly 0. Exempt from
  // the unit-variance check; the likelihood map stays the Gaussian one so
  // that walks accumulate a constant drift.
  static NoiseModel zero();

  // Throws std::domain_error if the density is asymmetric, not normalized,
  // not unit-variance, or if sampled moments disagree with it.
  static NoiseModel custom(Density density, Sampler sampler);

  double density(double z) const;
  double sample(Engine& rng) const { return sampler_(rng); }

  bool is_gaussian() const { return kind_ == Kind::gaussian; }
  bool is_zero() const { return kind_ == Kind::zero; }

  // Same model with every sample negated. Distribution-preserving for
  // symmetric noise; used for antithetic pairing across hypotheses.
  NoiseModel negated() const;

 private:
  enum class Kind { gaussian, zero, custom };
  NoiseModel(Kind kind, Density density, Sampler sampler);

  Kind kind_;
  Density density_;
  Sampler sampler_;
};

// One test instance: signal level sqrt(rho) against unit noise, symmetric
// error budget alpha, absorbing thresholds at +-threshold in natural-log
// units, and a simulation horizon.
struct TestConfig {
  double rho = 0.0;
  double alpha = 0.0;
  double threshold = 0.0;
  NoiseModel noise = NoiseModel::gaussian();
  int max_steps = 0;

  // threshold = ln((1-alpha)/alpha); max_steps 0 selects the default
  // horizon. Throws std::domain_error on out-of-range parameters.
  static TestConfig from_alpha(double rho, double alpha,
                               NoiseModel noise = NoiseModel::gaussian(),
                               int max_steps = 0);
};

struct Thresholds {
  double lower = 0.0;
  double upper = 0.0;
};

// Symmetric thresholds for error budget alpha in (0, 0.5):
// upper = ln((1-alpha)/alpha), lower = -upper.
Thresholds thresholds_from_alpha(double alpha);

// Horizon comfortably past the absorption mass: 50 * ceil(T / (2 rho)).
int default_horizon(double threshold, double rho);

// One observation y = sqrt(rho) * x + z.
double sample_observation(Hypothesis x, double rho, const NoiseModel& noise,
                          Engine& rng);

// Closed-form Gaussian increment, ln p(y - sqrt(rho)) - ln p(y + sqrt(rho))
// collapsed to 2 sqrt(rho) y. Also the zero-noise double's map.
double gaussian_llr_increment(double y, double rho);

// Per-observation log-likelihood ratio increment in natural-log units.
// Gaussian and zero-noise models take the closed form (no density
// underflow for large |y|); custom models evaluate the density ratio and
// throw std::domain_error where the density vanishes.
double llr_increment(double y, const TestConfig& config);

}  // namespace sprt
