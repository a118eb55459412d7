#include "sprt/model.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "sprt/normal.hpp"

namespace sprt {
namespace {

constexpr double kQuadHalfRange = 12.0;
constexpr int kQuadCells = 24000;
constexpr int kMomentSamples = 200000;

// Composite Simpson over [-R, R]. f is evaluated 2*cells+1 times.
double simpson(const NoiseModel::Density& f, double weight_power) {
  const double h = 2.0 * kQuadHalfRange / kQuadCells;
  double sum = 0.0;
  for (int i = 0; i <= kQuadCells; ++i) {
    const double z = -kQuadHalfRange + i * h;
    const double zm = z + 0.5 * h;
    auto w = [&](double t) {
      double p = f(t);
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::domain_error("noise density must be finite and nonnegative");
      return p * std::pow(t, weight_power);
    };
    if (i < kQuadCells) sum += (w(z) + 4.0 * w(zm) + w(z + h)) * (h / 6.0);
  }
  return sum;
}

}  // namespace

NoiseModel::NoiseModel(Kind kind, Density density, Sampler sampler)
    : kind_(kind), density_(std::move(density)), sampler_(std::move(sampler)) {}

double NoiseModel::density(double z) const {
  if (kind_ == Kind::zero)
    throw std::logic_error("zero-noise double has no density");
  return density_(z);
}

NoiseModel NoiseModel::gaussian() {
  return NoiseModel(Kind::gaussian, [](double z) { return phi_pdf(z); },
                    [](Engine& rng) {
                      std::normal_distribution<double> n(0.0, 1.0);
                      return n(rng);
                    });
}

NoiseModel NoiseModel::zero() {
  return NoiseModel(Kind::zero, Density{}, [](Engine&) { return 0.0; });
}

NoiseModel NoiseModel::custom(Density density, Sampler sampler) {
  if (!density || !sampler)
    throw std::domain_error("custom noise needs both density and sampler");

  // Density-side checks are deterministic quadrature, not sampling.
  const double norm = simpson(density, 0.0);
  if (std::abs(norm - 1.0) > 1e-3)
    throw std::domain_error("noise density does not integrate to 1");
  const double mean = simpson(density, 1.0);
  if (std::abs(mean) > 1e-3)
    throw std::domain_error("noise density is not zero-mean");
  const double var = simpson(density, 2.0);
  if (std::abs(var - 1.0) > 1e-3)
    throw std::domain_error("noise density is not unit-variance");
  for (int i = 0; i <= 200; ++i) {
    const double z = i * (kQuadHalfRange / 200.0);
    if (std::abs(density(z) - density(-z)) > 1e-9)
      throw std::domain_error("noise density is not symmetric");
  }

  // Sampler must follow the claimed moments; generous 6-sigma bands.
  Engine rng(0x5eed5eedull);
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < kMomentSamples; ++i) {
    const double z = sampler(rng);
    if (!std::isfinite(z)) throw std::domain_error("noise sampler returned non-finite value");
    s1 += z;
    s2 += z * z;
  }
  const double m = s1 / kMomentSamples;
  const double v = s2 / kMomentSamples - m * m;
  const double band = 6.0 / std::sqrt(double(kMomentSamples));
  if (std::abs(m) > band * std::sqrt(v + 1e-12) + 1e-12)
    throw std::domain_error("noise sampler mean is not 0");
  if (std::abs(v - 1.0) > 0.05)
    throw std::domain_error("noise sampler variance is not 1");

  return NoiseModel(Kind::custom, std::move(density), std::move(sampler));
}

NoiseModel NoiseModel::negated() const {
  Sampler base = sampler_;
  return NoiseModel(kind_, density_,
                    [base](Engine& rng) { return -base(rng); });
}

Thresholds thresholds_from_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 0.5))
    throw std::domain_error("alpha must lie in (0, 0.5)");
  const double upper = std::log((1.0 - alpha) / alpha);
  return Thresholds{-upper, upper};
}

int default_horizon(double threshold, double rho) {
  return 50 * static_cast<int>(std::ceil(threshold / (2.0 * rho)));
}

TestConfig TestConfig::from_alpha(double rho, double alpha, NoiseModel noise,
                                  int max_steps) {
  if (!(rho > 0.0)) throw std::domain_error("rho must be positive");
  const double threshold = thresholds_from_alpha(alpha).upper;
  if (max_steps == 0) max_steps = default_horizon(threshold, rho);
  if (max_steps < 1) throw std::domain_error("max_steps must be >= 1");
  TestConfig c;
  c.rho = rho;
  c.alpha = alpha;
  c.threshold = threshold;
  c.noise = std::move(noise);
  c.max_steps = max_steps;
  return c;
}

double sample_observation(Hypothesis x, double rho, const NoiseModel& noise,
                          Engine& rng) {
  return std::sqrt(rho) * sign_of(x) + noise.sample(rng);
}

double gaussian_llr_increment(double y, double rho) {
  return 2.0 * std::sqrt(rho) * y;
}

double llr_increment(double y, const TestConfig& config) {
  if (config.noise.is_gaussian() || config.noise.is_zero())
    return gaussian_llr_increment(y, config.rho);
  const double s = std::sqrt(config.rho);
  const double p1 = config.noise.density(y - s);
  const double p0 = config.noise.density(y + s);
  if (!(p1 > 0.0) || !(p0 > 0.0))
    throw std::domain_error("noise density vanishes at shifted observation");
  return std::log(p1) - std::log(p0);
}

}  // namespace sprt
