// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/gn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

// Upper tail 1 - Phi(z), accurate for large positive z.
double normal_upper_tail(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double density(GeneralizedNormal n, double x) noexcept {
  if (n.is_impulse()) return x == n.mu ? 1.0 : 0.0;
  const double z = (x - n.mu) / n.sigma;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * n.sigma);
}

double log_density(GeneralizedNormal n, double x) noexcept {
  if (n.is_impulse()) return x == n.mu ? 0.0 : -kInf;
  const double z = (x - n.mu) / n.sigma;
  return -0.5 * z * z - std::log(n.sigma) - kLogSqrtTwoPi;
}

ScaledNormal product(GeneralizedNormal a, GeneralizedNormal b) noexcept {
  if (a.is_impulse() && b.is_impulse()) {
    return {{a.mu, 0.0}, a.mu == b.mu ? 1.0 : 0.0};
  }
  const double va = a.sigma * a.sigma;
  const double vb = b.sigma * b.sigma;
  const double total = va + vb;
  const double mean = (va * b.mu + vb * a.mu) / total;
  const double sigma = std::sqrt(va * vb / total);
  return {{mean, sigma}, density({a.mu, std::sqrt(total)}, b.mu)};
}

double overlap(GeneralizedNormal a, GeneralizedNormal b) noexcept {
  if (a.is_impulse() && b.is_impulse()) return a.mu == b.mu ? 1.0 : 0.0;
  return density({a.mu, std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma)}, b.mu);
}

double log_overlap(GeneralizedNormal a, GeneralizedNormal b) noexcept {
  if (a.is_impulse() && b.is_impulse()) return a.mu == b.mu ? 0.0 : -kInf;
  return log_density({a.mu, std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma)}, b.mu);
}

double interval_mass(GeneralizedNormal n, double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("invalid interval: lower bound exceeds upper bound");
  if (n.is_impulse()) return (lo <= n.mu && n.mu <= hi) ? 1.0 : 0.0;
  const double a = (lo - n.mu) / n.sigma;
  const double b = (hi - n.mu) / n.sigma;
  // Work in whichever tail keeps both terms small, so narrow far-tail
  // intervals do not cancel to zero.
  const double mass = a > 0.0 ? normal_upper_tail(a) - normal_upper_tail(b)
                              : normal_cdf(b) - normal_cdf(a);
  return std::clamp(mass, 0.0, 1.0);
}

double log_sum_exp(std::span<const double> values) noexcept {
  double peak = -kInf;
  for (double v : values) peak = std::max(peak, v);
  if (peak == -kInf) return -kInf;
  if (peak == kInf) return kInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

}  // namespace mfgn
