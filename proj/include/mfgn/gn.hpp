// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>

namespace mfgn {

/// One-dimensional normal density extended to sigma == 0, where it is an
/// impulse at mu. Wherever two impulses meet, evaluation follows the
/// indicator convention: density({mu, 0}, x) is 1 when x == mu, else 0.
struct GeneralizedNormal {
  double mu = 0.0;
  double sigma = 0.0;

  bool is_impulse() const noexcept { return sigma == 0.0; }
  friend bool operator==(const GeneralizedNormal&, const GeneralizedNormal&) = default;
};

/// Product of two generalized normals: a(x) * b(x) == scale * normal(x).
struct ScaledNormal {
  GeneralizedNormal normal;
  double scale = 0.0;
};

/// Standard normal cumulative distribution.
double normal_cdf(double z) noexcept;

double density(GeneralizedNormal n, double x) noexcept;
double log_density(GeneralizedNormal n, double x) noexcept;

ScaledNormal product(GeneralizedNormal a, GeneralizedNormal b) noexcept;

/// Integral of a(x) * b(x), i.e. N(mu_a; mu_b, sqrt(sa^2 + sb^2)); indicator
/// of equal locations when both are impulses. Symmetric in (a, b).
double overlap(GeneralizedNormal a, GeneralizedNormal b) noexcept;
double log_overlap(GeneralizedNormal a, GeneralizedNormal b) noexcept;

/// Probability mass of n on the closed interval [lo, hi]. Infinite bounds are
/// allowed. Throws DomainError when lo > hi.
double interval_mass(GeneralizedNormal n, double lo, double hi);

/// Stable log(sum(exp(v))) in index order; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values) noexcept;

}  // namespace mfgn
