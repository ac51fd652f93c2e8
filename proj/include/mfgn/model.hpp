// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "mfgn/gn.hpp"
#include "mfgn/schema.hpp"

namespace mfgn {

/// Category probabilities t_w of a symbolic attribute within one component.
struct SymbolicMarginal {
  std::vector<double> probs;
  friend bool operator==(const SymbolicMarginal&, const SymbolicMarginal&) = default;
};

using Marginal = std::variant<GeneralizedNormal, SymbolicMarginal>;

struct Component {
  double weight = 0.0;
  std::vector<Marginal> marginals;  // one per schema attribute, schema order
  friend bool operator==(const Component&, const Component&) = default;
};

/// Mixture of factorized generalized normals over a heterogeneous schema.
/// Immutable once constructed; the constructor enforces every invariant.
class Model {
 public:
  static constexpr double kWeightTolerance = 1e-9;

  Model(Schema schema, std::vector<Component> components);

  const Schema& schema() const noexcept { return schema_; }
  std::span<const Component> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  const Component& operator[](std::size_t i) const { return components_[i]; }

  friend bool operator==(const Model&, const Model&) = default;

 private:
  Schema schema_;
  std::vector<Component> components_;
};

/// log p(value | component) for one attribute. Symbolic values are category
/// indices; impulses follow the indicator convention.
double log_marginal_density(const Marginal& marginal, double value);

/// p(z) for a full encoded attribute vector, summed in the log domain.
double joint_density(const Model& model, std::span<const double> values);
double log_joint_density(const Model& model, std::span<const double> values);

/// Density of a subset of attributes with the rest integrated out.
/// `values` aligns with `attributes`.
double marginal_density(const Model& model, std::span<const std::size_t> attributes,
                        std::span<const double> values);
double log_marginal_density(const Model& model, std::span<const std::size_t> attributes,
                            std::span<const double> values);

/// One draw: a component by weight, then each attribute from its marginal.
std::vector<double> sample(const Model& model, std::mt19937_64& rng);
std::vector<std::vector<double>> sample(const Model& model, std::uint64_t seed, std::size_t count);

/// Mean and variance of attribute j under the whole mixture (continuous only).
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments marginal_moments(const Model& model, std::size_t j);

}  // namespace mfgn
