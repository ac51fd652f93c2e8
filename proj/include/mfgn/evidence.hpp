// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "mfgn/gn.hpp"
#include "mfgn/schema.hpp"

namespace mfgn {

// Elementary per-attribute observations. Each one is a likelihood function
// p(s | z) of the attribute's true value z.

struct Missing {
  friend bool operator==(const Missing&, const Missing&) = default;
};

/// Impulse at `value` (a category index for symbolic attributes).
struct Exact {
  double value = 0.0;
  friend bool operator==(const Exact&, const Exact&) = default;
};

/// Measurement s of z with Gaussian noise: p(s | z) = N(s; z + bias, sigma), sigma > 0.
struct GaussianObs {
  double center = 0.0;
  double sigma = 1.0;
  double bias = 0.0;
  friend bool operator==(const GaussianObs&, const GaussianObs&) = default;
};

/// Uniform likelihood on the closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Likelihood P{s = w} over the categories of a symbolic attribute; sums to 1.
struct SymbolicDist {
  std::vector<double> probs;
  friend bool operator==(const SymbolicDist&, const SymbolicDist&) = default;
};

struct WeightedNormal {
  double weight = 1.0;
  GeneralizedNormal normal;
  friend bool operator==(const WeightedNormal&, const WeightedNormal&) = default;
};

/// Arbitrary one-dimensional likelihood approximated by a mixture of
/// generalized normals in z.
struct NormalMixtureObs {
  std::vector<WeightedNormal> parts;
  friend bool operator==(const NormalMixtureObs&, const NormalMixtureObs&) = default;
};

using Observation = std::variant<Missing, Exact, GaussianObs, Interval, SymbolicDist, NormalMixtureObs>;

inline bool is_missing(const Observation& o) noexcept { return std::holds_alternative<Missing>(o); }

/// Throws SchemaError on a kind mismatch and DomainError on a violated invariant.
void check_observation(const Attribute& attribute, const Observation& observation);

/// p(s | z) evaluated at a true value z (impulses use the indicator convention).
double observation_likelihood(const Observation& observation, double z);

/// A weighted conjunction of one observation per schema attribute.
struct Conjunction {
  double weight = 1.0;
  std::vector<Observation> observations;
  friend bool operator==(const Conjunction&, const Conjunction&) = default;
};

/// Weighted disjunction of conjunctions: p(S | z) = sum_r pi_r prod_j p(s_r^j | z^j).
/// Weights are positive and need not sum to 1.
struct Evidence {
  std::vector<Conjunction> conjunctions;
  friend bool operator==(const Evidence&, const Evidence&) = default;
};

Conjunction missing_conjunction(const Schema& schema, double weight = 1.0);
/// Evidence that says nothing about any attribute.
Evidence no_evidence(const Schema& schema);

void check_evidence(const Schema& schema, const Evidence& evidence);

double evidence_likelihood(const Evidence& evidence, std::span<const double> z);

/// Scales conjunction weights to sum to 1, preserving order.
Evidence normalize_weights(Evidence evidence);

/// Product of two observations of the same attribute: the fused observation
/// and the constant factor it pulls out. Throws UnsupportedError for pairs
/// with no closed-form product (anything with an Interval or a mixture).
std::pair<Observation, double> fuse(const Attribute& attribute, const Observation& a, const Observation& b);

/// Evidence expression tree: leaves, AND nodes and weighted OR nodes.
struct EvidenceExpr {
  enum class Kind { Leaf, And, Or };

  Kind kind = Kind::Leaf;
  std::size_t attribute = 0;        // Leaf
  Observation observation;          // Leaf
  std::vector<EvidenceExpr> children;  // And / Or
  std::vector<double> weights;         // Or, one per child

  static EvidenceExpr leaf(std::size_t attribute, Observation observation);
  static EvidenceExpr all_of(std::vector<EvidenceExpr> children);
  static EvidenceExpr any_of(std::vector<EvidenceExpr> children, std::vector<double> weights);
  static EvidenceExpr any_of(std::vector<EvidenceExpr> children);

  friend bool operator==(const EvidenceExpr&, const EvidenceExpr&) = default;
};

/// Sum-of-products normal form. AND distributes over OR, OR weights multiply
/// down each path, and observations of one attribute inside a conjunction are
/// fused. Conjunctions whose fused weight is exactly zero are dropped; if none
/// survive the expression is contradictory and ZeroEvidenceError is thrown.
Evidence expand(const EvidenceExpr& expr, const Schema& schema);

}  // namespace mfgn
