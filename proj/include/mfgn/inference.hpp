// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mfgn/evidence.hpp"
#include "mfgn/model.hpp"

namespace mfgn {

// Posterior marginal of one attribute within one (component, conjunction) term.

/// N(z; mean, sd); sd == 0 is an impulse.
struct ContinuousPsi {
  double mean = 0.0;
  double sd = 0.0;
  friend bool operator==(const ContinuousPsi&, const ContinuousPsi&) = default;
};

struct SymbolicPsi {
  std::vector<double> probs;
  friend bool operator==(const SymbolicPsi&, const SymbolicPsi&) = default;
};

/// base restricted to [lo, hi] and renormalized; `mass` is base's mass there.
struct TruncatedPsi {
  GeneralizedNormal base;
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;
  friend bool operator==(const TruncatedPsi&, const TruncatedPsi&) = default;
};

/// Normalized mixture, from a NormalMixtureObs likelihood.
struct MixturePsi {
  std::vector<WeightedNormal> parts;
  friend bool operator==(const MixturePsi&, const MixturePsi&) = default;
};

using Psi = std::variant<ContinuousPsi, SymbolicPsi, TruncatedPsi, MixturePsi>;

/// beta = integral of p(s | z) p(z | C) over z, for one attribute of one component.
/// Exact values are compared with the indicator convention. Throws SchemaError
/// on a kind mismatch.
double elementary_likelihood(const Marginal& marginal, const Observation& observation);
double log_elementary_likelihood(const Marginal& marginal, const Observation& observation);

/// p(z | s, C): the component marginal updated by the observation.
Psi modified_marginal(const Marginal& marginal, const Observation& observation);

/// Density (continuous) or probability (symbolic, x = category index) of psi at x.
double psi_density(const Psi& psi, double x);

/// First two raw moments of a continuous psi, truncated ones included.
struct PsiMoments {
  double mean = 0.0;
  double second = 0.0;
};
PsiMoments psi_moments(const Psi& psi);

/// Mean and variance of N(mu, sigma) restricted to [lo, hi]. Requires positive mass.
Moments truncated_moments(GeneralizedNormal base, double lo, double hi);

struct PosteriorOptions {
  /// Terms whose weight falls below this are dropped and the rest renormalized.
  double prune_below = 1e-12;
};

struct PosteriorTerm {
  std::size_t component = 0;
  std::size_t conjunction = 0;
  double weight = 0.0;        // alpha
  std::vector<Psi> psi;       // aligned with Posterior::targets
};

struct Posterior {
  std::vector<PosteriorTerm> terms;
  std::vector<std::size_t> targets;
  double log_evidence = 0.0;  // log sum_{i,r} P_i pi_r beta_{i,r}

  /// Position of attribute j in `targets`; throws SchemaError if absent.
  std::size_t target_slot(std::size_t j) const;
};

/// Posterior over (component, conjunction) terms. The weights are computed in
/// the log domain and sum to 1. Throws ZeroEvidenceError when the evidence
/// has zero likelihood under every component.
Posterior posterior(const Model& model, const Evidence& evidence, std::span<const std::size_t> targets,
                    PosteriorOptions options = {});

/// log p(S) = log sum_{i,r} P_i pi_r beta_{i,r}; -inf for contradictory evidence.
double log_evidence(const Model& model, const Evidence& evidence);

/// P{C_i | S}: term weights summed over conjunctions, indexed by component.
std::vector<double> component_weights(const Posterior& posterior, std::size_t component_count);

struct ContinuousEstimate {
  double mean = 0.0;
  double std = 0.0;
  friend bool operator==(const ContinuousEstimate&, const ContinuousEstimate&) = default;
};

struct SymbolicEstimate {
  std::vector<double> q;
  std::size_t choice = 0;  // lowest index among the most probable
  double entropy = 0.0;    // natural log
  double error_prob = 0.0;
  bool rejected = false;
  friend bool operator==(const SymbolicEstimate&, const SymbolicEstimate&) = default;
};

using Estimate = std::variant<ContinuousEstimate, SymbolicEstimate>;

/// MSE estimate for continuous targets, EP estimate for symbolic ones.
/// `reject_above` flags a symbolic estimate whose error probability exceeds it.
/// A continuous target with interval-truncated terms throws UnsupportedError;
/// use posterior_pdf for those.
Estimate estimate(const Posterior& posterior, std::size_t attribute, std::optional<double> reject_above = {});

/// Posterior density of a continuous target at x, or probability of category x.
double posterior_pdf(const Posterior& posterior, std::size_t attribute, double x);

/// k-th raw posterior moment (k = 1 or 2) of a continuous target.
double moment(const Posterior& posterior, std::size_t attribute, int k);

}  // namespace mfgn
