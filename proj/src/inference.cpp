// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void kind_mismatch() { throw SchemaError("observation kind does not match the attribute kind"); }

double std_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Gaussian observation against a continuous marginal: s ~ N(mu + bias, sqrt(sigma^2 + eps^2)).
GeneralizedNormal predictive(const GeneralizedNormal& n, const GaussianObs& g) {
  return {n.mu + g.bias, std::sqrt(n.sigma * n.sigma + g.sigma * g.sigma)};
}

}  // namespace

double log_elementary_likelihood(const Marginal& marginal, const Observation& observation) {
  if (std::holds_alternative<Missing>(observation)) return 0.0;
  if (const auto* t = std::get_if<SymbolicMarginal>(&marginal)) {
    if (const auto* e = std::get_if<Exact>(&observation)) {
      return std::log(t->probs.at(static_cast<std::size_t>(e->value)));
    }
    if (const auto* d = std::get_if<SymbolicDist>(&observation)) {
      if (d->probs.size() != t->probs.size()) throw SchemaError("category count mismatch");
      double sum = 0.0;
      for (std::size_t k = 0; k < d->probs.size(); ++k) sum += d->probs[k] * t->probs[k];
      return std::log(sum);
    }
    kind_mismatch();
  }
  const auto& n = std::get<GeneralizedNormal>(marginal);
  return std::visit(Overloaded{
                        [](const Missing&) { return 0.0; },
                        [&](const Exact& e) { return log_density(n, e.value); },
                        [&](const GaussianObs& g) { return log_density(predictive(n, g), g.center); },
                        [&](const Interval& iv) { return std::log(interval_mass(n, iv.lo, iv.hi)); },
                        [&](const NormalMixtureObs& m) {
                          double sum = 0.0;
                          for (const auto& p : m.parts) sum += p.weight * overlap(n, p.normal);
                          return std::log(sum);
                        },
                        [](const SymbolicDist&) -> double { kind_mismatch(); },
                    },
                    observation);
}

double elementary_likelihood(const Marginal& marginal, const Observation& observation) {
  return std::exp(log_elementary_likelihood(marginal, observation));
}

Psi modified_marginal(const Marginal& marginal, const Observation& observation) {
  if (const auto* t = std::get_if<SymbolicMarginal>(&marginal)) {
    return std::visit(Overloaded{
                          [&](const Missing&) -> Psi { return SymbolicPsi{t->probs}; },
                          [&](const Exact& e) -> Psi {
                            SymbolicPsi out{std::vector<double>(t->probs.size(), 0.0)};
                            out.probs.at(static_cast<std::size_t>(e.value)) = 1.0;
                            return out;
                          },
                          [&](const SymbolicDist& d) -> Psi {
                            SymbolicPsi out{std::vector<double>(t->probs.size())};
                            double sum = 0.0;
                            for (std::size_t k = 0; k < out.probs.size(); ++k) {
                              out.probs[k] = d.probs.at(k) * t->probs[k];
                              sum += out.probs[k];
                            }
                            // Zero overlap means the term itself has zero weight.
                            if (sum == 0.0) return SymbolicPsi{t->probs};
                            for (double& p : out.probs) p /= sum;
                            return out;
                          },
                          [](const auto&) -> Psi { kind_mismatch(); },
                      },
                      observation);
  }
  const auto& n = std::get<GeneralizedNormal>(marginal);
  return std::visit(Overloaded{
                        [&](const Missing&) -> Psi { return ContinuousPsi{n.mu, n.sigma}; },
                        [&](const Exact& e) -> Psi { return ContinuousPsi{e.value, 0.0}; },
                        [&](const GaussianObs& g) -> Psi {
                          const double s2 = n.sigma * n.sigma;
                          const double e2 = g.sigma * g.sigma;
                          const double v = (s2 * (g.center - g.bias) + e2 * n.mu) / (s2 + e2);
                          const double lambda = n.sigma * g.sigma / std::sqrt(s2 + e2);
                          return ContinuousPsi{v, lambda};
                        },
                        [&](const Interval& iv) -> Psi {
                          return TruncatedPsi{n, iv.lo, iv.hi, interval_mass(n, iv.lo, iv.hi)};
                        },
                        [&](const NormalMixtureObs& m) -> Psi {
                          MixturePsi out;
                          double total = 0.0;
                          for (const auto& p : m.parts) {
                            const ScaledNormal sn = product(n, p.normal);
                            out.parts.push_back({p.weight * sn.scale, sn.normal});
                            total += p.weight * sn.scale;
                          }
                          if (total == 0.0) return ContinuousPsi{n.mu, n.sigma};
                          for (auto& p : out.parts) p.weight /= total;
                          return out;
                        },
                        [](const SymbolicDist&) -> Psi { kind_mismatch(); },
                    },
                    observation);
}

double psi_density(const Psi& psi, double x) {
  return std::visit(Overloaded{
                        [&](const ContinuousPsi& c) { return density({c.mean, c.sd}, x); },
                        [&](const SymbolicPsi& s) {
                          const auto k = static_cast<std::size_t>(x);
                          return (x >= 0.0 && k < s.probs.size() && static_cast<double>(k) == x) ? s.probs[k] : 0.0;
                        },
                        [&](const TruncatedPsi& t) {
                          if (x < t.lo || x > t.hi || t.mass <= 0.0) return 0.0;
                          return density(t.base, x) / t.mass;
                        },
                        [&](const MixturePsi& m) {
                          double sum = 0.0;
                          for (const auto& p : m.parts) sum += p.weight * density(p.normal, x);
                          return sum;
                        },
                    },
                    psi);
}

Moments truncated_moments(GeneralizedNormal base, double lo, double hi) {
  if (lo > hi) throw DomainError("invalid interval");
  if (base.is_impulse()) {
    if (base.mu < lo || base.mu > hi) throw DomainError("truncation interval has zero mass");
    return {base.mu, 0.0};
  }
  // Mirror upper-tail intervals so the mass is computed where it is accurate.
  if ((lo - base.mu) > (base.mu - hi)) {
    const Moments m = truncated_moments({-base.mu, base.sigma}, -hi, -lo);
    return {-m.mean, m.variance};
  }
  const double a = (lo - base.mu) / base.sigma;
  const double b = (hi - base.mu) / base.sigma;
  const double z = interval_mass({0.0, 1.0}, a, b);
  if (!(z > 0.0)) throw DomainError("truncation interval has zero mass");
  const double pa = std_pdf(a);
  const double pb = std_pdf(b);
  const double apa = std::isinf(a) ? 0.0 : a * pa;
  const double bpb = std::isinf(b) ? 0.0 : b * pb;
  const double shift = (pa - pb) / z;
  double var = 1.0 + (apa - bpb) / z - shift * shift;
  var = std::max(var, 0.0);
  double mean = base.mu + base.sigma * shift;
  mean = std::clamp(mean, lo, hi);
  return {mean, base.sigma * base.sigma * var};
}

PsiMoments psi_moments(const Psi& psi) {
  return std::visit(Overloaded{
                        [](const ContinuousPsi& c) { return PsiMoments{c.mean, c.mean * c.mean + c.sd * c.sd}; },
                        [](const TruncatedPsi& t) {
                          const Moments m = truncated_moments(t.base, t.lo, t.hi);
                          return PsiMoments{m.mean, m.mean * m.mean + m.variance};
                        },
                        [](const MixturePsi& m) {
                          PsiMoments out;
                          for (const auto& p : m.parts) {
                            out.mean += p.weight * p.normal.mu;
                            out.second += p.weight * (p.normal.mu * p.normal.mu + p.normal.sigma * p.normal.sigma);
                          }
                          return out;
                        },
                        [](const SymbolicPsi&) -> PsiMoments {
                          throw SchemaError("moments are defined for continuous attributes only");
                        },
                    },
                    psi);
}

std::size_t Posterior::target_slot(std::size_t j) const {
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (targets[k] == j) return k;
  }
  throw SchemaError("attribute " + std::to_string(j) + " is not a posterior target");
}

namespace {

std::vector<double> log_term_weights(const Model& model, const Evidence& evidence) {
  const std::size_t l = model.size();
  const std::size_t R = evidence.conjunctions.size();
  const std::size_t n = model.schema().size();
  std::vector<double> log_terms(l * R);
  for (std::size_t i = 0; i < l; ++i) {
    const Component& c = model[i];
    const double lp = std::log(c.weight);
    for (std::size_t r = 0; r < R; ++r) {
      const Conjunction& conj = evidence.conjunctions[r];
      double lt = lp + std::log(conj.weight);
      for (std::size_t j = 0; j < n && lt > -kInf; ++j) {
        lt += log_elementary_likelihood(c.marginals[j], conj.observations[j]);
      }
      log_terms[i * R + r] = lt;
    }
  }
  return log_terms;
}

}  // namespace

double log_evidence(const Model& model, const Evidence& evidence) {
  check_evidence(model.schema(), evidence);
  return log_sum_exp(log_term_weights(model, evidence));
}

Posterior posterior(const Model& model, const Evidence& evidence, std::span<const std::size_t> targets,
                    PosteriorOptions options) {
  const Schema& schema = model.schema();
  check_evidence(schema, evidence);
  if (targets.empty()) throw SchemaError("posterior needs at least one target attribute");
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (targets[k] >= schema.size()) throw SchemaError("target attribute index out of range");
    for (std::size_t m = 0; m < k; ++m) {
      if (targets[m] == targets[k]) throw SchemaError("target '" + schema[targets[k]].name + "' listed twice");
    }
  }

  const std::size_t l = model.size();
  const std::size_t R = evidence.conjunctions.size();
  const std::vector<double> log_terms = log_term_weights(model, evidence);

  Posterior out;
  out.targets.assign(targets.begin(), targets.end());
  out.log_evidence = log_sum_exp(log_terms);
  if (!(out.log_evidence > -kInf)) {
    throw ZeroEvidenceError("evidence has zero likelihood under every model component");
  }

  double kept = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t r = 0; r < R; ++r) {
      const double alpha = std::exp(log_terms[i * R + r] - out.log_evidence);
      if (!(alpha >= options.prune_below) || alpha == 0.0) continue;
      PosteriorTerm t{i, r, alpha, {}};
      t.psi.reserve(targets.size());
      for (std::size_t j : targets) {
        t.psi.push_back(modified_marginal(model[i].marginals[j], evidence.conjunctions[r].observations[j]));
      }
      kept += alpha;
      out.terms.push_back(std::move(t));
    }
  }
  if (out.terms.empty()) throw ZeroEvidenceError("every posterior term fell below the pruning floor");
  for (PosteriorTerm& t : out.terms) t.weight /= kept;
  return out;
}

std::vector<double> component_weights(const Posterior& posterior, std::size_t component_count) {
  std::vector<double> w(component_count, 0.0);
  for (const PosteriorTerm& t : posterior.terms) w.at(t.component) += t.weight;
  return w;
}

Estimate estimate(const Posterior& posterior, std::size_t attribute, std::optional<double> reject_above) {
  const std::size_t slot = posterior.target_slot(attribute);
  if (posterior.terms.empty()) throw DomainError("empty posterior");
  if (std::holds_alternative<SymbolicPsi>(posterior.terms.front().psi[slot])) {
    SymbolicEstimate e;
    e.q.assign(std::get<SymbolicPsi>(posterior.terms.front().psi[slot]).probs.size(), 0.0);
    for (const PosteriorTerm& t : posterior.terms) {
      const auto& p = std::get<SymbolicPsi>(t.psi[slot]).probs;
      for (std::size_t k = 0; k < p.size(); ++k) e.q[k] += t.weight * p[k];
    }
    for (std::size_t k = 0; k < e.q.size(); ++k) {
      if (e.q[k] > e.q[e.choice]) e.choice = k;
      if (e.q[k] > 0.0) e.entropy -= e.q[k] * std::log(e.q[k]);
    }
    e.error_prob = std::max(0.0, 1.0 - e.q[e.choice]);
    e.rejected = reject_above.has_value() && e.error_prob > *reject_above;
    return e;
  }
  const double m1 = moment(posterior, attribute, 1);
  // Central form of sum alpha (v^2 + lambda^2) - mean^2 avoids cancellation when the spread is small against the mean.
  double var = 0.0;
  for (const PosteriorTerm& t : posterior.terms) {
    const PsiMoments pm = psi_moments(t.psi[slot]);
    const double d = pm.mean - m1;
    var += t.weight * (d * d + (pm.second - pm.mean * pm.mean));
  }
  return ContinuousEstimate{m1, std::sqrt(std::max(var, 0.0))};
}

double posterior_pdf(const Posterior& posterior, std::size_t attribute, double x) {
  const std::size_t slot = posterior.target_slot(attribute);
  double sum = 0.0;
  for (const PosteriorTerm& t : posterior.terms) sum += t.weight * psi_density(t.psi[slot], x);
  return sum;
}

double moment(const Posterior& posterior, std::size_t attribute, int k) {
  if (k != 1 && k != 2) throw DomainError("only the first two moments are available");
  const std::size_t slot = posterior.target_slot(attribute);
  double sum = 0.0;
  for (const PosteriorTerm& t : posterior.terms) {
    const Psi& psi = t.psi[slot];
    if (std::holds_alternative<TruncatedPsi>(psi)) {
      throw UnsupportedError("interval-truncated posterior terms have no closed-form estimator; use posterior_pdf");
    }
    const PsiMoments pm = psi_moments(psi);
    sum += t.weight * (k == 1 ? pm.mean : pm.second);
  }
  return sum;
}

}  // namespace mfgn
