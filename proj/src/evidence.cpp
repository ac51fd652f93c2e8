// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/evidence.hpp"

#include <cmath>
#include <string>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_distribution(const Attribute& a, const std::vector<double>& probs) {
  if (probs.size() != a.category_count()) {
    throw SchemaError("distribution over '" + a.name + "' needs " + std::to_string(a.category_count()) +
                      " probabilities");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("negative probability in distribution over '" + a.name + "'");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("distribution over '" + a.name + "' sums to " + format_double(sum) + ", expected 1");
  }
}

}  // namespace

void check_observation(const Attribute& a, const Observation& observation) {
  const bool symbolic = a.is_symbolic();
  std::visit(Overloaded{
                 [](const Missing&) {},
                 [&](const Exact& e) {
                   if (!std::isfinite(e.value)) throw DomainError("non-finite exact value for '" + a.name + "'");
                   if (symbolic && (e.value < 0.0 || e.value != std::floor(e.value) ||
                                    e.value >= static_cast<double>(a.category_count()))) {
                     throw SchemaError("exact value is not a category of '" + a.name + "'");
                   }
                 },
                 [&](const GaussianObs& g) {
                   if (symbolic) throw SchemaError("gaussian observation on symbolic attribute '" + a.name + "'");
                   if (!(g.sigma > 0.0) || !std::isfinite(g.sigma) || !std::isfinite(g.center) ||
                       !std::isfinite(g.bias)) {
                     throw DomainError("gaussian observation on '" + a.name + "' needs finite values and sigma > 0");
                   }
                 },
                 [&](const Interval& iv) {
                   if (symbolic) throw SchemaError("interval observation on symbolic attribute '" + a.name + "'");
                   if (!(iv.lo <= iv.hi)) throw DomainError("invalid interval on '" + a.name + "'");
                 },
                 [&](const SymbolicDist& d) {
                   if (!symbolic) throw SchemaError("category distribution on continuous attribute '" + a.name + "'");
                   check_distribution(a, d.probs);
                 },
                 [&](const NormalMixtureObs& m) {
                   if (symbolic) throw SchemaError("normal mixture observation on symbolic attribute '" + a.name + "'");
                   if (m.parts.empty()) throw DomainError("empty normal mixture on '" + a.name + "'");
                   for (const auto& p : m.parts) {
                     if (!(p.weight > 0.0) || !std::isfinite(p.weight) || !(p.normal.sigma >= 0.0) ||
                         !std::isfinite(p.normal.mu) || !std::isfinite(p.normal.sigma)) {
                       throw DomainError("invalid normal mixture part on '" + a.name + "'");
                     }
                   }
                 },
             },
             observation);
}

double observation_likelihood(const Observation& observation, double z) {
  return std::visit(Overloaded{
                        [](const Missing&) { return 1.0; },
                        [&](const Exact& e) { return z == e.value ? 1.0 : 0.0; },
                        [&](const GaussianObs& g) { return density({z + g.bias, g.sigma}, g.center); },
                        [&](const Interval& iv) { return (iv.lo <= z && z <= iv.hi) ? 1.0 : 0.0; },
                        [&](const SymbolicDist& d) {
                          const auto k = static_cast<std::size_t>(z);
                          return (z >= 0.0 && k < d.probs.size()) ? d.probs[k] : 0.0;
                        },
                        [&](const NormalMixtureObs& m) {
                          double sum = 0.0;
                          for (const auto& p : m.parts) sum += p.weight * density(p.normal, z);
                          return sum;
                        },
                    },
                    observation);
}

Conjunction missing_conjunction(const Schema& schema, double weight) {
  return Conjunction{weight, std::vector<Observation>(schema.size(), Missing{})};
}

Evidence no_evidence(const Schema& schema) { return Evidence{{missing_conjunction(schema)}}; }

void check_evidence(const Schema& schema, const Evidence& evidence) {
  if (evidence.conjunctions.empty()) throw DomainError("evidence needs at least one conjunction");
  for (const Conjunction& c : evidence.conjunctions) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) throw DomainError("conjunction weights must be finite and positive");
    if (c.observations.size() != schema.size()) {
      throw SchemaError("conjunction has " + std::to_string(c.observations.size()) + " observations, schema has " +
                        std::to_string(schema.size()) + " attributes");
    }
    for (std::size_t j = 0; j < schema.size(); ++j) check_observation(schema[j], c.observations[j]);
  }
}

double evidence_likelihood(const Evidence& evidence, std::span<const double> z) {
  double sum = 0.0;
  for (const Conjunction& c : evidence.conjunctions) {
    double term = c.weight;
    for (std::size_t j = 0; j < c.observations.size() && term != 0.0; ++j) {
      term *= observation_likelihood(c.observations[j], z[j]);
    }
    sum += term;
  }
  return sum;
}

Evidence normalize_weights(Evidence evidence) {
  double total = 0.0;
  for (const Conjunction& c : evidence.conjunctions) total += c.weight;
  if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("cannot normalize evidence with zero total weight");
  for (Conjunction& c : evidence.conjunctions) c.weight /= total;
  return evidence;
}

std::pair<Observation, double> fuse(const Attribute& attribute, const Observation& a, const Observation& b) {
  if (is_missing(a)) return {b, 1.0};
  if (is_missing(b)) return {a, 1.0};
  auto unsupported = [&]() -> std::pair<Observation, double> {
    throw UnsupportedError("cannot combine two observations of '" + attribute.name +
                           "' in one conjunction (intervals and mixtures have no closed-form product)");
  };
  if (std::holds_alternative<Interval>(a) || std::holds_alternative<Interval>(b) ||
      std::holds_alternative<NormalMixtureObs>(a) || std::holds_alternative<NormalMixtureObs>(b)) {
    return unsupported();
  }

  if (const auto* ea = std::get_if<Exact>(&a)) {
    if (const auto* eb = std::get_if<Exact>(&b)) return {*ea, ea->value == eb->value ? 1.0 : 0.0};
    if (const auto* gb = std::get_if<GaussianObs>(&b)) {
      return {*ea, density({gb->center - gb->bias, gb->sigma}, ea->value)};
    }
    const auto& db = std::get<SymbolicDist>(b);
    return {*ea, db.probs[static_cast<std::size_t>(ea->value)]};
  }
  if (std::holds_alternative<Exact>(b)) return fuse(attribute, b, a);

  if (const auto* ga = std::get_if<GaussianObs>(&a)) {
    const auto& gb = std::get<GaussianObs>(b);
    const ScaledNormal p = product({ga->center - ga->bias, ga->sigma}, {gb.center - gb.bias, gb.sigma});
    return {GaussianObs{p.normal.mu, p.normal.sigma, 0.0}, p.scale};
  }

  const auto& da = std::get<SymbolicDist>(a);
  const auto& db = std::get<SymbolicDist>(b);
  SymbolicDist out{std::vector<double>(da.probs.size())};
  double total = 0.0;
  for (std::size_t k = 0; k < out.probs.size(); ++k) {
    out.probs[k] = da.probs[k] * db.probs[k];
    total += out.probs[k];
  }
  if (total == 0.0) return {da, 0.0};
  for (double& p : out.probs) p /= total;
  return {out, total};
}

EvidenceExpr EvidenceExpr::leaf(std::size_t attribute, Observation observation) {
  EvidenceExpr e;
  e.kind = Kind::Leaf;
  e.attribute = attribute;
  e.observation = std::move(observation);
  return e;
}

EvidenceExpr EvidenceExpr::all_of(std::vector<EvidenceExpr> children) {
  EvidenceExpr e;
  e.kind = Kind::And;
  e.children = std::move(children);
  return e;
}

EvidenceExpr EvidenceExpr::any_of(std::vector<EvidenceExpr> children, std::vector<double> weights) {
  if (weights.size() != children.size()) throw DomainError("OR node needs one weight per branch");
  EvidenceExpr e;
  e.kind = Kind::Or;
  e.children = std::move(children);
  e.weights = std::move(weights);
  return e;
}

EvidenceExpr EvidenceExpr::any_of(std::vector<EvidenceExpr> children) {
  std::vector<double> weights(children.size(), 1.0);
  return any_of(std::move(children), std::move(weights));
}

namespace {

std::vector<Conjunction> expand_node(const EvidenceExpr& e, const Schema& schema) {
  switch (e.kind) {
    case EvidenceExpr::Kind::Leaf: {
      if (e.attribute >= schema.size()) throw SchemaError("leaf refers to attribute index out of range");
      check_observation(schema[e.attribute], e.observation);
      Conjunction c = missing_conjunction(schema);
      c.observations[e.attribute] = e.observation;
      return {std::move(c)};
    }
    case EvidenceExpr::Kind::And: {
      if (e.children.empty()) throw DomainError("AND node without operands");
      std::vector<Conjunction> acc{missing_conjunction(schema)};
      for (const EvidenceExpr& child : e.children) {
        const std::vector<Conjunction> rhs = expand_node(child, schema);
        std::vector<Conjunction> next;
        next.reserve(acc.size() * rhs.size());
        for (const Conjunction& l : acc) {
          for (const Conjunction& r : rhs) {
            Conjunction c{l.weight * r.weight, {}};
            c.observations.reserve(schema.size());
            for (std::size_t j = 0; j < schema.size(); ++j) {
              auto [obs, scale] = fuse(schema[j], l.observations[j], r.observations[j]);
              c.weight *= scale;
              c.observations.push_back(std::move(obs));
            }
            if (c.weight > 0.0) next.push_back(std::move(c));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case EvidenceExpr::Kind::Or: {
      if (e.children.empty()) throw DomainError("OR node without branches");
      if (e.weights.size() != e.children.size()) throw DomainError("OR node needs one weight per branch");
      std::vector<Conjunction> out;
      for (std::size_t b = 0; b < e.children.size(); ++b) {
        if (!(e.weights[b] > 0.0) || !std::isfinite(e.weights[b])) throw DomainError("OR branch weights must be positive");
        for (Conjunction& c : expand_node(e.children[b], schema)) {
          c.weight *= e.weights[b];
          out.push_back(std::move(c));
        }
      }
      return out;
    }
  }
  return {};
}

}  // namespace

Evidence expand(const EvidenceExpr& expr, const Schema& schema) {
  Evidence ev{expand_node(expr, schema)};
  if (ev.conjunctions.empty()) throw ZeroEvidenceError("evidence is self-contradictory: every conjunction has zero weight");
  return ev;
}

}  // namespace mfgn
