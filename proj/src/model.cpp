// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::size_t draw_index(std::span<const double> probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = unit(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = k;
    acc += probs[k];
    if (u < acc) return k;
  }
  return last_positive;
}

}  // namespace

Model::Model(Schema schema, std::vector<Component> components)
    : schema_(std::move(schema)), components_(std::move(components)) {
  if (components_.empty()) throw DomainError("model needs at least one component");
  double total = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Component& c = components_[i];
    const std::string where = "component " + std::to_string(i + 1);
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) throw DomainError(where + ": invalid weight");
    total += c.weight;
    if (c.marginals.size() != schema_.size()) {
      throw SchemaError(where + ": has " + std::to_string(c.marginals.size()) + " marginals, schema has " +
                        std::to_string(schema_.size()) + " attributes");
    }
    for (std::size_t j = 0; j < schema_.size(); ++j) {
      const Attribute& a = schema_[j];
      const std::string at = where + ", attribute '" + a.name + "'";
      if (a.is_symbolic()) {
        const auto* t = std::get_if<SymbolicMarginal>(&c.marginals[j]);
        if (t == nullptr) throw SchemaError(at + ": expected a symbolic marginal");
        if (t->probs.size() != a.category_count()) throw SchemaError(at + ": wrong category count");
        double sum = 0.0;
        for (double p : t->probs) {
          if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError(at + ": negative probability");
          sum += p;
        }
        if (std::abs(sum - 1.0) > kWeightTolerance) {
          throw DomainError(at + ": category probabilities sum to " + format_double(sum));
        }
      } else {
        const auto* n = std::get_if<GeneralizedNormal>(&c.marginals[j]);
        if (n == nullptr) throw SchemaError(at + ": expected a continuous marginal");
        if (!std::isfinite(n->mu) || !std::isfinite(n->sigma) || n->sigma < 0.0) {
          throw DomainError(at + ": invalid generalized normal");
        }
      }
    }
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw DomainError("component weights sum to " + format_double(total) + ", expected 1");
  }
}

double log_marginal_density(const Marginal& marginal, double value) {
  return std::visit(Overloaded{
                        [&](const GeneralizedNormal& n) { return log_density(n, value); },
                        [&](const SymbolicMarginal& t) {
                          const auto k = static_cast<std::size_t>(value);
                          return std::log(t.probs[k]);
                        },
                    },
                    marginal);
}

double log_marginal_density(const Model& model, std::span<const std::size_t> attributes,
                            std::span<const double> values) {
  if (attributes.size() != values.size()) throw SchemaError("attribute/value count mismatch");
  if (attributes.empty()) throw SchemaError("empty attribute subset");
  for (std::size_t a = 0; a < attributes.size(); ++a) {
    if (attributes[a] >= model.schema().size()) throw SchemaError("attribute index out of range");
    model.schema().check_value(attributes[a], values[a]);
  }
  std::vector<double> terms(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Component& c = model[i];
    double lp = std::log(c.weight);
    for (std::size_t a = 0; a < attributes.size() && lp > -kInf; ++a) {
      lp += log_marginal_density(c.marginals[attributes[a]], values[a]);
    }
    terms[i] = lp;
  }
  return log_sum_exp(terms);
}

double marginal_density(const Model& model, std::span<const std::size_t> attributes,
                        std::span<const double> values) {
  return std::exp(log_marginal_density(model, attributes, values));
}

double log_joint_density(const Model& model, std::span<const double> values) {
  if (values.size() != model.schema().size()) {
    throw SchemaError("expected " + std::to_string(model.schema().size()) + " values, got " +
                      std::to_string(values.size()));
  }
  std::vector<std::size_t> all(values.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return log_marginal_density(model, all, values);
}

double joint_density(const Model& model, std::span<const double> values) {
  return std::exp(log_joint_density(model, values));
}

std::vector<double> sample(const Model& model, std::mt19937_64& rng) {
  std::vector<double> weights(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) weights[i] = model[i].weight;
  const Component& c = model[draw_index(weights, rng)];
  std::vector<double> out(model.schema().size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::visit(Overloaded{
                            [&](const GeneralizedNormal& n) {
                              if (n.is_impulse()) return n.mu;
                              std::normal_distribution<double> normal(n.mu, n.sigma);
                              return normal(rng);
                            },
                            [&](const SymbolicMarginal& t) {
                              return static_cast<double>(draw_index(t.probs, rng));
                            },
                        },
                        c.marginals[j]);
  }
  return out;
}

std::vector<std::vector<double>> sample(const Model& model, std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> rows;
  rows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) rows.push_back(sample(model, rng));
  return rows;
}

Moments marginal_moments(const Model& model, std::size_t j) {
  if (model.schema()[j].is_symbolic()) throw SchemaError("moments need a continuous attribute");
  double m1 = 0.0;
  double m2 = 0.0;
  for (const Component& c : model.components()) {
    const auto& n = std::get<GeneralizedNormal>(c.marginals[j]);
    m1 += c.weight * n.mu;
    m2 += c.weight * (n.mu * n.mu + n.sigma * n.sigma);
  }
  return {m1, m2 - m1 * m1};
}

}  // namespace mfgn
