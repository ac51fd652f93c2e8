// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <random>
#include <string>
#include <vector>

#include "mfgn/dataset.hpp"
#include "mfgn/evidence.hpp"
#include "mfgn/model.hpp"
#include "mfgn/model_io.hpp"
#include "mfgn/schema.hpp"
#include "mfgn/table.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(MFGN_TEST_DATA) + "/" + name; }

/// The 6-component Iris model (x, y, z, w continuous; U in U1..U3).
inline mfgn::Model iris_model() { return mfgn::load_model_file(data_path("iris_table.mfgn")); }

/// The 7-component model over x, y and z in {white, black}.
inline mfgn::Model scatter_model() { return mfgn::load_model_file(data_path("scatter_table.mfgn")); }

inline mfgn::Schema iris_schema() { return mfgn::read_schema_file(data_path("iris.schema")); }

inline mfgn::TrainingTable iris_data() { return mfgn::read_dataset_file(data_path("iris.csv"), iris_schema()); }

inline mfgn::Attribute continuous(std::string name) { return {std::move(name), mfgn::AttributeKind::Continuous, {}}; }

inline mfgn::Attribute symbolic(std::string name, std::vector<std::string> cats) {
  return {std::move(name), mfgn::AttributeKind::Symbolic, std::move(cats)};
}

/// Two-component synthetic domain: x, y continuous, w in {white, black}.
/// Component 1: x ~ N(0, 2), y ~ N(0, 1), white. Component 2: x ~ N(2, 1),
/// y ~ N(2, 2), black. Equal weights.
inline mfgn::Model synthetic_truth() {
  mfgn::Schema schema({continuous("x"), continuous("y"), symbolic("w", {"white", "black"})});
  return mfgn::Model(schema, {{0.5, {mfgn::GeneralizedNormal{0, 2}, mfgn::GeneralizedNormal{0, 1},
                                     mfgn::SymbolicMarginal{{1, 0}}}},
                              {0.5, {mfgn::GeneralizedNormal{2, 1}, mfgn::GeneralizedNormal{2, 2},
                                     mfgn::SymbolicMarginal{{0, 1}}}}});
}

/// Random model over a random schema of 1..max_attrs attributes.
inline mfgn::Model random_model(std::mt19937_64& rng, std::size_t max_attrs = 3, std::size_t max_components = 4,
                                double sigma_lo = 0.1, double sigma_hi = 2.0) {
  std::uniform_int_distribution<std::size_t> n_attr(1, max_attrs);
  std::uniform_int_distribution<std::size_t> n_comp(1, max_components);
  std::uniform_int_distribution<std::size_t> n_cat(2, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> loc(-3.0, 3.0);
  std::uniform_real_distribution<double> spread(sigma_lo, sigma_hi);
  std::vector<mfgn::Attribute> attrs;
  const std::size_t n = n_attr(rng);
  for (std::size_t j = 0; j < n; ++j) {
    if (unit(rng) < 0.3) {
      std::vector<std::string> cats;
      const std::size_t K = n_cat(rng);
      for (std::size_t k = 0; k < K; ++k) cats.push_back("c" + std::to_string(k));
      attrs.push_back(symbolic("s" + std::to_string(j), cats));
    } else {
      attrs.push_back(continuous("a" + std::to_string(j)));
    }
  }
  mfgn::Schema schema(attrs);
  const std::size_t l = n_comp(rng);
  std::vector<mfgn::Component> comps;
  double total = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    mfgn::Component c{0.2 + unit(rng), {}};
    total += c.weight;
    for (const auto& a : attrs) {
      if (a.is_symbolic()) {
        std::vector<double> t(a.category_count());
        double s = 0.0;
        for (double& x : t) s += (x = 0.05 + unit(rng));
        for (double& x : t) x /= s;
        c.marginals.emplace_back(mfgn::SymbolicMarginal{t});
      } else {
        c.marginals.emplace_back(mfgn::GeneralizedNormal{loc(rng), spread(rng)});
      }
    }
    comps.push_back(std::move(c));
  }
  for (auto& c : comps) c.weight /= total;
  return mfgn::Model(schema, std::move(comps));
}

/// Random observation for attribute a. Intervals only when allowed.
inline mfgn::Observation random_observation(std::mt19937_64& rng, const mfgn::Attribute& a, bool intervals) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> loc(-3.0, 3.0);
  const double u = unit(rng);
  if (a.is_symbolic()) {
    if (u < 0.3) return mfgn::Missing{};
    if (u < 0.6) {
      return mfgn::Exact{static_cast<double>(std::uniform_int_distribution<std::size_t>(0, a.category_count() - 1)(rng))};
    }
    std::vector<double> p(a.category_count());
    double s = 0.0;
    for (double& x : p) s += (x = 0.05 + unit(rng));
    for (double& x : p) x /= s;
    return mfgn::SymbolicDist{p};
  }
  if (u < 0.25) return mfgn::Missing{};
  if (u < 0.45) return mfgn::Exact{loc(rng)};
  if (u < 0.85 || !intervals) return mfgn::GaussianObs{loc(rng), 0.2 + 2.0 * unit(rng), unit(rng) < 0.3 ? loc(rng) / 3 : 0.0};
  const double lo = loc(rng);
  return mfgn::Interval{lo, lo + 0.5 + 3.0 * unit(rng)};
}

/// Random evidence with 1..3 weighted conjunctions.
inline mfgn::Evidence random_evidence(std::mt19937_64& rng, const mfgn::Schema& schema, bool intervals = false) {
  std::uniform_int_distribution<std::size_t> n_conj(1, 3);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  mfgn::Evidence ev;
  const std::size_t R = n_conj(rng);
  for (std::size_t r = 0; r < R; ++r) {
    mfgn::Conjunction c{weight(rng), {}};
    for (const auto& a : schema.attributes()) c.observations.push_back(random_observation(rng, a, intervals));
    ev.conjunctions.push_back(std::move(c));
  }
  return ev;
}

// Uncertain table from a random model: noisy, biased, missing, interval,
// symbolic-likelihood and two-conjunction rows.
inline mfgn::TrainingTable uncertain_table(std::mt19937_64& rng, const mfgn::Model& m, std::size_t rows) {
  const auto clean = mfgn::sample(m, rng(), rows);
  std::uniform_real_distribution<double> u(0, 1);
  mfgn::TrainingTable t{m.schema(), {}};
  for (const auto& z : clean) {
    mfgn::Evidence ev{{mfgn::missing_conjunction(m.schema())}};
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double p = u(rng);
      auto& obs = ev.conjunctions[0].observations[j];
      if (m.schema()[j].is_symbolic()) {
        if (p < 0.6) {
          obs = mfgn::Exact{z[j]};
        } else if (p < 0.9) {
          const std::size_t K = m.schema()[j].category_count();
          std::vector<double> probs(K, 0.1 / double(K - 1));
          probs[static_cast<std::size_t>(z[j])] = 0.9;
          obs = mfgn::SymbolicDist{probs};
        }
        continue;
      }
      if (p < 0.35) {
        obs = mfgn::Exact{z[j]};
      } else if (p < 0.75) {
        const double eps = 0.2 + u(rng);
        obs = mfgn::GaussianObs{z[j] + eps * (u(rng) - 0.5), eps, 0.0};
      } else if (p < 0.85) {
        obs = mfgn::Interval{z[j] - u(rng), z[j] + u(rng)};
      }
    }
    if (u(rng) < 0.2 && !m.schema()[0].is_symbolic() && !mfgn::is_missing(ev.conjunctions[0].observations[0])) {
      mfgn::Conjunction alt = ev.conjunctions[0];
      alt.observations[0] = mfgn::Exact{z[0] + 1.0};
      alt.weight = 0.3;
      ev.conjunctions[0].weight = 0.7;
      ev.conjunctions.push_back(alt);
    }
    t.rows.push_back(std::move(ev));
  }
  return t;
}

}  // namespace fixtures
