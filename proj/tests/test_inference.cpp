// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mfgn/error.hpp"
#include "mfgn/inference.hpp"
#include "mfgn/query.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

const std::vector<std::size_t> kAll{0, 1, 2, 3, 4};

mfgn::Posterior iris_posterior(const std::string& query, const std::vector<std::size_t>& targets = kAll) {
  const mfgn::Model m = fixtures::iris_model();
  return mfgn::posterior(m, mfgn::parse_evidence(query, m.schema()), targets);
}

mfgn::ContinuousEstimate cont(const mfgn::Posterior& p, std::size_t j) {
  return std::get<mfgn::ContinuousEstimate>(mfgn::estimate(p, j));
}

mfgn::SymbolicEstimate sym(const mfgn::Posterior& p, std::size_t j, std::optional<double> reject = {}) {
  return std::get<mfgn::SymbolicEstimate>(mfgn::estimate(p, j, reject));
}

// mean and the printed half-width (two standard deviations)
void check_band(const mfgn::ContinuousEstimate& e, double mean, double band, double tol) {
  CHECK(std::abs(e.mean - mean) <= tol);
  CHECK(std::abs(2 * e.std - band) <= tol);
}

}  // namespace

TEST_CASE("elementary likelihoods") {
  const mfgn::Model m = fixtures::iris_model();
  CHECK(mfgn::elementary_likelihood(m[3].marginals[2], mfgn::GaussianObs{1, 1.5, 0}) ==
        doctest::Approx(0.2535).epsilon(2e-4 / 0.2535));
  CHECK(mfgn::elementary_likelihood(m[1].marginals[4], mfgn::SymbolicDist{{0.5, 0.5, 0}}) ==
        doctest::Approx(0.465).epsilon(1e-12));
  CHECK(mfgn::elementary_likelihood(m[0].marginals[2], mfgn::Exact{5}) ==
        doctest::Approx(oracle::normal_pdf(5, 6.17, 0.45)).epsilon(1e-12));
  CHECK(mfgn::elementary_likelihood(m[0].marginals[2], mfgn::Exact{5}) == doctest::Approx(0.0302).epsilon(1e-4 / 0.0302));
  for (const auto& c : m.components()) {
    for (const auto& mg : c.marginals) CHECK(mfgn::elementary_likelihood(mg, mfgn::Missing{}) == 1.0);
  }
  // bias shifts the measurement: p(s | z) = N(s; z + bias, eps)
  const mfgn::Marginal g = mfgn::GeneralizedNormal{0, 1};
  CHECK(mfgn::elementary_likelihood(g, mfgn::GaussianObs{2, 1, 0.5}) ==
        doctest::Approx(oracle::normal_pdf(1.5, 0, std::sqrt(2.0))).epsilon(1e-13));
  // the same through quadrature of the likelihood times the marginal
  const double q = oracle::integrate(
      [](double z) { return oracle::normal_pdf(2, z + 0.5, 1) * oracle::normal_pdf(z, 0, 1); }, -40, 40);
  CHECK(mfgn::elementary_likelihood(g, mfgn::GaussianObs{2, 1, 0.5}) == doctest::Approx(q).epsilon(1e-12));
  CHECK_THROWS_AS(mfgn::elementary_likelihood(g, mfgn::SymbolicDist{{1}}), mfgn::SchemaError);
}

TEST_CASE("interval likelihood equals quadrature of the marginal") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int k = 0; k < 200; ++k) {
    const double mu = u(rng), sigma = std::exp(u(rng) / 3), a = u(rng), b = a + std::abs(u(rng));
    const double expected = oracle::integrate([&](double x) { return oracle::normal_pdf(x, mu, sigma); }, a, b);
    const double got = mfgn::elementary_likelihood(mfgn::GeneralizedNormal{mu, sigma}, mfgn::Interval{a, b});
    CHECK(std::abs(got - expected) <= 1e-8);
  }
}

TEST_CASE("modified marginals") {
  const auto psi = std::get<mfgn::ContinuousPsi>(
      mfgn::modified_marginal(mfgn::GeneralizedNormal{0, 1}, mfgn::GaussianObs{2, 1, 0}));
  CHECK(psi.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(psi.sd == doctest::Approx(0.7071068).epsilon(1e-7));
  // normalized product of likelihood and marginal, by quadrature
  auto f = [](double z) { return oracle::normal_pdf(2, z + 0.3, 0.8) * oracle::normal_pdf(z, -1, 1.7); };
  const double mass = oracle::integrate(f, -40, 40);
  const double mean = oracle::integrate([&](double z) { return z * f(z); }, -40, 40) / mass;
  const double m2 = oracle::integrate([&](double z) { return z * z * f(z); }, -40, 40) / mass;
  const auto p2 = std::get<mfgn::ContinuousPsi>(
      mfgn::modified_marginal(mfgn::GeneralizedNormal{-1, 1.7}, mfgn::GaussianObs{2, 0.8, 0.3}));
  CHECK(p2.mean == doctest::Approx(mean).epsilon(1e-10));
  CHECK(p2.sd == doctest::Approx(std::sqrt(m2 - mean * mean)).epsilon(1e-9));

  CHECK(mfgn::modified_marginal(mfgn::GeneralizedNormal{3, 2}, mfgn::Missing{}) ==
        mfgn::Psi{mfgn::ContinuousPsi{3, 2}});
  CHECK(mfgn::modified_marginal(mfgn::GeneralizedNormal{3, 2}, mfgn::Exact{4}) == mfgn::Psi{mfgn::ContinuousPsi{4, 0}});
  const auto s = std::get<mfgn::SymbolicPsi>(
      mfgn::modified_marginal(mfgn::SymbolicMarginal{{0.2, 0.3, 0.5}}, mfgn::SymbolicDist{{0.5, 0.5, 0}}));
  CHECK(s.probs[0] == doctest::Approx(0.4));
  CHECK(s.probs[1] == doctest::Approx(0.6));
  CHECK(s.probs[2] == 0.0);
  const auto t = std::get<mfgn::TruncatedPsi>(mfgn::modified_marginal(mfgn::GeneralizedNormal{0, 1}, mfgn::Interval{0, 1}));
  CHECK(t.mass == doctest::Approx(mfgn::interval_mass({0, 1}, 0, 1)));
  // truncated moments by quadrature
  const auto mom = mfgn::psi_moments(t);
  const double tm = oracle::integrate([](double z) { return z * oracle::normal_pdf(z, 0, 1); }, 0, 1) / t.mass;
  const double t2 = oracle::integrate([](double z) { return z * z * oracle::normal_pdf(z, 0, 1); }, 0, 1) / t.mass;
  CHECK(mom.mean == doctest::Approx(tm).epsilon(1e-12));
  CHECK(mom.second == doctest::Approx(t2).epsilon(1e-12));
}

TEST_CASE("truncated moments far in the tails") {
  for (double lo : {5.0, 10.0, 30.0}) {
    const auto t = mfgn::truncated_moments({0, 1}, lo, lo + 1);
    auto w = [&](double z) { return std::exp(-0.5 * (z * z - lo * lo)); };  // rescaled to avoid underflow
    const double mass = oracle::integrate(w, lo, lo + 1);
    const double mean = oracle::integrate([&](double z) { return z * w(z); }, lo, lo + 1) / mass;
    const double m2 = oracle::integrate([&](double z) { return z * z * w(z); }, lo, lo + 1) / mass;
    CHECK(t.mean == doctest::Approx(mean).epsilon(1e-9));
    CHECK(t.variance == doctest::Approx(m2 - mean * mean).epsilon(1e-6));
    const auto mirrored = mfgn::truncated_moments({0, 1}, -lo - 1, -lo);
    CHECK(mirrored.mean == doctest::Approx(-t.mean));
    CHECK(mirrored.variance == doctest::Approx(t.variance));
  }
}

TEST_CASE("iris inference cases") {
  SUBCASE("petal length exactly 5") {
    const auto p = iris_posterior("z = 5");
    const auto alpha = mfgn::component_weights(p, 6);
    const double expected[] = {.020, .001, .224, 0, 0, .755};
    for (int i = 0; i < 6; ++i) CHECK(std::abs(alpha[i] - expected[i]) <= 0.0015);
    check_band(cont(p, 0), 6.2, 0.9, 0.1);
    check_band(cont(p, 1), 2.8, 0.6, 0.1);
    check_band(cont(p, 3), 1.8, 0.6, 0.1);
    const auto z = cont(p, 2);
    CHECK(z.mean == 5.0);
    CHECK(z.std == 0.0);
    const auto u = sym(p, 4);
    CHECK(std::abs(u.q[1] - 0.22) <= 0.03);
    CHECK(std::abs(u.q[2] - 0.78) <= 0.03);
    CHECK(u.choice == 2);
    CHECK(u.error_prob == doctest::Approx(1 - u.q[2]));
  }
  SUBCASE("exact sepal length and class") {
    const auto p = iris_posterior("x ~ 5.5 +- 0 AND U = U2");
    check_band(cont(p, 1), 2.6, 0.6, 0.1);
    check_band(cont(p, 2), 4.0, 0.8, 0.1);
    check_band(cont(p, 3), 1.3, 0.4, 0.1);
    CHECK(sym(p, 4).q[1] == doctest::Approx(1.0));
  }
  SUBCASE("uncertain sepal length") {
    const auto p = iris_posterior("x ~ 7 +- 1");
    check_band(cont(p, 0), 6.7, 0.9, 0.1);
    check_band(cont(p, 1), 3.0, 0.7, 0.1);
    check_band(cont(p, 2), 5.3, 1.8, 0.1);
    check_band(cont(p, 3), 1.8, 0.8, 0.1);
    CHECK(std::abs(sym(p, 4).q[1] - 0.36) <= 0.03);
    CHECK(std::abs(sym(p, 4).q[2] - 0.63) <= 0.03);
  }
  SUBCASE("two uncertain attributes") {
    const auto p = iris_posterior("x ~ 7 +- 1 AND w ~ 1 +- 0.5");
    check_band(cont(p, 0), 6.5, 0.7, 0.1);
    check_band(cont(p, 1), 2.9, 0.6, 0.1);
    check_band(cont(p, 2), 4.5, 0.8, 0.1);
    check_band(cont(p, 3), 1.3, 0.3, 0.1);
    CHECK(std::abs(sym(p, 4).q[1] - 0.95) <= 0.03);
  }
  SUBCASE("structured query") {
    const auto p = iris_posterior("(z ~ 1 +- 3 OR z ~ 7 +- 3) AND U = {U1:0.5, U2:0.5}");
    check_band(cont(p, 0), 5.3, 1.2, 0.1);
    check_band(cont(p, 1), 3.3, 0.9, 0.1);
    check_band(cont(p, 3), 0.5, 1.0, 0.1);
    // printed as "2 ± 3": one significant figure
    const auto z = cont(p, 2);
    CHECK(std::abs(z.mean - 2.0) <= 0.5);
    CHECK(std::abs(2 * z.std - 3.0) <= 0.5);
    CHECK(std::abs(sym(p, 4).q[0] - 0.75) <= 0.03);
    CHECK(std::abs(sym(p, 4).q[1] - 0.25) <= 0.03);
  }
}

TEST_CASE("elementary likelihood table of the structured query") {
  const mfgn::Model m = fixtures::iris_model();
  const double z1[] = {.001, .045, .016, .254, .250, .006};
  const double z2[] = {.221, .032, .074, 3e-4, 4e-4, .132};
  const double u[] = {0, .47, .50, .50, .50, 0};
  const double prod1[] = {0, .02, .01, .13, .13, 0};
  const double prod2[] = {0, .02, .04, .00, .00, 0};
  const mfgn::Observation half{mfgn::SymbolicDist{{0.5, 0.5, 0}}};
  for (std::size_t i = 0; i < 6; ++i) {
    const double b1 = mfgn::elementary_likelihood(m[i].marginals[2], mfgn::GaussianObs{1, 1.5, 0});
    const double b2 = mfgn::elementary_likelihood(m[i].marginals[2], mfgn::GaussianObs{7, 1.5, 0});
    const double bu = mfgn::elementary_likelihood(m[i].marginals[4], half);
    CHECK(std::abs(b1 - z1[i]) <= 0.01);
    CHECK(std::abs(b2 - z2[i]) <= 0.01);
    CHECK(std::abs(bu - u[i]) <= 0.01);
    CHECK(std::abs(b1 * bu - prod1[i]) <= 0.01);
    CHECK(std::abs(b2 * bu - prod2[i]) <= 0.01);
  }
}

TEST_CASE("posterior edge cases") {
  const mfgn::Model m = fixtures::iris_model();
  const auto none = mfgn::posterior(m, mfgn::no_evidence(m.schema()), kAll);
  const auto alpha = mfgn::component_weights(none, 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(alpha[i] == doctest::Approx(m[i].weight).epsilon(1e-14));
  CHECK(none.log_evidence == doctest::Approx(0.0).scale(1));
  const auto mom = mfgn::marginal_moments(m, 0);
  CHECK(mfgn::moment(none, 0, 1) == doctest::Approx(mom.mean).epsilon(1e-14));
  CHECK(mfgn::moment(none, 0, 2) == doctest::Approx(mom.variance + mom.mean * mom.mean).epsilon(1e-14));
  CHECK(mfgn::moment(none, 0, 1) == cont(none, 0).mean);

  // a category no component supports
  mfgn::Schema s({fixtures::symbolic("w", {"a", "b"}), fixtures::continuous("x")});
  mfgn::Model z(s, {{1.0, {mfgn::SymbolicMarginal{{1, 0}}, mfgn::GeneralizedNormal{0, 1}}}});
  const std::vector<std::size_t> x{1};
  CHECK_THROWS_AS(mfgn::posterior(z, mfgn::parse_evidence("w = b", s), x), mfgn::ZeroEvidenceError);
  CHECK(mfgn::log_evidence(z, mfgn::parse_evidence("w = b", s)) == -std::numeric_limits<double>::infinity());

  // prior mixture mean of the synthetic domain
  const mfgn::Model t = fixtures::synthetic_truth();
  const std::vector<std::size_t> tx{0};
  CHECK(cont(mfgn::posterior(t, mfgn::no_evidence(t.schema()), tx), 0).mean == doctest::Approx(1.0).epsilon(1e-15));

  // interval on a continuous target: no MSE estimate, but a density
  const auto p = iris_posterior("z in [4, 5]");
  CHECK_THROWS_AS(mfgn::estimate(p, 2), mfgn::UnsupportedError);
  CHECK_THROWS_AS(mfgn::moment(p, 2, 1), mfgn::UnsupportedError);
  CHECK(mfgn::posterior_pdf(p, 2, 3.9) == 0.0);
  CHECK(mfgn::posterior_pdf(p, 2, 4.5) > 0.0);
  CHECK_NOTHROW(mfgn::estimate(p, 0));
  CHECK_THROWS_AS(mfgn::estimate(p, 2 + 10), mfgn::Error);
}

TEST_CASE("EP ties, rejection and entropy") {
  mfgn::Schema s({fixtures::symbolic("c", {"a", "b", "c"})});
  mfgn::Model m(s, {{1.0, {mfgn::SymbolicMarginal{{0.4, 0.4, 0.2}}}}});
  const std::vector<std::size_t> t{0};
  const auto p = mfgn::posterior(m, mfgn::no_evidence(s), t);
  const auto e = sym(p, 0, 0.5);
  CHECK(e.choice == 0);
  CHECK(e.error_prob == doctest::Approx(0.6));
  CHECK(e.rejected);
  CHECK_FALSE(sym(p, 0, 0.7).rejected);
  CHECK_FALSE(sym(p, 0).rejected);
  CHECK(e.entropy == doctest::Approx(-(2 * 0.4 * std::log(0.4) + 0.2 * std::log(0.2))));
}

TEST_CASE("posterior properties on random models") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const mfgn::Model m = fixtures::random_model(rng);
    const mfgn::Schema& s = m.schema();
    mfgn::Evidence ev = fixtures::random_evidence(rng, s);
    std::vector<std::size_t> targets(s.size());
    std::iota(targets.begin(), targets.end(), std::size_t{0});
    mfgn::PosteriorOptions keep_all;
    keep_all.prune_below = 0.0;
    const double lev = mfgn::log_evidence(m, ev);
    if (!std::isfinite(lev)) continue;
    const auto p = mfgn::posterior(m, ev, targets, keep_all);
    double total = 0.0;
    for (const auto& term : p.terms) total += term.weight;
    CHECK(std::abs(total - 1.0) <= 1e-9);

    // direct evaluation of the evidence through quadrature-free sums
    double direct = 0.0;
    for (const auto& c : ev.conjunctions) {
      for (const auto& comp : m.components()) {
        double b = c.weight * comp.weight;
        for (std::size_t j = 0; j < s.size(); ++j) b *= mfgn::elementary_likelihood(comp.marginals[j], c.observations[j]);
        direct += b;
      }
    }
    CHECK(lev == doctest::Approx(std::log(direct)).epsilon(1e-12));

    // scaling every conjunction weight changes nothing
    mfgn::Evidence scaled = ev;
    for (auto& c : scaled.conjunctions) c.weight *= 37.5;
    const auto ps = mfgn::posterior(m, scaled, targets, keep_all);
    REQUIRE(ps.terms.size() == p.terms.size());
    for (std::size_t k = 0; k < p.terms.size(); ++k) {
      CHECK(std::abs(ps.terms[k].weight - p.terms[k].weight) <= 1e-12);
      CHECK(ps.terms[k].psi == p.terms[k].psi);
    }
    for (std::size_t j : targets) {
      const auto a = mfgn::estimate(p, j);
      const auto b = mfgn::estimate(ps, j);
      if (const auto* ca = std::get_if<mfgn::ContinuousEstimate>(&a)) {
        CHECK(std::abs(ca->mean - std::get<mfgn::ContinuousEstimate>(b).mean) <= 1e-12 * std::max(1.0, std::abs(ca->mean)));
        CHECK(std::abs(ca->std - std::get<mfgn::ContinuousEstimate>(b).std) <= 1e-12 * std::max(1.0, ca->std));
      } else {
        const auto& qa = std::get<mfgn::SymbolicEstimate>(a).q;
        const auto& qb = std::get<mfgn::SymbolicEstimate>(b).q;
        for (std::size_t w = 0; w < qa.size(); ++w) CHECK(std::abs(qa[w] - qb[w]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("a single conjunction posterior matches its split form") {
  // One conjunction r, versus the same conjunction twice at half weight.
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const mfgn::Model m = fixtures::random_model(rng);
    mfgn::Evidence ev = fixtures::random_evidence(rng, m.schema());
    ev.conjunctions.resize(1);
    if (!std::isfinite(mfgn::log_evidence(m, ev))) continue;
    mfgn::Evidence twice = ev;
    twice.conjunctions.push_back(ev.conjunctions[0]);
    std::vector<std::size_t> targets(m.schema().size());
    std::iota(targets.begin(), targets.end(), std::size_t{0});
    const auto a = mfgn::posterior(m, ev, targets);
    const auto b = mfgn::posterior(m, twice, targets);
    const auto wa = mfgn::component_weights(a, m.size());
    const auto wb = mfgn::component_weights(b, m.size());
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(wa[i] - wb[i]) <= 1e-12);
  }
}

TEST_CASE("exact evidence reproduces the conditional component weights") {
  const mfgn::Model m = fixtures::iris_model();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 7.5);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = u(rng), z = u(rng);
    mfgn::Evidence ev = mfgn::no_evidence(m.schema());
    ev.conjunctions[0].observations[0] = mfgn::Exact{x};
    ev.conjunctions[0].observations[2] = mfgn::Exact{z};
    const std::vector<std::size_t> t{1};
    mfgn::PosteriorOptions keep_all;
    keep_all.prune_below = 0.0;
    if (!std::isfinite(mfgn::log_evidence(m, ev))) continue;
    const auto alpha = mfgn::component_weights(mfgn::posterior(m, ev, t, keep_all), 6);
    std::vector<double> w(6);
    double total = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      const auto& gx = std::get<mfgn::GeneralizedNormal>(m[i].marginals[0]);
      const auto& gz = std::get<mfgn::GeneralizedNormal>(m[i].marginals[2]);
      w[i] = m[i].weight * oracle::normal_pdf(x, gx.mu, gx.sigma) * oracle::normal_pdf(z, gz.mu, gz.sigma);
      total += w[i];
    }
    if (!(total > 1e-250)) continue;
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(alpha[i] - w[i] / total) <= 1e-12);
  }
}

TEST_CASE("posterior density integrates to one and matches the moments") {
  std::mt19937_64 rng(101);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const mfgn::Model m = fixtures::random_model(rng);
    const mfgn::Evidence ev = fixtures::random_evidence(rng, m.schema(), true);
    if (!std::isfinite(mfgn::log_evidence(m, ev))) continue;
    for (std::size_t j = 0; j < m.schema().size(); ++j) {
      const std::vector<std::size_t> t{j};
      const auto p = mfgn::posterior(m, ev, t);
      if (m.schema()[j].is_symbolic()) {
        double total = 0.0;
        for (std::size_t k = 0; k < m.schema()[j].category_count(); ++k) total += mfgn::posterior_pdf(p, j, double(k));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        continue;
      }
      std::vector<std::pair<double, double>> bumps;
      bool has_impulse = false;
      for (const auto& term : p.terms) {
        const auto mom = mfgn::psi_moments(term.psi[0]);
        const double sd = std::sqrt(std::max(mom.second - mom.mean * mom.mean, 0.0));
        has_impulse = has_impulse || sd == 0.0;
        bumps.emplace_back(mom.mean, sd);
        if (const auto* tr = std::get_if<mfgn::TruncatedPsi>(&term.psi[0])) {
          bumps.emplace_back(std::max(tr->lo, -1e3), 0.0);
          bumps.emplace_back(std::min(tr->hi, 1e3), 0.0);
        }
      }
      if (has_impulse) continue;  // impulses carry mass the density cannot show
      auto f = [&](double x) { return mfgn::posterior_pdf(p, j, x); };
      const auto cuts = oracle::bump_cuts(bumps, 40.0);
      const double mass = oracle::integrate_pieces(f, cuts, 1e-10);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
      const double m1 = oracle::integrate_pieces([&](double x) { return x * f(x); }, cuts, 1e-10);
      const double m2 = oracle::integrate_pieces([&](double x) { return x * x * f(x); }, cuts, 1e-10);
      double mean = 0.0, second = 0.0;
      for (const auto& term : p.terms) {
        const auto mom = mfgn::psi_moments(term.psi[0]);
        mean += term.weight * mom.mean;
        second += term.weight * mom.second;
      }
      CHECK(std::abs(mean - m1) <= 1e-6 * std::max(1.0, std::abs(m1)));
      CHECK(std::abs(second - m2) <= 1e-6 * std::max(1.0, std::abs(m2)));
      ++checked;
    }
  }
  CHECK(checked > 40);
}

TEST_CASE("posterior mean agrees with rejection sampling") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 10; ++trial) {
    const mfgn::Model m = fixtures::random_model(rng, 2, 3);
    mfgn::Schema s = m.schema();
    // one gaussian measurement on attribute 0 (or a category likelihood)
    mfgn::Evidence ev = mfgn::no_evidence(s);
    if (s[0].is_symbolic()) {
      std::vector<double> probs(s[0].category_count(), 0.1);
      probs[0] = 1.0 - 0.1 * static_cast<double>(probs.size() - 1);
      ev.conjunctions[0].observations[0] = mfgn::SymbolicDist{probs};
    } else {
      ev.conjunctions[0].observations[0] = mfgn::GaussianObs{0.5, 1.0, 0.0};
    }
    const std::size_t target = s.size() - 1;
    if (s[target].is_symbolic()) continue;
    const std::vector<std::size_t> t{target};
    const double mean = cont(mfgn::posterior(m, ev, t), target).mean;
    // accept each prior draw with probability p(s | z) / max p(s | z)
    const auto draws = mfgn::sample(m, 500 + trial, 200000);
    std::mt19937_64 accept_rng(9);
    std::uniform_real_distribution<double> unit(0, 1);
    double sum = 0.0, sum2 = 0.0, n = 0.0;
    for (const auto& z : draws) {
      const double lik = mfgn::observation_likelihood(ev.conjunctions[0].observations[0], z[0]);
      const double cap = s[0].is_symbolic() ? 1.0 : oracle::normal_pdf(0, 0, 1.0);
      if (unit(accept_rng) < lik / cap) {
        sum += z[target];
        sum2 += z[target] * z[target];
        n += 1;
      }
    }
    REQUIRE(n > 1000);
    const double mc = sum / n;
    const double se = std::sqrt((sum2 / n - mc * mc) / n);
    CHECK(std::abs(mc - mean) <= 4 * se);
  }
}
