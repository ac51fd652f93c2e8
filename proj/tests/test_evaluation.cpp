// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>

#include "mfgn/evaluation.hpp"
#include "mfgn/inference.hpp"
#include "support/fixtures.hpp"

TEST_CASE("serial and parallel evaluation agree exactly") {
  const mfgn::Model m = fixtures::iris_model();
  const mfgn::TrainingTable t = fixtures::iris_data();
  const std::vector<std::size_t> targets{4, 2};
  mfgn::EvalOptions serial;
  serial.parallel = false;
  serial.reject_above = 0.2;
  mfgn::EvalOptions parallel = serial;
  parallel.parallel = true;
  const auto a = mfgn::evaluate(m, t, targets, serial);
  const auto b = mfgn::evaluate(m, t, targets, parallel);
  REQUIRE(a.targets.size() == 2);
  for (std::size_t q = 0; q < 2; ++q) {
    CHECK(a.targets[q].error == b.targets[q].error);
    CHECK(a.targets[q].scored == b.targets[q].scored);
    CHECK(a.targets[q].rejected == b.targets[q].rejected);
  }
  CHECK(a.mean_log_likelihood == b.mean_log_likelihood);
}

TEST_CASE("targets are hidden before prediction") {
  const mfgn::Model m = fixtures::iris_model();
  mfgn::TrainingTable t = fixtures::iris_data();
  const auto before = mfgn::predict_rows(m, t, {4, 0});
  for (auto& r : t.rows) {
    r.conjunctions[0].observations[4] = mfgn::Exact{0};
    r.conjunctions[0].observations[0] = mfgn::Exact{100};
  }
  const auto after = mfgn::predict_rows(m, t, {4, 0});
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (std::size_t q = 0; q < 2; ++q) {
      REQUIRE(before[k].estimates[q].has_value());
      CHECK(*before[k].estimates[q] == *after[k].estimates[q]);
    }
  }
}

TEST_CASE("metrics match a direct computation") {
  const mfgn::Model m = fixtures::iris_model();
  const mfgn::TrainingTable t = fixtures::iris_data();
  const auto res = mfgn::evaluate(m, t, {4, 3});
  const std::vector<std::size_t> hidden{4, 3};
  double wrong = 0.0, sq = 0.0;
  for (const auto& row : t.rows) {
    mfgn::Evidence ev = mfgn::hide_attributes(mfgn::TrainingTable{t.schema, {row}}, {4, 3}).rows[0];
    const auto post = mfgn::posterior(m, ev, hidden);
    const auto u = std::get<mfgn::SymbolicEstimate>(mfgn::estimate(post, 4));
    const auto w = std::get<mfgn::ContinuousEstimate>(mfgn::estimate(post, 3));
    wrong += double(u.choice) != std::get<mfgn::Exact>(row.conjunctions[0].observations[4]).value;
    const double d = w.mean - std::get<mfgn::Exact>(row.conjunctions[0].observations[3]).value;
    sq += d * d;
  }
  CHECK(res.rows == 150);
  CHECK(res.targets[0].symbolic);
  CHECK(res.targets[0].scored == 150);
  CHECK(res.targets[0].error == doctest::Approx(wrong / 150.0));
  CHECK(res.targets[0].error < 0.1);
  CHECK(res.targets[1].error == doctest::Approx(std::sqrt(sq / 150.0)));
  CHECK(std::isfinite(res.mean_log_likelihood));
}

TEST_CASE("rejection and contradictory rows") {
  const mfgn::Model m = fixtures::iris_model();
  const mfgn::TrainingTable t = fixtures::iris_data();
  mfgn::EvalOptions strict;
  strict.reject_above = 0.0;
  const auto all_rejected = mfgn::evaluate(m, t, {4}, strict);
  CHECK(all_rejected.targets[0].scored == 150);
  CHECK(all_rejected.targets[0].rejected < 150);
  CHECK(all_rejected.targets[0].rejected > 0);

  // a row no component can produce
  const mfgn::Schema s({fixtures::continuous("x"), fixtures::symbolic("a", {"p", "q"}),
                        fixtures::symbolic("b", {"p", "q"})});
  const mfgn::Model two(s, {{0.5, {mfgn::GeneralizedNormal{0, 1}, mfgn::SymbolicMarginal{{1, 0}},
                                   mfgn::SymbolicMarginal{{1, 0}}}},
                            {0.5, {mfgn::GeneralizedNormal{3, 1}, mfgn::SymbolicMarginal{{0, 1}},
                                   mfgn::SymbolicMarginal{{0, 1}}}}});
  const auto rows = mfgn::exact_table(s, {{0.5, 0, 0}, {1.0, 0, 1}, {2.5, 1, 1}});
  const auto res = mfgn::evaluate(two, rows, {0});
  CHECK(res.targets[0].failed == 1);
  CHECK(res.targets[0].scored == 3);
  CHECK(res.zero_rows == 1);
  CHECK(res.mean_log_likelihood == -INFINITY);
  const auto sym = mfgn::evaluate(two, rows, {1});
  // hiding a resolves the contradiction; b then decides a
  CHECK(sym.targets[0].failed == 0);
  CHECK(sym.targets[0].error == doctest::Approx(1.0 / 3.0));
}
