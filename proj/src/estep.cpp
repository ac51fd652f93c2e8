// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/estep.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "mfgn/error.hpp"
#include "mfgn/inference.hpp"

namespace mfgn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void add(std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
}

}  // namespace

SufficientStats::SufficientStats(const Schema& schema, std::size_t components)
    : components_(components), attributes_(schema.size()) {
  cat_offset_.resize(attributes_);
  for (std::size_t j = 0; j < attributes_; ++j) {
    cat_offset_[j] = cat_total_;
    cat_total_ += schema[j].category_count();
  }
  resp_.assign(components_, 0.0);
  observed_.assign(components_ * attributes_, 0.0);
  first_.assign(components_ * attributes_, 0.0);
  second_.assign(components_ * attributes_, 0.0);
  cat_.assign(components_ * cat_total_, 0.0);
}

void SufficientStats::merge(const SufficientStats& other) {
  add(resp_, other.resp_);
  add(observed_, other.observed_);
  add(first_, other.first_);
  add(second_, other.second_);
  add(cat_, other.cat_);
  log_likelihood += other.log_likelihood;
  rows += other.rows;
  if (!zero_row && other.zero_row) zero_row = other.zero_row;
}

void accumulate_row(const Model& model, const Evidence& row, std::size_t row_index, EStepForm form,
                    SufficientStats& stats) {
  const Schema& schema = model.schema();
  const std::size_t l = model.size();
  const std::size_t n = schema.size();
  const std::size_t R = row.conjunctions.size();

  if (form == EStepForm::GaussianNoise && R != 1) {
    throw UnsupportedError("gaussian-noise E step needs single-conjunction rows (row " + std::to_string(row_index + 1) +
                           ")");
  }

  std::vector<double> log_terms(l * R);
  for (std::size_t i = 0; i < l; ++i) {
    const double lp = std::log(model[i].weight);
    for (std::size_t r = 0; r < R; ++r) {
      const Conjunction& c = row.conjunctions[r];
      double lt = lp + std::log(c.weight);
      for (std::size_t j = 0; j < n && lt > -kInf; ++j) {
        lt += log_elementary_likelihood(model[i].marginals[j], c.observations[j]);
      }
      log_terms[i * R + r] = lt;
    }
  }
  const double ll = log_sum_exp(log_terms);
  ++stats.rows;
  if (!(ll > -kInf)) {
    stats.log_likelihood = -kInf;
    if (!stats.zero_row) stats.zero_row = row_index;
    return;
  }
  stats.log_likelihood += ll;

  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t r = 0; r < R; ++r) {
      const double q = std::exp(log_terms[i * R + r] - ll);
      if (q == 0.0) continue;
      stats.responsibility(i) += q;
      const Conjunction& c = row.conjunctions[r];
      for (std::size_t j = 0; j < n; ++j) {
        const Observation& o = c.observations[j];
        if (is_missing(o)) continue;
        const Marginal& m = model[i].marginals[j];
        stats.observed(i, j) += q;
        if (schema[j].is_symbolic()) {
          const auto psi = std::get<SymbolicPsi>(modified_marginal(m, o));
          for (std::size_t w = 0; w < psi.probs.size(); ++w) stats.category(i, j, w) += q * psi.probs[w];
          continue;
        }
        if (form == EStepForm::GaussianNoise) {
          const auto& base = std::get<GeneralizedNormal>(m);
          double z = 0.0;
          double z2 = 0.0;
          if (const auto* e = std::get_if<Exact>(&o)) {
            z = e->value;
            z2 = z * z;
          } else if (const auto* g = std::get_if<GaussianObs>(&o)) {
            const double s2 = base.sigma * base.sigma;
            const double gamma = s2 / (s2 + g->sigma * g->sigma);
            z = gamma * (g->center - g->bias) + (1.0 - gamma) * base.mu;
            z2 = z * z + gamma * g->sigma * g->sigma;
          } else {
            throw UnsupportedError("gaussian-noise E step accepts exact, gaussian and missing cells only (row " +
                                   std::to_string(row_index + 1) + ")");
          }
          stats.first(i, j) += q * z;
          stats.second(i, j) += q * z2;
          continue;
        }
        const PsiMoments pm = psi_moments(modified_marginal(m, o));
        stats.first(i, j) += q * pm.mean;
        stats.second(i, j) += q * pm.second;
      }
    }
  }
}

SufficientStats estep_serial(const Model& model, const TrainingTable& table, EStepForm form) {
  SufficientStats stats(model.schema(), model.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) accumulate_row(model, table.rows[k], k, form, stats);
  return stats;
}

SufficientStats estep_parallel(const Model& model, const TrainingTable& table, EStepForm form,
                               std::size_t block_rows) {
  if (block_rows == 0) throw DomainError("block size must be positive");
  const std::size_t rows = table.rows.size();
  const std::size_t blocks = (rows + block_rows - 1) / block_rows;
  std::vector<SufficientStats> partial(blocks, SufficientStats(model.schema(), model.size()));
  std::vector<std::exception_ptr> failures(blocks);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const auto ub = static_cast<std::size_t>(b);
    try {
      const std::size_t end = std::min(rows, (ub + 1) * block_rows);
      for (std::size_t k = ub * block_rows; k < end; ++k) accumulate_row(model, table.rows[k], k, form, partial[ub]);
    } catch (...) {
      failures[ub] = std::current_exception();
    }
  }
  for (const std::exception_ptr& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  SufficientStats total(model.schema(), model.size());
  for (const SufficientStats& p : partial) total.merge(p);
  return total;
}

}  // namespace mfgn
