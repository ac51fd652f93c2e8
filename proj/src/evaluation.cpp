// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/evaluation.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

Evidence hide(const Evidence& row, const std::vector<std::size_t>& attributes) {
  Evidence out = row;
  for (Conjunction& c : out.conjunctions) {
    for (std::size_t j : attributes) c.observations.at(j) = Missing{};
  }
  return out;
}

RowPrediction predict_row(const Model& model, const Evidence& row, const std::vector<std::size_t>& targets,
                          const EvalOptions& options) {
  RowPrediction p;
  p.truth.resize(targets.size());
  if (row.conjunctions.size() == 1) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (const auto* e = std::get_if<Exact>(&row.conjunctions.front().observations.at(targets[t]))) {
        p.truth[t] = e->value;
      }
    }
  }
  p.log_likelihood = log_evidence(model, row);
  try {
    const Posterior post = posterior(model, hide(row, targets), targets);
    p.estimates.reserve(targets.size());
    for (std::size_t j : targets) p.estimates.emplace_back(estimate(post, j, options.reject_above));
  } catch (const ZeroEvidenceError&) {
    p.zero_evidence = true;
    p.estimates.assign(targets.size(), std::nullopt);
  }
  return p;
}

}  // namespace

TrainingTable hide_attributes(const TrainingTable& table, const std::vector<std::size_t>& attributes) {
  TrainingTable out{table.schema, {}};
  out.rows.reserve(table.rows.size());
  for (const Evidence& row : table.rows) out.rows.push_back(hide(row, attributes));
  return out;
}

std::vector<RowPrediction> predict_rows(const Model& model, const TrainingTable& table,
                                        const std::vector<std::size_t>& targets, const EvalOptions& options) {
  if (!(table.schema == model.schema())) throw SchemaError("table schema does not match the model schema");
  if (targets.empty()) throw SchemaError("evaluation needs at least one target attribute");
  for (std::size_t j : targets) {
    if (j >= model.schema().size()) throw SchemaError("target attribute index out of range");
  }
  check_table(table);

  const std::size_t n = table.rows.size();
  std::vector<RowPrediction> out(n);
  std::vector<std::exception_ptr> failures(n);
#pragma omp parallel for schedule(dynamic, 8) if (options.parallel)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    try {
      out[uk] = predict_row(model, table.rows[uk], targets, options);
    } catch (...) {
      failures[uk] = std::current_exception();
    }
  }
  for (const std::exception_ptr& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

EvaluationResult evaluate(const Model& model, const TrainingTable& table, const std::vector<std::size_t>& targets,
                          const EvalOptions& options) {
  const std::vector<RowPrediction> preds = predict_rows(model, table, targets, options);
  EvaluationResult result;
  result.rows = preds.size();

  double ll = 0.0;
  for (const RowPrediction& p : preds) {
    if (std::isinf(p.log_likelihood)) ++result.zero_rows;
    ll += p.log_likelihood;
  }
  result.mean_log_likelihood = preds.empty() ? 0.0 : ll / static_cast<double>(preds.size());

  for (std::size_t t = 0; t < targets.size(); ++t) {
    TargetMetric m;
    m.attribute = targets[t];
    m.symbolic = model.schema()[targets[t]].is_symbolic();
    double loss = 0.0;
    std::size_t counted = 0;
    for (const RowPrediction& p : preds) {
      if (!p.truth[t]) continue;
      ++m.scored;
      if (p.zero_evidence) {
        ++m.failed;
        if (m.symbolic) {
          loss += 1.0;
          ++counted;
        }
        continue;
      }
      if (m.symbolic) {
        const auto& e = std::get<SymbolicEstimate>(*p.estimates[t]);
        if (e.rejected) {
          ++m.rejected;
          continue;
        }
        loss += static_cast<double>(e.choice) == *p.truth[t] ? 0.0 : 1.0;
      } else {
        const double d = std::get<ContinuousEstimate>(*p.estimates[t]).mean - *p.truth[t];
        loss += d * d;
      }
      ++counted;
    }
    if (counted > 0) {
      m.error = loss / static_cast<double>(counted);
      if (!m.symbolic) m.error = std::sqrt(m.error);
    } else {
      m.error = std::numeric_limits<double>::quiet_NaN();
    }
    result.targets.push_back(m);
  }
  return result;
}

}  // namespace mfgn
