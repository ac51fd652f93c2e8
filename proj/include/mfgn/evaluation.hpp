// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mfgn/inference.hpp"
#include "mfgn/model.hpp"
#include "mfgn/table.hpp"

namespace mfgn {

struct EvalOptions {
  /// Symbolic predictions whose error probability exceeds this are rejected.
  std::optional<double> reject_above;
  bool parallel = true;
};

/// Predictions for one row with every target hidden.
struct RowPrediction {
  /// Aligned with the targets; empty when the evidence was contradictory.
  std::vector<std::optional<Estimate>> estimates;
  /// Exact value of each target in the row, when it has one (single
  /// conjunction, Exact observation).
  std::vector<std::optional<double>> truth;
  bool zero_evidence = false;
  /// log p(S) of the full row, targets included.
  double log_likelihood = 0.0;
};

/// Per-row inference, in parallel when requested; results are in row order
/// and do not depend on the thread count.
std::vector<RowPrediction> predict_rows(const Model& model, const TrainingTable& table,
                                        const std::vector<std::size_t>& targets, const EvalOptions& options = {});

struct TargetMetric {
  std::size_t attribute = 0;
  bool symbolic = false;
  /// Symbolic: error rate among accepted rows (contradictory rows count as
  /// errors). Continuous: root mean squared error of the posterior mean.
  double error = 0.0;
  std::size_t scored = 0;    // rows with a known exact value
  std::size_t rejected = 0;  // symbolic only
  std::size_t failed = 0;    // contradictory evidence after hiding targets
};

struct EvaluationResult {
  std::vector<TargetMetric> targets;
  std::size_t rows = 0;
  /// Mean of log p(S) over rows; -inf when some row has zero likelihood.
  double mean_log_likelihood = 0.0;
  std::size_t zero_rows = 0;
};

EvaluationResult evaluate(const Model& model, const TrainingTable& table, const std::vector<std::size_t>& targets,
                          const EvalOptions& options = {});

/// The table with every observation of the given attributes replaced by Missing.
TrainingTable hide_attributes(const TrainingTable& table, const std::vector<std::size_t>& attributes);

}  // namespace mfgn
