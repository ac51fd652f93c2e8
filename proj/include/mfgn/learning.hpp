// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfgn/estep.hpp"
#include "mfgn/model.hpp"
#include "mfgn/table.hpp"

namespace mfgn {

struct EmConfig {
  std::size_t components = 1;
  std::uint64_t seed = 1;
  std::size_t max_iterations = 500;
  /// Stop when |delta log-likelihood| <= tolerance * |log-likelihood|.
  double tolerance = 1e-7;
  /// Continuous variance floor is factor * (range of observed centers)^2.
  double variance_floor_factor = 1e-4;
  /// Absolute per-attribute variance floors; overrides the factor when non-empty.
  std::vector<double> variance_floors;
  /// Lower bound for every category probability (applied as a constrained M step).
  double symbolic_floor = 1e-6;
  /// Components whose weight drops below this are removed, one per iteration.
  double prune_below = 1e-3;
  /// Permit attributes with no observation anywhere in the table; they keep
  /// their initial parameters.
  bool allow_unobserved_attributes = false;
  bool parallel = true;
  std::size_t block_rows = 64;
  /// Use the gaussian-noise shortcut for the E step (see EStepForm).
  EStepForm form = EStepForm::General;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double log_likelihood = 0.0;
  /// Prune / reseed events produced by the M step that followed.
  std::vector<std::string> events;
};

struct FitReport {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  double log_likelihood = 0.0;  // of the returned model
};

struct FitResult {
  Model model;
  FitReport report;
};

/// Text report: one "iter <k> loglik <value> [events]" line per iteration,
/// then a summary line.
void write_report(std::ostream& out, const FitReport& report);

/// Variance floor per attribute (0 for symbolic attributes).
std::vector<double> variance_floors(const TrainingTable& table, const EmConfig& config);

/// Validates the table against the configuration; throws FitError.
void check_fit_input(const TrainingTable& table, const EmConfig& config);

/// Deterministic initial model: means at the observed centers of randomly
/// chosen distinct rows, sigmas at the attribute spread, category vectors at
/// smoothed empirical frequencies, uniform weights.
Model em_init(const TrainingTable& table, const EmConfig& config);

struct StepResult {
  Model model;                      // after the M step
  double log_likelihood = 0.0;      // of the input model
  std::vector<std::string> events;  // prune / reseed
};

/// One E step on `model` followed by one M step.
StepResult em_step(const Model& model, const TrainingTable& table, const EmConfig& config,
                   const std::vector<double>& floors);

/// M step from precomputed statistics, without prune or reseed.
Model m_step(const Model& model, const SufficientStats& stats, const EmConfig& config,
             const std::vector<double>& floors);

/// Extended EM. Throws FitError for degenerate input or a row that every
/// component rules out.
FitResult em_fit(const TrainingTable& table, const EmConfig& config);

/// em_fit with the gaussian-noise E step. Rows must be single conjunctions
/// of Exact, GaussianObs and Missing cells.
FitResult gaussian_noise_fit(const TrainingTable& table, EmConfig config);

struct LogLikelihood {
  double total = 0.0;
  std::vector<double> per_row;
  std::optional<std::size_t> zero_row;  // first row with zero likelihood
};

/// sum_k log sum_{i,r} P_i pi_r beta_{i,r}. A zero-likelihood row makes the
/// total -inf and is reported in zero_row.
LogLikelihood log_likelihood(const Model& model, const TrainingTable& table);

struct SelectionScore {
  std::size_t components = 0;
  bool ok = false;
  double score = 0.0;      // higher is better
  double std_error = 0.0;  // of the score
  std::string error;       // fit failure message when !ok
};

struct SelectionResult {
  std::size_t best = 0;
  std::vector<SelectionScore> scores;
};

struct SelectionOptions {
  /// Held-out rows; when empty, `folds`-fold cross-validation on the table.
  std::optional<TrainingTable> validation;
  std::size_t folds = 5;
  /// Score by task error on this attribute (classification error or RMS,
  /// negated) instead of held-out mean log-likelihood.
  std::optional<std::size_t> target;
};

/// Fits each l with seed `base.seed + l` and scores it. The choice is the
/// smallest l whose score is within one standard error of the best.
SelectionResult select_components(const TrainingTable& table, const std::vector<std::size_t>& l_range,
                                  const EmConfig& base, const SelectionOptions& options);

}  // namespace mfgn
