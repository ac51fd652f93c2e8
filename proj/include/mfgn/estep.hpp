// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mfgn/model.hpp"
#include "mfgn/table.hpp"

namespace mfgn {

/// Responsibility-weighted sums gathered by one E step. For component i and
/// attribute j, only conjunctions with a non-Missing observation on j count.
class SufficientStats {
 public:
  SufficientStats() = default;
  SufficientStats(const Schema& schema, std::size_t components);

  std::size_t components() const noexcept { return components_; }
  std::size_t attributes() const noexcept { return attributes_; }

  /// sum_k sum_r q_{i,r}
  double& responsibility(std::size_t i) { return resp_[i]; }
  double responsibility(std::size_t i) const { return resp_[i]; }
  /// sum of q over conjunctions observing j
  double& observed(std::size_t i, std::size_t j) { return observed_[i * attributes_ + j]; }
  double observed(std::size_t i, std::size_t j) const { return observed_[i * attributes_ + j]; }
  /// sum q * E[z] and sum q * E[z^2] under psi (continuous j)
  double& first(std::size_t i, std::size_t j) { return first_[i * attributes_ + j]; }
  double first(std::size_t i, std::size_t j) const { return first_[i * attributes_ + j]; }
  double& second(std::size_t i, std::size_t j) { return second_[i * attributes_ + j]; }
  double second(std::size_t i, std::size_t j) const { return second_[i * attributes_ + j]; }
  /// sum q * psi_w (symbolic j, category w)
  double& category(std::size_t i, std::size_t j, std::size_t w) { return cat_[i * cat_total_ + cat_offset_[j] + w]; }
  double category(std::size_t i, std::size_t j, std::size_t w) const {
    return cat_[i * cat_total_ + cat_offset_[j] + w];
  }

  /// sum_k log p(S^(k)); -inf once any row has zero likelihood.
  double log_likelihood = 0.0;
  std::size_t rows = 0;
  /// First row (0-based, table order) with zero likelihood, if any.
  std::optional<std::size_t> zero_row;

  /// Adds `other`, which must cover rows that come after this one's.
  void merge(const SufficientStats& other);

 private:
  std::size_t components_ = 0;
  std::size_t attributes_ = 0;
  std::size_t cat_total_ = 0;
  std::vector<std::size_t> cat_offset_;
  std::vector<double> resp_;
  std::vector<double> observed_;
  std::vector<double> first_;
  std::vector<double> second_;
  std::vector<double> cat_;
};

/// How a row's modified marginals are formed.
enum class EStepForm {
  /// General path: any observation kind, any number of conjunctions.
  General,
  /// Gaussian-noise shortcut: gamma = sigma^2 / (sigma^2 + eps^2),
  /// z -> gamma (s - bias) + (1 - gamma) mu, z^2 -> z^2 + gamma eps^2.
  /// Rows must be single conjunctions of Exact, GaussianObs and Missing.
  GaussianNoise,
};

/// Adds one row's contribution to `stats` in a fixed order.
void accumulate_row(const Model& model, const Evidence& row, std::size_t row_index, EStepForm form,
                    SufficientStats& stats);

/// Reference E step: rows in order into a single accumulator.
SufficientStats estep_serial(const Model& model, const TrainingTable& table, EStepForm form = EStepForm::General);

/// OpenMP E step. Rows are split into fixed blocks of `block_rows`; each
/// block is accumulated serially and blocks are merged in order, so the result
/// does not depend on the thread count.
SufficientStats estep_parallel(const Model& model, const TrainingTable& table, EStepForm form = EStepForm::General,
                               std::size_t block_rows = 64);

}  // namespace mfgn
