// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/learning.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "mfgn/error.hpp"
#include "mfgn/evaluation.hpp"
#include "mfgn/inference.hpp"

namespace mfgn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Location of a continuous observation, used for initialization and ranges.
std::optional<double> center_of(const Observation& o) {
  if (const auto* e = std::get_if<Exact>(&o)) return e->value;
  if (const auto* g = std::get_if<GaussianObs>(&o)) return g->center - g->bias;
  if (const auto* iv = std::get_if<Interval>(&o)) {
    const bool flo = std::isfinite(iv->lo);
    const bool fhi = std::isfinite(iv->hi);
    if (flo && fhi) return 0.5 * (iv->lo + iv->hi);
    if (flo) return iv->lo;
    if (fhi) return iv->hi;
    return std::nullopt;
  }
  if (const auto* m = std::get_if<NormalMixtureObs>(&o)) {
    double w = 0.0;
    double s = 0.0;
    for (const auto& p : m->parts) {
      w += p.weight;
      s += p.weight * p.normal.mu;
    }
    return s / w;
  }
  return std::nullopt;
}

// Conjunction-weighted center of a row on continuous attribute j.
std::optional<double> row_center(const Evidence& row, std::size_t j) {
  double w = 0.0;
  double s = 0.0;
  for (const Conjunction& c : row.conjunctions) {
    if (const auto v = center_of(c.observations[j])) {
      w += c.weight;
      s += c.weight * *v;
    }
  }
  if (w == 0.0) return std::nullopt;
  return s / w;
}

// Conjunction-weighted category distribution of a row on symbolic attribute j.
std::optional<std::vector<double>> row_categories(const Evidence& row, std::size_t j, std::size_t K) {
  std::vector<double> d(K, 0.0);
  double w = 0.0;
  for (const Conjunction& c : row.conjunctions) {
    const Observation& o = c.observations[j];
    if (const auto* e = std::get_if<Exact>(&o)) {
      d[static_cast<std::size_t>(e->value)] += c.weight;
      w += c.weight;
    } else if (const auto* p = std::get_if<SymbolicDist>(&o)) {
      for (std::size_t k = 0; k < K; ++k) d[k] += c.weight * p->probs[k];
      w += c.weight;
    }
  }
  if (w == 0.0) return std::nullopt;
  for (double& x : d) x /= w;
  return d;
}

// Per-attribute summaries of a table.
struct Summary {
  std::vector<bool> observed;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<std::vector<double>> freq;  // smoothed, symbolic only
};

Summary summarize(const TrainingTable& table, const std::vector<double>& floors) {
  const Schema& schema = table.schema;
  Summary s;
  s.observed.assign(schema.size(), false);
  s.mean.assign(schema.size(), 0.0);
  s.sd.assign(schema.size(), 1.0);
  s.freq.resize(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_symbolic()) {
      const std::size_t K = schema[j].category_count();
      std::vector<double> counts(K, 0.0);
      double n = 0.0;
      for (const Evidence& row : table.rows) {
        if (const auto d = row_categories(row, j, K)) {
          for (std::size_t k = 0; k < K; ++k) counts[k] += (*d)[k];
          n += 1.0;
        }
      }
      s.observed[j] = n > 0.0;
      s.freq[j].resize(K);
      for (std::size_t k = 0; k < K; ++k) s.freq[j][k] = (counts[k] + 1.0) / (n + static_cast<double>(K));
      continue;
    }
    double n = 0.0;
    double sum = 0.0;
    for (const Evidence& row : table.rows) {
      if (const auto v = row_center(row, j)) {
        n += 1.0;
        sum += *v;
      }
    }
    s.observed[j] = n > 0.0;
    if (n == 0.0) continue;
    s.mean[j] = sum / n;
    double ss = 0.0;
    for (const Evidence& row : table.rows) {
      if (const auto v = row_center(row, j)) ss += (*v - s.mean[j]) * (*v - s.mean[j]);
    }
    s.sd[j] = std::max(std::sqrt(ss / n), std::sqrt(floors[j]));
    if (!(s.sd[j] > 0.0)) s.sd[j] = 1.0;
  }
  return s;
}

// Maximizes sum_w c_w log t_w subject to t_w >= floor and sum t = 1.
std::vector<double> constrained_categories(const std::vector<double>& c, double floor) {
  const std::size_t K = c.size();
  std::vector<bool> clamped(K, false);
  std::vector<double> t(K, 0.0);
  for (std::size_t pass = 0; pass <= K; ++pass) {
    double free_mass = 1.0;
    double free_count = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (clamped[k]) {
        free_mass -= floor;
      } else {
        free_count += c[k];
      }
    }
    bool changed = false;
    for (std::size_t k = 0; k < K; ++k) {
      if (clamped[k]) {
        t[k] = floor;
        continue;
      }
      t[k] = free_count > 0.0 ? free_mass * c[k] / free_count : free_mass;
      if (t[k] < floor) {
        clamped[k] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  double total = 0.0;
  for (double x : t) total += x;
  for (double& x : t) x /= total;
  return t;
}

Model with_components(const Model& model, std::vector<Component> components) {
  double total = 0.0;
  for (const Component& c : components) total += c.weight;
  for (Component& c : components) c.weight /= total;
  return Model(model.schema(), std::move(components));
}

Component seeded_component(const TrainingTable& table, const Summary& summary, const Evidence* row, double weight,
                           const EmConfig& config, bool blend_categories) {
  const Schema& schema = table.schema;
  Component c{weight, {}};
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_symbolic()) {
      const std::size_t K = schema[j].category_count();
      std::vector<double> t = summary.observed[j] ? summary.freq[j] : std::vector<double>(K, 1.0 / K);
      if (blend_categories && row != nullptr) {
        if (const auto d = row_categories(*row, j, K)) {
          for (std::size_t k = 0; k < K; ++k) t[k] = 0.5 * t[k] + 0.5 * (*d)[k];
        }
      }
      c.marginals.emplace_back(SymbolicMarginal{constrained_categories(t, config.symbolic_floor)});
      continue;
    }
    std::optional<double> mu;
    if (row != nullptr) mu = row_center(*row, j);
    c.marginals.emplace_back(GeneralizedNormal{mu.value_or(summary.mean[j]), summary.sd[j]});
  }
  return c;
}

SufficientStats run_estep(const Model& model, const TrainingTable& table, const EmConfig& config) {
  if (config.parallel) return estep_parallel(model, table, config.form, config.block_rows);
  return estep_serial(model, table, config.form);
}

std::string describe_component(std::size_t i, double weight) {
  std::ostringstream s;
  s << "component " << (i + 1) << " (weight " << format_double(weight) << ")";
  return s.str();
}

// Prune or reseed after an M step; at most one removal.
Model apply_heuristics(const Model& model, const SufficientStats& stats, const TrainingTable& table,
                       const EmConfig& config, const std::vector<double>& floors, std::size_t iteration,
                       std::vector<std::string>& events) {
  const double M = static_cast<double>(table.rows.size());
  std::vector<Component> comps(model.components().begin(), model.components().end());
  const bool may_prune = config.prune_below > 0.0 && comps.size() > 1;

  std::optional<std::size_t> remove;
  std::vector<std::size_t> reseed;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (stats.responsibility(i) >= 1e-12 * M) continue;
    if (may_prune && !remove) {
      remove = i;
    } else if (!(remove && *remove == i)) {
      reseed.push_back(i);
    }
  }
  if (!remove && may_prune) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (comps[i].weight < config.prune_below && (!remove || comps[i].weight < comps[*remove].weight)) remove = i;
    }
  }

  if (!reseed.empty()) {
    const Summary summary = summarize(table, floors);
    const LogLikelihood ll = log_likelihood(model, table);
    std::vector<std::size_t> order(table.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ll.per_row[a] < ll.per_row[b]; });
    const std::size_t worst = std::max<std::size_t>(1, order.size() / 10);
    std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (iteration + 1)));
    std::uniform_int_distribution<std::size_t> pick(0, worst - 1);
    const double w = 1.0 / static_cast<double>(comps.size());
    for (std::size_t i : reseed) {
      const std::size_t k = order[pick(rng)];
      comps[i] = seeded_component(table, summary, &table.rows[k], w, config, true);
      events.push_back("reseed " + describe_component(i, w) + " at row " + std::to_string(k + 1));
    }
  }
  if (remove) {
    events.push_back("prune " + describe_component(*remove, comps[*remove].weight));
    comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(*remove));
  }
  if (reseed.empty() && !remove) return model;
  return with_components(model, std::move(comps));
}

}  // namespace

void write_report(std::ostream& out, const FitReport& report) {
  for (const IterationRecord& r : report.iterations) {
    out << "iter " << r.iteration << " loglik " << std::setprecision(12) << r.log_likelihood;
    for (const std::string& e : r.events) out << " ; " << e;
    out << '\n';
  }
  out << (report.converged ? "converged" : "stopped") << " after " << report.iterations.size()
      << " evaluations, loglik " << std::setprecision(12) << report.log_likelihood << '\n';
}

std::vector<double> variance_floors(const TrainingTable& table, const EmConfig& config) {
  const Schema& schema = table.schema;
  if (!config.variance_floors.empty()) {
    if (config.variance_floors.size() != schema.size()) throw FitError("one variance floor per attribute expected");
    return config.variance_floors;
  }
  std::vector<double> floors(schema.size(), 0.0);
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_symbolic()) continue;
    double lo = kInf;
    double hi = -kInf;
    for (const Evidence& row : table.rows) {
      for (const Conjunction& c : row.conjunctions) {
        if (const auto v = center_of(c.observations[j])) {
          lo = std::min(lo, *v);
          hi = std::max(hi, *v);
        }
      }
    }
    const double range = hi > lo ? hi - lo : 1.0;
    floors[j] = config.variance_floor_factor * range * range;
  }
  return floors;
}

void check_fit_input(const TrainingTable& table, const EmConfig& config) {
  if (config.components < 1) throw FitError("at least one component is required");
  if (table.rows.size() < config.components) {
    throw FitError("table has " + std::to_string(table.rows.size()) + " rows, fewer than the " +
                   std::to_string(config.components) + " requested components");
  }
  if (!(config.tolerance > 0.0)) throw FitError("tolerance must be positive");
  if (config.max_iterations < 1) throw FitError("at least one iteration is required");
  if (!(config.variance_floor_factor >= 0.0) || !(config.symbolic_floor >= 0.0) || !(config.prune_below >= 0.0)) {
    throw FitError("floors and thresholds must be non-negative");
  }
  try {
    check_table(table);
  } catch (const Error& e) {
    throw FitError(e.what());
  }
  for (std::size_t j = 0; j < table.schema.size(); ++j) {
    const Attribute& a = table.schema[j];
    if (a.is_symbolic() && config.symbolic_floor * static_cast<double>(a.category_count()) > 1.0) {
      throw FitError("symbolic floor too large for attribute '" + a.name + "'");
    }
    if (config.allow_unobserved_attributes) continue;
    bool seen = false;
    for (const Evidence& row : table.rows) {
      for (const Conjunction& c : row.conjunctions) seen = seen || !is_missing(c.observations[j]);
      if (seen) break;
    }
    if (!seen) throw FitError("attribute '" + a.name + "' is missing in every row");
  }
}

Model em_init(const TrainingTable& table, const EmConfig& config) {
  check_fit_input(table, config);
  const std::vector<double> floors = variance_floors(table, config);
  const Summary summary = summarize(table, floors);
  const std::size_t l = config.components;
  const double w = 1.0 / static_cast<double>(l);
  std::vector<Component> comps;
  if (l == 1) {
    comps.push_back(seeded_component(table, summary, nullptr, 1.0, config, false));
    return Model(table.schema, std::move(comps));
  }
  // Partial Fisher-Yates: l distinct rows.
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> idx(table.rows.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < l; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    comps.push_back(seeded_component(table, summary, &table.rows[idx[i]], w, config, true));
  }
  return Model(table.schema, std::move(comps));
}

Model m_step(const Model& model, const SufficientStats& stats, const EmConfig& config,
             const std::vector<double>& floors) {
  const Schema& schema = model.schema();
  std::vector<Component> comps(model.components().begin(), model.components().end());
  double total = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) total += stats.responsibility(i);
  if (!(total > 0.0)) throw FitError("no responsibility mass; the table has no usable rows");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    Component& c = comps[i];
    c.weight = stats.responsibility(i) / total;
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const double d = stats.observed(i, j);
      if (!(d > 0.0)) continue;  // nothing observed: keep the previous marginal
      if (schema[j].is_symbolic()) {
        std::vector<double> counts(schema[j].category_count());
        for (std::size_t w = 0; w < counts.size(); ++w) counts[w] = stats.category(i, j, w);
        c.marginals[j] = SymbolicMarginal{constrained_categories(counts, config.symbolic_floor)};
        continue;
      }
      const double mu = stats.first(i, j) / d;
      const double var = std::max(stats.second(i, j) / d - mu * mu, floors[j]);
      c.marginals[j] = GeneralizedNormal{mu, std::sqrt(std::max(var, 0.0))};
    }
  }
  return Model(schema, std::move(comps));
}

StepResult em_step(const Model& model, const TrainingTable& table, const EmConfig& config,
                   const std::vector<double>& floors) {
  const SufficientStats stats = run_estep(model, table, config);
  if (stats.zero_row) {
    throw FitError("row " + std::to_string(*stats.zero_row + 1) + " has zero likelihood under the current model");
  }
  StepResult out{m_step(model, stats, config, floors), stats.log_likelihood, {}};
  out.model = apply_heuristics(out.model, stats, table, config, floors, 0, out.events);
  return out;
}

FitResult em_fit(const TrainingTable& table, const EmConfig& config) {
  check_fit_input(table, config);
  const std::vector<double> floors = variance_floors(table, config);
  Model model = em_init(table, config);
  FitReport report;
  bool events_pending = false;
  double previous = 0.0;
  for (std::size_t it = 0;; ++it) {
    const SufficientStats stats = run_estep(model, table, config);
    if (stats.zero_row) {
      throw FitError("row " + std::to_string(*stats.zero_row + 1) + " has zero likelihood under the current model");
    }
    const double ll = stats.log_likelihood;
    if (!std::isfinite(ll)) throw FitError("log-likelihood is not finite at iteration " + std::to_string(it));
    report.iterations.push_back({it, ll, {}});
    report.log_likelihood = ll;
    if (it > 0 && !events_pending && std::abs(ll - previous) <= config.tolerance * std::abs(ll)) {
      report.converged = true;
      break;
    }
    if (it == config.max_iterations) break;
    previous = ll;
    Model next = m_step(model, stats, config, floors);
    std::vector<std::string>& events = report.iterations.back().events;
    next = apply_heuristics(next, stats, table, config, floors, it, events);
    events_pending = !events.empty();
    model = std::move(next);
  }
  return FitResult{std::move(model), std::move(report)};
}

FitResult gaussian_noise_fit(const TrainingTable& table, EmConfig config) {
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const Evidence& row = table.rows[k];
    if (row.conjunctions.size() != 1) {
      throw FitError("row " + std::to_string(k + 1) + ": gaussian-noise fitting needs one conjunction per row");
    }
    for (std::size_t j = 0; j < table.schema.size(); ++j) {
      const Observation& o = row.conjunctions.front().observations.at(j);
      const bool ok = table.schema[j].is_symbolic()
                          ? (std::holds_alternative<Exact>(o) || std::holds_alternative<SymbolicDist>(o) || is_missing(o))
                          : (std::holds_alternative<Exact>(o) || std::holds_alternative<GaussianObs>(o) || is_missing(o));
      if (!ok) {
        throw FitError("row " + std::to_string(k + 1) + ", attribute '" + table.schema[j].name +
                       "': gaussian-noise fitting accepts exact, gaussian and missing cells");
      }
    }
  }
  config.form = EStepForm::GaussianNoise;
  return em_fit(table, config);
}

LogLikelihood log_likelihood(const Model& model, const TrainingTable& table) {
  if (!(table.schema == model.schema())) throw SchemaError("table schema does not match the model schema");
  LogLikelihood out;
  out.per_row.reserve(table.rows.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const double ll = log_evidence(model, table.rows[k]);
    if (!(ll > -kInf) && !out.zero_row) out.zero_row = k;
    out.per_row.push_back(ll);
    out.total += ll;
  }
  return out;
}

namespace {

// Per-row scores (higher is better) of `model` on `rows`.
std::vector<double> row_scores(const Model& model, const TrainingTable& rows, const SelectionOptions& options) {
  if (!options.target) return log_likelihood(model, rows).per_row;
  const std::size_t t = *options.target;
  const bool symbolic = model.schema()[t].is_symbolic();
  std::vector<double> scores;
  for (const RowPrediction& p : predict_rows(model, rows, {t})) {
    if (!p.truth[0]) continue;
    if (p.zero_evidence) {
      scores.push_back(symbolic ? -1.0 : -kInf);
      continue;
    }
    if (symbolic) {
      scores.push_back(static_cast<double>(std::get<SymbolicEstimate>(*p.estimates[0]).choice) == *p.truth[0] ? 0.0
                                                                                                                : -1.0);
    } else {
      const double d = std::get<ContinuousEstimate>(*p.estimates[0]).mean - *p.truth[0];
      scores.push_back(-d * d);
    }
  }
  return scores;
}

TrainingTable subset(const TrainingTable& table, const std::vector<std::size_t>& idx) {
  TrainingTable out{table.schema, {}};
  out.rows.reserve(idx.size());
  for (std::size_t k : idx) out.rows.push_back(table.rows[k]);
  return out;
}

}  // namespace

SelectionResult select_components(const TrainingTable& table, const std::vector<std::size_t>& l_range,
                                  const EmConfig& base, const SelectionOptions& options) {
  if (l_range.empty()) throw DomainError("component range is empty");
  if (options.validation && options.validation->rows.empty()) throw DomainError("validation table has no rows");
  if (!options.validation && (options.folds < 2 || options.folds > table.rows.size())) {
    throw DomainError("cross-validation needs between 2 and " + std::to_string(table.rows.size()) + " folds");
  }
  if (options.target && *options.target >= table.schema.size()) throw SchemaError("target attribute out of range");

  // Fold assignment is fixed by the base seed so every l sees the same splits.
  std::vector<std::size_t> order(table.rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(base.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> ls = l_range;
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());

  SelectionResult result;
  for (std::size_t l : ls) {
    SelectionScore score;
    score.components = l;
    EmConfig cfg = base;
    cfg.components = l;
    cfg.seed = base.seed + l;
    try {
      std::vector<double> scores;
      if (options.validation) {
        scores = row_scores(em_fit(table, cfg).model, *options.validation, options);
      } else {
        for (std::size_t f = 0; f < options.folds; ++f) {
          std::vector<std::size_t> train;
          std::vector<std::size_t> held;
          for (std::size_t k = 0; k < order.size(); ++k) (k % options.folds == f ? held : train).push_back(order[k]);
          const auto part = row_scores(em_fit(subset(table, train), cfg).model, subset(table, held), options);
          scores.insert(scores.end(), part.begin(), part.end());
        }
      }
      if (scores.empty()) throw DomainError("no scorable held-out rows");
      const double n = static_cast<double>(scores.size());
      double mean = 0.0;
      for (double s : scores) mean += s;
      mean /= n;
      double ss = 0.0;
      for (double s : scores) ss += (s - mean) * (s - mean);
      score.ok = true;
      score.score = mean;
      score.std_error = (std::isfinite(mean) && n > 1.0) ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    } catch (const FitError& e) {
      score.error = e.what();
    }
    result.scores.push_back(score);
  }

  const SelectionScore* best = nullptr;
  for (const SelectionScore& s : result.scores) {
    if (s.ok && (best == nullptr || s.score > best->score)) best = &s;
  }
  if (best == nullptr) throw FitError("every candidate component count failed to fit");
  for (const SelectionScore& s : result.scores) {
    if (s.ok && s.score >= best->score - best->std_error) {
      result.best = s.components;
      break;
    }
  }
  return result;
}

}  // namespace mfgn
