// Apache License, Version 2.0, refer to LICENSE.txt

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfgn/corruption.hpp"
#include "mfgn/dataset.hpp"
#include "mfgn/error.hpp"
#include "mfgn/evaluation.hpp"
#include "mfgn/inference.hpp"
#include "mfgn/learning.hpp"
#include "mfgn/model_io.hpp"
#include "mfgn/query.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitFit = 3;
constexpr int kExitZeroEvidence = 4;
constexpr int kExitUsage = 64;

// Usage problems found after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> attribute_list(const mfgn::Schema& schema, const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& name : split_list(text)) out.push_back(schema.index_of(name));
  if (out.empty()) throw UsageError("empty attribute list");
  return out;
}

std::string fixed(double v, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mfgn::Error("cannot write '" + path + "'");
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mfgn::Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string schema;
  std::string out = "model.mfgn";
  std::string report;
  std::size_t components = 0;
  std::size_t select_up_to = 0;
  std::string validation;
  std::size_t folds = 5;
  std::string target;
  std::uint64_t seed = 1;
  std::size_t max_iterations = 500;
  double tolerance = 1e-7;
  double variance_floor = 1e-4;
  double symbolic_floor = 1e-6;
  double prune = 1e-3;
  bool gaussian_noise = false;
  bool serial = false;
};

int run_train(const TrainArgs& a) {
  const mfgn::Schema schema = mfgn::read_schema_file(a.schema);
  const mfgn::TrainingTable table = mfgn::read_dataset_file(a.data, schema);

  mfgn::EmConfig cfg;
  cfg.components = a.components;
  cfg.seed = a.seed;
  cfg.max_iterations = a.max_iterations;
  cfg.tolerance = a.tolerance;
  cfg.variance_floor_factor = a.variance_floor;
  cfg.symbolic_floor = a.symbolic_floor;
  cfg.prune_below = a.prune;
  cfg.parallel = !a.serial;

  if (a.select_up_to != 0) {
    if (a.select_up_to < a.components) throw UsageError("--select-up-to must be at least --components");
    std::vector<std::size_t> range;
    for (std::size_t l = a.components; l <= a.select_up_to; ++l) range.push_back(l);
    mfgn::SelectionOptions opts;
    opts.folds = a.folds;
    if (!a.validation.empty()) opts.validation = mfgn::read_dataset_file(a.validation, schema);
    if (!a.target.empty()) opts.target = schema.index_of(a.target);
    const mfgn::SelectionResult sel = mfgn::select_components(table, range, cfg, opts);
    for (const auto& s : sel.scores) {
      std::cout << "select l " << s.components << ' ';
      if (s.ok) {
        std::cout << "score " << std::setprecision(10) << s.score << " se " << s.std_error << '\n';
      } else {
        std::cout << "failed " << s.error << '\n';
      }
    }
    std::cout << "selected l " << sel.best << '\n';
    cfg.components = sel.best;
    cfg.seed = a.seed + sel.best;
  }

  const mfgn::FitResult fit = a.gaussian_noise ? mfgn::gaussian_noise_fit(table, cfg) : mfgn::em_fit(table, cfg);
  mfgn::save_model_file(a.out, fit.model);
  if (a.report.empty()) {
    mfgn::write_report(std::cout, fit.report);
  } else {
    std::ofstream rep = open_out(a.report);
    mfgn::write_report(rep, fit.report);
  }
  std::cout << "wrote " << a.out << " (" << fit.model.size() << " components)\n";
  return kExitOk;
}

// --- infer / complete ------------------------------------------------------

struct InferArgs {
  std::string model;
  std::string query;
  std::string query_file;
  std::string targets;
  std::optional<double> reject;
  int precision = 1;
  std::string density_attr;
  std::vector<double> density_range;  // lo hi steps
  bool complete = false;
};

void print_estimate(std::ostream& out, const mfgn::Attribute& a, const mfgn::Estimate& e, int precision) {
  out << a.name << ':';
  if (const auto* c = std::get_if<mfgn::ContinuousEstimate>(&e)) {
    out << ' ' << fixed(c->mean, precision) << " ± " << fixed(2.0 * c->std, precision) << '\n';
    return;
  }
  const auto& s = std::get<mfgn::SymbolicEstimate>(e);
  for (std::size_t k = 0; k < s.q.size(); ++k) {
    if (s.q[k] >= 0.005) out << ' ' << a.categories[k] << ':' << fixed(s.q[k], 2);
  }
  out << " | EP=" << a.categories[s.choice] << " H=" << fixed(s.entropy, 3) << " E=" << fixed(s.error_prob, 2);
  if (s.rejected) out << " REJECTED";
  out << '\n';
}

int run_infer(const InferArgs& a) {
  const mfgn::Model model = mfgn::load_model_file(a.model);
  const mfgn::Schema& schema = model.schema();
  std::string text = a.query;
  if (!a.query_file.empty()) text = read_text_file(a.query_file);
  if (text.empty()) throw UsageError("a query is required (--query or --query-file)");
  const mfgn::Evidence ev = mfgn::parse_evidence(text, schema);

  std::vector<std::size_t> targets;
  if (a.complete) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      bool unobserved = true;
      for (const auto& c : ev.conjunctions) unobserved = unobserved && mfgn::is_missing(c.observations[j]);
      if (unobserved) targets.push_back(j);
    }
    if (targets.empty()) throw UsageError("every attribute is observed; nothing to complete");
  } else {
    if (a.targets.empty()) throw UsageError("--targets is required");
    targets = attribute_list(schema, a.targets);
  }
  std::size_t density_attr = 0;
  bool density_only = false;  // density target not requested as a summary
  if (!a.density_attr.empty()) {
    density_attr = schema.index_of(a.density_attr);
    density_only = std::find(targets.begin(), targets.end(), density_attr) == targets.end();
    if (density_only) targets.push_back(density_attr);
  }

  const mfgn::Posterior post = mfgn::posterior(model, ev, targets);
  for (std::size_t j : targets) {
    if (density_only && j == density_attr) continue;
    try {
      print_estimate(std::cout, schema[j], mfgn::estimate(post, j, a.reject), a.precision);
    } catch (const mfgn::UnsupportedError&) {
      std::cout << schema[j].name << ": interval-truncated posterior, see --density\n";
    }
  }
  std::cout << "log-evidence: " << std::setprecision(10) << post.log_evidence << '\n';

  if (!a.density_attr.empty()) {
    if (a.density_range.size() != 3 || !(a.density_range[2] >= 1.0)) {
      throw UsageError("--density needs <attr> <lo> <hi> <steps>");
    }
    const double lo = a.density_range[0];
    const double hi = a.density_range[1];
    const auto steps = static_cast<std::size_t>(a.density_range[2]);
    std::cout << "# density " << schema[density_attr].name << '\n';
    if (schema[density_attr].is_symbolic()) {
      for (std::size_t k = 0; k < schema[density_attr].category_count(); ++k) {
        std::cout << schema[density_attr].categories[k] << ' '
                  << mfgn::posterior_pdf(post, density_attr, static_cast<double>(k)) << '\n';
      }
    } else {
      for (std::size_t s = 0; s <= steps; ++s) {
        const double x = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(steps);
        std::cout << std::setprecision(10) << x << ' ' << mfgn::posterior_pdf(post, density_attr, x) << '\n';
      }
    }
  }
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string data;
  std::string targets;
  std::optional<double> reject;
  bool serial = false;
};

int run_eval(const EvalArgs& a) {
  const mfgn::Model model = mfgn::load_model_file(a.model);
  const mfgn::TrainingTable table = mfgn::read_dataset_file(a.data, model.schema());
  const std::vector<std::size_t> targets = attribute_list(model.schema(), a.targets);
  mfgn::EvalOptions opts;
  opts.reject_above = a.reject;
  opts.parallel = !a.serial;
  const mfgn::EvaluationResult r = mfgn::evaluate(model, table, targets, opts);
  for (const auto& m : r.targets) {
    std::cout << model.schema()[m.attribute].name << ": " << (m.symbolic ? "error " : "rms ") << std::setprecision(6)
              << m.error << " (scored " << m.scored << ", rejected " << m.rejected << ", failed " << m.failed << ")\n";
  }
  std::cout << "rows: " << r.rows << '\n';
  std::cout << "mean log-likelihood: " << std::setprecision(10) << r.mean_log_likelihood << '\n';
  if (r.zero_rows) std::cout << "zero-likelihood rows: " << r.zero_rows << '\n';
  return kExitOk;
}

// --- sample / corrupt / plot-data -------------------------------------------

struct SampleArgs {
  std::string model;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int run_sample(const SampleArgs& a) {
  const mfgn::Model model = mfgn::load_model_file(a.model);
  const mfgn::TrainingTable table = mfgn::exact_table(model.schema(), mfgn::sample(model, a.seed, a.count));
  if (a.out.empty()) {
    mfgn::write_dataset(std::cout, table);
  } else {
    mfgn::write_dataset_file(a.out, table);
  }
  return kExitOk;
}

struct CorruptArgs {
  std::string data;
  std::string schema;
  std::string spec;
  std::uint64_t seed = 1;
  std::string raw_out;
  std::string annotated_out;
};

int run_corrupt(const CorruptArgs& a) {
  const mfgn::Schema schema = mfgn::read_schema_file(a.schema);
  const mfgn::TrainingTable table = mfgn::read_dataset_file(a.data, schema);
  const mfgn::CorruptionSpec spec = mfgn::read_corruption_spec_file(a.spec, schema);
  const mfgn::CorruptionResult r = mfgn::corrupt(table, spec, a.seed);
  mfgn::write_dataset_file(a.raw_out, r.raw);
  mfgn::write_dataset_file(a.annotated_out, r.annotated);
  return kExitOk;
}

struct PlotArgs {
  std::string model;
  std::string attr;
  std::string attr2;
  std::string query;
  double lo = 0.0;
  double hi = 1.0;
  double lo2 = 0.0;
  double hi2 = 1.0;
  std::size_t steps = 100;
};

// Prior (and optionally posterior) marginal curve of one attribute, or a grid
// of the joint marginal density of two continuous attributes.
int run_plot(const PlotArgs& a) {
  const mfgn::Model model = mfgn::load_model_file(a.model);
  const mfgn::Schema& schema = model.schema();
  const std::size_t j = schema.index_of(a.attr);
  if (!(a.lo < a.hi)) throw UsageError("--lo must be below --hi");
  auto grid = [&](double lo, double hi, std::size_t s) {
    return lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(a.steps);
  };
  if (!a.attr2.empty()) {
    const std::size_t k = schema.index_of(a.attr2);
    if (schema[j].is_symbolic() || schema[k].is_symbolic()) throw UsageError("grid plots need continuous attributes");
    if (!(a.lo2 < a.hi2)) throw UsageError("--lo2 must be below --hi2");
    std::cout << "# " << schema[j].name << ' ' << schema[k].name << " density\n";
    const std::vector<std::size_t> attrs{j, k};
    for (std::size_t s = 0; s <= a.steps; ++s) {
      for (std::size_t t = 0; t <= a.steps; ++t) {
        const std::vector<double> v{grid(a.lo, a.hi, s), grid(a.lo2, a.hi2, t)};
        std::cout << std::setprecision(10) << v[0] << ' ' << v[1] << ' ' << mfgn::marginal_density(model, attrs, v)
                  << '\n';
      }
    }
    return kExitOk;
  }
  std::optional<mfgn::Posterior> post;
  if (!a.query.empty()) {
    const std::vector<std::size_t> targets{j};
    post = mfgn::posterior(model, mfgn::parse_evidence(a.query, schema), targets);
  }
  std::cout << "# " << schema[j].name << " prior" << (post ? " posterior" : "") << '\n';
  const std::vector<std::size_t> attrs{j};
  auto row = [&](double x) {
    const std::vector<double> v{x};
    std::cout << std::setprecision(10) << mfgn::marginal_density(model, attrs, v);
    if (post) std::cout << ' ' << mfgn::posterior_pdf(*post, j, x);
    std::cout << '\n';
  };
  if (schema[j].is_symbolic()) {
    for (std::size_t c = 0; c < schema[j].category_count(); ++c) {
      std::cout << schema[j].categories[c] << ' ';
      row(static_cast<double>(c));
    }
    return kExitOk;
  }
  for (std::size_t s = 0; s <= a.steps; ++s) {
    const double x = grid(a.lo, a.hi, s);
    std::cout << std::setprecision(10) << x << ' ';
    row(x);
  }
  return kExitOk;
}

const CLI::Validator kAtLeastOne(
    [](const std::string& text) -> std::string {
      try {
        if (std::stoll(text) >= 1) return {};
      } catch (const std::exception&) {
      }
      return "must be a whole number of at least 1, got '" + text + "'";
    },
    "INT>=1");

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture of factorized generalized normals: training and inference from uncertain data"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Fit a model with (extended) EM");
  t->add_option("--data", train.data, "Training dataset (CSV)")->required();
  t->add_option("--schema", train.schema, "Schema sidecar file")->required();
  t->add_option("--components", train.components, "Number of mixture components")
      ->required()
      ->check(kAtLeastOne);
  t->add_option("--select-up-to", train.select_up_to, "Select l in [components, N] by held-out score");
  t->add_option("--validation", train.validation, "Held-out dataset for --select-up-to");
  t->add_option("--folds", train.folds, "Cross-validation folds for --select-up-to")->check(CLI::Range(2, 1000));
  t->add_option("--target", train.target, "Score selection by task error on this attribute");
  t->add_option("--seed", train.seed, "Random seed");
  t->add_option("--out", train.out, "Model file to write");
  t->add_option("--report", train.report, "Write the fit report here instead of stdout");
  t->add_option("--max-iter", train.max_iterations, "Maximum EM iterations")->check(kAtLeastOne);
  t->add_option("--tol", train.tolerance, "Relative log-likelihood tolerance")->check(CLI::PositiveNumber);
  t->add_option("--variance-floor", train.variance_floor, "Variance floor as a fraction of squared range")
      ->check(CLI::NonNegativeNumber);
  t->add_option("--symbolic-floor", train.symbolic_floor, "Minimum category probability")
      ->check(CLI::Range(0.0, 1.0));
  t->add_option("--prune", train.prune, "Component weight pruning threshold")->check(CLI::Range(0.0, 1.0));
  t->add_flag("--gaussian-noise", train.gaussian_noise, "Use the gaussian-noise E step");
  t->add_flag("--serial", train.serial, "Single-threaded E step");

  InferArgs infer;
  auto add_infer_options = [](CLI::App* cmd, InferArgs& args) {
    cmd->add_option("--model", args.model, "Model file")->required();
    cmd->add_option("--query", args.query, "Evidence in the query language");
    cmd->add_option("--query-file", args.query_file, "Read the query from a file");
    cmd->add_option("--reject", args.reject, "Reject symbolic estimates with error probability above this")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--precision", args.precision, "Decimals for continuous summaries")->check(CLI::Range(0, 12));
    cmd->add_option("--density", args.density_attr, "Emit the posterior density of this attribute");
    cmd->add_option("--density-range", args.density_range, "lo hi steps for --density")->expected(3);
  };
  auto* inf = app.add_subcommand("infer", "Posterior summaries for target attributes");
  add_infer_options(inf, infer);
  inf->add_option("--targets", infer.targets, "Comma-separated target attributes")->required();

  InferArgs complete;
  complete.complete = true;
  auto* comp = app.add_subcommand("complete", "infer with every unobserved attribute as a target");
  add_infer_options(comp, complete);

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Error rates and held-out likelihood on a dataset");
  ev->add_option("--model", eval.model, "Model file")->required();
  ev->add_option("--data", eval.data, "Test dataset")->required();
  ev->add_option("--targets", eval.targets, "Comma-separated target attributes")->required();
  ev->add_option("--reject", eval.reject, "Rejection threshold on error probability")->check(CLI::Range(0.0, 1.0));
  ev->add_flag("--serial", eval.serial, "Single-threaded evaluation");

  SampleArgs samp;
  auto* sa = app.add_subcommand("sample", "Draw rows from a model");
  sa->add_option("--model", samp.model, "Model file")->required();
  sa->add_option("--count", samp.count, "Number of rows")->required()->check(CLI::NonNegativeNumber);
  sa->add_option("--seed", samp.seed, "Random seed");
  sa->add_option("--out", samp.out, "Output dataset (default stdout)");

  CorruptArgs corr;
  auto* co = app.add_subcommand("corrupt", "Degrade a dataset and describe the degradation");
  co->add_option("--data", corr.data, "Input dataset")->required();
  co->add_option("--schema", corr.schema, "Schema sidecar file")->required();
  co->add_option("--spec", corr.spec, "Corruption spec file")->required();
  co->add_option("--seed", corr.seed, "Random seed");
  co->add_option("--raw-out", corr.raw_out, "Degraded raw values")->required();
  co->add_option("--annotated-out", corr.annotated_out, "Likelihood-annotated dataset")->required();

  PlotArgs plot;
  auto* pl = app.add_subcommand("plot-data", "Density curves or grids as plain data");
  pl->add_option("--model", plot.model, "Model file")->required();
  pl->add_option("--attr", plot.attr, "Attribute on the first axis")->required();
  pl->add_option("--attr2", plot.attr2, "Second attribute for a 2-D grid");
  pl->add_option("--query", plot.query, "Also emit the posterior given this evidence");
  pl->add_option("--lo", plot.lo, "First axis lower end");
  pl->add_option("--hi", plot.hi, "First axis upper end");
  pl->add_option("--lo2", plot.lo2, "Second axis lower end");
  pl->add_option("--hi2", plot.hi2, "Second axis upper end");
  pl->add_option("--steps", plot.steps, "Grid steps")->check(kAtLeastOne);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*t) return run_train(train);
    if (*inf) return run_infer(infer);
    if (*comp) return run_infer(complete);
    if (*ev) return run_eval(eval);
    if (*sa) return run_sample(samp);
    if (*co) return run_corrupt(corr);
    if (*pl) return run_plot(plot);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mfgn::ZeroEvidenceError& e) {
    std::cerr << "zero evidence: " << e.what() << '\n';
    return kExitZeroEvidence;
  } catch (const mfgn::FitError& e) {
    std::cerr << "fit failed: " << e.what() << '\n';
    return kExitFit;
  } catch (const mfgn::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
