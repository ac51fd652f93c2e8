// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/corruption.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <random>

#include "mfgn/dataset.hpp"
#include "mfgn/error.hpp"

namespace mfgn {

namespace {

double spec_number(const std::string& token, std::size_t line, std::size_t field) {
  const auto v = parse_double(token);
  if (!v || !std::isfinite(*v)) throw ParseError("expected a finite number, got '" + token + "'", line, field);
  return *v;
}

double spec_prob(const std::string& token, std::size_t line, std::size_t field) {
  const double p = spec_number(token, line, field);
  if (p < 0.0 || p > 1.0) throw ParseError("probability must lie in [0, 1]", line, field);
  return p;
}

// Continuous hypothesis about the true value: z ~ s - offset with noise sd.
struct Variant {
  double weight = 1.0;
  double offset = 0.0;
  double noise_var = 0.0;
};

// Per-row state of one corrupted attribute.
struct Cell {
  bool missing = false;
  double value = 0.0;                          // raw observed value or category
  std::vector<Variant> variants{Variant{}};    // continuous
  std::vector<std::vector<double>> channel;    // symbolic: P(observed | true), rows observed
  std::optional<Observation> replacement;      // set once the value is dropped
};

}  // namespace

CorruptionSpec read_corruption_spec(std::istream& in, const Schema& schema) {
  CorruptionSpec spec;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto tok = split_whitespace(text);
    if (tok.empty() || tok.front().starts_with('#')) continue;
    if (tok.size() < 2) throw ParseError("directive needs an attribute", line, 1);
    CorruptionDirective d;
    const auto j = schema.find(tok[1]);
    if (!j) throw ParseError("unknown attribute '" + tok[1] + "'", line, 2);
    d.attribute = *j;
    const bool symbolic = schema[*j].is_symbolic();
    const std::string& key = tok[0];
    auto arity = [&](std::size_t n) {
      if (tok.size() != n) throw ParseError("'" + key + "' takes " + std::to_string(n - 1) + " arguments", line, 1);
    };
    auto continuous_only = [&] {
      if (symbolic) throw ParseError("'" + key + "' needs a continuous attribute", line, 2);
    };
    if (key == "noise") {
      arity(3);
      continuous_only();
      d.kind = CorruptionDirective::Kind::Noise;
      d.sigma = spec_number(tok[2], line, 3);
      if (d.sigma < 0.0) throw ParseError("noise sigma must be non-negative", line, 3);
    } else if (key == "bias") {
      arity(4);
      continuous_only();
      d.kind = CorruptionDirective::Kind::Bias;
      d.shift = spec_number(tok[2], line, 3);
      d.prob = spec_prob(tok[3], line, 4);
    } else if (key == "flip") {
      arity(3);
      if (!symbolic) throw ParseError("'flip' needs a symbolic attribute", line, 2);
      d.kind = CorruptionDirective::Kind::Flip;
      d.prob = spec_prob(tok[2], line, 3);
    } else if (key == "missing") {
      arity(3);
      d.kind = CorruptionDirective::Kind::Missing;
      d.prob = spec_prob(tok[2], line, 3);
    } else if (key == "censor") {
      continuous_only();
      if (tok.size() != 4 && tok.size() != 6) throw ParseError("usage: censor <attr> > <t> [as <cell>]", line, 1);
      d.kind = CorruptionDirective::Kind::Censor;
      if (tok[2] != ">" && tok[2] != "<") throw ParseError("censor predicate must be '>' or '<'", line, 3);
      d.above = tok[2] == ">";
      d.threshold = spec_number(tok[3], line, 4);
      if (tok.size() == 6) {
        if (tok[4] != "as") throw ParseError("expected 'as'", line, 5);
        try {
          d.replacement = parse_cell(tok[5], schema[*j]);
        } catch (const Error& e) {
          throw ParseError(e.what(), line, 6);
        }
      }
    } else {
      throw ParseError("unknown directive '" + key + "'", line, 1);
    }
    spec.directives.push_back(std::move(d));
  }
  return spec;
}

CorruptionSpec read_corruption_spec_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open corruption spec '" + path + "'", 0, 0);
  return read_corruption_spec(in, schema);
}

CorruptionResult corrupt(const TrainingTable& table, const CorruptionSpec& spec, std::uint64_t seed) {
  const Schema& schema = table.schema;
  const std::size_t n = schema.size();
  std::vector<bool> touched(n, false);
  for (const CorruptionDirective& d : spec.directives) {
    if (d.attribute >= n) throw SchemaError("directive attribute out of range");
    touched[d.attribute] = true;
  }
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const Evidence& row = table.rows[k];
    if (row.conjunctions.size() != 1) {
      throw DomainError("row " + std::to_string(k + 1) + ": corruption needs single-conjunction rows");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Observation& o = row.conjunctions.front().observations.at(j);
      if (touched[j] && !std::holds_alternative<Exact>(o) && !is_missing(o)) {
        throw DomainError("row " + std::to_string(k + 1) + ": attribute '" + schema[j].name +
                          "' must hold an exact value to be corrupted");
      }
    }
  }

  // cells[j][k]
  std::vector<std::vector<Cell>> cells(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!touched[j]) continue;
    const std::size_t K = schema[j].category_count();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(j)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto& col = cells[j];
    col.resize(table.rows.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      const Observation& o = table.rows[k].conjunctions.front().observations[j];
      Cell& c = col[k];
      c.missing = is_missing(o);
      if (!c.missing) c.value = std::get<Exact>(o).value;
      if (schema[j].is_symbolic()) {
        c.channel.assign(K, std::vector<double>(K, 0.0));
        for (std::size_t w = 0; w < K; ++w) c.channel[w][w] = 1.0;
      }
    }

    for (const CorruptionDirective& d : spec.directives) {
      if (d.attribute != j) continue;
      for (Cell& c : col) {
        // Draws happen whether or not the value survives, keeping streams aligned.
        switch (d.kind) {
          case CorruptionDirective::Kind::Noise: {
            const double z = normal(rng);
            if (c.missing || d.sigma == 0.0) break;
            c.value += d.sigma * z;
            for (Variant& v : c.variants) v.noise_var += d.sigma * d.sigma;
            break;
          }
          case CorruptionDirective::Kind::Bias: {
            const double u = unit(rng);
            if (c.missing) break;
            if (u < d.prob) c.value += d.shift;
            std::vector<Variant> next;
            for (const Variant& v : c.variants) {
              if (d.prob < 1.0) next.push_back({v.weight * (1.0 - d.prob), v.offset, v.noise_var});
              if (d.prob > 0.0) next.push_back({v.weight * d.prob, v.offset + d.shift, v.noise_var});
            }
            c.variants = std::move(next);
            break;
          }
          case CorruptionDirective::Kind::Flip: {
            const double u = unit(rng);
            const double u2 = unit(rng);
            if (c.missing || K < 2 || d.prob == 0.0) break;
            if (u < d.prob) {
              auto other = static_cast<std::size_t>(u2 * static_cast<double>(K - 1));
              other = std::min(other, K - 2);
              const auto cur = static_cast<std::size_t>(c.value);
              c.value = static_cast<double>(other >= cur ? other + 1 : other);
            }
            // channel <- F * channel, F[a][b] = 1-p if a == b else p/(K-1)
            const double off = d.prob / static_cast<double>(K - 1);
            std::vector<std::vector<double>> next(K, std::vector<double>(K, 0.0));
            for (std::size_t a = 0; a < K; ++a) {
              for (std::size_t b = 0; b < K; ++b) {
                const double f = a == b ? 1.0 - d.prob : off;
                for (std::size_t z = 0; z < K; ++z) next[a][z] += f * c.channel[b][z];
              }
            }
            c.channel = std::move(next);
            break;
          }
          case CorruptionDirective::Kind::Missing: {
            const double u = unit(rng);
            if (c.missing || !(u < d.prob)) break;
            c.missing = true;
            c.replacement = Missing{};
            break;
          }
          case CorruptionDirective::Kind::Censor: {
            if (c.missing) break;
            if (d.above ? c.value > d.threshold : c.value < d.threshold) {
              c.missing = true;
              c.replacement = d.replacement.value_or(Observation{Missing{}});
            }
            break;
          }
        }
      }
    }
  }

  CorruptionResult out{{schema, {}}, {schema, {}}};
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const Conjunction& in = table.rows[k].conjunctions.front();
    Conjunction raw = in;
    std::vector<Conjunction> annotated{in};
    for (std::size_t j = 0; j < n; ++j) {
      if (!touched[j]) continue;
      const Cell& c = cells[j][k];
      if (c.missing) {
        raw.observations[j] = Missing{};
        const Observation rep = c.replacement.value_or(Observation{Missing{}});
        for (Conjunction& a : annotated) a.observations[j] = rep;
        continue;
      }
      raw.observations[j] = Exact{c.value};
      if (schema[j].is_symbolic()) {
        const auto& row = c.channel[static_cast<std::size_t>(c.value)];
        double total = 0.0;
        for (double x : row) total += x;
        Observation obs = Exact{c.value};
        if (row[static_cast<std::size_t>(c.value)] != total) {
          SymbolicDist dist{row};
          for (double& x : dist.probs) x /= total;
          obs = dist;
        }
        for (Conjunction& a : annotated) a.observations[j] = obs;
        continue;
      }
      std::vector<Conjunction> next;
      for (const Conjunction& a : annotated) {
        for (const Variant& v : c.variants) {
          Conjunction b = a;
          b.weight *= v.weight;
          const double center = c.value - v.offset;
          if (v.noise_var > 0.0) {
            b.observations[j] = GaussianObs{center, std::sqrt(v.noise_var), 0.0};
          } else {
            b.observations[j] = Exact{center};
          }
          next.push_back(std::move(b));
        }
      }
      annotated = std::move(next);
    }
    out.raw.rows.push_back(Evidence{{std::move(raw)}});
    out.annotated.rows.push_back(Evidence{std::move(annotated)});
  }
  return out;
}

}  // namespace mfgn
