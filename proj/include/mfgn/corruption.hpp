// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfgn/evidence.hpp"
#include "mfgn/table.hpp"

namespace mfgn {

// Corruption spec, one directive per line ('#' comments allowed):
//
//   noise   <attr> <sigma>            add N(0, sigma) noise
//   bias    <attr> <shift> <prob>     add `shift` with probability prob
//   flip    <attr> <prob>             replace the category by another one, uniformly
//   missing <attr> <prob>             drop the value
//   censor  <attr> > <t> [as <cell>]  drop values above t (or `<` below t);
//                                     the annotated output uses <cell> instead
//
// Directives on one attribute apply in file order. Each attribute draws from
// its own random stream, so corrupting disjoint attribute sets commutes.

struct CorruptionDirective {
  enum class Kind { Noise, Bias, Flip, Missing, Censor };
  Kind kind = Kind::Noise;
  std::size_t attribute = 0;
  double sigma = 0.0;  // Noise
  double shift = 0.0;  // Bias
  double prob = 0.0;   // Bias, Flip, Missing
  bool above = true;   // Censor
  double threshold = 0.0;
  std::optional<Observation> replacement;  // Censor, annotated output
};

struct CorruptionSpec {
  std::vector<CorruptionDirective> directives;
};

CorruptionSpec read_corruption_spec(std::istream& in, const Schema& schema);
CorruptionSpec read_corruption_spec_file(const std::string& path, const Schema& schema);

struct CorruptionResult {
  /// Degraded values as a naive learner would see them.
  TrainingTable raw;
  /// The same realization with each degradation described by its likelihood.
  TrainingTable annotated;
};

/// Input rows must be single conjunctions; attributes named by a directive
/// must hold Exact values. Deterministic given the seed.
CorruptionResult corrupt(const TrainingTable& table, const CorruptionSpec& spec, std::uint64_t seed);

}  // namespace mfgn
