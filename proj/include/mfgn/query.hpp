// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <string_view>

#include "mfgn/evidence.hpp"
#include "mfgn/schema.hpp"

namespace mfgn {

// Query language. Keywords (AND, OR, in, bias) are case-insensitive.
//
//   expr := or
//   or   := [w:NUM] and (OR [w:NUM] and)*
//   and  := atom (AND atom)*
//   atom := "(" expr ")" | obs
//   obs  := NAME = VALUE                   exact number, or category label
//         | NAME = ?                       missing
//         | NAME ~ NUM +- NUM [bias NUM]   gaussian measurement
//         | NAME in [NUM, NUM]             interval (inf / -inf allowed)
//         | NAME = {CAT:NUM, ...}          category likelihoods, unlisted = 0
//
// `s +- e` reads as a two-sigma band: the observation has sigma = e / 2.
// `s +- 0` is an exact observation at s - bias.
//
// Parentheses only group; they never create nodes. An OR with a single
// weighted branch ("w:0.5 x = 1") is kept as a one-branch OR node.

/// Every failure (syntax, unknown attribute or category, kind mismatch,
/// malformed distribution) is a ParseError carrying the offending token's
/// line and column.
EvidenceExpr parse_query(std::string_view text, const Schema& schema);

/// Inverse of parse_query for ASTs whose AND/OR nodes have at least two
/// children (single-branch ORs are printed with their weight). Numbers are
/// printed in shortest round-trip form so parse_query(to_query(e)) == e.
/// NormalMixtureObs leaves have no surface syntax: UnsupportedError.
std::string to_query(const EvidenceExpr& expr, const Schema& schema);

/// parse_query followed by expand.
Evidence parse_evidence(std::string_view text, const Schema& schema);

/// Text of one observation on attribute `a`, e.g. "~ 1 +- 3", "= ?".
std::string observation_to_query(const Attribute& a, const Observation& observation);

}  // namespace mfgn
