// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mfgn/evidence.hpp"
#include "mfgn/table.hpp"

namespace mfgn {

// Comma-separated dataset, first line a header naming every schema attribute
// (any order). Two optional reserved columns:
//   #id  rows sharing an id (contiguous) form one example, one conjunction each
//   #w   conjunction weight, default 1
//
// Cells:
//   5.1                exact number          red        exact category
//   ?                  missing               7+-1       gaussian, sigma = 0.5
//   [2,3]              interval (inf ok)     red|0.8;green|0.2   category likelihoods
//
// Brackets protect the comma inside an interval cell.

/// Throws DomainError on a malformed cell; read_dataset reports it as a
/// ParseError with the (1-based) line and field.
Observation parse_cell(std::string_view text, const Attribute& attribute);

/// Inverse of parse_cell. Bias is folded into the center; NormalMixtureObs
/// throws UnsupportedError.
std::string format_cell(const Observation& observation, const Attribute& attribute);

TrainingTable read_dataset(std::istream& in, const Schema& schema);
TrainingTable read_dataset_file(const std::string& path, const Schema& schema);

/// Writes the header in schema order; #id and #w columns appear only when
/// some row has several conjunctions or a weight other than 1.
void write_dataset(std::ostream& out, const TrainingTable& table);
void write_dataset_file(const std::string& path, const TrainingTable& table);

}  // namespace mfgn
