// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <iosfwd>
#include <string>

#include "mfgn/model.hpp"

namespace mfgn {

// Model file, line oriented:
//
//   mfgn-model v1
//   schema
//   attr x continuous
//   attr w symbolic white black
//   component
//   weight 0.5
//   gn 0 2
//   cat 1 0
//   component
//   ...
//
// Numbers are written with 17 significant digits so that a load/save cycle is
// bit-exact. Blank lines and lines starting with '#' are ignored on input.

void write_model(std::ostream& out, const Model& model);
std::string save_model(const Model& model);
void save_model_file(const std::string& path, const Model& model);

/// Throws ParseError (with the offending line) for any malformed input,
/// including weights or category probabilities that are not normalized.
Model read_model(std::istream& in);
Model load_model(const std::string& text);
Model load_model_file(const std::string& path);

}  // namespace mfgn
