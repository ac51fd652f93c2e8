// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "mfgn/evidence.hpp"
#include "mfgn/schema.hpp"

namespace mfgn {

/// Training examples, one Evidence per example. Exact data is the special
/// case of one conjunction of Exact observations per row.
struct TrainingTable {
  Schema schema;
  std::vector<Evidence> rows;

  std::size_t size() const noexcept { return rows.size(); }
};

/// check_evidence on every row; errors name the offending row (1-based).
void check_table(const TrainingTable& table);

/// One conjunction of Exact observations per row.
TrainingTable exact_table(Schema schema, const std::vector<std::vector<double>>& rows);

}  // namespace mfgn
