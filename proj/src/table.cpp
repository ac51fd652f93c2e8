// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/table.hpp"

#include <string>

#include "mfgn/error.hpp"

namespace mfgn {

void check_table(const TrainingTable& table) {
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    try {
      check_evidence(table.schema, table.rows[k]);
    } catch (const SchemaError& e) {
      throw SchemaError("row " + std::to_string(k + 1) + ": " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("row " + std::to_string(k + 1) + ": " + e.what());
    }
  }
}

TrainingTable exact_table(Schema schema, const std::vector<std::vector<double>>& rows) {
  TrainingTable table{std::move(schema), {}};
  table.rows.reserve(rows.size());
  for (const auto& values : rows) {
    if (values.size() != table.schema.size()) throw SchemaError("row width does not match the schema");
    Conjunction c{1.0, {}};
    c.observations.reserve(values.size());
    for (double v : values) c.observations.emplace_back(Exact{v});
    table.rows.push_back(Evidence{{std::move(c)}});
  }
  return table;
}

}  // namespace mfgn
