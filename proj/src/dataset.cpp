// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on commas outside [...] and "...".
std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  bool quoted = false;
  for (char c : line) {
    if (quoted) {
      if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == '[') {
      ++depth;
      cur += c;
    } else if (c == ']') {
      --depth;
      cur += c;
    } else if (c == ',' && depth == 0) {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", line_no, out.size() + 1);
  out.emplace_back(trim(cur));
  return out;
}

double cell_number(std::string_view text, std::string_view what) {
  const auto v = parse_double(trim(text));
  if (!v) throw DomainError("malformed " + std::string(what) + " '" + std::string(text) + "'");
  return *v;
}

Observation parse_cell_unchecked(std::string_view text, const Attribute& a) {
  text = trim(text);
  if (text.empty()) throw DomainError("empty cell (use ? for missing)");
  if (text == "?") return Missing{};
  if (a.is_symbolic()) {
    if (text.find('|') == std::string_view::npos) {
      const auto k = a.category_index(text);
      if (!k) throw DomainError("'" + std::string(text) + "' is not a category of '" + a.name + "'");
      return Exact{static_cast<double>(*k)};
    }
    SymbolicDist d{std::vector<double>(a.category_count(), 0.0)};
    std::vector<bool> seen(a.category_count(), false);
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = std::min(text.find(';', start), text.size());
      const std::string_view part = trim(text.substr(start, end - start));
      const std::size_t bar = part.find('|');
      if (bar == std::string_view::npos) throw DomainError("expected label|probability, got '" + std::string(part) + "'");
      const std::string_view label = trim(part.substr(0, bar));
      const auto k = a.category_index(label);
      if (!k) throw DomainError("'" + std::string(label) + "' is not a category of '" + a.name + "'");
      if (seen[*k]) throw DomainError("category '" + std::string(label) + "' listed twice");
      seen[*k] = true;
      d.probs[*k] = cell_number(part.substr(bar + 1), "probability");
      start = end + 1;
    }
    return d;
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw DomainError("unterminated interval '" + std::string(text) + "'");
    const std::string_view inner = text.substr(1, text.size() - 2);
    const std::size_t comma = inner.find(',');
    if (comma == std::string_view::npos) throw DomainError("interval needs two bounds");
    const double lo = cell_number(inner.substr(0, comma), "bound");
    const double hi = cell_number(inner.substr(comma + 1), "bound");
    if (!(lo <= hi)) throw DomainError("interval lower bound exceeds upper bound");
    return Interval{lo, hi};
  }
  const std::size_t pm = text.find("+-");
  if (pm != std::string_view::npos) {
    const double s = cell_number(text.substr(0, pm), "number");
    const double band = cell_number(text.substr(pm + 2), "band");
    if (!(band >= 0.0) || !std::isfinite(band)) throw DomainError("band after '+-' must be finite and non-negative");
    if (band == 0.0) return Exact{s};
    return GaussianObs{s, band / 2.0, 0.0};
  }
  return Exact{cell_number(text, "number")};
}

}  // namespace

Observation parse_cell(std::string_view text, const Attribute& attribute) {
  Observation o = parse_cell_unchecked(text, attribute);
  check_observation(attribute, o);
  return o;
}

std::string format_cell(const Observation& observation, const Attribute& a) {
  if (std::holds_alternative<Missing>(observation)) return "?";
  if (const auto* e = std::get_if<Exact>(&observation)) {
    if (a.is_symbolic()) return a.categories.at(static_cast<std::size_t>(e->value));
    return format_double(e->value);
  }
  if (const auto* g = std::get_if<GaussianObs>(&observation)) {
    return format_double(g->center - g->bias) + "+-" + format_double(2.0 * g->sigma);
  }
  if (const auto* iv = std::get_if<Interval>(&observation)) {
    return "[" + format_double(iv->lo) + "," + format_double(iv->hi) + "]";
  }
  if (const auto* d = std::get_if<SymbolicDist>(&observation)) {
    std::string s;
    for (std::size_t k = 0; k < d->probs.size(); ++k) {
      if (d->probs[k] == 0.0) continue;
      if (!s.empty()) s += ';';
      s += a.categories.at(k) + "|" + format_double(d->probs[k]);
    }
    return s;
  }
  throw UnsupportedError("normal-mixture observations have no cell syntax");
}

TrainingTable read_dataset(std::istream& in, const Schema& schema) {
  TrainingTable table{schema, {}};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::optional<std::size_t>> column_attr;  // attribute per column
  std::optional<std::size_t> id_col;
  std::optional<std::size_t> w_col;
  bool header = false;
  std::optional<std::string> current_id;
  std::vector<std::string> finished_ids;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, line_no);
    if (!header) {
      std::vector<bool> covered(schema.size(), false);
      for (std::size_t c = 0; c < fields.size(); ++c) {
        const std::string& name = fields[c];
        if (name == "#id") {
          if (id_col) throw ParseError("duplicate #id column", line_no, c + 1);
          id_col = c;
          column_attr.emplace_back();
        } else if (name == "#w") {
          if (w_col) throw ParseError("duplicate #w column", line_no, c + 1);
          w_col = c;
          column_attr.emplace_back();
        } else {
          const auto j = schema.find(name);
          if (!j) throw ParseError("unknown column '" + name + "'", line_no, c + 1);
          if (covered[*j]) throw ParseError("duplicate column '" + name + "'", line_no, c + 1);
          covered[*j] = true;
          column_attr.emplace_back(*j);
        }
      }
      for (std::size_t j = 0; j < schema.size(); ++j) {
        if (!covered[j]) throw ParseError("missing column for attribute '" + schema[j].name + "'", line_no, 0);
      }
      header = true;
      continue;
    }
    if (fields.size() != column_attr.size()) {
      throw ParseError("expected " + std::to_string(column_attr.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no, 0);
    }
    Conjunction conj = missing_conjunction(schema);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!column_attr[c]) continue;
      const std::size_t j = *column_attr[c];
      try {
        conj.observations[j] = parse_cell(fields[c], schema[j]);
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(e.what(), line_no, c + 1);
      }
    }
    if (w_col) {
      const auto w = parse_double(fields[*w_col]);
      if (!w || !(*w > 0.0) || !std::isfinite(*w)) {
        throw ParseError("#w must be a positive number, got '" + fields[*w_col] + "'", line_no, *w_col + 1);
      }
      conj.weight = *w;
    }
    if (id_col) {
      const std::string& id = fields[*id_col];
      if (id.empty()) throw ParseError("empty #id", line_no, *id_col + 1);
      if (current_id && *current_id == id) {
        table.rows.back().conjunctions.push_back(std::move(conj));
        continue;
      }
      for (const std::string& done : finished_ids) {
        if (done == id) throw ParseError("rows with #id '" + id + "' are not contiguous", line_no, *id_col + 1);
      }
      if (current_id) finished_ids.push_back(*current_id);
      current_id = id;
    }
    table.rows.push_back(Evidence{{std::move(conj)}});
  }
  if (!header) throw ParseError("dataset has no header line", line_no, 0);
  return table;
}

TrainingTable read_dataset_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset '" + path + "'", 0, 0);
  return read_dataset(in, schema);
}

void write_dataset(std::ostream& out, const TrainingTable& table) {
  const Schema& schema = table.schema;
  bool grouped = false;
  for (const Evidence& row : table.rows) {
    grouped = grouped || row.conjunctions.size() != 1;
    for (const Conjunction& c : row.conjunctions) grouped = grouped || c.weight != 1.0;
  }
  if (grouped) out << "#id,#w,";
  for (std::size_t j = 0; j < schema.size(); ++j) out << (j ? "," : "") << schema[j].name;
  out << '\n';
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    for (const Conjunction& c : table.rows[k].conjunctions) {
      if (grouped) out << (k + 1) << ',' << format_double(c.weight) << ',';
      for (std::size_t j = 0; j < schema.size(); ++j) {
        const std::string cell = format_cell(c.observations[j], schema[j]);
        out << (j ? "," : "");
        if (cell.find(',') != std::string::npos && cell.front() != '[') {
          out << '"' << cell << '"';
        } else {
          out << cell;
        }
      }
      out << '\n';
    }
  }
}

void write_dataset_file(const std::string& path, const TrainingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset '" + path + "'");
  write_dataset(out, table);
  if (!out) throw Error("failed writing dataset '" + path + "'");
}

}  // namespace mfgn
