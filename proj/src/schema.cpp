// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.' || c == '-';
  });
}

}  // namespace

std::optional<std::size_t> Attribute::category_index(std::string_view label) const {
  const auto it = std::find(categories.begin(), categories.end(), label);
  if (it == categories.end()) return std::nullopt;
  return static_cast<std::size_t>(it - categories.begin());
}

Schema::Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
  std::set<std::string, std::less<>> names;
  for (const auto& a : attributes_) {
    if (!is_identifier(a.name)) throw SchemaError("invalid attribute name '" + a.name + "'");
    if (!names.insert(a.name).second) throw SchemaError("duplicate attribute name '" + a.name + "'");
    if (a.is_symbolic()) {
      if (a.categories.empty()) throw SchemaError("symbolic attribute '" + a.name + "' has no categories");
      std::set<std::string, std::less<>> labels;
      for (const auto& c : a.categories) {
        if (!is_identifier(c)) throw SchemaError("invalid category label '" + c + "' in '" + a.name + "'");
        if (!labels.insert(c).second) throw SchemaError("duplicate category '" + c + "' in '" + a.name + "'");
      }
    } else if (!a.categories.empty()) {
      throw SchemaError("continuous attribute '" + a.name + "' cannot list categories");
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t j = 0; j < attributes_.size(); ++j) {
    if (attributes_[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto j = find(name)) return *j;
  throw SchemaError("unknown attribute '" + std::string(name) + "'");
}

void Schema::check_value(std::size_t j, double value) const {
  const Attribute& a = attributes_.at(j);
  if (!std::isfinite(value)) throw SchemaError("non-finite value for attribute '" + a.name + "'");
  if (a.is_symbolic()) {
    if (value < 0.0 || value != std::floor(value) || value >= static_cast<double>(a.category_count())) {
      throw SchemaError("value " + format_double(value) + " is not a category index of '" + a.name + "'");
    }
  }
}

Attribute parse_attribute_line(std::span<const std::string> tokens, std::size_t line) {
  if (tokens.size() < 3 || tokens[0] != "attr") {
    throw ParseError("expected 'attr <name> continuous|symbolic ...'", line, 0);
  }
  Attribute a;
  a.name = tokens[1];
  if (tokens[2] == "continuous") {
    if (tokens.size() != 3) throw ParseError("continuous attribute takes no categories", line, 0);
    a.kind = AttributeKind::Continuous;
  } else if (tokens[2] == "symbolic") {
    if (tokens.size() < 4) throw ParseError("symbolic attribute needs at least one category", line, 0);
    a.kind = AttributeKind::Symbolic;
    a.categories.assign(tokens.begin() + 3, tokens.end());
  } else {
    throw ParseError("unknown attribute kind '" + tokens[2] + "'", line, 0);
  }
  return a;
}

Schema read_schema(std::istream& in) {
  std::vector<Attribute> attributes;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto tokens = split_whitespace(text);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    attributes.push_back(parse_attribute_line(tokens, line));
  }
  if (attributes.empty()) throw ParseError("schema declares no attributes", 0, 0);
  try {
    return Schema(std::move(attributes));
  } catch (const SchemaError& e) {
    throw ParseError(e.what(), 0, 0);
  }
}

Schema read_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file '" + path + "'", 0, 0);
  return read_schema(in);
}

void write_attribute_line(std::ostream& out, const Attribute& attribute) {
  out << "attr " << attribute.name;
  if (attribute.is_symbolic()) {
    out << " symbolic";
    for (const auto& c : attribute.categories) out << ' ' << c;
  } else {
    out << " continuous";
  }
  out << '\n';
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string format_double17(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::optional<double> parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (std::isnan(value)) return std::nullopt;
  return value;
}

}  // namespace mfgn
