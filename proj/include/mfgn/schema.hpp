// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfgn {

enum class AttributeKind { Continuous, Symbolic };

/// A named attribute. Symbolic categories are encoded by their index in
/// `categories`, so symbolic values travel through the numeric machinery as
/// exact small integers.
struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::Continuous;
  std::vector<std::string> categories;

  bool is_symbolic() const noexcept { return kind == AttributeKind::Symbolic; }
  std::size_t category_count() const noexcept { return categories.size(); }
  std::optional<std::size_t> category_index(std::string_view label) const;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered attribute list with unique names.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Attribute> attributes);

  std::size_t size() const noexcept { return attributes_.size(); }
  bool empty() const noexcept { return attributes_.empty(); }
  const Attribute& operator[](std::size_t j) const { return attributes_[j]; }
  std::span<const Attribute> attributes() const noexcept { return attributes_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws SchemaError for an unknown name.
  std::size_t index_of(std::string_view name) const;

  /// Checks that `value` is a legal encoded value of attribute j: finite for
  /// continuous attributes, an in-range integer index for symbolic ones.
  void check_value(std::size_t j, double value) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Attribute> attributes_;
};

/// Parses one `attr <name> continuous` / `attr <name> symbolic <v1> ...` line
/// (already split into whitespace-separated tokens, `attr` included).
Attribute parse_attribute_line(std::span<const std::string> tokens, std::size_t line);

/// Schema sidecar file: `attr` lines, blank lines and `#` comments.
Schema read_schema(std::istream& in);
Schema read_schema_file(const std::string& path);
void write_attribute_line(std::ostream& out, const Attribute& attribute);

/// Splits a line on ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view line);

/// Shortest decimal text that reads back to the identical double.
std::string format_double(double value);

/// Fixed 17-significant-digit text (model files).
std::string format_double17(double value);

/// Parses a complete decimal floating-point token ("inf"/"-inf" accepted).
std::optional<double> parse_double(std::string_view text);

}  // namespace mfgn
