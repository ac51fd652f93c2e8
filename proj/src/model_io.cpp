// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/model_io.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

constexpr const char* kHeader = "mfgn-model v1";

double number(const std::string& token, std::size_t line) {
  auto v = parse_double(token);
  if (!v) throw ParseError("expected a number, got '" + token + "'", line, 0);
  return *v;
}

}  // namespace

void write_model(std::ostream& out, const Model& model) {
  out << kHeader << '\n' << "schema\n";
  for (const Attribute& a : model.schema().attributes()) write_attribute_line(out, a);
  for (const Component& c : model.components()) {
    out << "component\n" << "weight " << format_double17(c.weight) << '\n';
    for (const Marginal& m : c.marginals) {
      if (const auto* n = std::get_if<GeneralizedNormal>(&m)) {
        out << "gn " << format_double17(n->mu) << ' ' << format_double17(n->sigma) << '\n';
      } else {
        out << "cat";
        for (double p : std::get<SymbolicMarginal>(m).probs) out << ' ' << format_double17(p);
        out << '\n';
      }
    }
  }
}

std::string save_model(const Model& model) {
  std::ostringstream out;
  write_model(out, model);
  return out.str();
}

void save_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  write_model(out, model);
  if (!out) throw Error("failed writing model file '" + path + "'");
}

Model read_model(std::istream& in) {
  enum class Section { Header, SchemaKeyword, Schema, Component };
  Section section = Section::Header;
  std::vector<Attribute> attributes;
  std::optional<Schema> schema;
  std::vector<Component> components;
  std::size_t component_line = 0;
  bool has_weight = false;

  auto close_component = [&](std::size_t line) {
    if (components.empty()) return;
    const Component& c = components.back();
    if (!has_weight) throw ParseError("component has no weight line", component_line, 0);
    if (c.marginals.size() != schema->size()) {
      throw ParseError("component lists " + std::to_string(c.marginals.size()) + " marginals, schema has " +
                           std::to_string(schema->size()),
                       line, 0);
    }
  };

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    const auto tokens = split_whitespace(text);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    const std::string& key = tokens.front();

    if (section == Section::Header) {
      if (tokens.size() != 2 || key != "mfgn-model") throw ParseError("missing 'mfgn-model' header", line, 0);
      if (tokens[1] != "v1") throw ParseError("unsupported model file version '" + tokens[1] + "'", line, 0);
      section = Section::SchemaKeyword;
      continue;
    }
    if (section == Section::SchemaKeyword) {
      if (tokens != std::vector<std::string>{"schema"}) throw ParseError("expected 'schema'", line, 0);
      section = Section::Schema;
      continue;
    }

    if (key == "attr") {
      if (section != Section::Schema) throw ParseError("'attr' outside the schema section", line, 0);
      attributes.push_back(parse_attribute_line(tokens, line));
      continue;
    }

    if (key == "component") {
      if (tokens.size() != 1) throw ParseError("'component' takes no arguments", line, 0);
      if (section == Section::Schema) {
        if (attributes.empty()) throw ParseError("schema declares no attributes", line, 0);
        try {
          schema.emplace(std::move(attributes));
        } catch (const SchemaError& e) {
          throw ParseError(e.what(), line, 0);
        }
        section = Section::Component;
      }
      close_component(line);
      components.emplace_back();
      component_line = line;
      has_weight = false;
      continue;
    }

    if (section != Section::Component) throw ParseError("unexpected '" + key + "' before any component", line, 0);
    Component& c = components.back();
    if (key == "weight") {
      if (has_weight || !c.marginals.empty()) throw ParseError("'weight' must come first, once", line, 0);
      if (tokens.size() != 2) throw ParseError("'weight' takes one value", line, 0);
      c.weight = number(tokens[1], line);
      has_weight = true;
    } else if (key == "gn" || key == "cat") {
      if (!has_weight) throw ParseError("'weight' must precede marginals", line, 0);
      const std::size_t j = c.marginals.size();
      if (j >= schema->size()) throw ParseError("more marginals than attributes", line, 0);
      const Attribute& a = (*schema)[j];
      if (key == "gn") {
        if (a.is_symbolic()) throw ParseError("attribute '" + a.name + "' is symbolic, expected 'cat'", line, 0);
        if (tokens.size() != 3) throw ParseError("'gn' takes mu and sigma", line, 0);
        c.marginals.emplace_back(GeneralizedNormal{number(tokens[1], line), number(tokens[2], line)});
      } else {
        if (!a.is_symbolic()) throw ParseError("attribute '" + a.name + "' is continuous, expected 'gn'", line, 0);
        if (tokens.size() != a.category_count() + 1) {
          throw ParseError("'cat' needs " + std::to_string(a.category_count()) + " probabilities", line, 0);
        }
        SymbolicMarginal t;
        for (std::size_t k = 1; k < tokens.size(); ++k) t.probs.push_back(number(tokens[k], line));
        c.marginals.emplace_back(std::move(t));
      }
    } else {
      throw ParseError("unknown directive '" + key + "'", line, 0);
    }
  }

  if (section == Section::Header) throw ParseError("empty model file", 0, 0);
  if (!schema) throw ParseError("model file has no components", line, 0);
  close_component(line);
  try {
    return Model(std::move(*schema), std::move(components));
  } catch (const Error& e) {
    throw ParseError(e.what(), 0, 0);
  }
}

Model load_model(const std::string& text) {
  std::istringstream in(text);
  return read_model(in);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path + "'", 0, 0);
  return read_model(in);
}

}  // namespace mfgn
