// Apache License, Version 2.0, refer to LICENSE.txt

#include "mfgn/query.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mfgn/error.hpp"

namespace mfgn {

namespace {

enum class Tok { Name, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(a[k])) != std::tolower(static_cast<unsigned char>(b[k]))) return false;
  }
  return true;
}

// Length of the numeric literal at the start of s (sign, digits, fraction,
// exponent, or a signed "inf").
std::size_t lex_number(std::string_view s) {
  auto digit = [&](std::size_t m) { return m < s.size() && std::isdigit(static_cast<unsigned char>(s[m])); };
  std::size_t m = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (iequals(s.substr(m, 3), "inf")) return m + 3;
  while (digit(m)) ++m;
  if (m < s.size() && s[m] == '.') {
    ++m;
    while (digit(m)) ++m;
  }
  if (m < s.size() && (s[m] == 'e' || s[m] == 'E')) {
    std::size_t e = m + 1;
    if (e < s.size() && (s[e] == '+' || s[e] == '-')) ++e;
    if (digit(e)) {
      m = e;
      while (digit(m)) ++m;
    }
  }
  return m;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t k = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t m = 0; m < n; ++m, ++k) {
      if (s[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (k < s.size()) {
    const char c = s[k];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t n = 1;
    const bool signed_number = (c == '-' || c == '+') && k + 1 < s.size() &&
                               (std::isdigit(static_cast<unsigned char>(s[k + 1])) || s[k + 1] == '.' ||
                                s[k + 1] == 'i' || s[k + 1] == 'I');
    if (c == '+' && k + 1 < s.size() && s[k + 1] == '-') {
      t.kind = Tok::Symbol;
      n = 2;
    } else if (name_start(c)) {
      t.kind = Tok::Name;
      while (k + n < s.size() && name_char(s[k + n])) ++n;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || signed_number) {
      t.kind = Tok::Number;
      n = lex_number(s.substr(k));
    } else if (std::string_view("()=~[],{}:?").find(c) != std::string_view::npos) {
      t.kind = Tok::Symbol;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    t.text = std::string(s.substr(k, n));
    out.push_back(std::move(t));
    advance(n);
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const Schema& schema) : tokens_(tokenize(text)), schema_(schema) {}

  EvidenceExpr parse() {
    EvidenceExpr e = parse_or();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after expression", peek());
    return e;
  }

 private:
  [[noreturn]] static void fail(const std::string& what, const Token& at) { throw ParseError(what, at.line, at.column); }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Symbol && peek(ahead).text == s;
  }
  bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Name && iequals(peek().text, kw); }
  void expect(std::string_view s) {
    if (!at_symbol(s)) fail("expected '" + std::string(s) + "', got " + describe(peek()), peek());
    next();
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of query" : "'" + t.text + "'"; }

  double number() {
    const Token& t = peek();
    const bool bare_inf = t.kind == Tok::Name && iequals(t.text, "inf");
    if (t.kind != Tok::Number && !bare_inf) fail("expected a number, got " + describe(t), t);
    const auto v = parse_double(t.text);
    if (!v) fail("malformed number '" + t.text + "'", t);
    next();
    return *v;
  }

  // A branch weight prefix is `w` `:` NUM; an attribute named w is followed by `=`, `~` or `in`.
  std::optional<double> branch_weight() {
    if (peek().kind == Tok::Name && peek().text == "w" && at_symbol(":", 1)) {
      next();
      next();
      const Token& at = peek();
      const double w = number();
      if (!(w > 0.0) || !std::isfinite(w)) fail("branch weight must be positive and finite", at);
      return w;
    }
    return std::nullopt;
  }

  EvidenceExpr parse_or() {
    std::vector<EvidenceExpr> branches;
    std::vector<double> weights;
    bool any_weight = false;
    do {
      if (!branches.empty()) next();  // OR
      const auto w = branch_weight();
      any_weight = any_weight || w.has_value();
      weights.push_back(w.value_or(1.0));
      branches.push_back(parse_and());
    } while (at_keyword("or"));
    if (branches.size() == 1 && !any_weight) return std::move(branches.front());
    return EvidenceExpr::any_of(std::move(branches), std::move(weights));
  }

  EvidenceExpr parse_and() {
    std::vector<EvidenceExpr> parts;
    parts.push_back(parse_atom());
    while (at_keyword("and")) {
      next();
      parts.push_back(parse_atom());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return EvidenceExpr::all_of(std::move(parts));
  }

  EvidenceExpr parse_atom() {
    if (at_symbol("(")) {
      next();
      EvidenceExpr e = parse_or();
      expect(")");
      return e;
    }
    return parse_obs();
  }

  EvidenceExpr parse_obs() {
    const Token name = peek();
    if (name.kind != Tok::Name) fail("expected an attribute name, got " + describe(name), name);
    const auto j = schema_.find(name.text);
    if (!j) fail("unknown attribute '" + name.text + "'", name);
    next();
    const Attribute& a = schema_[*j];
    const Token op = peek();
    Observation obs;
    if (at_symbol("=")) {
      next();
      obs = parse_equals(a);
    } else if (at_symbol("~")) {
      next();
      if (a.is_symbolic()) fail("'~' needs a continuous attribute, '" + a.name + "' is symbolic", op);
      const double s = number();
      expect("+-");
      const Token& band_at = peek();
      const double band = number();
      double bias = 0.0;
      if (at_keyword("bias")) {
        next();
        bias = number();
      }
      if (!(band >= 0.0) || !std::isfinite(band)) fail("band after '+-' must be finite and non-negative", band_at);
      if (band == 0.0) {
        obs = Exact{s - bias};
      } else {
        obs = GaussianObs{s, band / 2.0, bias};
      }
    } else if (at_keyword("in")) {
      next();
      if (a.is_symbolic()) fail("'in' needs a continuous attribute, '" + a.name + "' is symbolic", op);
      expect("[");
      const double lo = number();
      expect(",");
      const double hi = number();
      expect("]");
      if (!(lo <= hi)) fail("interval lower bound exceeds upper bound", op);
      obs = Interval{lo, hi};
    } else {
      fail("expected '=', '~' or 'in' after '" + a.name + "', got " + describe(op), op);
    }
    try {
      check_observation(a, obs);
    } catch (const Error& e) {
      fail(e.what(), op);
    }
    return EvidenceExpr::leaf(*j, std::move(obs));
  }

  Observation parse_equals(const Attribute& a) {
    const Token& t = peek();
    if (at_symbol("?")) {
      next();
      return Missing{};
    }
    if (at_symbol("{")) {
      if (!a.is_symbolic()) fail("category distribution on continuous attribute '" + a.name + "'", t);
      next();
      SymbolicDist d{std::vector<double>(a.category_count(), 0.0)};
      std::vector<bool> seen(a.category_count(), false);
      do {
        if (at_symbol(",")) next();
        const Token& cat = peek();
        if (cat.kind != Tok::Name) fail("expected a category label, got " + describe(cat), cat);
        const auto k = a.category_index(cat.text);
        if (!k) fail("'" + cat.text + "' is not a category of '" + a.name + "'", cat);
        if (seen[*k]) fail("category '" + cat.text + "' listed twice", cat);
        seen[*k] = true;
        next();
        expect(":");
        const Token& pt = peek();
        const double p = number();
        if (!(p >= 0.0)) fail("category probability must be non-negative", pt);
        d.probs[*k] = p;
      } while (at_symbol(","));
      expect("}");
      return d;
    }
    if (a.is_symbolic()) {
      if (t.kind != Tok::Name) fail("expected a category of '" + a.name + "', got " + describe(t), t);
      const auto k = a.category_index(t.text);
      if (!k) fail("'" + t.text + "' is not a category of '" + a.name + "'", t);
      next();
      return Exact{static_cast<double>(*k)};
    }
    return Exact{number()};
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Schema& schema_;
};

std::string print(const EvidenceExpr& e, const Schema& schema);

std::string print_child(const EvidenceExpr& e, const Schema& schema) {
  if (e.kind == EvidenceExpr::Kind::Leaf) return print(e, schema);
  return "(" + print(e, schema) + ")";
}

std::string print(const EvidenceExpr& e, const Schema& schema) {
  switch (e.kind) {
    case EvidenceExpr::Kind::Leaf:
      if (e.attribute >= schema.size()) throw SchemaError("leaf refers to attribute index out of range");
      return schema[e.attribute].name + " " + observation_to_query(schema[e.attribute], e.observation);
    case EvidenceExpr::Kind::And: {
      std::string s;
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        if (k) s += " AND ";
        s += print_child(e.children[k], schema);
      }
      return s;
    }
    case EvidenceExpr::Kind::Or: {
      std::string s;
      const bool single = e.children.size() == 1;
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        if (k) s += " OR ";
        if (single || e.weights[k] != 1.0) s += "w:" + format_double(e.weights[k]) + " ";
        s += print_child(e.children[k], schema);
      }
      return s;
    }
  }
  return {};
}

}  // namespace

std::string observation_to_query(const Attribute& a, const Observation& observation) {
  if (std::holds_alternative<Missing>(observation)) return "= ?";
  if (const auto* e = std::get_if<Exact>(&observation)) {
    if (a.is_symbolic()) return "= " + a.categories.at(static_cast<std::size_t>(e->value));
    return "= " + format_double(e->value);
  }
  if (const auto* g = std::get_if<GaussianObs>(&observation)) {
    std::string s = "~ " + format_double(g->center) + " +- " + format_double(2.0 * g->sigma);
    if (g->bias != 0.0) s += " bias " + format_double(g->bias);
    return s;
  }
  if (const auto* iv = std::get_if<Interval>(&observation)) {
    return "in [" + format_double(iv->lo) + ", " + format_double(iv->hi) + "]";
  }
  if (const auto* d = std::get_if<SymbolicDist>(&observation)) {
    std::string s = "= {";
    for (std::size_t k = 0; k < d->probs.size(); ++k) {
      if (k) s += ", ";
      s += a.categories.at(k) + ":" + format_double(d->probs[k]);
    }
    return s + "}";
  }
  throw UnsupportedError("normal-mixture observations have no query syntax");
}

EvidenceExpr parse_query(std::string_view text, const Schema& schema) { return Parser(text, schema).parse(); }

std::string to_query(const EvidenceExpr& expr, const Schema& schema) { return print(expr, schema); }

Evidence parse_evidence(std::string_view text, const Schema& schema) { return expand(parse_query(text, schema), schema); }

}  // namespace mfgn
