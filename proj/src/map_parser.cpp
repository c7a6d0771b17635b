#include "ratdyn/map_parser.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "ratdyn/errors.hpp"

namespace ratdyn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Node {
  enum Kind { number, variable, unary_minus, add, sub, mul, div, pow, call } kind;
  double value = 0.0;
  std::string name;  // variable or function name
  std::unique_ptr<Node> lhs, rhs;
};
using NodePtr = std::unique_ptr<Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_unique<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string text) : s_(std::move(text)) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("cannot parse \"" + s_ + "\" at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  bool starts_primary() {
    skip();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' ||
           std::isalpha(static_cast<unsigned char>(c));
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = make(Node::sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = make(Node::div, std::move(lhs), unary());
      } else if (starts_primary()) {
        lhs = make(Node::mul, std::move(lhs), power());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::unary_minus, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a nonnegative integer");
      auto e = make(Node::number);
      e->value = std::stod(s_.substr(start, pos_ - start));
      return make(Node::pow, std::move(base), std::move(e));
    }
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = make(Node::number);
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "conj" || name == "re" || name == "im") {
        if (!accept('(')) fail(name + " needs parentheses");
        auto n = make(Node::call, expr());
        if (!accept(')')) fail("missing ')'");
        n->name = std::move(name);
        return n;
      }
      if (name != "z" && name != "zbar" && name != "i") {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      auto n = make(Node::variable);
      n->name = std::move(name);
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

// --- rational-function algebra ------------------------------------------------

struct Ratio {
  Polynomial p;
  Polynomial q;
};

Ratio eval_ratio(const Node& n, const std::string& text) {
  auto err = [&](const std::string& what) -> ParseError {
    return ParseError("map \"" + text + "\": " + what);
  };
  switch (n.kind) {
    case Node::number:
      return {Polynomial::constant(n.value), Polynomial{1.0}};
    case Node::variable:
      if (n.name == "z") return {Polynomial{0.0, 1.0}, Polynomial{1.0}};
      if (n.name == "i") return {Polynomial::constant(Complex(0.0, 1.0)), Polynomial{1.0}};
      throw err("'" + n.name + "' is not allowed in a map");
    case Node::call:
      throw err(n.name + "() is not allowed in a map");
    case Node::unary_minus: {
      Ratio a = eval_ratio(*n.lhs, text);
      return {a.p * Complex(-1.0), a.q};
    }
    case Node::add:
    case Node::sub: {
      const Ratio a = eval_ratio(*n.lhs, text);
      Ratio b = eval_ratio(*n.rhs, text);
      if (n.kind == Node::sub) b.p = b.p * Complex(-1.0);
      if (a.q == b.q) return {a.p + b.p, a.q};
      return {a.p * b.q + b.p * a.q, a.q * b.q};
    }
    case Node::mul: {
      const Ratio a = eval_ratio(*n.lhs, text);
      const Ratio b = eval_ratio(*n.rhs, text);
      return {a.p * b.p, a.q * b.q};
    }
    case Node::div: {
      const Ratio a = eval_ratio(*n.lhs, text);
      const Ratio b = eval_ratio(*n.rhs, text);
      if (b.p.is_zero()) throw err("division by zero");
      return {a.p * b.q, a.q * b.p};
    }
    case Node::pow: {
      const Ratio a = eval_ratio(*n.lhs, text);
      const int e = static_cast<int>(n.rhs->value);
      if (e > 256) throw err("exponent too large");
      return {a.p.pow(e), a.q.pow(e)};
    }
  }
  throw err("internal parser error");
}

// --- z, zbar polynomial algebra ----------------------------------------------

using Terms = std::map<std::pair<int, int>, Complex>;

Terms terms_mul(const Terms& a, const Terms& b) {
  Terms out;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) out[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
  }
  return out;
}

Terms terms_scale(Terms a, Complex s) {
  for (auto& [k, c] : a) c *= s;
  return a;
}

Terms terms_add(Terms a, const Terms& b) {
  for (const auto& [k, c] : b) a[k] += c;
  return a;
}

Terms terms_conj(const Terms& a) {
  Terms out;
  for (const auto& [k, c] : a) out[{k.second, k.first}] += std::conj(c);
  return out;
}

std::optional<Complex> terms_constant(const Terms& a) {
  Complex c{};
  for (const auto& [k, v] : a) {
    if (v == Complex{}) continue;
    if (k.first != 0 || k.second != 0) return std::nullopt;
    c += v;
  }
  return c;
}

Terms eval_terms(const Node& n, const std::string& text) {
  auto err = [&](const std::string& what) -> ParseError {
    return ParseError("test function \"" + text + "\": " + what);
  };
  switch (n.kind) {
    case Node::number:
      return {{{0, 0}, n.value}};
    case Node::variable:
      if (n.name == "z") return {{{1, 0}, 1.0}};
      if (n.name == "zbar") return {{{0, 1}, 1.0}};
      return {{{0, 0}, Complex(0.0, 1.0)}};
    case Node::call: {
      const Terms a = eval_terms(*n.lhs, text);
      if (n.name == "conj") return terms_conj(a);
      if (n.name == "re") return terms_scale(terms_add(a, terms_conj(a)), 0.5);
      return terms_scale(terms_add(a, terms_scale(terms_conj(a), -1.0)), Complex(0.0, -0.5));
    }
    case Node::unary_minus:
      return terms_scale(eval_terms(*n.lhs, text), -1.0);
    case Node::add:
      return terms_add(eval_terms(*n.lhs, text), eval_terms(*n.rhs, text));
    case Node::sub:
      return terms_add(eval_terms(*n.lhs, text), terms_scale(eval_terms(*n.rhs, text), -1.0));
    case Node::mul:
      return terms_mul(eval_terms(*n.lhs, text), eval_terms(*n.rhs, text));
    case Node::div: {
      const auto c = terms_constant(eval_terms(*n.rhs, text));
      if (!c) throw err("division is only allowed by constants");
      if (*c == Complex{}) throw err("division by zero");
      return terms_scale(eval_terms(*n.lhs, text), 1.0 / *c);
    }
    case Node::pow: {
      const Terms a = eval_terms(*n.lhs, text);
      const int e = static_cast<int>(n.rhs->value);
      if (e > 64) throw err("exponent too large");
      Terms acc{{{0, 0}, 1.0}};
      for (int k = 0; k < e; ++k) acc = terms_mul(acc, a);
      return acc;
    }
  }
  throw err("internal parser error");
}

}  // namespace

ParsedMap parse_map_spec(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParseError("empty map expression");
  const auto colon = text.find(':');
  const std::string head = trim(text.substr(0, colon));
  for (const std::string& name : list_examples()) {
    if (head != name) continue;
    std::optional<Complex> param;
    if (colon != std::string::npos) {
      const SpherePoint p = parse_point(text.substr(colon + 1));
      if (p.is_infinity()) throw ParseError("parameter must be finite");
      param = p.value();
    }
    ExampleRecord rec = get_example(name, param);
    RationalMap map = rec.map;
    return {std::move(map), text, std::move(rec)};
  }
  if (colon != std::string::npos) throw ParseError("unknown example '" + head + "'");

  const NodePtr ast = Parser(text).parse();
  Ratio r = eval_ratio(*ast, text);
  if (r.q.is_constant()) {
    r.p = r.p * (1.0 / r.q.coefficient(0));
    r.q = Polynomial{1.0};
  }
  if (r.p.is_zero()) throw ParseError("map \"" + text + "\" is identically zero");
  return {RationalMap(std::move(r.p), std::move(r.q)), text, std::nullopt};
}

RationalMap parse_map(const std::string& text) { return parse_map_spec(text).map; }

TestFunction parse_test_function(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParseError("empty test function");
  const NodePtr ast = Parser(text).parse();
  std::vector<MonomialTerm> terms;
  for (const auto& [k, c] : eval_terms(*ast, text)) terms.push_back({k.first, k.second, c});
  return TestFunction::polynomial(std::move(terms));
}

SpherePoint parse_point(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "inf" || text == "infinity" || text == "oo") return SpherePoint::infinity();
  if (text.empty()) throw ParseError("empty point");
  const NodePtr ast = Parser(text).parse();
  const Terms t = eval_terms(*ast, text);
  const auto c = terms_constant(t);
  if (!c) throw ParseError("point \"" + text + "\" must be a constant");
  if (!std::isfinite(c->real()) || !std::isfinite(c->imag())) {
    throw ParseError("point \"" + text + "\" is not finite");
  }
  return *c;
}

}  // namespace ratdyn
