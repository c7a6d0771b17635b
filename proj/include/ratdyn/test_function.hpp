#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ratdyn/cloud_index.hpp"
#include "ratdyn/sphere.hpp"

namespace ratdyn {

// One term c * z^j * conj(z)^k.
struct MonomialTerm {
  int j = 0;
  int k = 0;
  Complex c{1.0, 0.0};
};

// A finitely described function on sphere points.
//
// Three representations: a table of monomials in z and conj(z) (exact
// evaluation; defined at infinity only if constant), a tabulated function
// with nearest-atom lookup that refuses queries farther than its radius, and
// an arbitrary evaluator used for composites such as a o R.
class TestFunction {
 public:
  using Evaluator = std::function<Complex(const SpherePoint&)>;

  TestFunction() = default;  // the zero function

  static TestFunction constant(Complex c);
  static TestFunction monomial(int j, int k = 0, Complex c = 1.0);
  static TestFunction polynomial(std::vector<MonomialTerm> terms);
  // Throws std::invalid_argument on size mismatch or an empty table.
  static TestFunction tabulated(std::vector<SpherePoint> points, std::vector<Complex> values,
                                double radius);
  static TestFunction from_evaluator(Evaluator f, std::string label = "evaluator");

  // Throws EvaluationAtInfinity or LookupOutOfRange where undefined.
  Complex operator()(const SpherePoint& x) const;

  bool is_table() const { return kind_ == Kind::table; }
  // Terms of a monomial table (empty for other kinds).
  const std::vector<MonomialTerm>& terms() const { return terms_; }
  // Set when the function is a known constant.
  std::optional<Complex> constant_value() const;
  const std::string& label() const { return label_; }

  // Pointwise operations. Tables stay tables; anything else becomes an
  // evaluator.
  friend TestFunction operator*(const TestFunction& a, const TestFunction& b);
  friend TestFunction operator+(const TestFunction& a, const TestFunction& b);
  TestFunction scaled(Complex s) const;
  TestFunction conjugated() const;

 private:
  enum class Kind { table, tabulated, evaluator };
  struct Table {
    std::vector<SpherePoint> points;
    std::vector<Complex> values;
    double radius = 0.0;
    CloudIndex index;
  };

  Kind kind_ = Kind::table;
  std::vector<MonomialTerm> terms_;
  std::shared_ptr<const Table> table_;
  Evaluator eval_;
  std::string label_;
};

// Human-readable form of a monomial table, e.g. "2 + z*zbar".
std::string describe_terms(const std::vector<MonomialTerm>& terms);

// All monomials z^j conj(z)^k with j + k <= max_degree.
std::vector<TestFunction> monomial_family(int max_degree);

}  // namespace ratdyn
