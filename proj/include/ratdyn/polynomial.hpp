#pragma once

#include <span>
#include <vector>

#include "ratdyn/sphere.hpp"

namespace ratdyn {

// Dense univariate polynomial with complex coefficients, lowest degree first.
// Exact trailing zeros are trimmed, so the leading coefficient is nonzero
// unless the polynomial is zero (degree -1).
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coefficients);
  Polynomial(std::initializer_list<Complex> coefficients)
      : Polynomial(std::vector<Complex>(coefficients)) {}

  static Polynomial constant(Complex c) { return Polynomial({c}); }
  static Polynomial monomial(int power, Complex c = 1.0);
  // Product of (z - r) over the given roots.
  static Polynomial from_roots(std::span<const Complex> roots);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  Complex leading() const { return coeffs_.empty() ? Complex{} : coeffs_.back(); }
  Complex coefficient(int k) const;
  std::span<const Complex> coefficients() const { return coeffs_; }

  Complex operator()(Complex z) const;  // Horner
  Polynomial derivative() const;

  // z^n p(1/z) for n >= degree(); the chart at infinity.
  Polynomial reversed(int n) const;
  // Coefficients of p(z + c), i.e. the Taylor coefficients at c.
  Polynomial taylor_shift(Complex c) const;
  // p(q(z)).
  Polynomial compose(const Polynomial& inner) const;
  Polynomial pow(int exponent) const;

  // sum |a_k| r^k, the usual scale for backward-error residual tests.
  double abs_eval(double r) const;
  double max_abs_coefficient() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(Complex s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }
  friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  void trim();
  std::vector<Complex> coeffs_;
};

inline Complex poly_eval(const Polynomial& p, Complex z) { return p(z); }
inline Polynomial poly_derivative(const Polynomial& p) { return p.derivative(); }

// Largest coefficient-wise difference; zero iff equal.
double coefficient_distance(const Polynomial& a, const Polynomial& b);

}  // namespace ratdyn
