#include "ratdyn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ratdyn {

Polynomial::Polynomial(std::vector<Complex> coefficients)
    : coeffs_(std::move(coefficients)) {
  for (const Complex& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument("Polynomial: non-finite coefficient");
    }
  }
  trim();
}

Polynomial Polynomial::monomial(int power, Complex c) {
  if (power < 0) throw std::invalid_argument("Polynomial::monomial: negative power");
  std::vector<Complex> coeffs(static_cast<std::size_t>(power) + 1, Complex{});
  coeffs.back() = c;
  return Polynomial(std::move(coeffs));
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots) {
  Polynomial p = constant(1.0);
  for (const Complex& r : roots) p = p * Polynomial({-r, 1.0});
  return p;
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

Complex Polynomial::coefficient(int k) const {
  if (k < 0 || k > degree()) return {};
  return coeffs_[static_cast<std::size_t>(k)];
}

Complex Polynomial::operator()(Complex z) const {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    d[k - 1] = coeffs_[k] * static_cast<double>(k);
  }
  return Polynomial(std::move(d));
}

Polynomial Polynomial::reversed(int n) const {
  if (n < degree()) throw std::invalid_argument("Polynomial::reversed: n < degree");
  std::vector<Complex> r(static_cast<std::size_t>(n) + 1, Complex{});
  for (int k = 0; k <= degree(); ++k) {
    r[static_cast<std::size_t>(n - k)] = coeffs_[static_cast<std::size_t>(k)];
  }
  return Polynomial(std::move(r));
}

Polynomial Polynomial::taylor_shift(Complex c) const {
  // Repeated synthetic division; O(n^2) and stable enough for our degrees.
  std::vector<Complex> a = coeffs_;
  const int n = degree();
  for (int i = 0; i < n; ++i) {
    for (int k = n - 1; k >= i; --k) {
      a[static_cast<std::size_t>(k)] += c * a[static_cast<std::size_t>(k) + 1];
    }
  }
  return Polynomial(std::move(a));
}

Polynomial Polynomial::compose(const Polynomial& inner) const {
  Polynomial acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * inner + constant(*it);
  }
  return acc;
}

Polynomial Polynomial::pow(int exponent) const {
  if (exponent < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
  Polynomial result = constant(1.0);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

double Polynomial::abs_eval(double r) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
  for (Complex& c : coeffs_) c *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> out(a.coeffs_.size() + b.coeffs_.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(out));
}

double coefficient_distance(const Polynomial& a, const Polynomial& b) {
  const int n = std::max(a.degree(), b.degree());
  double m = 0.0;
  for (int k = 0; k <= n; ++k) m = std::max(m, std::abs(a.coefficient(k) - b.coefficient(k)));
  return m;
}

}  // namespace ratdyn
