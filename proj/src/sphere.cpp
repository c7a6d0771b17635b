#include "ratdyn/sphere.hpp"

#include <cmath>
#include <stdexcept>

namespace ratdyn {

SpherePoint::SpherePoint(Complex z) {
  if (std::isnan(z.real()) || std::isnan(z.imag())) {
    throw std::invalid_argument("SpherePoint: NaN coordinate");
  }
  if (std::isinf(z.real()) || std::isinf(z.imag())) {
    infinite_ = true;
    return;
  }
  z_ = z;
}

Complex SpherePoint::value() const {
  if (infinite_) throw std::logic_error("SpherePoint::value at infinity");
  return z_;
}

Complex SpherePoint::inverse_chart() const {
  if (infinite_) return {0.0, 0.0};
  return 1.0 / z_;
}

std::array<double, 3> SpherePoint::embed() const {
  if (infinite_) return {0.0, 0.0, 1.0};
  const double r = std::abs(z_);
  if (r <= 1.0) {
    const double n2 = std::norm(z_);
    const double s = 1.0 / (1.0 + n2);
    return {2.0 * z_.real() * s, 2.0 * z_.imag() * s, (n2 - 1.0) * s};
  }
  // Same map written in u = 1/z so large |z| does not overflow.
  const Complex u = 1.0 / z_;
  const double m2 = std::norm(u);
  const double s = 1.0 / (1.0 + m2);
  // z/(1+|z|^2) = conj(u)/(1+|u|^2)
  return {2.0 * u.real() * s, -2.0 * u.imag() * s, (1.0 - m2) * s};
}

bool SpherePoint::operator==(const SpherePoint& other) const {
  if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
  return z_ == other.z_;
}

double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
  if (p.is_infinity() && q.is_infinity()) return 0.0;
  if (p.is_infinity() || q.is_infinity()) {
    const Complex z = p.is_infinity() ? q.value() : p.value();
    const double r = std::abs(z);
    if (r <= 1.0) return 2.0 / std::sqrt(1.0 + r * r);
    const double ur = 1.0 / r;
    return 2.0 * ur / std::sqrt(1.0 + ur * ur);
  }
  const Complex z = p.value();
  const Complex w = q.value();
  const double rz = std::abs(z);
  const double rw = std::abs(w);
  if (rz <= 1.0 && rw <= 1.0) {
    return 2.0 * std::abs(z - w) / std::sqrt((1.0 + rz * rz) * (1.0 + rw * rw));
  }
  if (rz > 1.0 && rw > 1.0) {
    // z -> 1/z is an isometry of the chordal metric.
    const Complex a = 1.0 / z;
    const Complex b = 1.0 / w;
    const double ra = std::abs(a);
    const double rb = std::abs(b);
    return 2.0 * std::abs(a - b) / std::sqrt((1.0 + ra * ra) * (1.0 + rb * rb));
  }
  // One point outside the unit disc: divide numerator and denominator by |z|.
  const Complex big = rz > 1.0 ? z : w;
  const Complex small = rz > 1.0 ? w : z;
  const Complex u = 1.0 / big;
  const double ru = std::abs(u);
  const double rs = std::abs(small);
  return 2.0 * std::abs(1.0 - small * u) /
         std::sqrt((1.0 + ru * ru) * (1.0 + rs * rs));
}

bool lexicographic_less(const SpherePoint& p, const SpherePoint& q) {
  if (p.is_infinity()) return false;
  if (q.is_infinity()) return true;
  const Complex a = p.value();
  const Complex b = q.value();
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace ratdyn
