#pragma once

#include <array>
#include <complex>

namespace ratdyn {

using Complex = std::complex<double>;

// A point of the Riemann sphere: a finite complex number or infinity.
//
// Finite points never hold NaN or infinite components; constructing one from
// a complex value of infinite magnitude yields the point at infinity, and a
// NaN component throws std::invalid_argument.
class SpherePoint {
 public:
  SpherePoint() = default;
  SpherePoint(Complex z);  // NOLINT(google-explicit-constructor)
  SpherePoint(double x) : SpherePoint(Complex(x, 0.0)) {}  // NOLINT

  static SpherePoint infinity() {
    SpherePoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinity() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  // Coordinate in the standard chart. Throws std::logic_error at infinity.
  Complex value() const;

  // Coordinate in the chart w = 1/z (zero at infinity, infinity at 0 maps to
  // a huge value, so only call with |z| > 0).
  Complex inverse_chart() const;

  // Image on the unit sphere in R^3 under inverse stereographic projection.
  // The Euclidean distance between two such images is the chordal distance.
  std::array<double, 3> embed() const;

  // Exact comparison of representation; use chordal_distance for tolerance.
  bool operator==(const SpherePoint& other) const;

 private:
  Complex z_{0.0, 0.0};
  bool infinite_ = false;
};

// 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)) on finite points, 2/sqrt(1+|z|^2)
// against infinity. Evaluated in the chart w = 1/z when |z| > 1.
double chordal_distance(const SpherePoint& p, const SpherePoint& q);

inline bool approx_equal(const SpherePoint& p, const SpherePoint& q, double tol) {
  return chordal_distance(p, q) <= tol;
}

// Deterministic total order: finite points by (re, im), infinity last.
bool lexicographic_less(const SpherePoint& p, const SpherePoint& q);

}  // namespace ratdyn
