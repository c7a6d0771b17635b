#include "ratdyn/rational_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ratdyn/errors.hpp"

namespace ratdyn {

namespace {

// Relative size of P at a root r of Q; small means a shared root.
double relative_value(const Polynomial& p, Complex r) {
  if (std::abs(r) <= 1.0) {
    const double scale = p.abs_eval(std::abs(r));
    return scale > 0 ? std::abs(p(r)) / scale : 0.0;
  }
  const Polynomial rev = p.reversed(p.degree());
  const Complex u = 1.0 / r;
  const double scale = rev.abs_eval(std::abs(u));
  return scale > 0 ? std::abs(rev(u)) / scale : 0.0;
}

constexpr double kCoprimeTolerance = 1e-9;

Complex int_pow(Complex z, int k) {
  Complex acc = 1.0;
  for (int i = 0; i < k; ++i) acc *= z;
  return acc;
}

}  // namespace

RationalMap::RationalMap(Polynomial numerator, Polynomial denominator)
    : p_(std::move(numerator)), q_(std::move(denominator)) {
  if (q_.is_zero()) throw PreconditionError("RationalMap: zero denominator");
  if (p_.is_zero()) throw PreconditionError("RationalMap: zero numerator");
  degree_ = std::max(p_.degree(), q_.degree());
  p_rev_ = p_.reversed(p_.degree());
  q_rev_ = q_.reversed(q_.degree());

  // Check the roots of the lower-degree factor against the other one.
  const bool q_smaller = q_.degree() <= p_.degree();
  const Polynomial& small = q_smaller ? q_ : p_;
  const Polynomial& other = q_smaller ? p_ : q_;
  if (small.degree() >= 1) {
    const RootSet rs = roots_with_multiplicity(small);
    for (const Root& root : rs.entries) {
      if (relative_value(other, root.point.value()) < kCoprimeTolerance) {
        throw NotCoprime("RationalMap: numerator and denominator share a root near (" +
                         std::to_string(root.point.value().real()) + ", " +
                         std::to_string(root.point.value().imag()) + ")");
      }
    }
  }
}

SpherePoint RationalMap::value_at_infinity() const {
  if (p_.degree() > q_.degree()) return SpherePoint::infinity();
  if (p_.degree() == q_.degree()) return SpherePoint(p_.leading() / q_.leading());
  return SpherePoint(Complex{});
}

SpherePoint RationalMap::operator()(const SpherePoint& x) const {
  if (x.is_infinity()) return value_at_infinity();
  const Complex z = x.value();
  Complex ratio;
  int shift = 0;
  if (std::abs(z) <= 1.0) {
    const Complex num = p_(z);
    const Complex den = q_(z);
    if (den == Complex{}) return SpherePoint::infinity();
    ratio = num / den;
  } else {
    // P(z)/Q(z) = z^(dP - dQ) Prev(u)/Qrev(u) with u = 1/z.
    const Complex u = 1.0 / z;
    const Complex num = p_rev_(u);
    const Complex den = q_rev_(u);
    if (den == Complex{}) return SpherePoint::infinity();
    ratio = num / den;
    shift = p_.degree() - q_.degree();
  }
  Complex value = ratio;
  if (shift > 0) value *= int_pow(z, shift);
  if (shift < 0) value /= int_pow(z, -shift);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) return SpherePoint::infinity();
  return SpherePoint(value);
}

SpherePoint iterate_point(const RationalMap& r, SpherePoint x, int n) {
  for (int k = 0; k < n; ++k) x = r(x);
  return x;
}

RationalMap compose(const RationalMap& outer, const RationalMap& inner, int degree_budget) {
  const long long degree = static_cast<long long>(outer.degree()) * inner.degree();
  if (degree > degree_budget) {
    throw BudgetExceeded("compose: degree " + std::to_string(degree) + " exceeds budget " +
                         std::to_string(degree_budget));
  }
  // P(A/B) B^d and Q(A/B) B^d with d = deg outer.
  const int d = outer.degree();
  const Polynomial& a = inner.numerator();
  const Polynomial& b = inner.denominator();
  std::vector<Polynomial> a_pow{Polynomial::constant(1.0)};
  std::vector<Polynomial> b_pow{Polynomial::constant(1.0)};
  for (int k = 1; k <= d; ++k) {
    a_pow.push_back(a_pow.back() * a);
    b_pow.push_back(b_pow.back() * b);
  }
  auto homogenize = [&](const Polynomial& f) {
    Polynomial acc;
    for (int k = 0; k <= f.degree(); ++k) {
      acc += f.coefficient(k) * (a_pow[static_cast<std::size_t>(k)] *
                                 b_pow[static_cast<std::size_t>(d - k)]);
    }
    return acc;
  };
  return RationalMap(homogenize(outer.numerator()), homogenize(outer.denominator()));
}

RationalMap iterate_map(const RationalMap& r, int n, int degree_budget) {
  if (n < 1) throw PreconditionError("iterate_map: n must be >= 1");
  const double log_degree = n * std::log(static_cast<double>(r.degree()));
  if (log_degree > std::log(static_cast<double>(degree_budget)) + 1e-12) {
    throw BudgetExceeded("iterate_map: degree " + std::to_string(r.degree()) + "^" +
                         std::to_string(n) + " exceeds budget " + std::to_string(degree_budget));
  }
  RationalMap acc = r;
  for (int k = 1; k < n; ++k) acc = compose(r, acc, degree_budget);
  return acc;
}

std::vector<CriticalDatum> critical_points(const RationalMap& r, const RootTolerances& tol) {
  if (r.degree() < 2) throw PreconditionError("critical_points: degree must be >= 2");
  const Polynomial& p = r.numerator();
  const Polynomial& q = r.denominator();
  std::vector<CriticalDatum> out;

  const Polynomial wronskian = p.derivative() * q - p * q.derivative();
  if (!wronskian.is_zero() && wronskian.degree() >= 1) {
    for (const Root& root : roots_with_multiplicity(wronskian, tol).entries) {
      out.push_back({root.point, root.multiplicity + 1, r(root.point)});
    }
  }

  // Conjugate by u = 1/z: S(u) = 1/R(1/u) = Qd(u)/Pd(u) with Xd = u^d X(1/u).
  const int d = r.degree();
  const Polynomial pd = p.reversed(d);
  const Polynomial qd = q.reversed(d);
  const Polynomial conj_wronskian = qd.derivative() * pd - qd * pd.derivative();
  if (!conj_wronskian.is_zero() && conj_wronskian.degree() >= 1) {
    for (const Root& root : roots_with_multiplicity(conj_wronskian, tol).entries) {
      if (std::abs(root.point.value()) <= tol.cluster_radius) {
        out.push_back({SpherePoint::infinity(), root.multiplicity + 1, r.value_at_infinity()});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CriticalDatum& a, const CriticalDatum& b) {
    return lexicographic_less(a.point, b.point);
  });
  return out;
}

int riemann_hurwitz_total(const std::vector<CriticalDatum>& critical) {
  int total = 0;
  for (const CriticalDatum& c : critical) total += c.branch_index - 1;
  return total;
}

}  // namespace ratdyn
