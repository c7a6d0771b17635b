#pragma once

#include <vector>

#include "ratdyn/polynomial.hpp"
#include "ratdyn/roots.hpp"

namespace ratdyn {

// R = P/Q with P, Q coprime; degree d = max(deg P, deg Q).
//
// Coprimality is checked at construction against the roots of the lower
// degree factor; a common root above tolerance throws NotCoprime rather than
// being divided out, since silently cancelling it would change d.
class RationalMap {
 public:
  RationalMap(Polynomial numerator, Polynomial denominator);
  explicit RationalMap(Polynomial polynomial)
      : RationalMap(std::move(polynomial), Polynomial::constant(1.0)) {}

  const Polynomial& numerator() const { return p_; }
  const Polynomial& denominator() const { return q_; }
  int degree() const { return degree_; }
  bool is_polynomial() const { return q_.degree() == 0; }

  SpherePoint operator()(const SpherePoint& x) const;

  // Image of infinity: infinity, the leading ratio or 0.
  SpherePoint value_at_infinity() const;

 private:
  Polynomial p_;
  Polynomial q_;
  Polynomial p_rev_;  // chart at infinity
  Polynomial q_rev_;
  int degree_ = 0;
};

inline SpherePoint evaluate(const RationalMap& r, const SpherePoint& x) { return r(x); }

// Applies r n times to x.
SpherePoint iterate_point(const RationalMap& r, SpherePoint x, int n);

constexpr int kDefaultDegreeBudget = 256;

// outer(inner(z)) by homogenized coefficient composition; degrees multiply.
RationalMap compose(const RationalMap& outer, const RationalMap& inner,
                    int degree_budget = kDefaultDegreeBudget);
RationalMap iterate_map(const RationalMap& r, int n, int degree_budget = kDefaultDegreeBudget);

struct CriticalDatum {
  SpherePoint point;
  int branch_index = 2;
  SpherePoint critical_value;
};

// Finite critical points are roots of P'Q - PQ' (index = multiplicity + 1);
// infinity is examined through the conjugate 1/R(1/u) at u = 0. Requires
// degree >= 2. The result is sorted lexicographically, infinity last.
std::vector<CriticalDatum> critical_points(const RationalMap& r, const RootTolerances& tol = {});

// Sum of (e - 1) over the critical points; equals 2d - 2 for a valid result.
int riemann_hurwitz_total(const std::vector<CriticalDatum>& critical);

}  // namespace ratdyn
