#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ratdyn/cloud_index.hpp"
#include "ratdyn/errors.hpp"
#include "ratdyn/parallel.hpp"
#include "ratdyn/polynomial.hpp"
#include "ratdyn/roots.hpp"
#include "ratdyn/sphere.hpp"

using namespace ratdyn;

namespace {

std::vector<SpherePoint> random_points(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<SpherePoint> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(Complex(normal(rng), normal(rng)));
  return out;
}

// Sorted real parts of roots repeated by multiplicity.
std::vector<double> real_roots(const RootSet& set) {
  std::vector<double> out;
  for (const Root& r : set.entries) {
    for (int m = 0; m < r.multiplicity; ++m) out.push_back(r.point.value().real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("chordal distance: closed forms and metric axioms") {
  CHECK(chordal_distance(Complex(0, 0), SpherePoint::infinity()) == doctest::Approx(2.0));
  CHECK(chordal_distance(Complex(1, 0), Complex(-1, 0)) == doctest::Approx(2.0));
  // 1 and i sit a quarter turn apart on the equator.
  CHECK(chordal_distance(Complex(1, 0), Complex(0, 1)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(chordal_distance(SpherePoint::infinity(), SpherePoint::infinity()) == 0.0);

  const auto pts = random_points(60, 3);
  for (const auto& p : pts) {
    for (const auto& q : pts) {
      const double d = chordal_distance(p, q);
      CHECK(d >= 0.0);
      CHECK(d <= 2.0 + 1e-15);
      CHECK(d == doctest::Approx(chordal_distance(q, p)).epsilon(1e-14));
      // z -> 1/z is an isometry.
      const SpherePoint ip = p.value() == Complex{} ? SpherePoint::infinity()
                                                    : SpherePoint(1.0 / p.value());
      const SpherePoint iq = q.value() == Complex{} ? SpherePoint::infinity()
                                                    : SpherePoint(1.0 / q.value());
      CHECK(chordal_distance(ip, iq) == doctest::Approx(d).epsilon(1e-12));
    }
  }
  for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
    CHECK(chordal_distance(pts[i], pts[i + 2]) <=
          chordal_distance(pts[i], pts[i + 1]) + chordal_distance(pts[i + 1], pts[i + 2]) + 1e-14);
  }
}

TEST_CASE("sphere embedding distance is the chordal distance") {
  const auto pts = random_points(40, 5);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto a = pts[i].embed();
    const auto b = pts[i + 1].embed();
    const double e = std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    CHECK(e == doctest::Approx(chordal_distance(pts[i], pts[i + 1])).epsilon(1e-13));
  }
  CHECK_THROWS_AS(SpherePoint(Complex(std::nan(""), 0.0)), std::invalid_argument);
  CHECK(SpherePoint(Complex(INFINITY, 0.0)).is_infinity());
}

TEST_CASE("polynomial arithmetic") {
  const Polynomial p{1.0, -3.0, 0.0, 2.0};  // 2z^3 - 3z + 1
  CHECK(p.degree() == 3);
  CHECK(p(Complex(2, 0)) == Complex(11, 0));
  CHECK(p.derivative() == Polynomial({-3.0, 0.0, 6.0}));
  const Polynomial q{-1.0, 1.0};
  CHECK((p * q).degree() == 4);
  CHECK(std::abs((p * q)(Complex(0.3, 0.7)) - p(Complex(0.3, 0.7)) * q(Complex(0.3, 0.7))) < 1e-14);
  CHECK(std::abs(p.compose(q)(Complex(0.5, 0.1)) - p(q(Complex(0.5, 0.1)))) < 1e-14);
  const Polynomial shifted = p.taylor_shift(Complex(1, 0));
  CHECK(std::abs(shifted(Complex(0.25, 0)) - p(Complex(1.25, 0))) < 1e-14);
  // Reversal: z^3 p(1/z).
  CHECK(p.reversed(3) == Polynomial({2.0, 0.0, -3.0, 1.0}));
  CHECK((p - p).is_zero());
}

TEST_CASE("roots: (z-1)^2 (z+2) deflates to {1 (x2), -2}") {
  const Complex r[] = {1.0, 1.0, -2.0};
  const RootSet set = roots_with_multiplicity(Polynomial::from_roots(r));
  REQUIRE(set.entries.size() == 2);
  CHECK(set.total_multiplicity() == 3);
  for (const Root& root : set.entries) {
    const Complex z = root.point.value();
    if (std::abs(z - 1.0) < 1e-6) {
      CHECK(root.multiplicity == 2);
    } else {
      CHECK(std::abs(z + 2.0) < 1e-12);
      CHECK(root.multiplicity == 1);
    }
  }
}

TEST_CASE("roots: z^4 - 4z^2 + 2 against the closed form +-sqrt(2 +- sqrt 2)") {
  const RootSet set = roots_with_multiplicity(Polynomial{2.0, 0.0, -4.0, 0.0, 1.0});
  // Oracle: z^4 - 4z^2 + 2 = 2 T_4(z / 2), so the roots are 2 cos(pi (2k+1) / 8).
  std::vector<double> oracle;
  for (int k = 0; k < 4; ++k) oracle.push_back(2.0 * std::cos(std::numbers::pi * (2 * k + 1) / 8));
  std::sort(oracle.begin(), oracle.end());
  const auto got = real_roots(set);
  REQUIRE(got.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(got[k] - oracle[k]) < 1e-13);
  CHECK(std::abs(std::sqrt(2.0 + std::sqrt(2.0)) - oracle[3]) < 1e-15);
}

TEST_CASE("roots: clustered and high multiplicities") {
  SUBCASE("z^5 has a single root of multiplicity 5") {
    const RootSet set = roots_with_multiplicity(Polynomial::monomial(5));
    REQUIRE(set.entries.size() == 1);
    CHECK(set.entries[0].multiplicity == 5);
  }
  SUBCASE("(z - i)^3 (z + 0.5)") {
    const Complex r[] = {{0, 1}, {0, 1}, {0, 1}, {-0.5, 0}};
    const RootSet set = roots_with_multiplicity(Polynomial::from_roots(r));
    REQUIRE(set.entries.size() == 2);
    CHECK(set.total_multiplicity() == 4);
  }
  SUBCASE("distinct roots closer than the clustering scale stay separate when simple") {
    const Complex r[] = {0.0, 1e-3, 1.0};
    const RootSet set = roots_with_multiplicity(Polynomial::from_roots(r));
    CHECK(set.entries.size() == 3);
  }
  SUBCASE("random polynomials: multiplicities sum to the degree, small residuals") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Complex> c;
      const int deg = 2 + trial % 12;
      for (int k = 0; k <= deg; ++k) c.emplace_back(normal(rng), normal(rng));
      const Polynomial p(c);
      const RootSet set = roots_with_multiplicity(p);
      CHECK(set.total_multiplicity() == deg);
      for (const Root& root : set.entries) {
        const Complex z = root.point.value();
        CHECK(std::abs(p(z)) / p.abs_eval(std::abs(z)) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(roots_with_multiplicity(Polynomial{}), PreconditionError);
}

TEST_CASE("cloud index agrees with brute force") {
  auto pts = random_points(500, 7);
  pts.push_back(SpherePoint::infinity());
  const CloudIndex index(pts);
  for (const SpherePoint& q : random_points(50, 8)) {
    double best = 1e300;
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = chordal_distance(q, pts[i]);
      best = std::min(best, d);
      if (d <= 0.3) inside.push_back(i);
    }
    CHECK(index.nearest(q).distance == doctest::Approx(best).epsilon(1e-12));
    CHECK(index.within(q, 0.3) == inside);
    const auto knn = index.k_nearest(q, 5);
    REQUIRE(knn.size() == 5);
    CHECK(knn.front().distance == doctest::Approx(best).epsilon(1e-12));
    CHECK(std::is_sorted(knn.begin(), knn.end(),
                         [](const auto& a, const auto& b) { return a.distance < b.distance; }));
  }
  CHECK(index.nearest(SpherePoint::infinity()).distance == 0.0);
  CHECK_THROWS_AS(CloudIndex().nearest(Complex(0, 0)), std::logic_error);
}

TEST_CASE("parallel_for: results independent of the worker cap, exceptions propagate") {
  std::vector<double> a(1000), b(1000);
  set_max_threads(1);
  parallel_for(a.size(), [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
  set_max_threads(4);
  parallel_for(b.size(), [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
  CHECK(a == b);
  CHECK_THROWS_AS(parallel_for(10,
                               [](std::size_t i) {
                                 if (i == 3) throw PreconditionError("boom");
                               }),
                  PreconditionError);
  set_max_threads(0);
  CHECK(split_seed(1, 2) == split_seed(1, 2));
  CHECK(split_seed(1, 2) != split_seed(1, 3));
  CHECK(split_seed(1, 2) != split_seed(2, 2));
}
