#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ratdyn/errors.hpp"
#include "ratdyn/fiber.hpp"
#include "ratdyn/map_parser.hpp"
#include "ratdyn/rational_map.hpp"
#include "ratdyn/registry.hpp"

using namespace ratdyn;

namespace {

const RationalMap kSquare(Polynomial::monomial(2));
const RationalMap kCheb2(Polynomial{-2.0, 0.0, 1.0});
// (z^2 + 1)^2 / (4z(z^2 - 1)).
const RationalMap kLattes(Polynomial{1.0, 0.0, 2.0, 0.0, 1.0}, Polynomial{0.0, -4.0, 0.0, 4.0});
// (z^3 - 16/27) / z.
const RationalMap kUshiki(Polynomial{-16.0 / 27.0, 0.0, 0.0, 1.0}, Polynomial{0.0, 1.0});

SpherePoint find_point(const Fiber& f, const SpherePoint& p, double tol = 1e-8) {
  for (const FiberEntry& e : f.entries) {
    if (chordal_distance(e.point, p) < tol) return e.point;
  }
  return SpherePoint::infinity();
}

std::int64_t index_at(const Fiber& f, const SpherePoint& p, double tol = 1e-6) {
  for (const FiberEntry& e : f.entries) {
    if (chordal_distance(e.point, p) < tol) return e.index;
  }
  return 0;
}

}  // namespace

TEST_CASE("evaluation on the sphere") {
  CHECK(kSquare(SpherePoint::infinity()).is_infinity());
  CHECK(kSquare(Complex(0, 1)) == SpherePoint(Complex(-1, 0)));
  // The full-shift example (2z^2 - 1)/z has a pole at 0 and fixes infinity.
  const RationalMap shift(Polynomial{-1.0, 0.0, 2.0}, Polynomial{0.0, 1.0});
  CHECK(shift(Complex(0, 0)).is_infinity());
  CHECK(shift(SpherePoint::infinity()).is_infinity());
  // Mobius map z -> 1/z swaps 0 and infinity; (z + 1)/(2z) sends infinity to 1/2.
  const RationalMap inv(Polynomial{1.0}, Polynomial{0.0, 1.0});
  CHECK(inv(SpherePoint::infinity()) == SpherePoint(Complex(0, 0)));
  const RationalMap mob(Polynomial{1.0, 1.0}, Polynomial{0.0, 2.0});
  CHECK(std::abs(mob(SpherePoint::infinity()).value() - 0.5) < 1e-15);
  CHECK(mob.value_at_infinity() == SpherePoint(Complex(0.5, 0)));
  CHECK(kLattes.degree() == 4);
  CHECK(kUshiki.degree() == 3);
}

TEST_CASE("coprimality is enforced") {
  CHECK_THROWS_AS(RationalMap(Polynomial{-1.0, 0.0, 1.0}, Polynomial{-1.0, 1.0}), NotCoprime);
  CHECK_THROWS_AS(RationalMap(Polynomial{}, Polynomial{1.0}), PreconditionError);
  CHECK_NOTHROW(RationalMap(Polynomial{-1.0, 0.0, 1.0}, Polynomial{-2.0, 1.0}));
}

TEST_CASE("composition and iteration agree with repeated evaluation") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (const RationalMap* r : {&kSquare, &kCheb2, &kLattes, &kUshiki}) {
    const RationalMap r2 = iterate_map(*r, 2);
    CHECK(r2.degree() == r->degree() * r->degree());
    for (int k = 0; k < 20; ++k) {
      const Complex z(normal(rng), normal(rng));
      const SpherePoint a = r2(z);
      const SpherePoint b = iterate_point(*r, z, 2);
      CHECK(chordal_distance(a, b) < 1e-10);
    }
  }
  CHECK_THROWS_AS(iterate_map(kSquare, 9, 256), BudgetExceeded);
  CHECK_THROWS_AS(iterate_map(kSquare, 0), PreconditionError);
}

TEST_CASE("T_3(cos(pi/7)) = cos(3 pi/7)") {
  const ExampleRecord t3 = get_example("tchebychev_n", 3.0);
  const double x = std::cos(std::numbers::pi / 7);
  CHECK(std::abs(t3.map(x).value() - std::cos(3 * std::numbers::pi / 7)) < 1e-15);
  // The third iterate agrees with cos(27 pi / 7).
  CHECK(std::abs(iterate_point(t3.map, x, 3).value() - std::cos(27 * std::numbers::pi / 7)) < 1e-13);
}

TEST_CASE("critical points with branch indices") {
  SUBCASE("z^2: 0 and infinity") {
    const auto crit = critical_points(kSquare);
    REQUIRE(crit.size() == 2);
    CHECK(crit[0].point == SpherePoint(Complex(0, 0)));
    CHECK(crit[1].point.is_infinity());
    CHECK(riemann_hurwitz_total(crit) == 2);
  }
  SUBCASE("z^5: indices 5") {
    const auto crit = critical_points(RationalMap(Polynomial::monomial(5)));
    REQUIRE(crit.size() == 2);
    CHECK(crit[0].branch_index == 5);
    CHECK(crit[1].branch_index == 5);
  }
  SUBCASE("Lattes: +-i and +-1 +- sqrt 2, all simple") {
    const auto crit = critical_points(kLattes);
    REQUIRE(crit.size() == 6);
    const double s = std::sqrt(2.0);
    const Complex expected[] = {{0, 1}, {0, -1}, {1 + s, 0}, {1 - s, 0}, {-1 + s, 0}, {-1 - s, 0}};
    for (const Complex& c : expected) {
      const bool found = std::any_of(crit.begin(), crit.end(), [&](const CriticalDatum& d) {
        return chordal_distance(d.point, c) < 1e-9;
      });
      CHECK(found);
    }
    CHECK(riemann_hurwitz_total(crit) == 6);
  }
  SUBCASE("Ushiki gasket: infinity has index 2, three finite critical points") {
    const auto crit = critical_points(kUshiki);
    CHECK(riemann_hurwitz_total(crit) == 4);
    REQUIRE(crit.size() == 4);
    CHECK(crit.back().point.is_infinity());
    CHECK(crit.back().branch_index == 2);
    // Finite critical points solve 2z^3 + 16/27 = 0: |z| = 2/3.
    for (int k = 0; k < 3; ++k) CHECK(std::abs(std::abs(crit[k].point.value()) - 2.0 / 3.0) < 1e-12);
  }
}

TEST_CASE("fibers: weights, critical values and infinity") {
  SUBCASE("z^2 at 0 is 0 with index 2") {
    const Fiber f = preimages(kSquare, Complex(0, 0));
    REQUIRE(f.entries.size() == 1);
    CHECK(f.entries[0].index == 2);
  }
  SUBCASE("z^2 - 2 at -2 is 0 with index 2") {
    const Fiber f = preimages(kCheb2, Complex(-2, 0));
    REQUIRE(f.entries.size() == 1);
    CHECK(std::abs(f.entries[0].point.value()) < 1e-12);
    CHECK(f.entries[0].index == 2);
  }
  SUBCASE("polynomial fiber over infinity") {
    const Fiber f = preimages(kCheb2, SpherePoint::infinity());
    REQUIRE(f.entries.size() == 1);
    CHECK(f.entries[0].point.is_infinity());
    CHECK(f.entries[0].index == 2);
  }
  SUBCASE("degree drop: (z+1)/(2z) at 1/2 contains infinity") {
    const RationalMap mob(Polynomial{1.0, 1.0}, Polynomial{0.0, 2.0});
    const Fiber f = preimages(mob, Complex(0.5, 0));
    REQUIRE(f.entries.size() == 1);
    CHECK(f.entries[0].point.is_infinity());
  }
  SUBCASE("Lattes over infinity: poles 0, +-1 and infinity") {
    const Fiber f = preimages(kLattes, SpherePoint::infinity());
    CHECK(f.index_sum() == 4);
    CHECK(f.entries.size() == 4);
    CHECK(f.entries.back().point.is_infinity());
  }
  SUBCASE("entries are sorted, infinity last") {
    const Fiber f = preimages(kUshiki, Complex(0.3, -0.2));
    CHECK(std::is_sorted(f.entries.begin(), f.entries.end(), [](const auto& a, const auto& b) {
      return lexicographic_less(a.point, b.point);
    }));
  }
}

TEST_CASE("every fiber point maps to the base and indices sum to the degree") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (const RationalMap* r : {&kSquare, &kCheb2, &kLattes, &kUshiki}) {
    for (int k = 0; k < 50; ++k) {
      const Complex w(normal(rng), normal(rng));
      const Fiber f = preimages(*r, w);
      CHECK(f.index_sum() == r->degree());
      for (const FiberEntry& e : f.entries) CHECK(chordal_distance((*r)(e.point), w) < 1e-10);
    }
    // Critical values carry the index of their critical points.
    for (const CriticalDatum& c : critical_points(*r)) {
      const Fiber f = preimages(*r, c.critical_value);
      CHECK(f.index_sum() == r->degree());
      CHECK(index_at(f, c.point) == c.branch_index);
    }
  }
}

TEST_CASE("branch index chain rule on the iterate") {
  for (const RationalMap* r : {&kSquare, &kCheb2, &kLattes, &kUshiki}) {
    const RationalMap r2 = iterate_map(*r, 2);
    for (const CriticalDatum& c : critical_points(*r)) {
      const int lhs = branch_index(r2, c.point);
      CHECK(lhs == branch_index(*r, c.point) * branch_index(*r, (*r)(c.point)));
    }
  }
  // Infinity is a fixed critical point of z^2 - 2, so e_{R^2}(inf) = 4.
  CHECK(branch_index(iterate_map(kCheb2, 2), SpherePoint::infinity()) == 4);
  CHECK(branch_index(kSquare, Complex(0.5, 0.5)) == 1);
}

TEST_CASE("preimage trees") {
  const Fiber t = preimage_tree(kCheb2, Complex(0.3, 0.0), 6);
  CHECK(t.index_sum() == 64);
  for (const FiberEntry& e : t.entries) {
    CHECK(chordal_distance(iterate_point(kCheb2, e.point, 6), Complex(0.3, 0.0)) < 1e-8);
  }
  // Through the critical value: z^2 - 2 over -2 at depth 2 has 0 with
  // index 2 at level one and +-sqrt 2 with index 2 at level two.
  const auto levels = preimage_levels(kCheb2, Complex(-2, 0), 2);
  REQUIRE(levels.size() == 3);
  CHECK(levels[1].entries.size() == 1);
  CHECK(levels[2].entries.size() == 2);
  for (const FiberEntry& e : levels[2].entries) CHECK(e.index == 2);
  CHECK(std::abs(find_point(levels[2], Complex(std::sqrt(2.0), 0)).value() - std::sqrt(2.0)) < 1e-12);

  // The tree agrees with the fiber of the iterate map.
  const Fiber direct = preimages(iterate_map(kLattes, 2), Complex(0.2, 0.1));
  const Fiber tree = preimage_tree(kLattes, Complex(0.2, 0.1), 2);
  REQUIRE(direct.entries.size() == tree.entries.size());
  for (const FiberEntry& e : tree.entries) CHECK(index_at(direct, e.point) == e.index);

  std::int64_t visited = 0;
  visit_preimage_tree(kSquare, Complex(1, 0), 5,
                      [&](int depth, const SpherePoint&, std::int64_t) { visited += depth == 5; });
  CHECK(visited == 32);
  CHECK_THROWS_AS(preimage_tree(kSquare, Complex(1, 0), 21), BudgetExceeded);
}

TEST_CASE("map parser") {
  SUBCASE("polynomials and quotients") {
    const RationalMap r = parse_map("z^2-2");
    CHECK(r.degree() == 2);
    CHECK(std::abs(r(Complex(3, 0)).value() - 7.0) < 1e-15);
    const RationalMap u = parse_map("(z^3 - 16/27)/z");
    CHECK(u.degree() == 3);
    CHECK(std::abs(u(Complex(1, 0)).value() - (1.0 - 16.0 / 27.0)) < 1e-15);
    const RationalMap l = parse_map("(z^2+1)^2/(4z(z^2-1))");
    CHECK(l.degree() == 4);
    CHECK(chordal_distance(l(Complex(2, 0.5)), kLattes(Complex(2, 0.5))) < 1e-14);
    const RationalMap c = parse_map("z^2 + 0.2 + 0.1i");
    CHECK(std::abs(c(Complex(0, 0)).value() - Complex(0.2, 0.1)) < 1e-15);
    CHECK(parse_map("2z^2 - 1").degree() == 2);
    CHECK(parse_map("z/2 + z^2 / 4").numerator().coefficient(2) == Complex(0.25, 0));
  }
  SUBCASE("catalog names") {
    const ParsedMap p = parse_map_spec("tchebychev_n:4");
    REQUIRE(p.example.has_value());
    CHECK(p.map.degree() == 4);
    CHECK(parse_map("lattes").degree() == 4);
    CHECK(parse_map("quadratic_family:0.25").numerator().coefficient(0) == Complex(0.25, 0));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_map("z^"), ParseError);
    CHECK_THROWS_AS(parse_map("z^-1"), ParseError);
    CHECK_THROWS_AS(parse_map("z^2 +"), ParseError);
    CHECK_THROWS_AS(parse_map("(z"), ParseError);
    CHECK_THROWS_AS(parse_map("w^2"), ParseError);
    CHECK_THROWS_AS(parse_map(""), ParseError);
    CHECK_THROWS_AS(parse_map("(z^2-1)/(z-1)"), NotCoprime);
    CHECK_THROWS_AS(parse_map("nothing:3"), ParseError);
  }
  SUBCASE("points and test functions") {
    CHECK(parse_point("inf").is_infinity());
    CHECK(parse_point("1-2i") == SpherePoint(Complex(1, -2)));
    CHECK_THROWS_AS(parse_point("z"), ParseError);
    const TestFunction f = parse_test_function("z*zbar + re(z)");
    CHECK(std::abs(f(Complex(3, 4)) - Complex(28, 0)) < 1e-13);
    const TestFunction g = parse_test_function("im(z)^2 - conj(z)/2");
    CHECK(std::abs(g(Complex(1, 2)) - Complex(3.5, 1.0)) < 1e-13);
    CHECK_THROWS_AS(parse_test_function("1/z"), ParseError);
  }
}
