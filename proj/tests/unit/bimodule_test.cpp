#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ratdyn/bimodule.hpp"
#include "ratdyn/errors.hpp"
#include "ratdyn/registry.hpp"

using namespace ratdyn;

namespace {

const RationalMap kSquare(Polynomial::monomial(2));
const RationalMap kCheb2(Polynomial{-2.0, 0.0, 1.0});

GraphFunction mono(int j, int k, Complex c = 1.0) {
  return GraphFunction{1, TestFunction::monomial(j, k, c)};
}

std::vector<SpherePoint> cloud(const RationalMap& r, std::size_t n, std::uint64_t seed) {
  return sample_inverse_iteration(r, Complex(0.5, 0.25), kDefaultBurnIn, n, seed).points;
}

}  // namespace

TEST_CASE("inner product: closed form on z^2") {
  // (z | z)(y) = |x1|^2 + |x2|^2 = 2|y| over the two square roots of y.
  for (const Complex y : {Complex(0.3, 0.4), Complex(-2, 0), Complex(0, 1)}) {
    CHECK(std::abs(inner_product(kSquare, 1, mono(1, 0), mono(1, 0), y) - 2.0 * std::abs(y)) < 1e-13);
  }
  // Conjugate symmetry and positivity.
  const GraphFunction f = mono(2, 1, Complex(1, 2));
  const GraphFunction g = mono(0, 1, Complex(-1, 0.5));
  const Complex y(0.2, -0.7);
  CHECK(std::abs(inner_product(kCheb2, 1, f, g, y) - std::conj(inner_product(kCheb2, 1, g, f, y))) <
        1e-13);
  CHECK(inner_product(kCheb2, 1, f, f, y).real() > 0.0);
  CHECK_THROWS_AS(inner_product(kSquare, 2, f, f, y), PreconditionError);
  // Middle multiplier.
  const TestFunction a = TestFunction::monomial(1, 1);
  // Over y = 4 the fiber is {2, -2}: 4 + 4.
  CHECK(std::abs(inner_product(kSquare, 1, mono(0, 0), a, mono(0, 0), Complex(4, 0)) - 8.0) < 1e-13);
}

TEST_CASE("norm sandwich: ||f||_inf <= ||f||_2 <= sqrt(d) ||f||_inf") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> deg(0, 3);
  std::normal_distribution<double> normal;
  for (const RationalMap* r : {&kSquare, &kCheb2}) {
    const auto probes = cloud(*r, 64, 1);
    // Sup over J includes every fiber point of the probes.
    std::vector<SpherePoint> sample = cloud(*r, 1000, 2);
    for (const SpherePoint& y : probes) {
      for (const FiberEntry& e : preimages(*r, y).entries) sample.push_back(e.point);
    }
    for (int trial = 0; trial < 20; ++trial) {
      const GraphFunction f = mono(deg(rng), deg(rng), Complex(normal(rng), normal(rng)));
      const double sup = norm_sup(f, sample);
      const double two = norm_two(*r, 1, f, probes);
      CHECK(two <= std::sqrt(2.0) * sup + 1e-9);
      // Fiber points of the probes bound the sup from below.
      double fiber_sup = 0.0;
      for (const SpherePoint& y : probes) {
        for (const FiberEntry& e : preimages(*r, y).entries) {
          fiber_sup = std::max(fiber_sup, std::abs(f(e.point)));
        }
      }
      CHECK(fiber_sup <= two + 1e-9);
    }
  }
}

TEST_CASE("nested and direct inner products agree") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> deg(0, 2);
  std::normal_distribution<double> normal;
  for (const RationalMap* r : {&kSquare, &kCheb2}) {
    for (int n = 2; n <= 3; ++n) {
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<GraphFunction> fs, gs;
        for (int k = 0; k < n; ++k) {
          fs.push_back(mono(deg(rng), deg(rng), Complex(normal(rng), normal(rng))));
          gs.push_back(mono(deg(rng), deg(rng), Complex(normal(rng), normal(rng))));
        }
        for (const Complex y : {Complex(0.4, 0.3), Complex(-2, 0), Complex(0, 0)}) {
          const Complex a = nested_inner_product(*r, fs, gs, y);
          const Complex b = direct_inner_product(*r, fs, gs, y);
          // Values reach 1e5, where absolute 1e-10 is below double resolution.
          CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
        }
      }
    }
  }
  // A single factor is the plain pairing.
  const Complex y(0.1, 0.2);
  CHECK(std::abs(nested_inner_product(kSquare, {mono(1, 0)}, {mono(0, 1)}, y) -
                 inner_product(kSquare, 1, mono(1, 0), mono(0, 1), y)) < 1e-14);
  CHECK(tensor_embed(kSquare, {mono(1, 0), mono(1, 0)}).arity == 2);
}

TEST_CASE("frames") {
  const auto sample = cloud(kSquare, 2000, 3);
  const auto probes = cloud(kSquare, 50, 4);
  const Frame frame = build_frame(kSquare, sample, CoverSpec{});
  CHECK(frame.members.size() == 8);
  CHECK(reconstruction_defect(kSquare, frame, monomial_family(2), probes) < 1e-8);
  CHECK(frame_delta_defect(kSquare, frame, probes) < 1e-9);
  // The partition sums to one on J.
  for (const SpherePoint& x : probes) {
    double s = 0.0;
    for (const TestFunction& chi : frame.partition) s += chi(x).real();
    CHECK(std::abs(s - 1.0) < 1e-14);
  }
  SUBCASE("refuses when J contains a critical point") {
    CHECK_THROWS_AS(build_frame(kCheb2, cloud(kCheb2, 2000, 3), CoverSpec{}), PreconditionError);
  }
  SUBCASE("a piece wider than half a turn holds both square roots") {
    CoverSpec wide;
    wide.count = 2;
    wide.width = 1.2 * std::numbers::pi;
    CHECK_THROWS_AS(build_frame(kSquare, sample, wide), CoverTooCoarse);
  }
  SUBCASE("with the checks skipped a too-coarse cover fails the delta identity") {
    CoverSpec wide;
    wide.count = 2;
    wide.width = 1.2 * std::numbers::pi;
    wide.unchecked = true;
    CHECK(frame_delta_defect(kSquare, build_frame(kSquare, sample, wide), probes) > 1e-3);
  }
}

TEST_CASE("expansion time for angle doubling") {
  // V is the arc of half-angle theta around 1. The n-th preimages of any
  // point are spaced 2 pi / 2^n apart, so V catches one for every point
  // exactly when 2 pi / 2^n < 2 theta.
  const double theta = std::numbers::pi / 6;
  const int oracle = static_cast<int>(std::ceil(std::log2(std::numbers::pi / theta)));
  CHECK(oracle == 3);
  const double chordal = 2.0 * std::sin(theta / 2.0);
  const auto sample = cloud(kSquare, 4000, 6);
  CHECK(expansion_time(kSquare, Disc{Complex(1, 0), chordal}, sample, 0.02) == oracle);
  CHECK_THROWS_AS(expansion_time(kSquare, Disc{Complex(5, 5), 0.01}, sample, 0.02),
                  PreconditionError);
  // An arc of half-angle about 2e-3 needs 11 doublings.
  CHECK_THROWS_AS(expansion_time(kSquare, Disc{sample.front(), 2e-3}, sample, 0.02, 4),
                  BudgetExceeded);
}

TEST_CASE("simplicity witnesses") {
  const TestFunction a = TestFunction::monomial(1, 1) + TestFunction::monomial(1, 0) +
                         TestFunction::monomial(0, 1) + TestFunction::constant(2.5);
  SUBCASE("z^2") {
    // a = |z + 1|^2 + 1.5 on the circle peaks at z = 1 with value 5.5.
    const Witness w = simplicity_witness(kSquare, a, 0.55);
    CHECK(w.report.pass);
    CHECK(w.report.norm_a == doctest::Approx(5.5).epsilon(1e-4));
    CHECK(std::abs(w.report.min_ff - 1.0) < 1e-8);
    CHECK(w.report.min_faf >= w.report.norm_a - 0.55 - 1e-8);
    const WitnessRecheck re = recheck_witness(kSquare, a, w);
    CHECK(re.max_ff_error < 1e-8);
    CHECK(re.min_faf >= w.report.norm_a - 0.55 - 1e-8);
    CHECK(re.max_faf <= w.report.norm_a + 1e-8);
    const NormalizedWitness u = normalized_witness(kSquare, a, 0.55);
    CHECK(u.pass);
    CHECK(std::abs(u.min_uau - 1.0) < 1e-8);
    CHECK(std::abs(u.max_uau - 1.0) < 1e-8);
    CHECK(u.norm_two_u <= u.bound + 1e-8);
  }
  SUBCASE("z^2 - 2") {
    const TestFunction b = TestFunction::monomial(1, 1);
    const Witness w = simplicity_witness(kCheb2, b, 0.4);
    CHECK(w.report.pass);
    CHECK(w.report.norm_a == doctest::Approx(4.0).epsilon(1e-4));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(simplicity_witness(kSquare, TestFunction::monomial(1), 0.1), PreconditionError);
    CHECK_THROWS_AS(simplicity_witness(kSquare, a, 10.0), PreconditionError);
    CHECK_THROWS_AS(simplicity_witness(kSquare, a, 0.0), PreconditionError);
  }
}

TEST_CASE("distance to I_X: sup of |a| over critical points in J") {
  const JuliaCloud interval = sample_inverse_iteration(kCheb2, Complex(0.5, 0.25), 20, 2000, 0);
  CHECK(ix_distance(kCheb2, TestFunction::monomial(1, 1), interval) < 1e-20);
  CHECK(ix_distance(kCheb2, TestFunction::constant(3.0), interval) == doctest::Approx(3.0));
  const JuliaCloud circle = sample_inverse_iteration(kSquare, Complex(0.5, 0.25), 20, 2000, 0);
  CHECK(ix_distance(kSquare, TestFunction::constant(3.0), circle) == 0.0);
}
