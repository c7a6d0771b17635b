#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "ratdyn/errors.hpp"
#include "ratdyn/julia.hpp"
#include "ratdyn/parallel.hpp"
#include "ratdyn/registry.hpp"

using namespace ratdyn;

namespace {

const RationalMap kSquare(Polynomial::monomial(2));
const RationalMap kCheb2(Polynomial{-2.0, 0.0, 1.0});

}  // namespace

TEST_CASE("inverse iteration: z^2 lands on the unit circle, z^2 - 2 on [-2, 2]") {
  const JuliaCloud circle = sample_inverse_iteration(kSquare, Complex(0.5, 0.25), 20, 2000, 1);
  REQUIRE(circle.points.size() == 2000);
  double worst = 0.0;
  for (const SpherePoint& p : circle.points) worst = std::max(worst, std::abs(std::abs(p.value()) - 1.0));
  // 20 square roots bring |z| within 2^-20 |log|start|| of 1.
  CHECK(worst < 1e-6);

  const JuliaCloud interval = sample_inverse_iteration(kCheb2, Complex(0.5, 0.25), 20, 2000, 1);
  for (const SpherePoint& p : interval.points) {
    const Complex z = p.value();
    CHECK(std::abs(z.imag()) < 1e-6);
    CHECK(std::abs(z.real()) <= 2.0 + 1e-6);
  }
}

TEST_CASE("inverse iteration is reproducible and thread independent") {
  set_max_threads(1);
  const JuliaCloud a = sample_inverse_iteration(kCheb2, Complex(0.1, 0.0), 20, 999, 42);
  set_max_threads(3);
  const JuliaCloud b = sample_inverse_iteration(kCheb2, Complex(0.1, 0.0), 20, 999, 42);
  set_max_threads(0);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(std::equal(a.points.begin(), a.points.end(), b.points.begin()));
  const JuliaCloud c = sample_inverse_iteration(kCheb2, Complex(0.1, 0.0), 20, 999, 43);
  CHECK_FALSE(std::equal(a.points.begin(), a.points.end(), c.points.begin()));
  CHECK_THROWS_AS(sample_inverse_iteration(RationalMap(Polynomial{1.0, 1.0}), Complex(0, 0), 5, 10, 0),
                  PreconditionError);
}

TEST_CASE("escape membership and the main cardioid") {
  CHECK(escape_membership(kSquare, Complex(0.5, 0.0), 200) == Escape::bounded);
  CHECK(escape_membership(kSquare, Complex(1.01, 0.0), 2000) == Escape::escapes);
  CHECK(escape_membership(kCheb2, Complex(2.0, 0.0), 200) == Escape::bounded);
  CHECK(escape_membership(kCheb2, Complex(0.0, 0.1), 200) == Escape::escapes);
  CHECK_THROWS_AS(escape_membership(RationalMap(Polynomial{1.0}, Polynomial{0.0, 1.0, 1.0}),
                                    Complex(0, 0), 10),
                  PreconditionError);
  // Oracle: c lies in the main cardioid iff |1 - sqrt(1 - 4c)| < 1.
  for (double re = -0.7; re <= 0.3; re += 0.05) {
    for (double im = -0.6; im <= 0.6; im += 0.05) {
      const Complex c(re, im);
      const double m = std::abs(1.0 - std::sqrt(1.0 - 4.0 * c));
      if (m < 0.95) CHECK(mandelbrot_member(c, 2000));
    }
  }
  CHECK_FALSE(mandelbrot_member(Complex(0.26, 0.0), 2000));
  CHECK(mandelbrot_member(Complex(-1.0, 0.0), 2000));  // period-two bulb
  CHECK_FALSE(mandelbrot_member(Complex(1.0, 0.0), 100));
}

TEST_CASE("critical points on the sampled Julia set") {
  const JuliaCloud circle = sample_inverse_iteration(kSquare, Complex(0.5, 0.25), 20, 4000, 0);
  CHECK(critical_points_in_julia(kSquare, circle).empty());
  const JuliaCloud interval = sample_inverse_iteration(kCheb2, Complex(0.5, 0.25), 20, 4000, 0);
  const auto in_j = critical_points_in_julia(kCheb2, interval);
  REQUIRE(in_j.size() == 1);
  CHECK(std::abs(in_j[0].point.value()) < 1e-12);
  const ExampleRecord t3 = get_example("tchebychev_n", 3.0);
  const JuliaCloud t3_cloud = sample_inverse_iteration(t3.map, Complex(0.5, 0.25), 20, 4000, 0);
  CHECK(critical_points_in_julia(t3.map, t3_cloud).size() == 2);
  CHECK_THROWS_AS(critical_points_in_julia(kSquare, JuliaCloud{}), PreconditionError);
}

TEST_CASE("rendering") {
  SUBCASE("escape mode for z^2 is the closed unit disc") {
    RenderOptions o;
    o.mode = RenderMode::escape;
    const GrayImage img = render(kSquare, Window{-1.5, 1.5, -1.5, 1.5}, 60, 60, o);
    REQUIRE(img.pixels.size() == 3600);
    for (int y = 0; y < 60; ++y) {
      for (int x = 0; x < 60; ++x) {
        const Complex c(-1.5 + 3.0 * (x + 0.5) / 60, 1.5 - 3.0 * (y + 0.5) / 60);
        if (std::abs(c) < 0.97) CHECK(img.at(x, y) == 255);
        if (std::abs(c) > 1.03) CHECK(img.at(x, y) < 255);
      }
    }
  }
  SUBCASE("density mode is thread independent and lights only near J") {
    RenderOptions o;
    o.mode = RenderMode::density;
    o.samples = 20000;
    set_max_threads(1);
    const GrayImage a = render(kSquare, Window{-1.5, 1.5, -1.5, 1.5}, 64, 64, o);
    set_max_threads(4);
    const GrayImage b = render(kSquare, Window{-1.5, 1.5, -1.5, 1.5}, 64, 64, o);
    set_max_threads(0);
    CHECK(a.pixels == b.pixels);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const Complex c(-1.5 + 3.0 * (x + 0.5) / 64, 1.5 - 3.0 * (y + 0.5) / 64);
        if (a.at(x, y) > 0) CHECK(std::abs(std::abs(c) - 1.0) < 0.05);
      }
    }
  }
  CHECK(render(kSquare, Window{}, 0, 0).pixels.empty());
  CHECK_THROWS_AS(render(kSquare, Window{}, 100000, 100000), BudgetExceeded);
}

TEST_CASE("cloud topology heuristics") {
  const JuliaCloud circle = sample_inverse_iteration(kSquare, Complex(0.5, 0.25), 20, 4000, 0);
  CHECK(cloud_components(circle.points, 0.05) == 1);
  const CircleCheck ok = topological_circle_check(circle.points, 0.0, 0.1, 120);
  CHECK(ok.pass);
  CHECK(ok.max_radial_spread < 1e-5);
  // The segment [-2, 2] is connected but is not a circle around 0.
  const JuliaCloud interval = sample_inverse_iteration(kCheb2, Complex(0.5, 0.25), 20, 4000, 0);
  CHECK(cloud_components(interval.points, 0.05) == 1);
  CHECK_FALSE(topological_circle_check(interval.points, 0.0, 0.1, 120).pass);
  // z^2 + 1 has a Cantor Julia set.
  const JuliaCloud dust = sample_inverse_iteration(RationalMap(Polynomial{1.0, 0.0, 1.0}),
                                                   Complex(0.5, 0.25), 20, 4000, 0);
  CHECK(cloud_components(dust.points, 0.05) > 1);
}
