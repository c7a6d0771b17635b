#pragma once

#include <cstdint>
#include <vector>

#include "ratdyn/fiber.hpp"
#include "ratdyn/rational_map.hpp"

namespace ratdyn {

enum class CloudGenerator { inverse_iteration, escape_boundary };

// Sampled Julia set. Every inverse-iteration point is a backward image of
// `start` at least `burn_in` levels deep, which is what makes it re-checkable.
struct JuliaCloud {
  std::vector<SpherePoint> points;
  CloudGenerator generator = CloudGenerator::inverse_iteration;
  std::uint64_t seed = 0;
  int burn_in = 20;
  int walkers = 16;
  SpherePoint start;
};

constexpr int kDefaultBurnIn = 20;
constexpr int kDefaultWalkers = 16;

// Seeded backward random walk: each step picks x in R^{-1}(current) with
// probability e(x)/d. The count is split over independent walkers with
// derived seeds; each walker discards `burn_in` levels and then records every
// level. Points are concatenated in walker order, so the cloud depends only on
// the arguments, not on the thread count. Requires degree >= 2.
JuliaCloud sample_inverse_iteration(const RationalMap& r, const SpherePoint& start, int burn_in,
                                    std::size_t count, std::uint64_t seed,
                                    int walkers = kDefaultWalkers);

enum class Escape { escapes, bounded };

// max(2, max |coefficient| + 1) for a polynomial map.
double default_escape_radius(const RationalMap& polynomial_map);

// Forward orbit test for polynomial maps; PreconditionError otherwise. An
// escape_radius <= 0 selects default_escape_radius.
Escape escape_membership(const RationalMap& polynomial_map, Complex z, int max_iter,
                         double escape_radius = 0.0);

// Orbit of 0 under z^2 + c stays in |z| <= 2 for max_iter steps.
bool mandelbrot_member(Complex c, int max_iter);

struct CriticalInJuliaOptions {
  // Absolute chordal tolerance.
  double tol = 1e-3;
  // A critical point also counts when its distance to the cloud is within
  // spacing_factor times the local spacing of the cloud there, measured as
  // the distance from the nearest cloud point to its neighbors-th neighbor.
  // This keeps the test meaningful for clouds that are dense in an open set
  // (J = whole sphere) where a fixed tolerance would need huge samples.
  double spacing_factor = 10.0;
  int neighbors = 8;
};

// Critical points lying (numerically) on the sampled Julia set.
// Throws PreconditionError for an empty cloud.
std::vector<CriticalDatum> critical_points_in_julia(const RationalMap& r, const JuliaCloud& cloud,
                                                    const CriticalInJuliaOptions& options = {});

struct Window {
  double re_min = -2.0, re_max = 2.0;
  double im_min = -2.0, im_max = 2.0;
};

enum class RenderMode { automatic, escape, density };

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 at im_max
  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

struct RenderOptions {
  RenderMode mode = RenderMode::automatic;
  int max_iter = 256;
  std::uint64_t seed = 0;
  // Density mode sample size; 0 picks 4 samples per pixel (capped at 4e6).
  std::size_t samples = 0;
  SpherePoint start = Complex(0.5, 0.25);
};

constexpr long long kMaxPixels = 8192LL * 8192LL;

// Pixel centers sit at ((i + 1/2) / width, (j + 1/2) / height) of the window.
// Escape mode (polynomials): bounded pixels are 255, escaping pixels are
// shaded by iteration count in [0, 200]. Density mode: log-scaled hit counts
// of an inverse-iteration cloud, 0 where no sample landed. Automatic picks
// escape for polynomials and density otherwise. Rows are computed in
// parallel tiles; output is identical for every thread count.
// Throws BudgetExceeded above kMaxPixels; zero pixels give an empty image.
GrayImage render(const RationalMap& r, const Window& window, int width, int height,
                 const RenderOptions& options = {});

// Number of single-linkage components of the points at chordal linking
// radius h.
std::size_t cloud_components(const std::vector<SpherePoint>& points, double h);

struct CircleCheck {
  bool pass = false;
  double max_gap = 0.0;            // largest gap between angular neighbors
  double max_radial_spread = 0.0;  // relative, worst angular bin
};

// Topological-circle heuristic: ordered by angle around `center`, the cloud
// must be a closed chain (every point has exactly two chain neighbors within
// h, no gap larger than h) whose radius is single valued per angular bin
// (relative spread below 0.05).
CircleCheck topological_circle_check(const std::vector<SpherePoint>& points, Complex center,
                                     double h, int bins = 360);

}  // namespace ratdyn
