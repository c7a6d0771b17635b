#include "ratdyn/julia.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "ratdyn/cloud_index.hpp"
#include "ratdyn/errors.hpp"
#include "ratdyn/parallel.hpp"

namespace ratdyn {

namespace {

// Picks a fiber entry with probability index / d from a uniform draw.
const FiberEntry& pick(const Fiber& fiber, std::uint64_t draw, int d) {
  std::int64_t u = static_cast<std::int64_t>(draw % static_cast<std::uint64_t>(d));
  for (const FiberEntry& e : fiber.entries) {
    if (u < e.index) return e;
    u -= e.index;
  }
  return fiber.entries.back();
}

}  // namespace

JuliaCloud sample_inverse_iteration(const RationalMap& r, const SpherePoint& start, int burn_in,
                                    std::size_t count, std::uint64_t seed, int walkers) {
  if (r.degree() < 2) throw PreconditionError("inverse iteration: degree must be >= 2");
  if (burn_in < 0) throw PreconditionError("inverse iteration: negative burn-in");
  if (walkers < 1) throw PreconditionError("inverse iteration: need at least one walker");

  const auto w = static_cast<std::size_t>(walkers);
  std::vector<std::vector<SpherePoint>> parts(w);
  parallel_for(w, [&](std::size_t k) {
    const std::size_t quota = count / w + (k < count % w ? 1 : 0);
    std::mt19937_64 rng(split_seed(seed, k));
    auto& out = parts[k];
    out.reserve(quota);
    SpherePoint x = start;
    for (int level = 0; level < burn_in; ++level) x = pick(preimages(r, x), rng(), r.degree()).point;
    while (out.size() < quota) {
      x = pick(preimages(r, x), rng(), r.degree()).point;
      out.push_back(x);
    }
  });

  JuliaCloud cloud;
  cloud.generator = CloudGenerator::inverse_iteration;
  cloud.seed = seed;
  cloud.burn_in = burn_in;
  cloud.walkers = walkers;
  cloud.start = start;
  cloud.points.reserve(count);
  for (auto& part : parts) cloud.points.insert(cloud.points.end(), part.begin(), part.end());
  return cloud;
}

double default_escape_radius(const RationalMap& polynomial_map) {
  const Polynomial& p = polynomial_map.numerator();
  const double q0 = std::abs(polynomial_map.denominator().coefficient(0));
  return std::max(2.0, p.max_abs_coefficient() / q0 + 1.0);
}

Escape escape_membership(const RationalMap& polynomial_map, Complex z, int max_iter,
                         double escape_radius) {
  if (!polynomial_map.is_polynomial()) {
    throw PreconditionError("escape_membership needs a polynomial map");
  }
  const double radius = escape_radius > 0.0 ? escape_radius : default_escape_radius(polynomial_map);
  const Polynomial& p = polynomial_map.numerator();
  const Complex q0 = polynomial_map.denominator().coefficient(0);
  for (int k = 0; k <= max_iter; ++k) {
    if (std::abs(z) > radius) return Escape::escapes;
    if (k == max_iter) break;
    z = p(z) / q0;
  }
  return Escape::bounded;
}

bool mandelbrot_member(Complex c, int max_iter) {
  Complex z{};
  for (int k = 0; k < max_iter; ++k) {
    z = z * z + c;
    if (std::norm(z) > 4.0) return false;
  }
  return true;
}

std::vector<CriticalDatum> critical_points_in_julia(const RationalMap& r, const JuliaCloud& cloud,
                                                    const CriticalInJuliaOptions& options) {
  if (cloud.points.empty()) throw PreconditionError("critical_points_in_julia: empty cloud");
  const CloudIndex index(cloud.points);
  const auto k = static_cast<std::size_t>(std::max(1, options.neighbors)) + 1;
  std::vector<CriticalDatum> out;
  for (const CriticalDatum& c : critical_points(r)) {
    const auto hit = index.nearest(c.point);
    double allowed = options.tol;
    const auto around = index.k_nearest(cloud.points[hit.index], k);
    if (around.size() == k) allowed = std::max(allowed, options.spacing_factor * around.back().distance);
    if (hit.distance <= allowed) out.push_back(c);
  }
  return out;
}

namespace {

GrayImage render_escape(const RationalMap& r, const Window& window, int width, int height,
                        const RenderOptions& options) {
  GrayImage image{width, height,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(width) *
                                            static_cast<std::size_t>(height))};
  const double radius = default_escape_radius(r);
  const Polynomial& p = r.numerator();
  const Complex q0 = r.denominator().coefficient(0);
  const double dx = (window.re_max - window.re_min) / width;
  const double dy = (window.im_max - window.im_min) / height;
  constexpr int kTileRows = 16;
  const auto tiles = static_cast<std::size_t>((height + kTileRows - 1) / kTileRows);
  parallel_for(tiles, [&](std::size_t t) {
    const int row_end = std::min(height, static_cast<int>(t + 1) * kTileRows);
    for (int j = static_cast<int>(t) * kTileRows; j < row_end; ++j) {
      const double im = window.im_max - (j + 0.5) * dy;
      for (int i = 0; i < width; ++i) {
        Complex z(window.re_min + (i + 0.5) * dx, im);
        int k = 0;
        while (k < options.max_iter && std::abs(z) <= radius) {
          z = p(z) / q0;
          ++k;
        }
        std::uint8_t shade = 255;
        if (std::abs(z) > radius) {
          shade = static_cast<std::uint8_t>(200.0 * k / std::max(1, options.max_iter));
        }
        image.pixels[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(i)] = shade;
      }
    }
  });
  return image;
}

GrayImage render_density(const RationalMap& r, const Window& window, int width, int height,
                         const RenderOptions& options) {
  const std::size_t pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t samples =
      options.samples > 0 ? options.samples : std::min<std::size_t>(4 * pixels, 4'000'000);
  const JuliaCloud cloud =
      sample_inverse_iteration(r, options.start, kDefaultBurnIn, samples, options.seed);
  std::vector<std::uint64_t> hits(pixels, 0);
  const double dx = (window.re_max - window.re_min) / width;
  const double dy = (window.im_max - window.im_min) / height;
  for (const SpherePoint& x : cloud.points) {
    if (x.is_infinity()) continue;
    const Complex z = x.value();
    const double fi = std::floor((z.real() - window.re_min) / dx);
    const double fj = std::floor((window.im_max - z.imag()) / dy);
    if (fi < 0 || fj < 0 || fi >= width || fj >= height) continue;
    ++hits[static_cast<std::size_t>(fj) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(fi)];
  }
  const std::uint64_t peak = *std::max_element(hits.begin(), hits.end());
  GrayImage image{width, height, std::vector<std::uint8_t>(pixels, 0)};
  if (peak == 0) return image;
  const double scale = std::log1p(static_cast<double>(peak));
  for (std::size_t k = 0; k < pixels; ++k) {
    if (hits[k] == 0) continue;
    const double v = std::log1p(static_cast<double>(hits[k])) / scale;
    image.pixels[k] = static_cast<std::uint8_t>(std::clamp(1.0 + 254.0 * v, 1.0, 255.0));
  }
  return image;
}

}  // namespace

GrayImage render(const RationalMap& r, const Window& window, int width, int height,
                 const RenderOptions& options) {
  if (width < 0 || height < 0) throw PreconditionError("render: negative resolution");
  if (static_cast<long long>(width) * height > kMaxPixels) {
    throw BudgetExceeded("render: resolution exceeds 8192^2 pixels");
  }
  if (width == 0 || height == 0) return GrayImage{width, height, {}};
  RenderMode mode = options.mode;
  if (mode == RenderMode::automatic) {
    mode = r.is_polynomial() ? RenderMode::escape : RenderMode::density;
  }
  if (mode == RenderMode::escape) {
    if (!r.is_polynomial()) throw PreconditionError("render: escape mode needs a polynomial map");
    return render_escape(r, window, width, height, options);
  }
  return render_density(r, window, width, height, options);
}

std::size_t cloud_components(const std::vector<SpherePoint>& points, double h) {
  std::vector<std::size_t> parent(points.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  const CloudIndex index(points);
  std::size_t components = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j : index.within(points[i], h)) {
      const std::size_t a = find(i);
      const std::size_t b = find(j);
      if (a != b) {
        parent[std::max(a, b)] = std::min(a, b);
        --components;
      }
    }
  }
  return components;
}

CircleCheck topological_circle_check(const std::vector<SpherePoint>& points, Complex center,
                                     double h, int bins) {
  CircleCheck check;
  std::vector<std::pair<double, Complex>> polar;
  for (const SpherePoint& p : points) {
    if (p.is_infinity()) return check;
    const Complex z = p.value() - center;
    if (std::abs(z) == 0.0) return check;
    polar.emplace_back(std::arg(z), p.value());
  }
  if (polar.size() < 3 || bins < 1) return check;
  std::sort(polar.begin(), polar.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  for (std::size_t i = 0; i < polar.size(); ++i) {
    const auto& next = polar[(i + 1) % polar.size()];
    check.max_gap = std::max(check.max_gap,
                             chordal_distance(polar[i].second, next.second));
  }

  std::vector<double> lo(static_cast<std::size_t>(bins), 1e300);
  std::vector<double> hi(static_cast<std::size_t>(bins), -1e300);
  for (const auto& [angle, z] : polar) {
    auto b = static_cast<std::size_t>((angle + std::numbers::pi) / (2 * std::numbers::pi) * bins);
    b = std::min(b, static_cast<std::size_t>(bins) - 1);
    const double rho = std::abs(z - center);
    lo[b] = std::min(lo[b], rho);
    hi[b] = std::max(hi[b], rho);
  }
  bool all_bins = true;
  for (std::size_t b = 0; b < lo.size(); ++b) {
    if (hi[b] < lo[b]) {
      all_bins = false;
      continue;
    }
    check.max_radial_spread = std::max(check.max_radial_spread, (hi[b] - lo[b]) / hi[b]);
  }
  check.pass = all_bins && check.max_gap < h && check.max_radial_spread < 0.05;
  return check;
}

}  // namespace ratdyn
