#include "ratdyn/measure.hpp"

#include <cmath>
#include <random>

#include "ratdyn/cloud_index.hpp"
#include "ratdyn/errors.hpp"
#include "ratdyn/parallel.hpp"
#include "ratdyn/transfer.hpp"

namespace ratdyn {

double WeightedCloud::total_weight() const {
  double s = 0.0;
  for (const Atom& a : atoms) s += a.weight;
  return s;
}

std::vector<SpherePoint> WeightedCloud::points() const {
  std::vector<SpherePoint> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(a.point);
  return out;
}

WeightedCloud lyubich_exact(const RationalMap& r, const SpherePoint& y, int n,
                            const TreeOptions& options) {
  if (n < 0) throw PreconditionError("lyubich_exact: negative depth");
  WeightedCloud cloud;
  cloud.provenance = ExactTree{y, n};
  if (n == 0) {
    cloud.atoms.push_back({y, 1.0});
    cloud.indices.push_back(1);
    return cloud;
  }
  const Fiber fiber = preimage_tree(r, y, n, options);
  cloud.denominator = checked_power(r.degree(), n, options.node_budget);
  const double inv = 1.0 / static_cast<double>(cloud.denominator);
  cloud.atoms.reserve(fiber.entries.size());
  for (const FiberEntry& e : fiber.entries) {
    cloud.atoms.push_back({e.point, static_cast<double>(e.index) * inv});
    cloud.indices.push_back(e.index);
  }
  return cloud;
}

WeightedCloud lyubich_mc(const RationalMap& r, const SpherePoint& y, int depth,
                         std::size_t samples, std::uint64_t seed, int burn_in) {
  if (r.degree() < 2) throw PreconditionError("lyubich_mc: degree must be >= 2");
  if (depth < burn_in) {
    throw PreconditionError("lyubich_mc: depth " + std::to_string(depth) +
                            " is below the burn-in " + std::to_string(burn_in));
  }
  if (samples == 0) throw PreconditionError("lyubich_mc: need at least one sample");
  const int d = r.degree();
  std::vector<Atom> atoms(samples);
  const double w = 1.0 / static_cast<double>(samples);
  parallel_for(samples, [&](std::size_t k) {
    std::mt19937_64 rng(split_seed(seed, k));
    SpherePoint x = y;
    for (int level = 0; level < depth; ++level) {
      const Fiber fiber = preimages(r, x);
      auto u = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(d));
      const FiberEntry* chosen = &fiber.entries.back();
      for (const FiberEntry& e : fiber.entries) {
        if (u < e.index) {
          chosen = &e;
          break;
        }
        u -= e.index;
      }
      x = chosen->point;
    }
    atoms[k] = {x, w};
  });
  WeightedCloud cloud;
  cloud.atoms = std::move(atoms);
  cloud.provenance = MonteCarlo{y, depth, samples, seed};
  return cloud;
}

Complex integrate(const WeightedCloud& cloud, const TestFunction& a) {
  if (auto c = a.constant_value()) return *c * cloud.total_weight();
  Complex sum{};
  for (const Atom& atom : cloud.atoms) sum += atom.weight * a(atom.point);
  return sum;
}

double invariance_defect(const RationalMap& r, const WeightedCloud& cloud,
                         const std::vector<TestFunction>& tests) {
  double worst = 0.0;
  for (const TestFunction& a : tests) {
    if (a.constant_value()) continue;
    worst = std::max(worst, std::abs(integrate(cloud, alpha(r, a)) - integrate(cloud, a)));
  }
  return worst;
}

PushforwardCheck pushforward_identity(const RationalMap& r, const SpherePoint& y, int n,
                                      double match_tol, const TreeOptions& options) {
  if (n < 1) throw PreconditionError("pushforward_identity: depth must be >= 1");
  const WeightedCloud fine = lyubich_exact(r, y, n, options);
  const WeightedCloud coarse = lyubich_exact(r, y, n - 1, options);
  const std::vector<SpherePoint> coarse_points = coarse.points();
  const CloudIndex index(coarse_points);

  PushforwardCheck check;
  std::vector<std::int64_t> pushed(coarse.atoms.size(), 0);
  for (std::size_t i = 0; i < fine.atoms.size(); ++i) {
    const auto hit = index.nearest(r(fine.atoms[i].point));
    check.max_match_distance = std::max(check.max_match_distance, hit.distance);
    pushed[hit.index] += fine.indices[i];
  }
  if (check.max_match_distance > match_tol) {
    check.detail = "image farther than match tolerance from every coarser atom";
    return check;
  }
  const std::int64_t d = r.degree();
  for (std::size_t j = 0; j < pushed.size(); ++j) {
    if (pushed[j] != d * coarse.indices[j]) {
      check.detail = "index sum mismatch at coarse atom " + std::to_string(j) + ": " +
                     std::to_string(pushed[j]) + " vs " + std::to_string(d * coarse.indices[j]);
      return check;
    }
  }
  check.exact = fine.denominator == d * coarse.denominator;
  if (!check.exact) check.detail = "denominators are not related by d";
  return check;
}

std::vector<GapRecord> convergence_diagnostic(const RationalMap& r, const SpherePoint& y1,
                                              const SpherePoint& y2, int n,
                                              const std::vector<TestFunction>& tests,
                                              const TreeOptions& options) {
  std::vector<GapRecord> out;
  if (n <= 0) return out;
  const auto levels1 = preimage_levels(r, y1, n, options);
  const auto levels2 = preimage_levels(r, y2, n, options);
  auto level_integral = [&](const Fiber& fiber, int k, const TestFunction& a) {
    const double inv = 1.0 / static_cast<double>(checked_power(r.degree(), k, options.node_budget));
    Complex sum{};
    for (const FiberEntry& e : fiber.entries) sum += static_cast<double>(e.index) * a(e.point);
    return sum * inv;
  };
  for (const TestFunction& a : tests) {
    std::vector<Complex> values;
    for (int k = 0; k <= n; ++k) values.push_back(level_integral(levels1[static_cast<std::size_t>(k)], k, a));
    for (int k = 0; k < n; ++k) {
      out.push_back({k, a.label(),
                     std::abs(values[static_cast<std::size_t>(k)] - values[static_cast<std::size_t>(k) + 1]),
                     "level"});
    }
    const Complex other = level_integral(levels2[static_cast<std::size_t>(n)], n, a);
    out.push_back({n, a.label(), std::abs(values.back() - other), "basepoint"});
  }
  return out;
}

}  // namespace ratdyn
