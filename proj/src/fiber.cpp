#include "ratdyn/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ratdyn/errors.hpp"
#include "ratdyn/parallel.hpp"

namespace ratdyn {

std::int64_t Fiber::index_sum() const {
  std::int64_t s = 0;
  for (const FiberEntry& e : entries) s += e.index;
  return s;
}

namespace {

// Relative threshold below which the top coefficients of P - wQ count as
// cancelled, i.e. w equals R(infinity).
constexpr double kDegreeDropTolerance = 1e-14;

void sort_entries(std::vector<FiberEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const FiberEntry& a, const FiberEntry& b) {
    return lexicographic_less(a.point, b.point);
  });
}

}  // namespace

Fiber preimages(const RationalMap& r, const SpherePoint& w, const RootTolerances& tol) {
  const int d = r.degree();
  const Polynomial& p = r.numerator();
  const Polynomial& q = r.denominator();
  Fiber fiber{w, 1, {}};

  if (w.is_infinity()) {
    if (q.degree() >= 1) {
      for (const Root& root : roots_with_multiplicity(q, tol).entries) {
        fiber.entries.push_back({root.point, root.multiplicity});
      }
    }
    if (d - q.degree() > 0) fiber.entries.push_back({SpherePoint::infinity(), d - q.degree()});
    sort_entries(fiber.entries);
    return fiber;
  }

  const Complex wv = w.value();
  std::vector<Complex> coeffs(static_cast<std::size_t>(d) + 1);
  int effective = -1;
  for (int k = 0; k <= d; ++k) {
    const Complex pk = p.coefficient(k);
    const Complex qk = q.coefficient(k);
    Complex c = pk - wv * qk;
    const double scale = std::abs(pk) + std::abs(wv) * std::abs(qk);
    if (std::abs(c) <= kDegreeDropTolerance * scale) c = Complex{};
    coeffs[static_cast<std::size_t>(k)] = c;
    if (c != Complex{}) effective = k;
  }
  if (effective < 0) {
    throw NonConvergence("preimages: P - wQ vanished identically");
  }
  coeffs.resize(static_cast<std::size_t>(effective) + 1);
  const Polynomial f(std::move(coeffs));
  if (f.degree() >= 1) {
    for (const Root& root : roots_with_multiplicity(f, tol).entries) {
      fiber.entries.push_back({root.point, root.multiplicity});
    }
  }
  if (d - f.degree() > 0) fiber.entries.push_back({SpherePoint::infinity(), d - f.degree()});
  sort_entries(fiber.entries);
  return fiber;
}

int branch_index(const RationalMap& r, const SpherePoint& x, const RootTolerances& tol) {
  const Fiber fiber = preimages(r, r(x), tol);
  const FiberEntry* best = nullptr;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const FiberEntry& e : fiber.entries) {
    const double dist = chordal_distance(e.point, x);
    if (dist < best_distance) {
      best_distance = dist;
      best = &e;
    }
  }
  return best ? static_cast<int>(best->index) : 1;
}

std::int64_t checked_power(int d, int n, std::int64_t budget) {
  std::int64_t acc = 1;
  for (int k = 0; k < n; ++k) {
    if (acc > budget / d) {
      throw BudgetExceeded("tree: " + std::to_string(d) + "^" + std::to_string(n) +
                           " nodes exceed budget " + std::to_string(budget));
    }
    acc *= d;
  }
  if (acc > budget) {
    throw BudgetExceeded("tree: " + std::to_string(d) + "^" + std::to_string(n) +
                         " nodes exceed budget " + std::to_string(budget));
  }
  return acc;
}

namespace {

void descend(const RationalMap& r, const SpherePoint& x, std::int64_t index, int depth, int n,
             const TreeVisitor& visit, const RootTolerances& tol) {
  visit(depth, x, index);
  if (depth == n) return;
  const Fiber fiber = preimages(r, x, tol);
  for (const FiberEntry& child : fiber.entries) {
    descend(r, child.point, index * child.index, depth + 1, n, visit, tol);
  }
}

}  // namespace

void visit_preimage_tree(const RationalMap& r, const SpherePoint& y, int n,
                         const TreeVisitor& visit, const TreeOptions& options) {
  if (r.degree() < 2) throw PreconditionError("preimage tree: degree must be >= 2");
  if (n < 0) throw PreconditionError("preimage tree: negative depth");
  checked_power(r.degree(), n, options.node_budget);
  descend(r, y, 1, 0, n, visit, options.roots);
}

Fiber preimage_tree(const RationalMap& r, const SpherePoint& y, int n,
                    const TreeOptions& options) {
  if (r.degree() < 2) throw PreconditionError("preimage tree: degree must be >= 2");
  if (n < 1) throw PreconditionError("preimage tree: depth must be >= 1");
  checked_power(r.degree(), n, options.node_budget);

  // Subtrees below the first level are independent; results are concatenated
  // in fiber order so the output does not depend on scheduling.
  const Fiber top = preimages(r, y, options.roots);
  std::vector<std::vector<FiberEntry>> parts(top.entries.size());
  parallel_for(top.entries.size(), [&](std::size_t i) {
    const FiberEntry& child = top.entries[i];
    auto& out = parts[i];
    descend(r, child.point, child.index, 1, n,
            [&](int depth, const SpherePoint& x, std::int64_t index) {
              if (depth == n) out.push_back({x, index});
            },
            options.roots);
  });
  Fiber fiber{y, n, {}};
  for (auto& part : parts) {
    fiber.entries.insert(fiber.entries.end(), part.begin(), part.end());
  }
  return fiber;
}

std::vector<Fiber> preimage_levels(const RationalMap& r, const SpherePoint& y, int n,
                                   const TreeOptions& options) {
  if (r.degree() < 2) throw PreconditionError("preimage tree: degree must be >= 2");
  if (n < 0) throw PreconditionError("preimage tree: negative depth");
  checked_power(r.degree(), n, options.node_budget);
  std::vector<Fiber> levels(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) levels[static_cast<std::size_t>(k)] = Fiber{y, k, {}};
  levels[0].entries.push_back({y, 1});
  for (int k = 1; k <= n; ++k) {
    const auto& parents = levels[static_cast<std::size_t>(k) - 1].entries;
    std::vector<std::vector<FiberEntry>> parts(parents.size());
    parallel_for(parents.size(), [&](std::size_t i) {
      const Fiber f = preimages(r, parents[i].point, options.roots);
      for (const FiberEntry& e : f.entries) parts[i].push_back({e.point, e.index * parents[i].index});
    });
    auto& level = levels[static_cast<std::size_t>(k)].entries;
    for (auto& part : parts) level.insert(level.end(), part.begin(), part.end());
  }
  return levels;
}

}  // namespace ratdyn
