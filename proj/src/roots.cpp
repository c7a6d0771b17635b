#include "ratdyn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "ratdyn/errors.hpp"

namespace ratdyn {

int RootSet::total_multiplicity() const {
  int s = 0;
  for (const Root& r : entries) s += r.multiplicity;
  return s;
}

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

struct Chart {
  const Polynomial& p;
  Polynomial dp;
  Polynomial rev;
  Polynomial drev;
  int n;

  explicit Chart(const Polynomial& poly)
      : p(poly), dp(poly.derivative()), rev(poly.reversed(poly.degree())),
        drev(rev.derivative()), n(poly.degree()) {}

  struct Eval {
    Complex newton;  // p/p'
    double backward_error;
    bool derivative_vanished;
  };

  Eval evaluate(Complex z) const {
    if (std::abs(z) <= 1.0) {
      const Complex v = p(z);
      const Complex dv = dp(z);
      const double scale = p.abs_eval(std::abs(z));
      const double be = scale > 0 ? std::abs(v) / scale : 0.0;
      if (dv == Complex{}) return {Complex{}, be, true};
      return {v / dv, be, false};
    }
    // p(z) = z^n q(u), p'(z) = z^(n-1) (n q(u) - u q'(u)) with u = 1/z.
    const Complex u = 1.0 / z;
    const Complex q = rev(u);
    const Complex dq = drev(u);
    const double scale = rev.abs_eval(std::abs(u));
    const double be = scale > 0 ? std::abs(q) / scale : 0.0;
    const Complex denom = static_cast<double>(n) * q - u * dq;
    if (denom == Complex{}) return {Complex{}, be, true};
    return {z * q / denom, be, false};
  }
};

double converged_backward_error(int n) { return 8.0 * (n + 1) * kUnitRoundoff; }

std::vector<Complex> initial_guesses(const Polynomial& p) {
  const int n = p.degree();
  const double ratio = std::abs(p.coefficient(0)) / std::abs(p.leading());
  const double radius = std::pow(ratio, 1.0 / n);
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n + 0.4;
    const double r = radius * (1.0 + 0.02 * k / n);
    z[static_cast<std::size_t>(k)] = std::polar(r, angle);
  }
  return z;
}

// Aberth-Ehrlich in Gauss-Seidel form. Returns approximations; throws when
// neither convergence nor the residual tolerance is reached.
std::vector<Complex> aberth(const Polynomial& p, const RootTolerances& tol) {
  const int n = p.degree();
  const Chart chart(p);
  std::vector<Complex> z = initial_guesses(p);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  const double be_target = converged_backward_error(n);

  for (int iter = 0; iter < tol.max_iterations; ++iter) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      if (done[static_cast<std::size_t>(i)]) continue;
      const Chart::Eval ev = chart.evaluate(zi);
      if (ev.backward_error <= be_target) {
        done[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      all_done = false;
      if (ev.derivative_vanished) {
        zi *= Complex(1.0 + 1e-3, 1e-3);
        continue;
      }
      Complex s{};
      for (int j = 0; j < n; ++j) {
        if (j != i) s += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
      }
      const Complex w = ev.newton / (1.0 - ev.newton * s);
      zi -= w;
      if (std::abs(w) <= 4.0 * kUnitRoundoff * std::abs(zi)) done[static_cast<std::size_t>(i)] = 1;
    }
    if (all_done) return z;
    if (std::all_of(done.begin(), done.end(), [](char c) { return c != 0; })) return z;
  }

  double worst = 0.0;
  for (const Complex& zi : z) worst = std::max(worst, chart.evaluate(zi).backward_error);
  if (worst <= tol.residual) return z;
  throw NonConvergence("Aberth iteration: backward error " + std::to_string(worst) +
                       " after " + std::to_string(tol.max_iterations) + " iterations");
}

std::vector<Complex> solve_low_degree(const Polynomial& p) {
  if (p.degree() == 1) return {-p.coefficient(0) / p.coefficient(1)};
  const Complex a = p.coefficient(2);
  const Complex b = p.coefficient(1);
  const Complex c = p.coefficient(0);
  const Complex s = std::sqrt(b * b - 4.0 * a * c);
  const Complex q = (std::real(std::conj(b) * s) >= 0.0) ? -0.5 * (b + s) : -0.5 * (b - s);
  if (q == Complex{}) return {Complex{}, Complex{}};
  return {q / a, c / q};
}

struct Group {
  Complex sum{};
  int count = 0;
  double spread = 0.0;  // max distance of a member to the centroid
  std::vector<Complex> members;

  Complex centroid() const { return sum / static_cast<double>(count); }
};

double base_radius(const RootTolerances& tol, Complex c) {
  return tol.cluster_radius * (1.0 + std::abs(c));
}

// Radius a perturbed m-fold root at c spreads over, and whether the Taylor
// coefficients at c are consistent with such a root.
bool confirms_multiple_root(const Polynomial& p, const RootTolerances& tol, Complex c,
                            int m, double spread) {
  const Polynomial t = p.taylor_shift(c);
  const double tm = std::abs(t.coefficient(m));
  if (tm == 0.0) return false;
  const double n = p.degree();
  const double floor_radius =
      2.0 * std::pow(8.0 * (n + 1) * kUnitRoundoff * p.abs_eval(std::abs(c)) / tm, 1.0 / m);
  const double wide = std::max(base_radius(tol, c), floor_radius);
  if (spread > wide) return false;
  double rho = 0.0;
  for (int k = 0; k < m; ++k) {
    rho = std::max(rho, std::pow(std::abs(t.coefficient(k)) / tm, 1.0 / (m - k)));
  }
  return rho <= wide;
}

Group merged(const Group& a, const Group& b) {
  Group g;
  g.sum = a.sum + b.sum;
  g.count = a.count + b.count;
  g.members = a.members;
  g.members.insert(g.members.end(), b.members.begin(), b.members.end());
  const Complex c = g.centroid();
  for (const Complex& z : g.members) g.spread = std::max(g.spread, std::abs(z - c));
  return g;
}

std::vector<Group> cluster(const Polynomial& p, const std::vector<Complex>& approx,
                           const RootTolerances& tol) {
  std::vector<Group> groups;
  groups.reserve(approx.size());
  for (const Complex& z : approx) groups.push_back(Group{z, 1, 0.0, {z}});

  // Single linkage at the base clustering radius.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < groups.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        const Complex ci = groups[i].centroid();
        const Complex cj = groups[j].centroid();
        const double r = std::max(base_radius(tol, ci), base_radius(tol, cj));
        if (std::abs(ci - cj) <= r) {
          groups[i] = merged(groups[i], groups[j]);
          groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
      }
    }
  }

  // Perturbed multiple roots: grow each group by its nearest neighbours and
  // keep the largest confirmed multiplicity.
  changed = true;
  while (changed && groups.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < groups.size() && !changed; ++i) {
      const Complex ci = groups[i].centroid();
      std::vector<std::size_t> order;
      for (std::size_t j = 0; j < groups.size(); ++j) {
        if (j != i) order.push_back(j);
      }
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(groups[a].centroid() - ci) < std::abs(groups[b].centroid() - ci);
      });
      Group acc = groups[i];
      std::size_t best = 0;
      for (std::size_t k = 0; k < order.size(); ++k) {
        acc = merged(acc, groups[order[k]]);
        if (acc.spread > 0.05 * (1.0 + std::abs(acc.centroid()))) break;
        if (confirms_multiple_root(p, tol, acc.centroid(), acc.count, acc.spread)) best = k + 1;
      }
      if (best > 0) {
        Group g = groups[i];
        std::vector<std::size_t> absorbed(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best));
        for (std::size_t j : absorbed) g = merged(g, groups[j]);
        absorbed.push_back(i);
        std::sort(absorbed.rbegin(), absorbed.rend());
        for (std::size_t j : absorbed) groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
        groups.push_back(std::move(g));
        changed = true;
      }
    }
  }
  return groups;
}

// An m-fold root of p is a simple root of p^(m-1); Newton on that derivative
// sharpens the cluster centroid from about eps^(1/m) to working precision.
// Steps that do not lower |p^(m-1)| are rejected.
Complex refine_multiple_root(const Polynomial& p, Complex c, int m) {
  Polynomial d = p;
  for (int k = 1; k < m; ++k) d = d.derivative();
  const Polynomial dd = d.derivative();
  double residual = std::abs(d(c));
  for (int step = 0; step < 8 && residual > 0.0; ++step) {
    const Complex slope = dd(c);
    if (slope == Complex{}) break;
    const Complex next = c - d(c) / slope;
    const double r = std::abs(d(next));
    if (!(r < residual)) break;
    c = next;
    residual = r;
  }
  return c;
}

}  // namespace

RootSet roots_with_multiplicity(const Polynomial& p, const RootTolerances& tol) {
  if (p.is_zero()) throw PreconditionError("roots_with_multiplicity: zero polynomial");
  RootSet out;
  if (p.degree() == 0) return out;

  // Exact roots at the origin.
  int zeros = 0;
  while (p.coefficient(zeros) == Complex{}) ++zeros;
  const auto coeffs = p.coefficients();
  const Polynomial reduced(std::vector<Complex>(coeffs.begin() + zeros, coeffs.end()));

  std::vector<Group> groups;
  if (reduced.degree() >= 1) {
    const std::vector<Complex> approx =
        reduced.degree() <= 2 ? solve_low_degree(reduced) : aberth(reduced, tol);
    groups = cluster(reduced, approx, tol);
  }

  if (zeros > 0) out.entries.push_back(Root{SpherePoint(Complex{}), zeros});
  for (const Group& g : groups) {
    const Complex c = g.count > 1 ? refine_multiple_root(reduced, g.centroid(), g.count)
                                  : g.centroid();
    // A cluster sitting on the exact zero root joins it.
    if (zeros > 0 && std::abs(c) <= base_radius(tol, 0.0)) {
      out.entries.front().multiplicity += g.count;
      continue;
    }
    out.entries.push_back(Root{SpherePoint(c), g.count});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const Root& a, const Root& b) { return lexicographic_less(a.point, b.point); });

  const double lead = std::abs(p.leading());
  for (const Root& r : out.entries) {
    out.residual_bound = std::max(out.residual_bound, std::abs(p(r.point.value())) / lead);
  }
  return out;
}

}  // namespace ratdyn
