#include "ratdyn/bimodule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "ratdyn/cloud_index.hpp"
#include "ratdyn/errors.hpp"
#include "ratdyn/parallel.hpp"

namespace ratdyn {

namespace {

void require_arity(int n, const GraphFunction& f) {
  if (f.arity != n) {
    throw PreconditionError("graph function of arity " + std::to_string(f.arity) +
                            " paired at level " + std::to_string(n));
  }
}

Fiber level_fiber(const RationalMap& r, int n, const SpherePoint& y, const TreeOptions& options) {
  if (n == 0) return Fiber{y, 0, {{y, 1}}};
  if (n == 1) return preimages(r, y, options.roots);
  return preimage_tree(r, y, n, options);
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

Complex inner_product(const RationalMap& r, int n, const GraphFunction& f, const GraphFunction& g,
                      const SpherePoint& y, const TreeOptions& options) {
  require_arity(n, f);
  require_arity(n, g);
  Complex sum{};
  for (const FiberEntry& e : level_fiber(r, n, y, options).entries) {
    sum += static_cast<double>(e.index) * std::conj(f(e.point)) * g(e.point);
  }
  return sum;
}

Complex inner_product(const RationalMap& r, int n, const GraphFunction& f, const TestFunction& a,
                      const GraphFunction& g, const SpherePoint& y, const TreeOptions& options) {
  require_arity(n, f);
  require_arity(n, g);
  Complex sum{};
  for (const FiberEntry& e : level_fiber(r, n, y, options).entries) {
    sum += static_cast<double>(e.index) * std::conj(f(e.point)) * a(e.point) * g(e.point);
  }
  return sum;
}

double norm_sup(const GraphFunction& f, const std::vector<SpherePoint>& julia_sample) {
  double m = 0.0;
  for (const SpherePoint& x : julia_sample) m = std::max(m, std::abs(f(x)));
  return m;
}

double norm_two(const RationalMap& r, int n, const GraphFunction& f,
                const std::vector<SpherePoint>& probes, const TreeOptions& options) {
  std::vector<double> values(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    values[i] = std::sqrt(std::max(0.0, inner_product(r, n, f, f, probes[i], options).real()));
  });
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

GraphFunction tensor_embed(const RationalMap& r, const std::vector<GraphFunction>& factors,
                           int degree_budget) {
  if (factors.empty()) throw PreconditionError("tensor_embed: no factors");
  for (const GraphFunction& f : factors) require_arity(1, f);
  const int n = static_cast<int>(factors.size());
  checked_power(r.degree(), n, degree_budget);
  if (n == 1) return factors.front();
  auto fs = factors;
  return GraphFunction{n, TestFunction::from_evaluator(
                              [r, fs](const SpherePoint& x) {
                                Complex prod{1.0, 0.0};
                                SpherePoint p = x;
                                for (std::size_t k = 0; k < fs.size(); ++k) {
                                  if (k > 0) p = r(p);
                                  prod *= fs[k](p);
                                }
                                return prod;
                              },
                              "tensor")};
}

namespace {

Complex nested(const RationalMap& r, const std::vector<GraphFunction>& fs,
               const std::vector<GraphFunction>& gs, std::size_t k, const SpherePoint& y) {
  // Pairing of factors 1..k at the point y (which lives at level k).
  Complex sum{};
  for (const FiberEntry& e : preimages(r, y).entries) {
    const Complex inner = k == 1 ? Complex{1.0, 0.0} : nested(r, fs, gs, k - 1, e.point);
    sum += static_cast<double>(e.index) * std::conj(fs[k - 1](e.point)) * inner * gs[k - 1](e.point);
  }
  return sum;
}

// Newton steps on R^n(x) = y with R^n and its derivative evaluated along the
// orbit. Roots of the expanded iterate are only as accurate as its (large)
// coefficients allow; this recovers full precision for simple roots. A step
// is kept only if it lowers the residual.
SpherePoint polish_simple_root(const RationalMap& r, int n, const SpherePoint& x0,
                               const SpherePoint& y) {
  if (x0.is_infinity() || y.is_infinity()) return x0;
  const Polynomial dp = r.numerator().derivative();
  const Polynomial dq = r.denominator().derivative();
  // R^n(x) and (R^n)'(x), or nothing when the orbit meets a pole.
  auto eval = [&](Complex x) -> std::optional<std::pair<Complex, Complex>> {
    Complex d{1.0, 0.0};
    for (int k = 0; k < n; ++k) {
      const Complex p = r.numerator()(x);
      const Complex q = r.denominator()(x);
      if (q == Complex{}) return std::nullopt;
      d *= (dp(x) * q - p * dq(x)) / (q * q);
      x = p / q;
    }
    return std::pair{x, d};
  };
  Complex x = x0.value();
  auto cur = eval(x);
  if (!cur) return x0;
  double residual = std::abs(cur->first - y.value());
  for (int step = 0; step < 4 && residual > 0.0; ++step) {
    if (cur->second == Complex{}) break;
    const Complex next = x - (cur->first - y.value()) / cur->second;
    const auto trial = eval(next);
    if (!trial || !(std::abs(trial->first - y.value()) < residual)) break;
    x = next;
    cur = trial;
    residual = std::abs(cur->first - y.value());
  }
  return x;
}

}  // namespace

Complex nested_inner_product(const RationalMap& r, const std::vector<GraphFunction>& fs,
                             const std::vector<GraphFunction>& gs, const SpherePoint& y) {
  if (fs.size() != gs.size() || fs.empty()) {
    throw PreconditionError("nested_inner_product: factor lists must match and be nonempty");
  }
  // The last factor sits on the fiber over y, the first one deepest.
  return nested(r, fs, gs, fs.size(), y);
}

Complex direct_inner_product(const RationalMap& r, const std::vector<GraphFunction>& fs,
                             const std::vector<GraphFunction>& gs, const SpherePoint& y,
                             int degree_budget) {
  if (fs.size() != gs.size() || fs.empty()) {
    throw PreconditionError("direct_inner_product: factor lists must match and be nonempty");
  }
  const int n = static_cast<int>(fs.size());
  const RationalMap rn = iterate_map(r, n, degree_budget);
  const GraphFunction f = tensor_embed(r, fs, degree_budget);
  const GraphFunction g = tensor_embed(r, gs, degree_budget);
  Complex sum{};
  for (const FiberEntry& e : preimages(rn, y).entries) {
    const SpherePoint x = e.index == 1 ? polish_simple_root(r, n, e.point, y) : e.point;
    sum += static_cast<double>(e.index) * std::conj(f(x)) * g(x);
  }
  return sum;
}

Frame build_frame(const RationalMap& r, const std::vector<SpherePoint>& julia_sample,
                  const CoverSpec& cover) {
  if (cover.count < 1 || cover.width <= 0.0 || cover.transition <= 0.0) {
    throw PreconditionError("build_frame: invalid cover");
  }
  if (!cover.unchecked) {
    JuliaCloud cloud;
    cloud.points = julia_sample;
    if (!critical_points_in_julia(r, cloud).empty()) {
      throw PreconditionError(
          "build_frame: the Julia set contains critical points, so no finite basis exists");
    }
  }

  const int count = cover.count;
  auto bump = [cover](const SpherePoint& x, int l) {
    if (x.is_infinity()) return 0.0;
    const Complex z = x.value() - cover.center;
    if (z == Complex{}) return 0.0;
    const double theta = cover.offset + 2.0 * std::numbers::pi * l / cover.count;
    const double delta = std::abs(std::remainder(std::arg(z) - theta, 2.0 * std::numbers::pi));
    return smoothstep((cover.width / 2.0 - delta) / cover.transition);
  };
  auto total = [bump, count](const SpherePoint& x) {
    double s = 0.0;
    for (int m = 0; m < count; ++m) s += bump(x, m);
    return s;
  };

  Frame frame;
  frame.cover = cover;
  for (int l = 0; l < count; ++l) {
    frame.partition.push_back(TestFunction::from_evaluator(
        [bump, total, l](const SpherePoint& x) {
          const double s = total(x);
          return Complex(s > 0.0 ? bump(x, l) / s : 0.0, 0.0);
        },
        "chi_" + std::to_string(l)));
    frame.members.push_back(GraphFunction{
        1, TestFunction::from_evaluator(
               [bump, total, l](const SpherePoint& x) {
                 const double s = total(x);
                 return Complex(s > 0.0 ? std::sqrt(bump(x, l) / s) : 0.0, 0.0);
               },
               "u_" + std::to_string(l))});
  }

  if (!cover.unchecked) {
    for (const SpherePoint& y : julia_sample) {
      if (total(y) <= 0.0) throw CoverTooCoarse("build_frame: cover misses a sample point");
      const Fiber fiber = preimages(r, y);
      for (int l = 0; l < count; ++l) {
        int inside = 0;
        for (const FiberEntry& e : fiber.entries) {
          if (bump(e.point, l) > 0.0) ++inside;
        }
        if (inside > 1) {
          throw CoverTooCoarse("build_frame: piece " + std::to_string(l) +
                               " contains two points of one fiber");
        }
      }
    }
  }
  return frame;
}

double reconstruction_defect(const RationalMap& r, const Frame& frame,
                             const std::vector<TestFunction>& tests,
                             const std::vector<SpherePoint>& probes) {
  std::vector<double> worst(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t i) {
    const Fiber fiber = preimages(r, probes[i]);
    const std::size_t members = frame.members.size();
    // u_l at every fiber point.
    std::vector<std::vector<double>> u(fiber.entries.size(), std::vector<double>(members));
    for (std::size_t p = 0; p < fiber.entries.size(); ++p) {
      for (std::size_t l = 0; l < members; ++l) u[p][l] = frame.members[l](fiber.entries[p].point).real();
    }
    for (const TestFunction& f : tests) {
      std::vector<Complex> fx(fiber.entries.size());
      for (std::size_t p = 0; p < fiber.entries.size(); ++p) fx[p] = f(fiber.entries[p].point);
      std::vector<Complex> coeff(members);
      for (std::size_t l = 0; l < members; ++l) {
        for (std::size_t p = 0; p < fiber.entries.size(); ++p) {
          coeff[l] += static_cast<double>(fiber.entries[p].index) * u[p][l] * fx[p];
        }
      }
      for (std::size_t p = 0; p < fiber.entries.size(); ++p) {
        Complex rebuilt{};
        for (std::size_t l = 0; l < members; ++l) rebuilt += u[p][l] * coeff[l];
        worst[i] = std::max(worst[i], std::abs(rebuilt - fx[p]));
      }
    }
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

double frame_delta_defect(const RationalMap& r, const Frame& frame,
                          const std::vector<SpherePoint>& probes) {
  std::vector<double> worst(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t i) {
    const Fiber fiber = preimages(r, probes[i]);
    for (std::size_t p = 0; p < fiber.entries.size(); ++p) {
      for (std::size_t q = 0; q < fiber.entries.size(); ++q) {
        Complex s{};
        for (const GraphFunction& u : frame.members) {
          s += u(fiber.entries[p].point) * std::conj(u(fiber.entries[q].point));
        }
        const double delta = p == q ? 1.0 : 0.0;
        worst[i] = std::max(worst[i], std::abs(s - delta));
      }
    }
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

double ix_distance(const RationalMap& r, const TestFunction& a, const JuliaCloud& cloud) {
  double m = 0.0;
  for (const CriticalDatum& c : critical_points_in_julia(r, cloud)) m = std::max(m, std::abs(a(c.point)));
  return m;
}

int expansion_time(const RationalMap& r, const Disc& v, const std::vector<SpherePoint>& julia_sample,
                   double net_tol, int budget) {
  const bool meets = std::any_of(julia_sample.begin(), julia_sample.end(), [&](const SpherePoint& x) {
    return chordal_distance(x, v.center) < v.radius;
  });
  if (!meets) throw PreconditionError("expansion_time: V does not meet the sample");

  // Greedy net_tol-net of the sample, in sample order.
  std::vector<SpherePoint> net;
  for (const SpherePoint& x : julia_sample) {
    const bool near = std::any_of(net.begin(), net.end(), [&](const SpherePoint& c) {
      return chordal_distance(x, c) <= net_tol;
    });
    if (!near) net.push_back(x);
  }

  // R^n(V) covers the net iff every net point has an n-th preimage in V.
  // The levels of all net points advance together.
  constexpr std::int64_t kNodeBudget = 1'000'000;
  std::vector<std::vector<SpherePoint>> level(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) level[i] = {net[i]};
  std::int64_t nodes = static_cast<std::int64_t>(net.size());
  for (int n = 0; n <= budget; ++n) {
    const bool covered = std::all_of(level.begin(), level.end(), [&](const auto& points) {
      return std::any_of(points.begin(), points.end(), [&](const SpherePoint& x) {
        return chordal_distance(x, v.center) < v.radius;
      });
    });
    if (covered) return n;
    if (n == budget) break;
    nodes *= r.degree();
    if (nodes > kNodeBudget) {
      throw BudgetExceeded("expansion_time: level " + std::to_string(n + 1) + " needs " +
                           std::to_string(nodes) + " preimages");
    }
    parallel_for(level.size(), [&](std::size_t i) {
      std::vector<SpherePoint> next;
      for (const SpherePoint& x : level[i]) {
        for (const FiberEntry& e : preimages(r, x).entries) next.push_back(e.point);
      }
      level[i] = std::move(next);
    });
  }
  throw BudgetExceeded("expansion_time: no covering within " + std::to_string(budget) + " steps");
}

namespace {

struct Sampled {
  std::vector<SpherePoint> sample;
  std::vector<SpherePoint> probes;
};

Sampled sample_for(const RationalMap& r, const WitnessOptions& options) {
  Sampled s{options.sample, options.probes};
  if (s.sample.empty()) {
    s.sample = sample_inverse_iteration(r, Complex(0.5, 0.25), kDefaultBurnIn, options.sample_size,
                                        options.seed)
                   .points;
  }
  if (s.probes.empty()) {
    const JuliaCloud extra = sample_inverse_iteration(r, Complex(-0.25, 0.5), kDefaultBurnIn,
                                                      options.probe_count, options.seed + 1);
    s.probes = extra.points;
  }
  return s;
}

// Fiber of R^n at y with indices; the shared evaluation path of the witness.
Fiber witness_fiber(const RationalMap& r, int n, const SpherePoint& y) {
  return level_fiber(r, n, y, TreeOptions{});
}

}  // namespace

Witness simplicity_witness(const RationalMap& r, const TestFunction& a, double eps,
                           const WitnessOptions& options) {
  const Sampled s = sample_for(r, options);
  double norm_a = 0.0;
  std::size_t arg_max = 0;
  for (std::size_t i = 0; i < s.sample.size(); ++i) {
    const Complex v = a(s.sample[i]);
    if (v.real() < -1e-12 || std::abs(v.imag()) > 1e-12) {
      throw PreconditionError("simplicity_witness: a must be real and nonnegative on the sample");
    }
    if (v.real() > norm_a) {
      norm_a = v.real();
      arg_max = i;
    }
  }
  if (!(eps > 0.0) || eps >= norm_a) {
    throw PreconditionError("simplicity_witness: need 0 < eps < ||a||");
  }

  Witness w;
  w.x0 = s.sample[arg_max];
  w.probes = s.probes;

  // U: the largest disc around x0 on which every sample point keeps
  // a >= ||a|| - eps/2; the whole sphere when no sample point falls below.
  double radius = 2.5;
  for (const SpherePoint& x : s.sample) {
    if (a(x).real() < norm_a - eps / 2.0) radius = std::min(radius, chordal_distance(x, w.x0));
  }
  const bool everywhere = radius > 2.0;

  std::function<double(const SpherePoint&)> g;
  int n = 1;
  if (everywhere) {
    g = [](const SpherePoint&) { return 1.0; };
  } else {
    const SpherePoint x0 = w.x0;
    const double u = radius;
    const double k = radius / 3.0;
    g = [x0, u, k](const SpherePoint& x) {
      return smoothstep((u - chordal_distance(x, x0)) / (u - k));
    };
    try {
      n = std::max(1, expansion_time(r, Disc{w.x0, radius / 9.0}, s.sample, options.net_tol,
                                     options.max_n));
    } catch (const BudgetExceeded& e) {
      throw WitnessFailed(std::string("simplicity_witness: ") + e.what());
    }
  }
  w.radius = everywhere ? 2.0 : radius;
  w.bump = g;

  // b = (g|g) must be >= 1 at every probe; the net test only certifies this
  // up to the sample resolution, so n grows until the probes agree.
  std::vector<Fiber> fibers(s.probes.size());
  std::vector<double> b(s.probes.size());
  for (;; ++n) {
    if (n > options.max_n) {
      throw WitnessFailed("simplicity_witness: (g|g) stays below 1 up to n = " +
                          std::to_string(options.max_n));
    }
    parallel_for(s.probes.size(), [&](std::size_t i) {
      fibers[i] = witness_fiber(r, n, s.probes[i]);
      double sum = 0.0;
      for (const FiberEntry& e : fibers[i].entries) {
        const double gv = g(e.point);
        sum += static_cast<double>(e.index) * gv * gv;
      }
      b[i] = sum;
    });
    if (*std::min_element(b.begin(), b.end()) >= 1.0 - 1e-9) break;
  }
  w.n = n;

  // ||a|| is a supremum over J; fiber points are Julia points too.
  for (const Fiber& fiber : fibers) {
    for (const FiberEntry& e : fiber.entries) norm_a = std::max(norm_a, a(e.point).real());
  }

  const RationalMap rmap = r;
  const int depth = n;
  auto b_at = [rmap, depth, g](const SpherePoint& y) {
    double sum = 0.0;
    for (const FiberEntry& e : witness_fiber(rmap, depth, y).entries) {
      const double gv = g(e.point);
      sum += static_cast<double>(e.index) * gv * gv;
    }
    return sum;
  };
  w.f = GraphFunction{
      n, TestFunction::from_evaluator(
             [rmap, depth, g, b_at](const SpherePoint& x) {
               const double gv = g(x);
               if (gv == 0.0) return Complex{};
               return Complex(gv / std::sqrt(b_at(iterate_point(rmap, x, depth))), 0.0);
             },
             "witness")};

  WitnessReport& rep = w.report;
  rep.test = a.label();
  rep.eps = eps;
  rep.norm_a = norm_a;
  rep.n = n;
  rep.probes = s.probes.size();
  rep.min_b = *std::min_element(b.begin(), b.end());
  std::vector<double> ff(s.probes.size()), faf(s.probes.size());
  parallel_for(s.probes.size(), [&](std::size_t i) {
    // f is evaluated through its own definition, so b is recomputed at the
    // forward image of each fiber point rather than reused from above.
    double sum_ff = 0.0, sum_faf = 0.0;
    for (const FiberEntry& e : fibers[i].entries) {
      const Complex fv = w.f(e.point);
      if (fv == Complex{}) continue;
      const double wgt = static_cast<double>(e.index) * std::norm(fv);
      sum_ff += wgt;
      sum_faf += wgt * a(e.point).real();
    }
    ff[i] = sum_ff;
    faf[i] = sum_faf;
  });
  rep.min_ff = *std::min_element(ff.begin(), ff.end());
  rep.max_ff = *std::max_element(ff.begin(), ff.end());
  rep.min_faf = *std::min_element(faf.begin(), faf.end());
  rep.max_faf = *std::max_element(faf.begin(), faf.end());
  const double tol = options.tolerance;
  rep.pass = std::abs(rep.min_ff - 1.0) <= tol && std::abs(rep.max_ff - 1.0) <= tol &&
             rep.min_faf >= norm_a - eps - tol && rep.max_faf <= norm_a + tol;
  if (!rep.pass) {
    rep.detail = "verification missed tolerance";
    throw WitnessFailed("simplicity_witness: (f|f) in [" + std::to_string(rep.min_ff) + ", " +
                        std::to_string(rep.max_ff) + "], (f|af) in [" +
                        std::to_string(rep.min_faf) + ", " + std::to_string(rep.max_faf) + "]");
  }
  return w;
}

NormalizedWitness normalized_witness(const RationalMap& r, const TestFunction& a, double eps,
                                     const WitnessOptions& options) {
  NormalizedWitness out;
  out.base = simplicity_witness(r, a, eps, options);
  const Witness& w = out.base;
  const int n = w.n;
  out.n = n;
  // With B = (g|g) and A = (g|ag): f = g B^{-1/2} and c = (f|af) = A / B,
  // so u = f c^{-1/2} = g A^{-1/2}, with A taken at the point's own image.
  const auto g = w.bump;
  const RationalMap rmap = r;
  auto a_at = [rmap, n, g, a](const SpherePoint& y) {
    double sum = 0.0;
    for (const FiberEntry& e : witness_fiber(rmap, n, y).entries) {
      const double gv = g(e.point);
      if (gv != 0.0) sum += static_cast<double>(e.index) * gv * gv * a(e.point).real();
    }
    return sum;
  };
  out.u = GraphFunction{n, TestFunction::from_evaluator(
                               [rmap, n, g, a_at](const SpherePoint& x) {
                                 const double gv = g(x);
                                 if (gv == 0.0) return Complex{};
                                 return Complex(gv / std::sqrt(a_at(iterate_point(rmap, x, n))), 0.0);
                               },
                               "normalized witness")};
  out.bound = 1.0 / std::sqrt(w.report.norm_a - eps);

  std::vector<double> uau(w.probes.size()), uu(w.probes.size());
  parallel_for(w.probes.size(), [&](std::size_t i) {
    double sum_uau = 0.0, sum_uu = 0.0;
    for (const FiberEntry& e : witness_fiber(r, n, w.probes[i]).entries) {
      const Complex uv = out.u(e.point);
      if (uv == Complex{}) continue;
      const double wgt = static_cast<double>(e.index) * std::norm(uv);
      sum_uu += wgt;
      sum_uau += wgt * a(e.point).real();
    }
    uau[i] = sum_uau;
    uu[i] = sum_uu;
  });
  out.min_uau = *std::min_element(uau.begin(), uau.end());
  out.max_uau = *std::max_element(uau.begin(), uau.end());
  out.norm_two_u = std::sqrt(*std::max_element(uu.begin(), uu.end()));
  const double tol = options.tolerance;
  out.pass = std::abs(out.min_uau - 1.0) <= tol && std::abs(out.max_uau - 1.0) <= tol &&
             out.norm_two_u <= out.bound + tol;
  if (!out.pass) throw WitnessFailed("normalized_witness: verification missed tolerance");
  return out;
}

WitnessRecheck recheck_witness(const RationalMap& r, const TestFunction& a, const Witness& w) {
  // Small iterates are solved as one polynomial; deeper ones fall back to the
  // level-by-level fiber expansion instead of the depth-first tree.
  constexpr std::int64_t kDirectLimit = 64;
  const bool direct = checked_power(r.degree(), w.n, 1'000'000) <= kDirectLimit;
  const RationalMap rn = direct ? iterate_map(r, w.n) : r;

  WitnessRecheck out;
  out.min_faf = 1e300;
  out.max_faf = -1e300;
  for (const SpherePoint& y : w.probes) {
    std::vector<FiberEntry> entries;
    if (direct) {
      entries = preimages(rn, y).entries;
    } else {
      entries = preimage_levels(r, y, w.n).back().entries;
    }
    double ff = 0.0, faf = 0.0;
    for (const FiberEntry& e : entries) {
      const double fv = std::abs(w.f(e.point));
      ff += static_cast<double>(e.index) * fv * fv;
      faf += static_cast<double>(e.index) * fv * fv * a(e.point).real();
    }
    out.max_ff_error = std::max(out.max_ff_error, std::abs(ff - 1.0));
    out.min_faf = std::min(out.min_faf, faf);
    out.max_faf = std::max(out.max_faf, faf);
  }
  return out;
}

}  // namespace ratdyn
