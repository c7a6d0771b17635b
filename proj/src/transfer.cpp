#include "ratdyn/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "ratdyn/errors.hpp"
#include "ratdyn/parallel.hpp"

namespace ratdyn {

TestFunction alpha(const RationalMap& r, const TestFunction& a) {
  if (a.constant_value()) return a;
  return TestFunction::from_evaluator([r, a](const SpherePoint& x) { return a(r(x)); },
                                      "alpha(" + a.label() + ")");
}

Complex h_op(const RationalMap& r, const TestFunction& a, const SpherePoint& y) {
  if (auto c = a.constant_value()) return *c * static_cast<double>(r.degree());
  Complex sum{};
  for (const FiberEntry& e : preimages(r, y).entries) sum += static_cast<double>(e.index) * a(e.point);
  return sum;
}

Complex transfer_E(const RationalMap& r, const TestFunction& a, const SpherePoint& y) {
  if (auto c = a.constant_value()) return *c;
  return h_op(r, a, y) / static_cast<double>(r.degree());
}

double lemma31_defect(const RationalMap& r, const TestFunction& a, const TestFunction& b,
                      const std::vector<SpherePoint>& probes) {
  std::vector<double> worst(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t i) {
    const SpherePoint& y = probes[i];
    const Fiber fiber = preimages(r, y);
    const double d = r.degree();
    Complex lhs{}, eb{}, ea{};
    for (const FiberEntry& e : fiber.entries) {
      const double w = static_cast<double>(e.index) / d;
      const Complex ar = a(r(e.point));
      const Complex bx = b(e.point);
      lhs += w * ar * bx;
      eb += w * bx;
      ea += w * ar;
    }
    const Complex ay = a(y);
    worst[i] = std::max(std::abs(lhs - ay * eb), std::abs(ea - ay));
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

namespace {

double sup_variation(const std::vector<Complex>& values) {
  if (values.empty()) return 0.0;
  double re_lo = values[0].real(), re_hi = re_lo;
  double im_lo = values[0].imag(), im_hi = im_lo;
  for (const Complex& v : values) {
    re_lo = std::min(re_lo, v.real());
    re_hi = std::max(re_hi, v.real());
    im_lo = std::min(im_lo, v.imag());
    im_hi = std::max(im_hi, v.imag());
  }
  return std::max(re_hi - re_lo, im_hi - im_lo);
}

}  // namespace

std::vector<KmsResult> kms_iterate(const RationalMap& r, const std::vector<TestFunction>& tests,
                                   int n, const std::vector<SpherePoint>& probes,
                                   const KmsOptions& options) {
  if (r.degree() < 2) throw PreconditionError("kms_iterate: degree must be >= 2");
  if (n < 0) throw PreconditionError("kms_iterate: negative level count");
  if (probes.empty()) throw PreconditionError("kms_iterate: empty probe set");

  bool outside = false;
  {
    JuliaCloud generated;
    const JuliaCloud* cloud = options.cloud;
    if (cloud == nullptr) {
      generated = sample_inverse_iteration(r, probes.front(), kDefaultBurnIn, 4000, 0);
      cloud = &generated;
    }
    outside = !critical_points_in_julia(r, *cloud).empty();
  }

  const std::size_t t_count = tests.size();
  const int chunk = std::max(1, options.chunk);
  // values[t][level][probe]
  std::vector<std::vector<std::vector<Complex>>> values;
  int reached = 0;
  for (int depth = std::min(n, chunk);; depth = std::min(n, depth + chunk)) {
    checked_power(r.degree(), depth, options.tree.node_budget);
    values.assign(t_count, std::vector<std::vector<Complex>>(
                               static_cast<std::size_t>(depth) + 1,
                               std::vector<Complex>(probes.size())));
    parallel_for(probes.size(), [&](std::size_t p) {
      std::vector<std::vector<Complex>> sums(t_count,
                                             std::vector<Complex>(static_cast<std::size_t>(depth) + 1));
      visit_preimage_tree(
          r, probes[p], depth,
          [&](int level, const SpherePoint& x, std::int64_t index) {
            const double w = static_cast<double>(index);
            for (std::size_t t = 0; t < t_count; ++t) {
              sums[t][static_cast<std::size_t>(level)] += w * tests[t](x);
            }
          },
          options.tree);
      double scale = 1.0;
      for (int level = 0; level <= depth; ++level) {
        for (std::size_t t = 0; t < t_count; ++t) {
          values[t][static_cast<std::size_t>(level)][p] = sums[t][static_cast<std::size_t>(level)] * scale;
        }
        scale /= r.degree();
      }
    });
    reached = depth;
    if (depth >= n) break;
    if (options.stop_tolerance > 0.0) {
      bool settled = true;
      for (std::size_t t = 0; t < t_count; ++t) {
        if (sup_variation(values[t].back()) >= options.stop_tolerance) settled = false;
      }
      if (settled) break;
    }
  }

  std::vector<KmsResult> out(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    KmsResult& res = out[t];
    res.test = tests[t].label();
    res.outside_hypothesis = outside;
    if (outside) res.tag = "outside theorem hypothesis";
    for (int level = 0; level <= reached; ++level) {
      IterationTrace trace;
      trace.level = level;
      trace.values = std::move(values[t][static_cast<std::size_t>(level)]);
      trace.sup_variation = sup_variation(trace.values);
      res.traces.push_back(std::move(trace));
    }
    Complex mean{};
    for (const Complex& v : res.traces.back().values) mean += v;
    res.limit = mean / static_cast<double>(probes.size());
  }
  return out;
}

KmsResult kms_iterate(const RationalMap& r, const TestFunction& a, int n,
                      const std::vector<SpherePoint>& probes, const KmsOptions& options) {
  return kms_iterate(r, std::vector<TestFunction>{a}, n, probes, options).front();
}

double kms_defect(const RationalMap& r, const WeightedCloud& cloud,
                  const std::vector<TestFunction>& tests, std::optional<double> beta) {
  const double d = r.degree();
  const double factor = beta ? std::exp(-*beta) : 1.0 / d;
  double worst = 0.0;
  for (const TestFunction& a : tests) {
    Complex lhs{};
    if (auto c = a.constant_value()) {
      lhs = factor * d * *c * cloud.total_weight();
    } else {
      std::vector<Complex> terms(cloud.atoms.size());
      parallel_for(cloud.atoms.size(), [&](std::size_t i) {
        terms[i] = cloud.atoms[i].weight * factor * h_op(r, a, cloud.atoms[i].point);
      });
      for (const Complex& t : terms) lhs += t;
    }
    worst = std::max(worst, std::abs(lhs - integrate(cloud, a)));
  }
  return worst;
}

EntropyValue entropy(const RationalMap& r) {
  if (r.degree() < 2) throw PreconditionError("entropy: degree must be >= 2");
  return {std::log(static_cast<double>(r.degree())), "theoretical value"};
}

}  // namespace ratdyn
