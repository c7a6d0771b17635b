#include "ratdyn/registry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ratdyn/bimodule.hpp"
#include "ratdyn/cloud_index.hpp"
#include "ratdyn/errors.hpp"
#include "ratdyn/julia.hpp"
#include "ratdyn/measure.hpp"
#include "ratdyn/parallel.hpp"
#include "ratdyn/transfer.hpp"

namespace ratdyn {

namespace {

const std::vector<std::string> kNames = {"power_map_n",  "z2_minus_2",   "quadratic_family",
                                         "full_shift_example", "tchebychev_n", "lattes",
                                         "ushiki_gasket"};

int integer_parameter(std::optional<Complex> p, int fallback, const std::string& name) {
  if (!p) return fallback;
  const double v = p->real();
  if (p->imag() != 0.0 || v != std::round(v) || v < 2 || v > 64) {
    throw PreconditionError(name + ": parameter must be an integer in [2, 64]");
  }
  return static_cast<int>(v);
}

// T_n by the three-term recurrence T_{k+1} = 2z T_k - T_{k-1}.
Polynomial chebyshev(int n) {
  Polynomial prev{1.0};
  Polynomial cur{0.0, 1.0};
  if (n == 0) return prev;
  const Polynomial two_z{0.0, 2.0};
  for (int k = 1; k < n; ++k) {
    Polynomial next = two_z * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::string format_complex(Complex c) {
  std::ostringstream out;
  out.precision(17);
  if (c.imag() == 0.0) {
    out << c.real();
  } else {
    out << '(' << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  }
  return out.str();
}

CheckResult make_check(std::string name, bool pass, double measured, double threshold,
                       std::string detail = {}) {
  return {std::move(name), pass, measured, threshold, std::move(detail)};
}

// --- shared checks ---------------------------------------------------------

CheckResult check_riemann_hurwitz(const RationalMap& r) {
  const int total = riemann_hurwitz_total(critical_points(r));
  return make_check("riemann_hurwitz", total == 2 * r.degree() - 2, total, 2 * r.degree() - 2);
}

CheckResult check_fiber_sums(const RationalMap& r, std::uint64_t seed, int count = 200) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.5);
  int bad = 0;
  for (int k = 0; k < count; ++k) {
    const Complex w(normal(rng), normal(rng));
    if (preimages(r, w).index_sum() != r.degree()) ++bad;
  }
  return make_check("fiber_sums", bad == 0, bad, 0, "points with index sum != d");
}

double max_distance_to_interval(const std::vector<SpherePoint>& points, double lo, double hi) {
  double worst = 0.0;
  for (const SpherePoint& p : points) {
    if (p.is_infinity()) return std::numeric_limits<double>::infinity();
    const Complex z = p.value();
    const double dx = z.real() < lo ? lo - z.real() : (z.real() > hi ? z.real() - hi : 0.0);
    worst = std::max(worst, std::hypot(dx, z.imag()));
  }
  return worst;
}

CheckResult check_interval(const std::vector<SpherePoint>& cloud, double lo, double hi) {
  const double d = max_distance_to_interval(cloud, lo, hi);
  return make_check("julia_interval", d < 1e-6, d, 1e-6, "max distance of cloud to the interval");
}

CheckResult check_critical_count(const RationalMap& r, const JuliaCloud& cloud, int expected) {
  const int count = static_cast<int>(critical_points_in_julia(r, cloud).size());
  return make_check("critical_in_julia", count == expected, count, expected,
                    "distinct critical points on the sampled Julia set");
}

CheckResult check_kms(const RationalMap& r, const std::vector<SpherePoint>& probes,
                      const JuliaCloud& cloud, const VerifyOptions& options) {
  KmsOptions kms;
  kms.stop_tolerance = 1e-6;
  kms.tree.node_budget = options.node_budget;
  kms.cloud = &cloud;
  const auto tests = monomial_family(2);
  const auto results = kms_iterate(r, tests, 20, probes, kms);
  const WeightedCloud mu = lyubich_exact(r, probes.front(), 12);
  double worst_var = 0.0, worst_limit = 0.0;
  for (std::size_t t = 0; t < tests.size(); ++t) {
    worst_var = std::max(worst_var, results[t].traces.back().sup_variation);
    worst_limit = std::max(worst_limit, std::abs(results[t].limit - integrate(mu, tests[t])));
  }
  std::ostringstream detail;
  detail.precision(17);
  detail << "levels " << results.front().traces.back().level << ", limit gap " << worst_limit;
  return make_check("kms_converges", worst_var < 1e-6 && worst_limit < 1e-3, worst_var, 1e-6,
                    detail.str());
}

std::vector<SpherePoint> head(const std::vector<SpherePoint>& v, std::size_t n) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(n, v.size()))};
}

// --- per-example checks ----------------------------------------------------

std::vector<CheckResult> verify_power(const ExampleRecord& rec, const VerifyOptions& o) {
  const RationalMap& r = rec.map;
  const int n = r.degree();
  std::vector<CheckResult> out;
  const JuliaCloud cloud = sample_inverse_iteration(r, Complex(0.5, 0.25), kDefaultBurnIn,
                                                    o.cloud_size, o.seed);
  double worst = 0.0;
  for (const SpherePoint& p : cloud.points) worst = std::max(worst, std::abs(std::abs(p.value()) - 1.0));
  out.push_back(make_check("julia_unit_circle", worst < 1e-6, worst, 1e-6, "max ||z| - 1|"));
  out.push_back(check_critical_count(r, cloud, 0));
  try {
    CoverSpec cover;
    cover.count = 4 * n;
    cover.width = std::numbers::pi / n;
    cover.transition = cover.width / 4.0;
    const Frame frame = build_frame(r, cloud.points, cover);
    const double defect = reconstruction_defect(r, frame, monomial_family(3), head(cloud.points, 50));
    out.push_back(make_check("frame_builds", defect < 1e-8, defect, 1e-8, "reconstruction defect"));
  } catch (const Error& e) {
    out.push_back(make_check("frame_builds", false, 0, 1e-8, e.what()));
  }
  out.push_back(check_kms(r, head(cloud.points, 8), cloud, o));
  out.push_back(check_riemann_hurwitz(r));
  return out;
}

std::vector<CheckResult> verify_z2_minus_2(const ExampleRecord& rec, const VerifyOptions& o) {
  const RationalMap& r = rec.map;
  std::vector<CheckResult> out;
  const JuliaCloud cloud = sample_inverse_iteration(r, 1.0, kDefaultBurnIn, o.cloud_size, o.seed);
  out.push_back(check_interval(cloud.points, -2.0, 2.0));
  {
    const auto found = critical_points_in_julia(r, cloud);
    const bool zero = found.size() == 1 && chordal_distance(found[0].point, 0.0) < 1e-9;
    out.push_back(make_check("critical_in_julia", zero, static_cast<double>(found.size()), 1,
                             "expects exactly the critical point 0"));
  }
  // Tent map h and the conjugacy phi(t) = 2 cos(pi t).
  double worst = 0.0;
  constexpr int kGrid = 10000;
  for (int k = 0; k <= kGrid; ++k) {
    const double t = static_cast<double>(k) / kGrid;
    const double h = t <= 0.5 ? 2.0 * t : 2.0 - 2.0 * t;
    const double lhs = r(2.0 * std::cos(std::numbers::pi * t)).value().real();
    const double rhs = 2.0 * std::cos(std::numbers::pi * h);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  out.push_back(make_check("tent_conjugacy", worst < 1e-10, worst, 1e-10,
                           "max |P(phi(t)) - phi(h(t))| on 10001 grid points"));
  out.push_back(check_riemann_hurwitz(r));
  return out;
}

// c = w/2 - w^2/4 inverts to w = 1 - sqrt(1 - 4c); c lies in the main
// cardioid exactly when |w| < 1.
double cardioid_modulus(Complex c) { return std::abs(1.0 - std::sqrt(1.0 - 4.0 * c)); }

std::vector<CheckResult> verify_quadratic(const ExampleRecord& rec, const VerifyOptions& o) {
  std::vector<CheckResult> out;
  {
    std::mt19937_64 rng(split_seed(o.seed, 17));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int disagreements = 0;
    for (int k = 0; k < 100; ++k) {
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      Complex c;
      bool inside;
      if (k % 2 == 0) {
        const Complex w = std::polar(0.95 * std::sqrt(unit(rng)), angle);
        c = w / 2.0 - w * w / 4.0;
        inside = cardioid_modulus(c) < 1.0;
      } else {
        c = std::polar(2.0 + unit(rng), angle);
        inside = false;
      }
      if (mandelbrot_member(c, 2000) != inside) ++disagreements;
    }
    out.push_back(make_check("cardioid_agreement", disagreements == 0, disagreements, 0,
                             "100 parameters: 50 inside |w| < 0.95, 50 with |c| > 2"));
  }

  const RationalMap& r = rec.map;
  const Complex c = rec.parameter_value.value_or(0.2);
  if (cardioid_modulus(c) < 1.0) {
    // The invariant measure is thin in places, so the chain checks need a
    // denser cloud than the default.
    const JuliaCloud cloud = sample_inverse_iteration(r, Complex(0.5, 0.25), kDefaultBurnIn,
                                                      4 * o.cloud_size, o.seed);
    const CircleCheck circle = topological_circle_check(cloud.points, 0.0, 0.1, 120);
    out.push_back(make_check("cardioid_circle", circle.pass, circle.max_gap, 0.1,
                             "angular chain gap; radial spread " +
                                 std::to_string(circle.max_radial_spread)));
    const std::size_t components = cloud_components(cloud.points, 0.05);
    out.push_back(make_check("cardioid_connected", components == 1,
                             static_cast<double>(components), 1,
                             "components at linking radius 0.05"));
  }
  {
    const Complex outside = mandelbrot_member(c, 2000) ? Complex(1.0, 0.0) : c;
    const RationalMap p(Polynomial{outside, 0.0, 1.0});
    const JuliaCloud cloud = sample_inverse_iteration(p, Complex(0.5, 0.25), kDefaultBurnIn,
                                                      o.cloud_size, o.seed);
    const std::size_t components = cloud_components(cloud.points, 0.05);
    out.push_back(make_check("outside_disconnects", components > 1, static_cast<double>(components),
                             1, "components for c = " + format_complex(outside)));
  }
  out.push_back(check_riemann_hurwitz(r));
  return out;
}

std::vector<CheckResult> verify_full_shift(const ExampleRecord& rec, const VerifyOptions& o) {
  const RationalMap& r = rec.map;
  std::vector<CheckResult> out;
  out.push_back(make_check("degree", r.degree() == 2, r.degree(), 2));
  out.push_back(check_fiber_sums(r, o.seed));
  out.push_back(check_riemann_hurwitz(r));
  return out;
}

std::vector<CheckResult> verify_tchebychev(const ExampleRecord& rec, const VerifyOptions& o) {
  const RationalMap& r = rec.map;
  const int n = r.degree();
  std::vector<CheckResult> out;
  const JuliaCloud cloud = sample_inverse_iteration(r, 0.3, kDefaultBurnIn, o.cloud_size, o.seed);
  out.push_back(check_interval(cloud.points, -1.0, 1.0));
  out.push_back(check_critical_count(r, cloud, n - 1));

  // Arcsine moments: int x^{2k} dmu = C(2k, k) / 4^k, odd moments vanish.
  int depth = 1;
  while (checked_power(n, depth + 1, o.node_budget) <= 100000) ++depth;
  const WeightedCloud mu = lyubich_exact(r, 0.3, depth, TreeOptions{o.node_budget, {}});
  double worst = 0.0;
  double expected = 1.0;
  for (int m = 1; m <= 6; ++m) {
    double oracle = 0.0;
    if (m % 2 == 0) {
      const int k = m / 2;
      expected *= (2.0 * k - 1.0) / (2.0 * k);  // C(2k,k)/4^k recursively
      oracle = expected;
    }
    worst = std::max(worst, std::abs(integrate(mu, TestFunction::monomial(m)) - oracle));
  }
  out.push_back(make_check("lyubich_moments", worst < 1e-2, worst, 1e-2,
                           "depth " + std::to_string(depth) + ", moments 1..6"));
  out.push_back(check_riemann_hurwitz(r));
  return out;
}

std::vector<SpherePoint> uniform_sphere_sample(int count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double x = normal(rng), y = normal(rng), z = normal(rng);
    const double len = std::sqrt(x * x + y * y + z * z);
    // Inverse stereographic projection from the north pole.
    const double zz = z / len;
    out.push_back(zz > 1.0 - 1e-12 ? SpherePoint::infinity()
                                   : SpherePoint(Complex(x / len, y / len) / (1.0 - zz)));
  }
  return out;
}

std::vector<CheckResult> verify_lattes(const ExampleRecord& rec, const VerifyOptions& o) {
  const RationalMap& r = rec.map;
  std::vector<CheckResult> out;
  const auto crit = critical_points(r);
  out.push_back(make_check("six_critical_points", crit.size() == 6 && riemann_hurwitz_total(crit) == 6,
                           static_cast<double>(crit.size()), 6));
  out.push_back(check_fiber_sums(r, o.seed));
  out.push_back(check_riemann_hurwitz(r));

  // J = whole sphere: a uniform sphere sample stays spread out under R (no
  // attracting cycle collects it), and the backward cloud is dense.
  constexpr double kDelta = 0.1;
  std::mt19937_64 rng(split_seed(o.seed, 23));
  // R^5 redistributes its sample by the nonuniform invariant density, so the
  // pushed sample is ten times larger than the test sample.
  const std::vector<SpherePoint> sphere = uniform_sphere_sample(2000, rng);
  std::vector<SpherePoint> pushed = uniform_sphere_sample(20000, rng);
  for (int step = 0; step < 5; ++step) {
    for (SpherePoint& p : pushed) p = r(p);
  }
  const CloudIndex pushed_index(pushed);
  const JuliaCloud cloud = sample_inverse_iteration(r, Complex(0.5, 0.25), kDefaultBurnIn,
                                                    5 * o.cloud_size, o.seed);
  const CloudIndex cloud_index(cloud.points);
  double worst_pushed = 0.0, worst_cloud = 0.0;
  for (const SpherePoint& p : sphere) {
    worst_pushed = std::max(worst_pushed, pushed_index.nearest(p).distance);
    worst_cloud = std::max(worst_cloud, cloud_index.nearest(p).distance);
  }
  out.push_back(make_check("julia_is_sphere", worst_pushed < kDelta && worst_cloud < kDelta,
                           std::max(worst_pushed, worst_cloud), kDelta,
                           "delta-net of a uniform sphere sample by R^5(sample) and the cloud"));
  out.push_back(check_critical_count(r, cloud, 6));
  return out;
}

std::vector<CheckResult> verify_ushiki(const ExampleRecord& rec, const VerifyOptions& o) {
  const RationalMap& r = rec.map;
  std::vector<CheckResult> out;
  out.push_back(make_check("degree", r.degree() == 3, r.degree(), 3));
  out.push_back(check_riemann_hurwitz(r));
  const JuliaCloud cloud = sample_inverse_iteration(r, Complex(0.5, 0.25), kDefaultBurnIn,
                                                    o.cloud_size, o.seed);
  out.push_back(check_critical_count(r, cloud, 3));
  RenderOptions ro;
  ro.seed = o.seed;
  ro.samples = 50000;
  const GrayImage image = render(r, Window{-1.5, 1.5, -1.5, 1.5}, 128, 128, ro);
  const auto lit = std::count_if(image.pixels.begin(), image.pixels.end(),
                                 [](std::uint8_t v) { return v > 0; });
  out.push_back(make_check("render_nonempty", lit > 0, static_cast<double>(lit), 0,
                           "lit pixels in a 128x128 density render"));
  return out;
}

}  // namespace

std::vector<std::string> list_examples() { return kNames; }

ExampleRecord get_example(const std::string& name, std::optional<Complex> parameter) {
  const Polynomial one{1.0};
  if (name == "power_map_n") {
    const int n = integer_parameter(parameter, 2, name);
    return ExampleRecord{
        name,
        "z^" + std::to_string(n),
        "n",
        Complex(n, 0.0),
        RationalMap(Polynomial::monomial(n)),
        {"the unit circle S^1", "Example 4.1, \"the Julia set J_P is the unit circle S^1\""},
        0,
        "Example 4.1 (no critical point on S^1)",
        {"Z + Z/(n-1)Z", "Example 4.1, \"K_0(O_P) = Z + Z/(n-1)Z\""},
        {"Z", "Example 4.1, \"K_1(O_P) = Z\""},
        {"fixed-point algebra under the gauge action is a Bunce-Deddens algebra of type n^infinity",
         "Example 4.1, \"Bunce-Deddence algebra of type n^infinity\""},
        {"julia_unit_circle", "critical_in_julia", "frame_builds", "kms_converges",
         "riemann_hurwitz"}};
  }
  if (name == "z2_minus_2") {
    if (parameter) throw PreconditionError(name + " takes no parameter");
    return ExampleRecord{
        name,
        "z^2-2",
        "",
        std::nullopt,
        RationalMap(Polynomial{-2.0, 0.0, 1.0}),
        {"the interval [-2,2]", "Example 4.2, \"the Julia set J_P is the interval [-2,2]\""},
        1,
        "Example 4.2, \"it contains a critical point 0\"",
        {"Z", "Example 4.2, \"K_0(O_P) = Z\""},
        {"0", "Example 4.2, \"K_1(O_P) = 0\""},
        {"Cuntz algebra O_infinity", "Example 4.2, \"isomorphic to the Cuntz algebra O_infinity\""},
        {"julia_interval", "critical_in_julia", "tent_conjugacy", "riemann_hurwitz"}};
  }
  if (name == "quadratic_family") {
    const Complex c = parameter.value_or(Complex(0.2, 0.0));
    return ExampleRecord{
        name,
        "z^2+" + format_complex(c),
        "c",
        c,
        RationalMap(Polynomial{c, 0.0, 1.0}),
        {"homeomorphic to S^1 for c in the interior of the main cardioid; conjugate to the full "
         "two shift for c outside M",
         "Example 4.3, \"the Julia set is homeomorphic to the unit circle S^1\""},
        0,
        "Example 4.3 (c in the main cardioid: conjugate to z^2 on S^1)",
        {"Z (c in the main cardioid)", "Example 4.3, \"K_0(O_P) = Z\""},
        {"Z (c in the main cardioid)", "Example 4.3, \"K_1(O_P) = Z\""},
        {"Cuntz algebra O_2 for c outside M",
         "Example 4.3, \"isomorphic to the Cuntz algebra O_2\""},
        {"cardioid_agreement", "cardioid_circle", "cardioid_connected", "outside_disconnects",
         "riemann_hurwitz"}};
  }
  if (name == "full_shift_example") {
    if (parameter) throw PreconditionError(name + " takes no parameter");
    return ExampleRecord{
        name,
        "(2z^2-1)/z",
        "",
        std::nullopt,
        RationalMap(Polynomial{-1.0, 0.0, 2.0}, Polynomial{0.0, 1.0}),
        {"conjugate to the full d-shift",
         "Example 4.4, \"(J_R, R) is topologically conjugate to the full d-shift\""},
        std::nullopt,
        "",
        {"", ""},
        {"", ""},
        {"Cuntz algebra O_2", "Example 4.4, \"O_R = O_2\""},
        {"degree", "fiber_sums", "riemann_hurwitz"}};
  }
  if (name == "tchebychev_n") {
    const int n = integer_parameter(parameter, 3, name);
    return ExampleRecord{
        name,
        "T_" + std::to_string(n),
        "n",
        Complex(n, 0.0),
        RationalMap(chebyshev(n)),
        {"the interval [-1,1]", "Example 4.5, \"the Julia set J_{T_n} is the interval [-1,1]\""},
        n - 1,
        "Example 4.5, \"J_{T_n} contains n-1 critical points\"",
        {"Z^(n-1)", "Example 4.5, \"K_0(O_{T_n}) = Z^{n-1}\""},
        {"0", "Example 4.5, \"K_1(O_{T_n}) = 0\""},
        {"", ""},
        {"julia_interval", "critical_in_julia", "lyubich_moments", "riemann_hurwitz"}};
  }
  if (name == "lattes") {
    if (parameter) throw PreconditionError(name + " takes no parameter");
    return ExampleRecord{
        name,
        "(z^2+1)^2/(4z(z^2-1))",
        "",
        std::nullopt,
        RationalMap(Polynomial{1.0, 0.0, 2.0, 0.0, 1.0}, Polynomial{0.0, -4.0, 0.0, 4.0}),
        {"the whole sphere", "Example 4.6, \"J_R = C-hat\""},
        6,
        "Example 4.6, \"contains six critical points\"",
        {"six-term exact sequence only (K_0(I_X) = Z)", "Example 4.6 diagram"},
        {"six-term exact sequence only (K_1(I_X) = Z^5)", "Example 4.6 diagram"},
        {"", ""},
        {"six_critical_points", "fiber_sums", "riemann_hurwitz", "julia_is_sphere",
         "critical_in_julia"}};
  }
  if (name == "ushiki_gasket") {
    if (parameter) throw PreconditionError(name + " takes no parameter");
    return ExampleRecord{
        name,
        "(z^3-16/27)/z",
        "",
        std::nullopt,
        RationalMap(Polynomial{-16.0 / 27.0, 0.0, 0.0, 1.0}, Polynomial{0.0, 1.0}),
        {"homeomorphic to the Sierpinski gasket",
         "Example 4.7, \"J_R is homeomorphic to the Sierpinski gasket K\""},
        3,
        "Example 4.7, \"J_R contains three critical points\"",
        {"contains a torsion free element", "Example 4.7, \"K_0(O_R) contains a torsion free element\""},
        {"", ""},
        {"not isomorphic to O_Z = O_3", "Example 4.7"},
        {"degree", "riemann_hurwitz", "critical_in_julia", "render_nonempty"}};
  }
  throw UnknownExample("unknown example: " + name);
}

VerifyReport verify_example(const std::string& name, const VerifyOptions& options) {
  const ExampleRecord rec = get_example(name, options.parameter);
  using Runner = std::function<std::vector<CheckResult>(const ExampleRecord&, const VerifyOptions&)>;
  Runner run;
  if (name == "power_map_n") run = verify_power;
  if (name == "z2_minus_2") run = verify_z2_minus_2;
  if (name == "quadratic_family") run = verify_quadratic;
  if (name == "full_shift_example") run = verify_full_shift;
  if (name == "tchebychev_n") run = verify_tchebychev;
  if (name == "lattes") run = verify_lattes;
  if (name == "ushiki_gasket") run = verify_ushiki;

  VerifyReport report;
  report.example = name;
  report.formula = rec.formula;
  try {
    report.checks = run(rec, options);
  } catch (const std::exception& e) {
    report.checks.push_back(make_check("run", false, 0, 0, e.what()));
  }
  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const CheckResult& c) { return c.pass; });
  return report;
}

std::vector<VerifyReport> verify_all(const VerifyOptions& options) {
  std::vector<VerifyReport> out(kNames.size());
  VerifyOptions defaults = options;
  defaults.parameter.reset();
  parallel_for(kNames.size(), [&](std::size_t i) { out[i] = verify_example(kNames[i], defaults); });
  return out;
}

}  // namespace ratdyn
