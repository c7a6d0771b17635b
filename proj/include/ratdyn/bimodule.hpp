#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ratdyn/fiber.hpp"
#include "ratdyn/julia.hpp"
#include "ratdyn/test_function.hpp"

namespace ratdyn {

// A function on graph R^n, keyed by the first coordinate x; the second
// coordinate is always R^n(x).
struct GraphFunction {
  int arity = 1;
  TestFunction body;
  Complex operator()(const SpherePoint& x) const { return body(x); }
};

// sum over R^{-n}(y) of e_{R^n}(x) conj(f(x)) g(x). Throws
// PreconditionError when the arities differ from n.
Complex inner_product(const RationalMap& r, int n, const GraphFunction& f, const GraphFunction& g,
                      const SpherePoint& y, const TreeOptions& options = {});

// (f | a f) with a acting by multiplication on the left.
Complex inner_product(const RationalMap& r, int n, const GraphFunction& f, const TestFunction& a,
                      const GraphFunction& g, const SpherePoint& y, const TreeOptions& options = {});

// Sampled sup norm over the Julia sample.
double norm_sup(const GraphFunction& f, const std::vector<SpherePoint>& julia_sample);

// sup over probes of sqrt((f|f)(y)).
double norm_two(const RationalMap& r, int n, const GraphFunction& f,
                const std::vector<SpherePoint>& probes, const TreeOptions& options = {});

// x -> prod_k f_k(R^{k-1}(x)); arity = number of factors.
GraphFunction tensor_embed(const RationalMap& r, const std::vector<GraphFunction>& factors,
                           int degree_budget = 256);

// (f_1 x ... x f_n | g_1 x ... x g_n)(y) evaluated through depth-one fibers,
// innermost factor first: the pairing of the first factors becomes a left
// multiplier for the next ones.
Complex nested_inner_product(const RationalMap& r, const std::vector<GraphFunction>& fs,
                             const std::vector<GraphFunction>& gs, const SpherePoint& y);

// The same pairing summed directly over the fiber of the iterate R^n, whose
// roots and multiplicities are computed from its own coefficients. Simple
// roots are then refined by Newton steps on R^n(x) = y.
Complex direct_inner_product(const RationalMap& r, const std::vector<GraphFunction>& fs,
                             const std::vector<GraphFunction>& gs, const SpherePoint& y,
                             int degree_budget = 256);

// Angular sectors around `center`: piece l is centered at angle
// offset + 2 pi l / count, has total width `width` (radians), and its bump
// ramps from 0 at the edge to 1 over `transition` radians.
struct CoverSpec {
  Complex center{0.0, 0.0};
  int count = 8;
  double width = 1.0471975511965976;  // 60 degrees
  double transition = 0.2617993877991494;  // 15 degrees
  double offset = 0.0;
  // Skips the critical-point and injectivity checks (negative controls only).
  bool unchecked = false;
};

struct Frame {
  CoverSpec cover;
  std::vector<GraphFunction> members;  // u_l = sqrt(chi_l)
  std::vector<TestFunction> partition;  // chi_l
};

// Finite right basis from a partition of unity subordinate to the cover.
// Refuses with PreconditionError when critical points lie in J, and throws
// CoverTooCoarse when one piece supports two points of a fiber over any
// sample point.
Frame build_frame(const RationalMap& r, const std::vector<SpherePoint>& julia_sample,
                  const CoverSpec& cover);

// max over probes, fiber points x and tests f of
// |sum_l u_l(x) (u_l|f)(R x) - f(x)|.
double reconstruction_defect(const RationalMap& r, const Frame& frame,
                             const std::vector<TestFunction>& tests,
                             const std::vector<SpherePoint>& probes);

// max over probes y and fiber pairs (x, x') of
// |sum_l u_l(x) conj(u_l(x')) - delta_{x,x'}|.
double frame_delta_defect(const RationalMap& r, const Frame& frame,
                          const std::vector<SpherePoint>& probes);

// max |a| over the critical points on the sampled Julia set; 0 when there
// are none.
double ix_distance(const RationalMap& r, const TestFunction& a, const JuliaCloud& cloud);

struct Disc {
  SpherePoint center;
  double radius = 0.0;  // chordal
};

// Smallest n such that R^n(V) covers the sample up to net_tol: every point
// of a greedy net_tol-net of the sample has an n-th preimage in V.
// PreconditionError if V misses the sample, BudgetExceeded past budget or
// when the preimage levels grow past 1e6 points.
int expansion_time(const RationalMap& r, const Disc& v, const std::vector<SpherePoint>& julia_sample,
                   double net_tol, int budget = 64);

struct WitnessOptions {
  // Generated from an inverse-iteration cloud when empty.
  std::vector<SpherePoint> sample;
  std::vector<SpherePoint> probes;
  std::size_t sample_size = 4000;
  std::size_t probe_count = 200;
  std::uint64_t seed = 0;
  double net_tol = 0.05;
  int max_n = 16;
  double tolerance = 1e-8;
};

struct WitnessReport {
  std::string map;
  std::string test;
  double eps = 0.0;
  double norm_a = 0.0;
  int n = 0;
  std::size_t probes = 0;
  double min_ff = 0.0, max_ff = 0.0;
  double min_faf = 0.0, max_faf = 0.0;
  double min_b = 0.0;
  bool pass = false;
  std::string detail;
};

struct Witness {
  int n = 0;
  GraphFunction f;
  WitnessReport report;
  SpherePoint x0;
  double radius = 0.0;  // chordal radius of U
  std::function<double(const SpherePoint&)> bump;  // g
  std::vector<SpherePoint> probes;
};

// Function-level construction behind ||a|| - eps <= (f|af) <= ||a||: bump g
// around a maximizer of a, expansion time for the inner disc, b = (g|g),
// f = g b^{-1/2}. a must be real and nonnegative on the sample and
// 0 < eps < ||a||, else PreconditionError. Throws WitnessFailed when the
// report misses tolerance.
Witness simplicity_witness(const RationalMap& r, const TestFunction& a, double eps,
                           const WitnessOptions& options = {});

struct NormalizedWitness {
  GraphFunction u;
  int n = 0;
  double min_uau = 0.0, max_uau = 0.0;
  double norm_two_u = 0.0;
  double bound = 0.0;  // (||a|| - eps)^{-1/2}
  bool pass = false;
  Witness base;
};

// u = f c^{-1/2} with c = (f|af); verifies (u|au) = 1 and
// ||u||_2 <= (||a|| - eps)^{-1/2}.
NormalizedWitness normalized_witness(const RationalMap& r, const TestFunction& a, double eps,
                                     const WitnessOptions& options = {});

struct WitnessRecheck {
  double max_ff_error = 0.0;
  double min_faf = 0.0, max_faf = 0.0;
};

// Recomputes (f|f) and (f|af) at the witness probes from the fibers of the
// iterate R^n (independent of the preimage tree used to build the witness).
WitnessRecheck recheck_witness(const RationalMap& r, const TestFunction& a, const Witness& w);

}  // namespace ratdyn
