#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ratdyn/fiber.hpp"
#include "ratdyn/test_function.hpp"

namespace ratdyn {

struct Atom {
  SpherePoint point;
  double weight = 0.0;
};

struct ExactTree {
  SpherePoint base;
  int depth = 0;
};

struct MonteCarlo {
  SpherePoint base;
  int depth = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// A cloud read back from disk; its construction is unknown.
struct Imported {
  std::string source;
};

// Finitely many weighted atoms approximating the Lyubich measure.
//
// Exact-tree clouds keep the integer branch indices next to the weights:
// weight = index / denominator with denominator = d^n, so sums and
// pushforwards can be compared exactly.
struct WeightedCloud {
  std::vector<Atom> atoms;
  std::variant<ExactTree, MonteCarlo, Imported> provenance;
  std::vector<std::int64_t> indices;  // exact trees only
  std::int64_t denominator = 1;       // exact trees only

  bool is_exact() const { return std::holds_alternative<ExactTree>(provenance); }
  double total_weight() const;
  std::vector<SpherePoint> points() const;
};

// mu_n^y: the depth-n preimage tree with weights e_{R^n}(x) / d^n.
WeightedCloud lyubich_exact(const RationalMap& r, const SpherePoint& y, int n,
                            const TreeOptions& options = {});

// `samples` endpoints of independent backward walks of length `depth` with
// step law e(x)/d, each weighted 1/samples. Sample k uses the stream
// split_seed(seed, k), so the cloud does not depend on the thread count.
// Throws PreconditionError when depth < burn_in.
WeightedCloud lyubich_mc(const RationalMap& r, const SpherePoint& y, int depth,
                         std::size_t samples, std::uint64_t seed, int burn_in = 20);

// sum of weight * a(atom). Propagates EvaluationAtInfinity.
Complex integrate(const WeightedCloud& cloud, const TestFunction& a);

// max over tests of |integrate(a o R) - integrate(a)|.
double invariance_defect(const RationalMap& r, const WeightedCloud& cloud,
                         const std::vector<TestFunction>& tests);

struct PushforwardCheck {
  bool exact = false;
  // Largest chordal distance from R(x) to its matched coarser atom.
  double max_match_distance = 0.0;
  std::string detail;
};

// Pushes lyubich_exact(r, y, n) forward by R and compares it atom for atom
// with lyubich_exact(r, y, n - 1): every image is matched to the nearest
// coarser atom (within match_tol), and for each coarser atom the summed
// integer indices of its preimage atoms must equal d times its own index.
PushforwardCheck pushforward_identity(const RationalMap& r, const SpherePoint& y, int n,
                                      double match_tol = 1e-8, const TreeOptions& options = {});

struct GapRecord {
  int k = 0;           // level; n for the cross-basepoint record
  std::string test;    // label of the test function
  double gap = 0.0;
  std::string kind;    // "level" or "basepoint"
};

// |int a dmu_k^y - int a dmu_{k+1}^y| for 0 <= k < n, then the cross-basepoint
// gap |int a dmu_n^{y1} - int a dmu_n^{y2}| (recorded with k = n). n = 0 gives
// an empty sequence.
std::vector<GapRecord> convergence_diagnostic(const RationalMap& r, const SpherePoint& y1,
                                              const SpherePoint& y2, int n,
                                              const std::vector<TestFunction>& tests,
                                              const TreeOptions& options = {});

}  // namespace ratdyn
