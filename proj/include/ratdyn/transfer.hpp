#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ratdyn/fiber.hpp"
#include "ratdyn/julia.hpp"
#include "ratdyn/measure.hpp"
#include "ratdyn/test_function.hpp"

namespace ratdyn {

// x -> a(R(x)).
TestFunction alpha(const RationalMap& r, const TestFunction& a);

// (1/d) sum over R^{-1}(y) of e(x) a(x). Exactly 1 for a = 1.
Complex transfer_E(const RationalMap& r, const TestFunction& a, const SpherePoint& y);

// d * transfer_E: the index-weighted fiber sum.
Complex h_op(const RationalMap& r, const TestFunction& a, const SpherePoint& y);

// Max over probes of |E(alpha(a) b)(y) - a(y) E(b)(y)| and of
// |E(alpha(a))(y) - a(y)|.
double lemma31_defect(const RationalMap& r, const TestFunction& a, const TestFunction& b,
                      const std::vector<SpherePoint>& probes);

struct IterationTrace {
  int level = 0;
  std::vector<Complex> values;  // one per probe
  // max(range of real parts, range of imaginary parts) over the probes.
  double sup_variation = 0.0;
};

struct KmsOptions {
  // Stop after the first depth chunk whose last level has sup_variation
  // below this value for every test. Zero disables early stopping.
  double stop_tolerance = 0.0;
  // Depths are explored in chunks of this many levels.
  int chunk = 4;
  TreeOptions tree{};
  // Sample used for the critical-points-in-J test; generated when absent.
  const JuliaCloud* cloud = nullptr;
};

struct KmsResult {
  std::string test;
  std::vector<IterationTrace> traces;  // levels 0..reached
  Complex limit{};                     // probe mean at the last level
  bool outside_hypothesis = false;     // J contains critical points
  std::string tag;                     // "outside theorem hypothesis" when set
};

// (e^{-beta} h)^k (a) at every probe for k <= n with beta = log d. The k-th
// power equals the integral of a against mu_k^probe, evaluated per probe by
// streaming its depth-k preimage tree. Several tests share one traversal.
std::vector<KmsResult> kms_iterate(const RationalMap& r, const std::vector<TestFunction>& tests,
                                   int n, const std::vector<SpherePoint>& probes,
                                   const KmsOptions& options = {});
KmsResult kms_iterate(const RationalMap& r, const TestFunction& a, int n,
                      const std::vector<SpherePoint>& probes, const KmsOptions& options = {});

// max over tests of |int e^{-beta} h(a) dmu - int a dmu|. beta defaults to
// log d; any other value is the falsification mode.
double kms_defect(const RationalMap& r, const WeightedCloud& cloud,
                  const std::vector<TestFunction>& tests, std::optional<double> beta = {});

struct EntropyValue {
  double value = 0.0;
  std::string provenance;
};

// log d, reported from theory.
EntropyValue entropy(const RationalMap& r);

}  // namespace ratdyn
