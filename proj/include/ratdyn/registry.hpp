#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ratdyn/rational_map.hpp"

namespace ratdyn {

// A quoted fact together with where it is stated.
struct Anchored {
  std::string value;
  std::string anchor;
};

// Catalog entry for one worked example. K-groups and algebra
// identifications are quoted metadata; nothing here computes them.
struct ExampleRecord {
  std::string name;
  std::string formula;    // human-readable map, parameter substituted
  std::string parameter;  // name of the family parameter, empty if none
  std::optional<Complex> parameter_value;
  RationalMap map;
  Anchored julia_description;
  std::optional<int> critical_in_julia_count;
  std::string critical_in_julia_anchor;
  Anchored k0;
  Anchored k1;
  Anchored algebra;
  std::vector<std::string> verifiable_checks;
};

std::vector<std::string> list_examples();

// Throws UnknownExample for names outside the catalog and
// PreconditionError for an invalid parameter.
ExampleRecord get_example(const std::string& name, std::optional<Complex> parameter = {});

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string example;
  std::string formula;
  std::vector<CheckResult> checks;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t cloud_size = 4000;
  std::int64_t node_budget = 1'000'000;
  std::optional<Complex> parameter;
};

// Runs every verifiable check of the example. Check failures, including
// exceptions inside a check, are recorded rather than thrown.
VerifyReport verify_example(const std::string& name, const VerifyOptions& options = {});

// Catalog order; the checks of different examples run concurrently.
std::vector<VerifyReport> verify_all(const VerifyOptions& options = {});

}  // namespace ratdyn
