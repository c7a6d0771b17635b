#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ratdyn/rational_map.hpp"

namespace ratdyn {

struct FiberEntry {
  SpherePoint point;
  // e_{R^n}(x); an exact integer.
  std::int64_t index = 1;
};

// The points x with R^n(x) = base, each with its branch index.
// Indices sum to d^n exactly.
struct Fiber {
  SpherePoint base;
  int depth = 1;
  std::vector<FiberEntry> entries;

  std::int64_t index_sum() const;
};

// Depth-one fiber. Finite preimages are roots of P - wQ; when the degree of
// P - wQ drops below d (w = R(infinity)) infinity is a preimage with index
// equal to the drop. For w = infinity the preimages are the roots of Q plus
// infinity with index d - deg Q when positive. Entries are sorted
// lexicographically, infinity last.
Fiber preimages(const RationalMap& r, const SpherePoint& w, const RootTolerances& tol = {});

// Multiplicity of x in the fiber over R(x); 1 off the critical set.
int branch_index(const RationalMap& r, const SpherePoint& x, const RootTolerances& tol = {});

struct TreeOptions {
  std::int64_t node_budget = 1'000'000;
  RootTolerances roots{};
};

// All x with R^n(x) = y, indices from the chain rule along each branch.
// Depth-first with children in fiber order, so the output order is
// deterministic. Throws BudgetExceeded when d^n exceeds the node budget.
Fiber preimage_tree(const RationalMap& r, const SpherePoint& y, int n,
                    const TreeOptions& options = {});

// Every level of the tree: result[k] is the depth-k fiber (result[0] = {y}).
std::vector<Fiber> preimage_levels(const RationalMap& r, const SpherePoint& y, int n,
                                   const TreeOptions& options = {});

// Streams the tree depth-first without storing it. The visitor sees every
// node including the root (depth 0).
using TreeVisitor = std::function<void(int depth, const SpherePoint& x, std::int64_t index)>;
void visit_preimage_tree(const RationalMap& r, const SpherePoint& y, int n,
                         const TreeVisitor& visit, const TreeOptions& options = {});

// d^n, or throws BudgetExceeded if it is larger than the budget.
std::int64_t checked_power(int d, int n, std::int64_t budget);

}  // namespace ratdyn
