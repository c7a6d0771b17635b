#pragma once

#include <vector>

#include "ratdyn/polynomial.hpp"

namespace ratdyn {

struct RootTolerances {
  // Base clustering radius, scaled by (1 + |root|).
  double cluster_radius = 1e-6;
  // Accepted backward error |p(r)| / sum|a_k||r|^k when iteration stalls.
  double residual = 1e-9;
  int max_iterations = 500;
};

struct Root {
  SpherePoint point;
  int multiplicity = 1;
};

// Roots counted with multiplicity. Multiplicities sum to the degree and
// distinct entries are separated by more than the clustering radius.
struct RootSet {
  std::vector<Root> entries;
  // max |p(r)| / |lead(p)| over returned roots.
  double residual_bound = 0.0;

  int total_multiplicity() const;
};

// All roots of a nonzero polynomial with multiplicities.
//
// Exact zero low-order coefficients give roots at 0 with exact multiplicity.
// The remaining factor is solved by Aberth-Ehrlich simultaneous iteration
// from a perturbed circle, switching to the reversed polynomial for |z| > 1.
// Approximations are then merged agglomeratively: two groups merge when
// their centroids lie within the clustering radius, or within the wider
// radius a perturbed m-fold root spreads over, provided the Taylor
// coefficients at the merged centroid confirm an m-fold root there. The
// centroid of an m-fold cluster is refined by Newton steps on p^(m-1).
//
// Throws PreconditionError for the zero polynomial and NonConvergence when
// the iteration neither converges nor reaches the residual tolerance.
RootSet roots_with_multiplicity(const Polynomial& p, const RootTolerances& tol = {});

}  // namespace ratdyn
