#pragma once

#include <functional>
#include <vector>

#include "mapgeom/dynamics.hpp"
#include "mapgeom/mapspace.hpp"

namespace mapgeom {

// Finitely many atoms with positive masses summing to one.
struct DiscreteMeasure {
  std::vector<Vec> atoms;
  std::vector<double> masses;

  static DiscreteMeasure make(std::vector<Vec> atoms, std::vector<double> masses);
  void validate() const;
  std::size_t size() const { return atoms.size(); }
};

// perm[i] is the target atom receiving source atom i.
struct Assignment {
  std::vector<std::size_t> perm;
  double cost = 0.0;
};

using CostFunction = std::function<double(const Vec&, const Vec&)>;

double squared_euclidean(const Vec& a, const Vec& b);
// Squared geodesic distance on `man`, via the shooting log.
CostFunction squared_geodesic_cost(ManifoldPtr man, ShootingOptions opts = {});

// phi_* mu for the node measure of q's domain. Coincident atoms merge.
DiscreteMeasure pushforward_measure(const MapField& q);

// sum_i mass_i * cost(x_i, y_perm[i]), compensated, in index order.
double transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const std::vector<std::size_t>& perm,
                      const CostFunction& cost = squared_euclidean);

inline constexpr std::size_t kBruteForceLimit = 8;

// Exhaustive minimum over all n! matchings (n <= 8, equal masses). Ties go
// to the lexicographically smallest permutation.
Assignment wasserstein2_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostFunction& cost = squared_euclidean);

// Shortest augmenting path assignment (Hungarian method with potentials),
// O(n^3).
Assignment wasserstein2_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostFunction& cost = squared_euclidean);

struct SubmersionResult {
  // L2 cost of the rearrangement: sum_i w_i c(x_i, y_i).
  double l2_cost = 0.0;
  // W_2^2 between the node measure and its push-forward.
  double w2_cost = 0.0;
  std::vector<std::size_t> optimal_perm;
  bool inequality_holds = true;
  // l2_cost == w2_cost within tolerance: the rearrangement is optimal.
  bool equality = false;
};

// Compares the L2 cost of moving `base` to `phi` samplewise with the
// Wasserstein cost between their node measures. Requires equal weights
// summing to one.
SubmersionResult submersion_check(const MapField& base, const MapField& phi,
                                  const CostFunction& cost = squared_euclidean,
                                  double tolerance = 1e-12);

}  // namespace mapgeom
