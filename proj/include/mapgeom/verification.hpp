#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mapgeom/mapspace.hpp"

namespace mapgeom {

struct OracleReport {
  std::string check_name;
  double max_abs_error = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::size_t instance_count = 0;

  // Folds one more instance into the report.
  void record(double abs_error);
};

OracleReport make_report(std::string name, double tolerance);

// Christoffel symbols from a 5-point metric stencil with step `step`,
// sharing no code with christoffel_from_metric.
Christoffel oracle_christoffel(const ChartManifold& man, const Vec& x, double step = 1e-4);

// R(h,k)l = grad_h grad_k l - grad_k grad_h l for coordinate-constant
// extensions, each covariant derivative taken through the connector with
// a central difference for the directional derivative.
Vec oracle_curvature_commutator(const Manifold& man, const Vec& x, const Vec& h, const Vec& k,
                                const Vec& l, double step = 1e-5);

// (lhs, rhs) of the first-variation identity for the L2 metric:
// lhs = 1/2 (D_{q,m} G(h,k) - D_{q,h} G(k,m) - D_{q,k} G(m,h)) by central
// differences of l2_inner; rhs = sum_i w_i g(Gamma_K(h_i, k_i), m_i) where
// Gamma_K is the Christoffel form of the connector, K(x,h;k,l) = l - Gamma_K(k,h).
std::pair<double, double> oracle_first_variation(const MapField& q, const TangentField& h,
                                                 const TangentField& k, const TangentField& m,
                                                 double step = 1e-5);

// Connector axioms on seeded random inputs: vertical lift, linearity in
// both vector bundle structures, and flip symmetry.
std::vector<OracleReport> run_axiom_sweep(const Manifold& man, std::size_t instances,
                                          std::uint64_t seed, double tolerance = 1e-10);

// Everything the `verify` command runs for a manifold: the axiom sweep plus
// the oracles that apply to its representation.
std::vector<OracleReport> run_verification_suite(const Manifold& man, std::size_t instances,
                                                 std::uint64_t seed);

}  // namespace mapgeom
