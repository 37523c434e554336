#pragma once

#include <vector>

#include "mapgeom/mapspace.hpp"

namespace mapgeom {

// A time-sampled path t -> q(t) in the mapping space, with optional
// velocity snapshots.
struct FieldPath {
  std::vector<double> times;
  std::vector<MapField> maps;
  std::vector<TangentField> velocities;  // empty when absent

  bool has_velocities() const { return !velocities.empty(); }
  void validate() const;
  std::size_t size() const { return times.size(); }
};

struct GeodesicReport {
  // Kinetic energy 1/2 G(q', q') at each snapshot.
  std::vector<double> energy_series;
  // Largest |finite-difference acceleration - spray acceleration| over
  // interior snapshots and samples.
  double max_pointwise_geodesic_residual = 0.0;
  // Largest constraint residual before retraction (embedded targets).
  double constraint_drift = 0.0;
  // Per-snapshot versions of the two scalars: the residual at snapshot j
  // (zero at the endpoints), and the drift accumulated up to snapshot j.
  std::vector<double> residual_series;
  std::vector<double> drift_series;
};

struct GeodesicRun {
  FieldPath path;
  GeodesicReport report;
};

// RK4 integration of the lifted spray over t in [0, 1], recording
// `snapshots` equally spaced states. With the same total step count the
// endpoint equals exp_field bit for bit.
GeodesicRun integrate_geodesic(const TangentField& h0, std::size_t snapshots,
                               int steps_per_snapshot = 1);
GeodesicRun integrate_geodesic(const MapField& q0, const TangentField& h0, std::size_t snapshots,
                               int steps_per_snapshot = 1);

// E = 1/2 int_0^1 G(q', q') dt by the trapezoid rule over snapshots.
double path_energy(const FieldPath& path);

// Covariant time derivative of a field series s(t) along the path, one
// result per snapshot: connector of (q, s; q', s') with s' from
// second-order finite differences in t.
std::vector<TangentField> covariant_derivative_along_path(const FieldPath& path,
                                                          const std::vector<TangentField>& s);

// Parallel transport of v0 (based at maps[0]) to the final snapshot.
TangentField parallel_transport_field(const FieldPath& path, const TangentField& v0,
                                      int substeps = 1);

struct ShootingOptions {
  int steps = kDefaultSteps;
  int max_iterations = 50;
  // On the coordinate norm of the endpoint residual.
  double tolerance = 1e-10;
};

// Riemannian log by damped Newton shooting with a finite-difference
// Jacobian (Broyden update when the stencil fails).
Vec log_point(const Manifold& man, const Vec& x, const Vec& y, const ShootingOptions& opts = {});

TangentField log_field(const MapField& q0, const MapField& q1, const ShootingOptions& opts = {});

// sqrt(G_{q0}(h, h)) with h = log_field(q0, q1).
double geodesic_distance(const MapField& q0, const MapField& q1, const ShootingOptions& opts = {});

}  // namespace mapgeom
