#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mapgeom/error.hpp"
#include "mapgeom/rng.hpp"

namespace mapgeom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Christoffel symbols of the second kind, Gamma^i_{jk}, in the convention
// where the geodesic equation reads x'' + Gamma(x', x') = 0.
class Christoffel {
 public:
  explicit Christoffel(int dim);

  int dim() const { return dim_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  // Gamma^i_{jk} a^j b^k
  Vec contract(const Vec& a, const Vec& b) const;

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k;
  }
  int dim_;
  std::vector<double> data_;
};

// Partial derivatives d_m Gamma^i_{jk}.
class ChristoffelJacobian {
 public:
  explicit ChristoffelJacobian(int dim);

  int dim() const { return dim_; }
  double& operator()(int i, int j, int k, int m) { return data_[index(i, j, k, m)]; }
  double operator()(int i, int j, int k, int m) const { return data_[index(i, j, k, m)]; }

  // (d_c Gamma)(a, b) = sum d_m Gamma^i_{jk} a^j b^k c^m
  Vec contract(const Vec& a, const Vec& b, const Vec& c) const;

 private:
  std::size_t index(int i, int j, int k, int m) const {
    return ((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + m;
  }
  int dim_;
  std::vector<double> data_;
};

// Target manifold given in a single coordinate chart.
struct ChartManifold {
  int dim = 0;
  std::function<Mat(const Vec&)> metric;
  // Optional; derived from the metric by finite differences when empty.
  std::function<Christoffel(const Vec&)> christoffel;
  // Optional; derived from christoffel by finite differences when empty.
  std::function<ChristoffelJacobian(const Vec&)> christoffel_jacobian;
  std::function<bool(const Vec&)> chart_domain;

  Christoffel christoffel_at(const Vec& x) const;
  ChristoffelJacobian christoffel_jacobian_at(const Vec& x) const;
  bool in_domain(const Vec& x) const;
};

// Target manifold given as a submanifold of Euclidean R^d with the induced
// metric.
struct EmbeddedManifold {
  int ambient_dim = 0;
  int intrinsic_dim = 0;
  // Residual of the defining constraint; zero on N.
  std::function<Vec(const Vec&)> embed_check;
  // Orthogonal projector onto T_pN. Must be defined on a neighbourhood of N.
  std::function<Mat(const Vec&)> tangent_projector;
  // Closest point on N to p + v.
  std::function<Vec(const Vec&, const Vec&)> retraction;
  // Optional directional derivative (p, u) -> D P(p)[u]; central
  // differences of tangent_projector when empty.
  std::function<Mat(const Vec&, const Vec&)> projector_derivative;

  // Accepted constraint residual for points handed to the library.
  double point_tolerance = 1e-8;
  // Accepted residual between integrator steps, before retraction.
  double drift_tolerance = 1e-4;

  Mat projector_derivative_at(const Vec& p, const Vec& u) const;
  double residual(const Vec& p) const;
};

enum class Representation { Chart, Embedded };

// A registry manifold: one of the two representations plus optional
// closed forms that the shooting solver and random sweeps can use.
struct Manifold {
  std::string name;
  std::variant<ChartManifold, EmbeddedManifold> geometry;

  // Closed-form Riemannian log, used as a shooting initial guess.
  std::function<std::optional<Vec>(const Vec&, const Vec&)> closed_form_log;
  // Draws a point from a safe box well inside the chart / on N.
  std::function<Vec(Rng&)> sample_point;
  // Chart coordinates -> ambient coordinates, for chart representations
  // that have a known embedding.
  std::function<Vec(const Vec&)> embedding;
  // Euclidean space: geodesics are straight lines and are evaluated in
  // closed form instead of being integrated (no roundoff accumulation).
  bool flat = false;

  Representation representation() const {
    return std::holds_alternative<ChartManifold>(geometry) ? Representation::Chart
                                                           : Representation::Embedded;
  }
  bool is_chart() const { return representation() == Representation::Chart; }
  const ChartManifold& chart() const;
  const EmbeddedManifold& embedded() const;

  // Length of a point / tangent coordinate vector.
  int point_dim() const;
  int intrinsic_dim() const;

  double inner(const Vec& x, const Vec& h, const Vec& k) const;
  bool contains(const Vec& x) const;
  // Throws ChartBoundary or PointOffManifold.
  void require_point(const Vec& x) const;
  // Orthogonal projection onto T_xN; identity in a chart.
  Vec project_tangent(const Vec& x, const Vec& v) const;
  bool is_tangent(const Vec& x, const Vec& v, double tol = 1e-8) const;
  // Orthonormal (in the ambient sense) basis of T_xN, d x n.
  Mat tangent_basis(const Vec& x) const;
  Vec random_tangent(const Vec& x, Rng& rng) const;
};

struct TangentVector {
  Vec base;
  Vec vec;
};

// Element (x, h; k, l) of the second tangent bundle in coordinates.
struct SecondTangentVector {
  Vec x;
  Vec h;
  Vec k;
  Vec l;
};

// Structural maps of TTN.
SecondTangentVector vertical_lift(const Vec& x, const Vec& h, const Vec& k);
TangentVector vertical_projection(const SecondTangentVector& xi, double tol = 0.0);
SecondTangentVector canonical_flip(const SecondTangentVector& xi);

Christoffel christoffel_from_metric(const ChartManifold& man, const Vec& x);
ChristoffelJacobian christoffel_jacobian_from_christoffel(const ChartManifold& man,
                                                          const Vec& x);

// K(x, h; k, l) = (x, l + Gamma_x(k, h)). Written with Christoffel symbols
// of the opposite sign (the D - Gamma convention) this is (x, l - Gamma(k, h)).
TangentVector connector_apply(const ChartManifold& man, const SecondTangentVector& xi);
// Flat ambient connector followed by the tangent projector: (p, P(p) l).
TangentVector connector_apply_embedded(const EmbeddedManifold& man,
                                       const SecondTangentVector& xi);
TangentVector connector(const Manifold& man, const SecondTangentVector& xi);

// Acceleration of the geodesic through x with velocity v.
Vec geodesic_acceleration(const Manifold& man, const Vec& x, const Vec& v);
SecondTangentVector spray_eval(const Manifold& man, const TangentVector& v);

// State of one geodesic integration; advanced by geodesic_step.
struct GeodesicState {
  Vec x;
  Vec v;
  // Largest pre-retraction constraint residual seen (embedded only).
  double max_drift = 0.0;
};

// One classical RK4 step of length dt for the spray; embedded manifolds are
// retracted and the velocity re-projected afterwards. `t_end` is only used
// in error reports.
void geodesic_step(const Manifold& man, GeodesicState& state, double dt, double t_end);

inline constexpr int kDefaultSteps = 1000;

Vec exp_point(const Manifold& man, const TangentVector& v, int steps = kDefaultSteps);

// R(h, k) l, antisymmetric in (h, k), with g(R(h,k)k, h) > 0 on spheres.
// Charts use the Christoffel formula, embeddings the Gauss equation.
Vec curvature_point(const Manifold& man, const Vec& x, const Vec& h, const Vec& k,
                    const Vec& l);
double sectional_curvature(const Manifold& man, const Vec& x, const Vec& h, const Vec& k);

// Transports v0 along the polygon through `curve` (one RK4 step per segment
// times `substeps`). Transport is parametrization invariant, so sample
// times are not needed.
Vec parallel_transport_point(const Manifold& man, std::span<const Vec> curve, const Vec& v0,
                             int substeps = 1);

}  // namespace mapgeom
