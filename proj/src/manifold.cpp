#include "mapgeom/manifold.hpp"

#include <cmath>
#include <limits>

namespace mapgeom {

namespace {

// Central-difference step balancing truncation against roundoff.
double fd_step(const Vec& x) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, x.norm());
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

Christoffel::Christoffel(int dim)
    : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

Vec Christoffel::contract(const Vec& a, const Vec& b) const {
  Vec out = Vec::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) {
      if (a[j] == 0.0) continue;
      for (int k = 0; k < dim_; ++k) s += (*this)(i, j, k) * a[j] * b[k];
    }
    out[i] = s;
  }
  return out;
}

ChristoffelJacobian::ChristoffelJacobian(int dim)
    : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

Vec ChristoffelJacobian::contract(const Vec& a, const Vec& b, const Vec& c) const {
  Vec out = Vec::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int m = 0; m < dim_; ++m) s += (*this)(i, j, k, m) * a[j] * b[k] * c[m];
    out[i] = s;
  }
  return out;
}

bool ChartManifold::in_domain(const Vec& x) const {
  if (x.size() != dim || !all_finite(x)) return false;
  return !chart_domain || chart_domain(x);
}

Christoffel ChartManifold::christoffel_at(const Vec& x) const {
  if (christoffel) return christoffel(x);
  return christoffel_from_metric(*this, x);
}

ChristoffelJacobian ChartManifold::christoffel_jacobian_at(const Vec& x) const {
  if (christoffel_jacobian) return christoffel_jacobian(x);
  return christoffel_jacobian_from_christoffel(*this, x);
}

double EmbeddedManifold::residual(const Vec& p) const {
  if (p.size() != ambient_dim || !all_finite(p)) return std::numeric_limits<double>::infinity();
  if (!embed_check) return 0.0;
  const Vec r = embed_check(p);
  return r.size() == 0 ? 0.0 : r.lpNorm<Eigen::Infinity>();
}

Mat EmbeddedManifold::projector_derivative_at(const Vec& p, const Vec& u) const {
  if (projector_derivative) return projector_derivative(p, u);
  const double un = u.norm();
  if (un == 0.0) return Mat::Zero(ambient_dim, ambient_dim);
  const double h = fd_step(p);
  const Vec e = u / un;
  return (tangent_projector(p + h * e) - tangent_projector(p - h * e)) * (un / (2.0 * h));
}

const ChartManifold& Manifold::chart() const {
  if (const auto* c = std::get_if<ChartManifold>(&geometry)) return *c;
  throw GeometryError(ErrorKind::RepresentationMismatch, name + " is not a chart manifold");
}

const EmbeddedManifold& Manifold::embedded() const {
  if (const auto* e = std::get_if<EmbeddedManifold>(&geometry)) return *e;
  throw GeometryError(ErrorKind::RepresentationMismatch, name + " is not an embedded manifold");
}

int Manifold::point_dim() const {
  return is_chart() ? chart().dim : embedded().ambient_dim;
}

int Manifold::intrinsic_dim() const {
  return is_chart() ? chart().dim : embedded().intrinsic_dim;
}

double Manifold::inner(const Vec& x, const Vec& h, const Vec& k) const {
  if (is_chart()) {
    // Symmetrized so that inner(x, h, k) == inner(x, k, h) bit for bit.
    const Mat g = chart().metric(x);
    return 0.5 * (h.dot(g * k) + k.dot(g * h));
  }
  return h.dot(k);
}

bool Manifold::contains(const Vec& x) const {
  if (is_chart()) return chart().in_domain(x);
  const auto& e = embedded();
  return e.residual(x) <= e.point_tolerance * std::max(1.0, x.norm());
}

void Manifold::require_point(const Vec& x) const {
  if (contains(x)) return;
  if (is_chart()) throw GeometryError(ErrorKind::ChartBoundary, name);
  throw GeometryError(ErrorKind::PointOffManifold, name);
}

Vec Manifold::project_tangent(const Vec& x, const Vec& v) const {
  if (is_chart()) return v;
  return embedded().tangent_projector(x) * v;
}

bool Manifold::is_tangent(const Vec& x, const Vec& v, double tol) const {
  if (v.size() != point_dim()) return false;
  if (is_chart()) return true;
  return (project_tangent(x, v) - v).norm() <= tol * std::max(1.0, v.norm());
}

Mat Manifold::tangent_basis(const Vec& x) const {
  if (is_chart()) return Mat::Identity(chart().dim, chart().dim);
  const auto& e = embedded();
  Eigen::SelfAdjointEigenSolver<Mat> eig(e.tangent_projector(x));
  // Eigenvalues ascend: the last intrinsic_dim columns span the range.
  return eig.eigenvectors().rightCols(e.intrinsic_dim);
}

Vec Manifold::random_tangent(const Vec& x, Rng& rng) const {
  Vec v(point_dim());
  for (int i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  return project_tangent(x, v);
}

SecondTangentVector vertical_lift(const Vec& x, const Vec& h, const Vec& k) {
  return {x, h, Vec::Zero(h.size()), k};
}

TangentVector vertical_projection(const SecondTangentVector& xi, double tol) {
  if (xi.k.lpNorm<Eigen::Infinity>() > tol) throw GeometryError(ErrorKind::NotVertical);
  return {xi.x, xi.l};
}

SecondTangentVector canonical_flip(const SecondTangentVector& xi) {
  return {xi.x, xi.k, xi.h, xi.l};
}

Christoffel christoffel_from_metric(const ChartManifold& man, const Vec& x) {
  const int n = man.dim;
  if (!man.in_domain(x)) throw GeometryError(ErrorKind::ChartBoundary);
  const double h = fd_step(x);

  std::vector<Mat> dg(n);
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    if (!man.in_domain(xp) || !man.in_domain(xm))
      throw GeometryError(ErrorKind::ChartBoundary, "finite-difference stencil");
    dg[j] = (man.metric(xp) - man.metric(xm)) / (2.0 * h);
  }

  const Mat g = man.metric(x);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw GeometryError(ErrorKind::DegenerateMetric);
  const Mat ginv = llt.solve(Mat::Identity(n, n));

  Christoffel gamma(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
        gamma(i, j, k) = 0.5 * s;
        gamma(i, k, j) = 0.5 * s;
      }
  return gamma;
}

ChristoffelJacobian christoffel_jacobian_from_christoffel(const ChartManifold& man,
                                                          const Vec& x) {
  const int n = man.dim;
  if (!man.in_domain(x)) throw GeometryError(ErrorKind::ChartBoundary);
  const double h = fd_step(x);
  ChristoffelJacobian jac(n);
  for (int m = 0; m < n; ++m) {
    Vec xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    if (!man.in_domain(xp) || !man.in_domain(xm))
      throw GeometryError(ErrorKind::ChartBoundary, "finite-difference stencil");
    const Christoffel gp = man.christoffel_at(xp);
    const Christoffel gm = man.christoffel_at(xm);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) jac(i, j, k, m) = (gp(i, j, k) - gm(i, j, k)) / (2.0 * h);
  }
  return jac;
}

TangentVector connector_apply(const ChartManifold& man, const SecondTangentVector& xi) {
  if (!man.in_domain(xi.x)) throw GeometryError(ErrorKind::ChartBoundary);
  const Christoffel gamma = man.christoffel_at(xi.x);
  return {xi.x, xi.l + gamma.contract(xi.k, xi.h)};
}

TangentVector connector_apply_embedded(const EmbeddedManifold& man,
                                       const SecondTangentVector& xi) {
  if (man.residual(xi.x) > man.point_tolerance * std::max(1.0, xi.x.norm()))
    throw GeometryError(ErrorKind::PointOffManifold);
  return {xi.x, man.tangent_projector(xi.x) * xi.l};
}

TangentVector connector(const Manifold& man, const SecondTangentVector& xi) {
  if (man.is_chart()) return connector_apply(man.chart(), xi);
  return connector_apply_embedded(man.embedded(), xi);
}

Vec geodesic_acceleration(const Manifold& man, const Vec& x, const Vec& v) {
  if (man.is_chart()) return -man.chart().christoffel_at(x).contract(v, v);
  return man.embedded().projector_derivative_at(x, v) * v;
}

SecondTangentVector spray_eval(const Manifold& man, const TangentVector& v) {
  man.require_point(v.base);
  return {v.base, v.vec, v.vec, geodesic_acceleration(man, v.base, v.vec)};
}

void geodesic_step(const Manifold& man, GeodesicState& s, double dt, double t_end) {
  const bool chart = man.is_chart();
  auto accel = [&](const Vec& x, const Vec& v) -> Vec {
    if (chart && !man.chart().in_domain(x))
      throw GeometryError(ErrorKind::GeodesicLeftDomain, man.name, std::nullopt, t_end);
    return geodesic_acceleration(man, x, v);
  };

  const Vec& x = s.x;
  const Vec& v = s.v;
  // Constant geodesic; skipping the retraction keeps x bit for bit.
  if (v.isZero(0.0)) return;
  const Vec a1 = accel(x, v);
  const Vec x2 = x + 0.5 * dt * v;
  const Vec v2 = v + 0.5 * dt * a1;
  const Vec a2 = accel(x2, v2);
  const Vec x3 = x + 0.5 * dt * v2;
  const Vec v3 = v + 0.5 * dt * a2;
  const Vec a3 = accel(x3, v3);
  const Vec x4 = x + dt * v3;
  const Vec v4 = v + dt * a3;
  const Vec a4 = accel(x4, v4);

  Vec xn = x + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
  Vec vn = v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);

  if (chart) {
    if (!man.chart().in_domain(xn) || !all_finite(vn))
      throw GeometryError(ErrorKind::GeodesicLeftDomain, man.name, std::nullopt, t_end);
  } else {
    const auto& e = man.embedded();
    const double drift = e.residual(xn);
    if (!(drift <= e.drift_tolerance * std::max(1.0, xn.norm())) || !all_finite(vn))
      throw GeometryError(ErrorKind::GeodesicLeftDomain, "constraint drift", std::nullopt, t_end);
    s.max_drift = std::max(s.max_drift, drift);
    xn = e.retraction(xn, Vec::Zero(xn.size()));
    vn = e.tangent_projector(xn) * vn;
  }
  s.x = std::move(xn);
  s.v = std::move(vn);
}

Vec exp_point(const Manifold& man, const TangentVector& v, int steps) {
  if (steps < 1) throw GeometryError(ErrorKind::InvalidParameter, "steps must be >= 1");
  man.require_point(v.base);
  if (!man.is_tangent(v.base, v.vec))
    throw GeometryError(ErrorKind::InvalidInput, "vector not tangent at base point");
  if (man.flat) return v.base + v.vec;
  GeodesicState state{v.base, v.vec};
  const double dt = 1.0 / steps;
  for (int i = 0; i < steps; ++i) geodesic_step(man, state, dt, (i + 1) * dt);
  return state.x;
}

Vec curvature_point(const Manifold& man, const Vec& x, const Vec& h, const Vec& k,
                    const Vec& l) {
  man.require_point(x);
  if (man.is_chart()) {
    const auto& c = man.chart();
    const Christoffel gamma = c.christoffel_at(x);
    const ChristoffelJacobian dgamma = c.christoffel_jacobian_at(x);
    return gamma.contract(h, gamma.contract(k, l)) - gamma.contract(k, gamma.contract(h, l)) +
           dgamma.contract(k, l, h) - dgamma.contract(h, l, k);
  }
  // Gauss equation with II(a, b) = DP[a] b.
  const auto& e = man.embedded();
  const Mat dph = e.projector_derivative_at(x, h);
  const Mat dpk = e.projector_derivative_at(x, k);
  return e.tangent_projector(x) * (dph * (dpk * l) - dpk * (dph * l));
}

double sectional_curvature(const Manifold& man, const Vec& x, const Vec& h, const Vec& k) {
  const double hh = man.inner(x, h, h);
  const double kk = man.inner(x, k, k);
  const double hk = man.inner(x, h, k);
  const double area2 = hh * kk - hk * hk;
  if (!(area2 > 0.0)) throw GeometryError(ErrorKind::InvalidInput, "h and k are dependent");
  return man.inner(x, curvature_point(man, x, h, k, k), h) / area2;
}

Vec parallel_transport_point(const Manifold& man, std::span<const Vec> curve, const Vec& v0,
                             int substeps) {
  if (substeps < 1) throw GeometryError(ErrorKind::InvalidParameter, "substeps must be >= 1");
  if (curve.empty()) throw GeometryError(ErrorKind::InvalidInput, "empty curve");
  for (const Vec& c : curve)
    if (!man.contains(c)) throw GeometryError(ErrorKind::CurveLeftDomain, man.name);
  if (!man.is_tangent(curve.front(), v0))
    throw GeometryError(ErrorKind::InvalidInput, "vector not tangent at curve start");

  Vec v = v0;
  const double dt = 1.0 / substeps;

  if (man.is_chart()) {
    const auto& c = man.chart();
    for (std::size_t j = 0; j + 1 < curve.size(); ++j) {
      const Vec& a = curve[j];
      const Vec delta = curve[j + 1] - a;
      auto rhs = [&](double tau, const Vec& w) -> Vec {
        const Vec x = a + tau * delta;
        if (!c.in_domain(x)) throw GeometryError(ErrorKind::CurveLeftDomain, man.name);
        return -c.christoffel_at(x).contract(delta, w);
      };
      for (int s = 0; s < substeps; ++s) {
        const double t = s * dt;
        const Vec k1 = rhs(t, v);
        const Vec k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1);
        const Vec k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2);
        const Vec k4 = rhs(t + dt, v + dt * k3);
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    return v;
  }

  const auto& e = man.embedded();
  for (std::size_t j = 0; j + 1 < curve.size(); ++j) {
    const Vec& a = curve[j];
    const Vec delta = curve[j + 1] - a;
    auto rhs = [&](double tau, const Vec& w) -> Vec {
      const Vec x = e.retraction(a, tau * delta);
      const Vec u = e.tangent_projector(x) * delta;
      return e.projector_derivative_at(x, u) * w;
    };
    for (int s = 0; s < substeps; ++s) {
      const double t = s * dt;
      const Vec k1 = rhs(t, v);
      const Vec k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1);
      const Vec k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2);
      const Vec k4 = rhs(t + dt, v + dt * k3);
      v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    v = e.tangent_projector(curve[j + 1]) * v;
  }
  return v;
}

}  // namespace mapgeom
