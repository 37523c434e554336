#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "mapgeom/mapspace.hpp"
#include "mapgeom/registry.hpp"

namespace mapgeom::testing {

inline constexpr double kPi = std::numbers::pi;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline double max_abs(const Vec& v) { return v.lpNorm<Eigen::Infinity>(); }

// Polar chart (theta, phi) of the sphere of radius r and its Jacobian.
inline Vec sphere_point(const Vec& x, double r = 1.0) {
  return vec({r * std::sin(x[0]) * std::cos(x[1]), r * std::sin(x[0]) * std::sin(x[1]),
              r * std::cos(x[0])});
}

inline Eigen::Matrix<double, 3, 2> sphere_jacobian(const Vec& x, double r = 1.0) {
  Eigen::Matrix<double, 3, 2> j;
  const double st = std::sin(x[0]), ct = std::cos(x[0]);
  const double sp = std::sin(x[1]), cp = std::cos(x[1]);
  j << r * ct * cp, -r * st * sp, r * ct * sp, r * st * cp, -r * st, 0.0;
  return j;
}

// Closed-form great circle through p with initial velocity h on the sphere
// of radius |p|.
inline Vec great_circle(const Vec& p, const Vec& h, double t) {
  const double r = p.norm();
  const double speed = h.norm();
  if (speed == 0.0) return p;
  const double angle = speed * t / r;
  return std::cos(angle) * p + std::sin(angle) * (r / speed) * h;
}

inline Vec cross(const Vec& a, const Vec& b) {
  return vec({a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]});
}

inline double sphere_angle(const Vec& a, const Vec& b) {
  return std::atan2(cross(a, b).norm(), a.dot(b));
}

// n + 1 points along the minor great-circle arc from a to b (unit vectors).
inline std::vector<Vec> arc(const Vec& a, const Vec& b, int n) {
  const double omega = sphere_angle(a, b);
  std::vector<Vec> pts;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    pts.push_back((std::sin((1 - t) * omega) * a + std::sin(t * omega) * b) / std::sin(omega));
  }
  return pts;
}

inline MapField random_map(const ManifoldPtr& man, std::size_t m, Rng& rng,
                           bool random_weights = true) {
  std::vector<double> w(m);
  std::vector<Vec> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = random_weights ? rng.uniform(0.1, 1.0) : 1.0 / static_cast<double>(m);
    pts[i] = man->sample_point(rng);
  }
  return MapField::make(make_domain(w), man, pts);
}

inline TangentField random_tangent_field(const MapField& q, Rng& rng, double scale = 1.0) {
  std::vector<Vec> v(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    v[i] = scale * q.manifold->random_tangent(q.values[i], rng);
  return TangentField::make(q, v);
}

inline SecondTangentField random_second_field(const MapField& q, Rng& rng) {
  std::vector<SecondTangentVector> quads(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec& x = q.values[i];
    Vec l(q.manifold->point_dim());
    for (Eigen::Index c = 0; c < l.size(); ++c) l[c] = rng.uniform(-1.0, 1.0);
    quads[i] = {x, q.manifold->random_tangent(x, rng), q.manifold->random_tangent(x, rng), l};
  }
  return SecondTangentField::make(q.domain, q.manifold, quads);
}

}  // namespace mapgeom::testing
