#include "mapgeom/dynamics.hpp"

#include <algorithm>

#include <cmath>

namespace mapgeom {

namespace {

std::vector<std::size_t> indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

// Second-order derivative at node j of samples f over non-uniform times.
Vec time_derivative(const std::vector<double>& t, const std::vector<const Vec*>& f,
                    std::size_t j) {
  const std::size_t n = t.size();
  if (n == 2) return (*f[1] - *f[0]) / (t[1] - t[0]);
  // Quadratic interpolation through three nodes, written with divided
  // differences so that a constant series differentiates to exactly zero.
  const std::size_t c = std::clamp<std::size_t>(j, 1, n - 2);
  const double h1 = t[c] - t[c - 1], h2 = t[c + 1] - t[c];
  const Vec d1 = (*f[c] - *f[c - 1]) / h1;
  const Vec d2 = (*f[c + 1] - *f[c]) / h2;
  if (j == 0) return d1 - (h1 / (h1 + h2)) * (d2 - d1);
  if (j == n - 1) return d2 + (h2 / (h1 + h2)) * (d2 - d1);
  return (h2 * d1 + h1 * d2) / (h1 + h2);
}

}  // namespace

void FieldPath::validate() const {
  if (times.size() < 2) throw GeometryError(ErrorKind::InvalidInput, "path needs at least 2 snapshots");
  if (maps.size() != times.size())
    throw GeometryError(ErrorKind::SizeMismatch, "maps vs times");
  if (times.front() != 0.0) throw GeometryError(ErrorKind::InvalidInput, "times[0] must be 0");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1]))
      throw GeometryError(ErrorKind::InvalidInput, "times must increase strictly");
  for (const auto& q : maps)
    if (!same_domain(q.domain, maps.front().domain) ||
        !same_manifold(q.manifold, maps.front().manifold) || q.size() != maps.front().size())
      throw GeometryError(ErrorKind::FieldMismatch, "snapshots differ in domain or manifold");
  if (has_velocities()) {
    if (velocities.size() != times.size())
      throw GeometryError(ErrorKind::SizeMismatch, "velocities vs times");
    for (std::size_t j = 0; j < times.size(); ++j) require_same_base(velocities[j], maps[j]);
  }
}

GeodesicRun integrate_geodesic(const TangentField& h0, std::size_t snapshots,
                               int steps_per_snapshot) {
  if (snapshots < 2) throw GeometryError(ErrorKind::InvalidParameter, "snapshots must be >= 2");
  if (steps_per_snapshot < 1)
    throw GeometryError(ErrorKind::InvalidParameter, "steps_per_snapshot must be >= 1");
  const Manifold& man = *h0.base.manifold;
  const std::size_t m = h0.size();
  const std::size_t total = (snapshots - 1) * static_cast<std::size_t>(steps_per_snapshot);
  const double dt = 1.0 / static_cast<double>(total);

  struct Trajectory {
    std::vector<Vec> x, v;
    std::vector<double> drift;
  };
  const auto trajectories = lift_left_composition(tangent_samples(h0), [&](const TangentVector& tv) {
    man.require_point(tv.base);
    if (!man.is_tangent(tv.base, tv.vec))
      throw GeometryError(ErrorKind::InvalidInput, "vector not tangent at base point");
    Trajectory tr;
    tr.x.reserve(snapshots);
    tr.v.reserve(snapshots);
    GeodesicState state{tv.base, tv.vec};
    tr.x.push_back(state.x);
    tr.v.push_back(state.v);
    tr.drift.push_back(0.0);
    if (man.flat) {
      for (std::size_t j = 1; j < snapshots; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(snapshots - 1);
        tr.x.push_back(tv.base + t * tv.vec);
        tr.v.push_back(tv.vec);
        tr.drift.push_back(0.0);
      }
      return tr;
    }
    std::size_t step = 0;
    for (std::size_t j = 1; j < snapshots; ++j) {
      for (int s = 0; s < steps_per_snapshot; ++s, ++step)
        geodesic_step(man, state, dt, static_cast<double>(step + 1) * dt);
      tr.x.push_back(state.x);
      tr.v.push_back(state.v);
      tr.drift.push_back(state.max_drift);
    }
    return tr;
  });

  GeodesicRun run;
  FieldPath& path = run.path;
  path.times.resize(snapshots);
  for (std::size_t j = 0; j < snapshots; ++j)
    path.times[j] = static_cast<double>(j) / static_cast<double>(snapshots - 1);
  for (std::size_t j = 0; j < snapshots; ++j) {
    MapField q{h0.base.domain, h0.base.manifold, std::vector<Vec>(m)};
    std::vector<Vec> vel(m);
    for (std::size_t i = 0; i < m; ++i) {
      q.values[i] = trajectories[i].x[j];
      vel[i] = trajectories[i].v[j];
    }
    path.velocities.push_back({q, std::move(vel)});
    path.maps.push_back(std::move(q));
  }

  GeodesicReport& report = run.report;
  report.energy_series.resize(snapshots);
  for (std::size_t j = 0; j < snapshots; ++j)
    report.energy_series[j] = 0.5 * l2_inner(path.velocities[j], path.velocities[j]);
  report.residual_series.assign(snapshots, 0.0);
  report.drift_series.assign(snapshots, 0.0);
  const double dts = path.times[1] - path.times[0];
  for (std::size_t i = 0; i < m; ++i) {
    const auto& tr = trajectories[i];
    for (std::size_t j = 0; j < snapshots; ++j)
      report.drift_series[j] = std::max(report.drift_series[j], tr.drift[j]);
    for (std::size_t j = 1; j + 1 < snapshots; ++j) {
      const Vec fd = (tr.x[j + 1] - 2.0 * tr.x[j] + tr.x[j - 1]) / (dts * dts);
      const Vec spray = geodesic_acceleration(man, tr.x[j], tr.v[j]);
      report.residual_series[j] =
          std::max(report.residual_series[j], (fd - spray).lpNorm<Eigen::Infinity>());
    }
  }
  for (std::size_t j = 0; j < snapshots; ++j) {
    report.max_pointwise_geodesic_residual =
        std::max(report.max_pointwise_geodesic_residual, report.residual_series[j]);
    report.constraint_drift = std::max(report.constraint_drift, report.drift_series[j]);
  }
  return run;
}

GeodesicRun integrate_geodesic(const MapField& q0, const TangentField& h0, std::size_t snapshots,
                               int steps_per_snapshot) {
  require_same_base(h0, q0);
  return integrate_geodesic(h0, snapshots, steps_per_snapshot);
}

double path_energy(const FieldPath& path) {
  if (!path.has_velocities()) throw GeometryError(ErrorKind::NoVelocities);
  path.validate();
  CompensatedSum sum;
  const auto& t = path.times;
  for (std::size_t j = 0; j < t.size(); ++j) {
    double w = 0.0;
    if (j > 0) w += 0.5 * (t[j] - t[j - 1]);
    if (j + 1 < t.size()) w += 0.5 * (t[j + 1] - t[j]);
    sum.add(w * l2_inner(path.maps[j], path.velocities[j], path.velocities[j]));
  }
  return 0.5 * sum.value();
}

std::vector<TangentField> covariant_derivative_along_path(const FieldPath& path,
                                                          const std::vector<TangentField>& s) {
  path.validate();
  if (s.size() != path.size()) throw GeometryError(ErrorKind::SizeMismatch, "series vs path length");
  for (std::size_t j = 0; j < s.size(); ++j) require_same_base(s[j], path.maps[j]);

  const std::size_t T = path.size();
  const std::size_t m = path.maps.front().size();
  std::vector<TangentField> out;
  out.reserve(T);
  for (std::size_t j = 0; j < T; ++j) {
    std::vector<SecondTangentVector> quads(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<const Vec*> sv(T), qv(T);
      for (std::size_t a = 0; a < T; ++a) {
        sv[a] = &s[a].vecs[i];
        qv[a] = &path.maps[a].values[i];
      }
      const Vec qdot = path.has_velocities() ? path.velocities[j].vecs[i]
                                             : time_derivative(path.times, qv, j);
      quads[i] = {path.maps[j].values[i], s[j].vecs[i], qdot, time_derivative(path.times, sv, j)};
    }
    out.push_back(connector_field(
        {path.maps[j].domain, path.maps[j].manifold, std::move(quads)}));
  }
  return out;
}

TangentField parallel_transport_field(const FieldPath& path, const TangentField& v0,
                                      int substeps) {
  if (path.times.size() == 1 && path.maps.size() == 1) {
    require_same_base(v0, path.maps.front());
    return v0;
  }
  path.validate();
  require_same_base(v0, path.maps.front());
  const Manifold& man = *v0.base.manifold;
  const auto vecs = lift_left_composition(indices(v0.size()), [&](std::size_t i) {
    std::vector<Vec> curve(path.size());
    for (std::size_t j = 0; j < path.size(); ++j) curve[j] = path.maps[j].values[i];
    return parallel_transport_point(man, curve, v0.vecs[i], substeps);
  });
  return {path.maps.back(), vecs};
}

Vec log_point(const Manifold& man, const Vec& x, const Vec& y, const ShootingOptions& opts) {
  man.require_point(x);
  man.require_point(y);
  const Mat basis = man.tangent_basis(x);
  const int n = static_cast<int>(basis.cols());

  Vec a;
  std::optional<Vec> guess = man.closed_form_log ? man.closed_form_log(x, y) : std::nullopt;
  if (guess && guess->allFinite())
    a = basis.transpose() * man.project_tangent(x, *guess);
  else
    a = basis.transpose() * man.project_tangent(x, y - x);

  auto residual = [&](const Vec& coeffs) -> std::optional<Vec> {
    try {
      return Vec(exp_point(man, {x, basis * coeffs}, opts.steps) - y);
    } catch (const GeometryError&) {
      return std::nullopt;
    }
  };

  std::optional<Vec> r = residual(a);
  if (!r) {
    a = Vec::Zero(n);
    r = residual(a);
  }
  std::optional<Mat> jac;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const double rn = r->norm();
    if (rn <= opts.tolerance) return basis * a;
    if (it == opts.max_iterations) break;

    // Central-difference Jacobian; keep the secant estimate if a stencil
    // leaves the domain.
    Mat fd(r->size(), n);
    bool fd_ok = true;
    const double h = 1e-6 * std::max(1.0, a.norm());
    for (int c = 0; c < n && fd_ok; ++c) {
      Vec ap = a, am = a;
      ap[c] += h;
      am[c] -= h;
      const auto rp = residual(ap), rm = residual(am);
      if (!rp || !rm)
        fd_ok = false;
      else
        fd.col(c) = (*rp - *rm) / (2.0 * h);
    }
    if (fd_ok) jac = fd;
    if (!jac) break;

    const Vec step = jac->colPivHouseholderQr().solve(-*r);
    bool accepted = false;
    double lambda = 1.0;
    for (int ls = 0; ls < 12; ++ls, lambda *= 0.5) {
      const Vec trial = a + lambda * step;
      const auto rt = residual(trial);
      if (rt && rt->norm() < rn) {
        const Vec s = trial - a;
        // Broyden update for the next iteration's fallback.
        *jac += ((*rt - *r) - *jac * s) * s.transpose() / s.squaredNorm();
        a = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw GeometryError(ErrorKind::NoConvergence,
                      "shooting residual " + std::to_string(r->norm()));
}

TangentField log_field(const MapField& q0, const MapField& q1, const ShootingOptions& opts) {
  if (!same_domain(q0.domain, q1.domain) || !same_manifold(q0.manifold, q1.manifold) ||
      q0.size() != q1.size())
    throw GeometryError(ErrorKind::FieldMismatch);
  const Manifold& man = *q0.manifold;
  return {q0, lift_left_composition(indices(q0.size()), [&](std::size_t i) {
            return log_point(man, q0.values[i], q1.values[i], opts);
          })};
}

double geodesic_distance(const MapField& q0, const MapField& q1, const ShootingOptions& opts) {
  const TangentField h = log_field(q0, q1, opts);
  return std::sqrt(l2_inner(q0, h, h));
}

}  // namespace mapgeom
