#include "mapgeom/verification.hpp"

#include <cmath>

namespace mapgeom {

void OracleReport::record(double abs_error) {
  ++instance_count;
  // A NaN error sticks and fails the check.
  if (std::isnan(abs_error) || abs_error > max_abs_error) max_abs_error = abs_error;
  passed = max_abs_error <= tolerance;
}

OracleReport make_report(std::string name, double tolerance) {
  OracleReport r;
  r.check_name = std::move(name);
  r.tolerance = tolerance;
  return r;
}

Christoffel oracle_christoffel(const ChartManifold& man, const Vec& x, double step) {
  const int n = man.dim;
  if (!man.in_domain(x)) throw GeometryError(ErrorKind::ChartBoundary);

  // dmetric[c](a, b) = d_c g_ab
  std::vector<Mat> dmetric;
  for (int c = 0; c < n; ++c) {
    auto at = [&](double s) {
      Vec y = x;
      y[c] += s * step;
      if (!man.in_domain(y)) throw GeometryError(ErrorKind::ChartBoundary, "oracle stencil");
      return man.metric(y);
    };
    dmetric.push_back((at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * step));
  }
  const Mat g = man.metric(x);
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible()) throw GeometryError(ErrorKind::DegenerateMetric);
  const Mat ginv = lu.inverse();

  // First kind, then raise the index.
  Christoffel gamma(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Vec first(n);
      for (int l = 0; l < n; ++l)
        first[l] = 0.5 * (dmetric[j](l, k) + dmetric[k](l, j) - dmetric[l](j, k));
      const Vec raised = ginv * first;
      for (int i = 0; i < n; ++i) gamma(i, j, k) = raised[i];
    }
  return gamma;
}

Vec oracle_curvature_commutator(const Manifold& man, const Vec& x, const Vec& h, const Vec& k,
                                const Vec& l, double step) {
  const ChartManifold& chart = man.chart();
  if (!chart.in_domain(x)) throw GeometryError(ErrorKind::ChartBoundary);
  // grad_a of the constant field l, as a field of points.
  auto inner = [&](const Vec& y, const Vec& a) { return connector_apply(chart, {y, l, a, Vec::Zero(l.size())}).vec; };
  auto outer = [&](const Vec& a, const Vec& b) {
    const double s = step * std::max(1.0, x.norm());
    const Vec yp = x + s * a, ym = x - s * a;
    if (!chart.in_domain(yp) || !chart.in_domain(ym))
      throw GeometryError(ErrorKind::ChartBoundary, "oracle stencil");
    const Vec w = inner(x, b);
    const Vec dw = (inner(yp, b) - inner(ym, b)) / (2.0 * s);
    return connector_apply(chart, {x, w, a, dw}).vec;
  };
  return outer(h, k) - outer(k, h);
}

std::pair<double, double> oracle_first_variation(const MapField& q, const TangentField& h,
                                                 const TangentField& k, const TangentField& m,
                                                 double step) {
  require_same_base(h, q);
  require_same_base(k, q);
  require_same_base(m, q);
  const Manifold& man = *q.manifold;
  const ChartManifold& chart = man.chart();

  // D_{q,dir} G(a, b) by central differences, moving only the base points.
  auto dG = [&](const TangentField& dir, const TangentField& a, const TangentField& b) {
    auto at = [&](double s) {
      MapField shifted = q;
      for (std::size_t i = 0; i < q.size(); ++i) {
        shifted.values[i] = q.values[i] + s * dir.vecs[i];
        if (!chart.in_domain(shifted.values[i]))
          throw GeometryError(ErrorKind::ChartBoundary, "perturbation", i);
      }
      return l2_inner(shifted, TangentField{shifted, a.vecs}, TangentField{shifted, b.vecs});
    };
    return (at(step) - at(-step)) / (2.0 * step);
  };
  const double lhs = 0.5 * (dG(m, h, k) - dG(h, k, m) - dG(k, m, h));

  CompensatedSum rhs;
  const Vec zero = Vec::Zero(chart.dim);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec& x = q.values[i];
    const Vec gamma_hk = -connector_apply(chart, {x, k.vecs[i], h.vecs[i], zero}).vec;
    rhs.add(q.domain->weight(i) * man.inner(x, gamma_hk, m.vecs[i]));
  }
  return {lhs, rhs.value()};
}

std::vector<OracleReport> run_axiom_sweep(const Manifold& man, std::size_t instances,
                                          std::uint64_t seed, double tolerance) {
  if (instances < 1) throw GeometryError(ErrorKind::InvalidParameter, "instances must be >= 1");
  OracleReport vl = make_report("connector_vertical_lift", tolerance);
  OracleReport first = make_report("connector_linear_first_structure", tolerance);
  OracleReport second = make_report("connector_linear_second_structure", tolerance);
  OracleReport flip = make_report("connector_flip_symmetry", tolerance);

  Rng rng(seed);
  auto err = [](const Vec& a, const Vec& b) { return (a - b).lpNorm<Eigen::Infinity>(); };
  auto ambient = [&](int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.uniform(-1.0, 1.0);
    return v;
  };
  const int d = man.point_dim();
  for (std::size_t n = 0; n < instances; ++n) {
    const Vec x = man.sample_point(rng);
    const Vec h1 = man.random_tangent(x, rng), h2 = man.random_tangent(x, rng);
    const Vec k1 = man.random_tangent(x, rng), k2 = man.random_tangent(x, rng);
    const Vec l1 = ambient(d), l2 = ambient(d);
    const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
    auto K = [&](const Vec& h, const Vec& k, const Vec& l) { return connector(man, {x, h, k, l}).vec; };

    vl.record(err(connector(man, vertical_lift(x, h1, k1)).vec, k1));
    // Fibre over (x, h1): (k, l) add.
    first.record(err(K(h1, a * k1 + b * k2, a * l1 + b * l2), a * K(h1, k1, l1) + b * K(h1, k2, l2)));
    // Fibre over (x, k1): (h, l) add.
    second.record(err(K(a * h1 + b * h2, k1, a * l1 + b * l2), a * K(h1, k1, l1) + b * K(h2, k1, l2)));
    flip.record(err(connector(man, canonical_flip({x, h1, k1, l1})).vec, K(h1, k1, l1)));
  }
  return {vl, first, second, flip};
}

std::vector<OracleReport> run_verification_suite(const Manifold& man, std::size_t instances,
                                                 std::uint64_t seed) {
  std::vector<OracleReport> reports = run_axiom_sweep(man, instances, seed);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

  OracleReport horizontal = make_report("spray_horizontal", 1e-10);
  for (std::size_t n = 0; n < instances; ++n) {
    const Vec x = man.sample_point(rng);
    const Vec h = man.random_tangent(x, rng);
    horizontal.record(connector(man, spray_eval(man, {x, h})).vec.lpNorm<Eigen::Infinity>());
  }
  reports.push_back(horizontal);

  if (!man.is_chart()) return reports;
  const ChartManifold& chart = man.chart();

  OracleReport christoffel = make_report("christoffel_oracle", 1e-5);
  OracleReport curvature = make_report("curvature_commutator", 1e-3);
  OracleReport variation = make_report("first_variation", 1e-4);
  const int n = chart.dim;
  for (std::size_t it = 0; it < instances; ++it) {
    const Vec x = man.sample_point(rng);
    const Christoffel analytic = chart.christoffel_at(x);
    const Christoffel oracle = oracle_christoffel(chart, x);
    double e = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) e = std::max(e, std::abs(analytic(i, j, k) - oracle(i, j, k)));
    christoffel.record(e);

    const Vec h = man.random_tangent(x, rng), k = man.random_tangent(x, rng),
              l = man.random_tangent(x, rng);
    curvature.record((curvature_point(man, x, h, k, l) - oracle_curvature_commutator(man, x, h, k, l))
                         .lpNorm<Eigen::Infinity>());
  }

  // Small random fields for the first-variation identity.
  const std::size_t samples = 8;
  for (std::size_t it = 0; it < instances; ++it) {
    std::vector<double> w(samples);
    std::vector<Vec> pts(samples), hv(samples), kv(samples), mv(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      w[i] = rng.uniform(0.1, 1.0);
      pts[i] = man.sample_point(rng);
      hv[i] = man.random_tangent(pts[i], rng);
      kv[i] = man.random_tangent(pts[i], rng);
      mv[i] = man.random_tangent(pts[i], rng);
    }
    const MapField q{make_domain(w), std::make_shared<const Manifold>(man), pts};
    const auto [lhs, rhs] = oracle_first_variation(q, {q, hv}, {q, kv}, {q, mv});
    variation.record(std::abs(lhs - rhs));
  }
  reports.push_back(christoffel);
  reports.push_back(curvature);
  reports.push_back(variation);
  return reports;
}

}  // namespace mapgeom
