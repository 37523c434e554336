#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>

#include "mapgeom/manifold.hpp"
#include "mapgeom/registry.hpp"
#include "test_support.hpp"

using namespace mapgeom;
using namespace mapgeom::testing;

namespace {

// Chart manifold with only a metric callback, forcing finite differences.
ChartManifold metric_only(const Manifold& m) {
  ChartManifold c = m.chart();
  c.christoffel = nullptr;
  c.christoffel_jacobian = nullptr;
  return c;
}

Manifold metric_only_manifold(const Manifold& m) {
  Manifold out = m;
  out.geometry = metric_only(m);
  return out;
}

}  // namespace

TEST_CASE("christoffel_from_metric: flat is zero") {
  const Manifold flat = flat_manifold(3);
  const Christoffel g = christoffel_from_metric(flat.chart(), vec({0.3, -2.0, 5.0}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(g(i, j, k) == 0.0);
}

TEST_CASE("christoffel_from_metric: Poincare half-plane at (0,1)") {
  // g = y^-2 Id: Gamma^x_xy = -1/y, Gamma^y_xx = 1/y, Gamma^y_yy = -1/y.
  const Manifold h = poincare_half_plane();
  const Christoffel fd = christoffel_from_metric(h.chart(), vec({0.0, 1.0}));
  CHECK(fd(0, 0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(fd(0, 1, 0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(fd(1, 0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fd(1, 1, 1) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(fd(0, 0, 0)) < 1e-6);
  CHECK(std::abs(fd(1, 0, 1)) < 1e-6);

  const Christoffel analytic = h.chart().christoffel_at(vec({0.0, 1.0}));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) CHECK(std::abs(fd(i, j, k) - analytic(i, j, k)) < 1e-6);
}

TEST_CASE("christoffel_from_metric: sphere polar chart on the equator") {
  const Manifold s = sphere_chart(1.0);
  const Christoffel g = christoffel_from_metric(s.chart(), vec({kPi / 2, 0.4}));
  CHECK(std::abs(g(0, 1, 1)) < 1e-6);
  // Symmetric in the lower indices everywhere.
  const Christoffel g2 = christoffel_from_metric(s.chart(), vec({0.7, 1.1}));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) CHECK(g2(i, j, k) == g2(i, k, j));
  CHECK(g2(0, 1, 1) == doctest::Approx(-std::sin(0.7) * std::cos(0.7)).epsilon(1e-6));
  CHECK(g2(1, 0, 1) == doctest::Approx(std::cos(0.7) / std::sin(0.7)).epsilon(1e-6));
}

TEST_CASE("christoffel_from_metric: errors") {
  const Manifold s = sphere_chart(1.0);
  CHECK_THROWS_AS(christoffel_from_metric(s.chart(), vec({1e-4, 0.0})), GeometryError);
  try {
    // Stencil straddles the excluded pole band.
    christoffel_from_metric(s.chart(), vec({1e-3 + 1e-7, 0.0}));
    FAIL("expected chart boundary");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == ErrorKind::ChartBoundary);
  }

  ChartManifold degenerate;
  degenerate.dim = 2;
  degenerate.metric = [](const Vec&) { return Mat::Zero(2, 2); };
  try {
    christoffel_from_metric(degenerate, vec({0.0, 0.0}));
    FAIL("expected degenerate metric");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMetric);
  }
}

TEST_CASE("connector_apply: coordinate formula") {
  SUBCASE("flat returns l") {
    const Manifold flat = flat_manifold(2);
    const auto r = connector_apply(flat.chart(), {vec({1, 2}), vec({3, 4}), vec({5, 6}), vec({7, 8})});
    CHECK(r.base == vec({1, 2}));
    CHECK(r.vec == vec({7, 8}));
  }
  SUBCASE("vertical lift goes to its second component") {
    const Manifold s = sphere_chart(1.0);
    const Vec x = vec({0.9, 0.2});
    const auto r = connector_apply(s.chart(), vertical_lift(x, vec({0.3, -0.7}), vec({1.5, 2.5})));
    CHECK(r.vec == vec({1.5, 2.5}));
  }
  SUBCASE("Poincare at (0,1)") {
    // K = l + Gamma(k, h) with standard Christoffel symbols: Gamma^x_yx = -1.
    const Manifold h = poincare_half_plane();
    const auto r = connector_apply(h.chart(), {vec({0, 1}), vec({1, 0}), vec({0, 1}), vec({0, 0})});
    CHECK(r.vec[0] == doctest::Approx(-1.0));
    CHECK(r.vec[1] == doctest::Approx(0.0));
  }
  SUBCASE("chart violation") {
    const Manifold h = poincare_half_plane();
    CHECK_THROWS_AS(connector_apply(h.chart(), {vec({0, -1}), vec({1, 0}), vec({0, 1}), vec({0, 0})}),
                    GeometryError);
  }
}

TEST_CASE("connector_apply_embedded: projection of l") {
  const Manifold s = sphere_embedded(1.0);
  const Vec pole = vec({0, 0, 1});
  const Vec t = vec({1, 0, 0});
  auto K = [&](const Vec& l) { return connector_apply_embedded(s.embedded(), {pole, t, t, l}).vec; };
  CHECK(max_abs(K(vec({0, 0, 5}))) == 0.0);
  CHECK(max_abs(K(vec({1, 2, 3})) - vec({1, 2, 0})) < 1e-15);

  // Paraboloid: the tangent plane at the origin is horizontal.
  const Manifold p = paraboloid();
  const Vec o = vec({0, 0, 0});
  const Vec l = vec({0.3, -1.7, 2.2});
  CHECK(max_abs(connector_apply_embedded(p.embedded(), {o, vec({1, 0, 0}), vec({0, 1, 0}), l}).vec -
                vec({0.3, -1.7, 0.0})) < 1e-15);

  try {
    connector_apply_embedded(s.embedded(), {vec({0, 0, 1.1}), t, t, t});
    FAIL("expected off-manifold error");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == ErrorKind::PointOffManifold);
  }
}

TEST_CASE("embedded projector is a symmetric idempotent onto the tangent space") {
  Rng rng(11);
  for (const char* spec : {"sphere:r=2", "paraboloid", "sphere:dim=1"}) {
    const Manifold m = make_manifold(spec);
    for (int it = 0; it < 20; ++it) {
      const Vec p = m.sample_point(rng);
      const Mat P = m.embedded().tangent_projector(p);
      CHECK((P * P - P).norm() < 1e-14);
      CHECK((P - P.transpose()).norm() < 1e-15);
      CHECK(m.embedded().residual(p) < 1e-12);
      // Constraint differential kills tangent vectors (finite differences
      // of the defining function along P v).
      Vec v(p.size());
      for (int i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1, 1);
      const Vec t = P * v;
      const double eps = 1e-6;
      const double dF =
          (m.embedded().embed_check(p + eps * t)[0] - m.embedded().embed_check(p - eps * t)[0]) /
          (2 * eps);
      CHECK(std::abs(dF) < 1e-8);
    }
  }
}

TEST_CASE("finite-difference projector derivative matches the analytic one") {
  Rng rng(5);
  for (const char* spec : {"sphere:r=1.5", "paraboloid"}) {
    const Manifold m = make_manifold(spec);
    EmbeddedManifold fd = m.embedded();
    fd.projector_derivative = nullptr;
    for (int it = 0; it < 10; ++it) {
      const Vec p = m.sample_point(rng);
      const Vec u = m.random_tangent(p, rng);
      CHECK((fd.projector_derivative_at(p, u) - m.embedded().projector_derivative_at(p, u)).norm() < 1e-9);
    }
  }
}

TEST_CASE("spray_eval") {
  SUBCASE("flat") {
    const Manifold flat = flat_manifold(2);
    const auto s = spray_eval(flat, {vec({1, 2}), vec({3, 4})});
    CHECK(s.h == vec({3, 4}));
    CHECK(s.k == vec({3, 4}));
    CHECK(s.l == vec({0, 0}));
  }
  SUBCASE("unit sphere: great-circle acceleration -|h|^2 p") {
    const Manifold s = sphere_embedded(1.0);
    const Vec p = vec({0, 0, 1});
    const Vec h = vec({0.6, 0.8, 0});
    CHECK(max_abs(spray_eval(s, {p, h}).l + p) < 1e-15);
    // The closed-form circle satisfies the same ODE: q'' = -q.
    const double t = 0.37, dt = 1e-4;
    const Vec acc = (great_circle(p, h, t + dt) - 2 * great_circle(p, h, t) + great_circle(p, h, t - dt)) /
                    (dt * dt);
    const Vec q = great_circle(p, h, t);
    const Vec qd = (great_circle(p, h, t + dt) - great_circle(p, h, t - dt)) / (2 * dt);
    CHECK(max_abs(acc - spray_eval(s, {q, qd}).l) < 1e-6);
  }
  SUBCASE("zero vector") {
    const Manifold s = sphere_chart(1.0);
    const auto r = spray_eval(s, {vec({1.0, 0.5}), vec({0, 0})});
    CHECK(r.h == vec({0, 0}));
    CHECK(r.k == vec({0, 0}));
    CHECK(max_abs(r.l) == 0.0);
  }
  SUBCASE("spray is horizontal") {
    const Manifold s = sphere_chart(2.0);
    const auto xi = spray_eval(s, {vec({1.1, 0.3}), vec({0.4, -0.9})});
    CHECK(max_abs(connector(s, xi).vec) < 1e-15);
  }
}

TEST_CASE("exp_point") {
  SUBCASE("flat is x + h") {
    const Manifold flat = flat_manifold(3);
    const Vec x = vec({1, 2, 3}), h = vec({0.5, -0.25, 2});
    CHECK(max_abs(exp_point(flat, {x, h}) - (x + h)) < 1e-14);
  }
  SUBCASE("sphere from the north pole to the equator") {
    const Manifold s = sphere_embedded(1.0);
    const Vec p = vec({0, 0, 1});
    const Vec dir = vec({std::cos(0.3), std::sin(0.3), 0});
    const Vec end = exp_point(s, {p, (kPi / 2) * dir}, 1000);
    CHECK(max_abs(end - dir) < 1e-8);
  }
  SUBCASE("zero vector") {
    const Manifold s = sphere_chart(1.0);
    const Vec x = vec({1.0, 2.0});
    CHECK(exp_point(s, {x, vec({0, 0})}) == x);
  }
  SUBCASE("leaving the chart reports the exit time") {
    const Manifold h = poincare_half_plane();
    // Large coordinate step: RK4 with one step overshoots y < 0.
    try {
      exp_point(h, {vec({0, 1}), vec({0, -50})}, 1);
      FAIL("expected domain exit");
    } catch (const GeometryError& e) {
      CHECK(e.kind() == ErrorKind::GeodesicLeftDomain);
      REQUIRE(e.time().has_value());
      CHECK(*e.time() == 1.0);
    }
  }
  SUBCASE("rejects non-tangent vectors and bad step counts") {
    const Manifold s = sphere_embedded(1.0);
    CHECK_THROWS_AS(exp_point(s, {vec({0, 0, 1}), vec({0, 0, 1})}), GeometryError);
    CHECK_THROWS_AS(exp_point(s, {vec({0, 0, 1}), vec({1, 0, 0})}, 0), GeometryError);
  }
}

TEST_CASE("geodesics preserve speed") {
  const Manifold s = sphere_embedded(1.0);
  const Vec p = vec({0.6, 0, 0.8});
  const Vec h = s.project_tangent(p, vec({0.3, 1.2, -0.4}));
  GeodesicState state{p, h};
  const double speed0 = h.squaredNorm();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    geodesic_step(s, state, 1e-3, (i + 1) * 1e-3);
    worst = std::max(worst, std::abs(state.v.squaredNorm() - speed0) / speed0);
  }
  CHECK(worst < 1e-8);

  const Manifold c = sphere_chart(1.0);
  const Vec x = vec({1.2, 0.1});
  const Vec v = vec({0.3, 0.5});
  GeodesicState cs{x, v};
  const double g0 = c.inner(x, v, v);
  worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    geodesic_step(c, cs, 1e-3, (i + 1) * 1e-3);
    worst = std::max(worst, std::abs(c.inner(cs.x, cs.v, cs.v) - g0) / g0);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("exp of a scaled vector follows the same geodesic") {
  const Manifold s = sphere_chart(1.0);
  const Vec x = vec({1.0, 0.3});
  const Vec h = vec({0.4, 0.7});
  GeodesicState state{x, h};
  for (int i = 0; i < 1000; ++i) {
    geodesic_step(s, state, 1e-3, 0.0);
    if ((i + 1) % 250 == 0) {
      const double t = (i + 1) * 1e-3;
      CHECK(max_abs(exp_point(s, {x, t * h}, 1000) - state.x) < 1e-10);
    }
  }
}

TEST_CASE("chart and embedded sphere geodesics agree through the embedding") {
  const Manifold c = sphere_chart(1.0);
  const Manifold e = sphere_embedded(1.0);
  const Vec x = vec({1.1, -0.4});
  const Vec h = vec({0.5, 0.9});
  const Vec p = sphere_point(x);
  const Vec hp = sphere_jacobian(x) * h;
  GeodesicState sc{x, h}, se{p, hp};
  for (int i = 0; i < 1000; ++i) {
    geodesic_step(c, sc, 1e-3, 0.0);
    geodesic_step(e, se, 1e-3, 0.0);
    CHECK(max_abs(sphere_point(sc.x) - se.x) < 1e-6);
  }
}

TEST_CASE("curvature_point") {
  SUBCASE("flat is zero") {
    const Manifold flat = flat_manifold(3);
    CHECK(max_abs(curvature_point(flat, vec({1, 2, 3}), vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1}))) == 0.0);
  }
  SUBCASE("sectional curvature 1/r^2 on spheres, -1 on the half-plane") {
    Rng rng(3);
    for (double r : {1.0, 2.5}) {
      for (const Manifold& m : {sphere_chart(r), sphere_embedded(r)}) {
        for (int it = 0; it < 20; ++it) {
          const Vec x = m.sample_point(rng);
          const Vec h = m.random_tangent(x, rng), k = m.random_tangent(x, rng);
          CHECK(sectional_curvature(m, x, h, k) == doctest::Approx(1.0 / (r * r)).epsilon(1e-6));
        }
      }
    }
    const Manifold hyp = poincare_half_plane();
    for (int it = 0; it < 20; ++it) {
      const Vec x = hyp.sample_point(rng);
      CHECK(sectional_curvature(hyp, x, hyp.random_tangent(x, rng), hyp.random_tangent(x, rng)) ==
            doctest::Approx(-1.0).epsilon(1e-6));
    }
  }
  SUBCASE("finite-difference Christoffel Jacobian gives the same curvature") {
    const Manifold s = sphere_chart(1.0);
    const Manifold fd = metric_only_manifold(s);
    const Vec x = vec({0.8, 0.1});
    const Vec h = vec({1, 0.2}), k = vec({-0.3, 1}), l = vec({0.5, 0.5});
    CHECK(max_abs(curvature_point(s, x, h, k, l) - curvature_point(fd, x, h, k, l)) < 1e-4);
  }
  SUBCASE("antisymmetry and Bianchi") {
    Rng rng(9);
    for (const Manifold& m : {sphere_chart(1.0), poincare_half_plane(), paraboloid()}) {
      for (int it = 0; it < 20; ++it) {
        const Vec x = m.sample_point(rng);
        const Vec h = m.random_tangent(x, rng), k = m.random_tangent(x, rng), l = m.random_tangent(x, rng);
        const Vec rhk = curvature_point(m, x, h, k, l);
        CHECK(max_abs(rhk + curvature_point(m, x, k, h, l)) < 1e-14);
        CHECK(max_abs(curvature_point(m, x, h, h, l)) == 0.0);
        const Vec bianchi = rhk + curvature_point(m, x, k, l, h) + curvature_point(m, x, l, h, k);
        CHECK(max_abs(bianchi) < 1e-8);
      }
    }
  }
}

namespace {

// Closed loop through three mutually orthogonal unit vectors.
std::vector<Vec> octant_loop(const Vec& a, const Vec& b, const Vec& c, int per_arc) {
  std::vector<Vec> loop;
  for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
    auto pts = arc(from, to, per_arc);
    loop.insert(loop.end(), loop.empty() ? pts.begin() : pts.begin() + 1, pts.end());
  }
  return loop;
}

double signed_angle(const Vec& n, const Vec& from, const Vec& to) {
  return std::atan2(n.dot(cross(from, to)), from.dot(to));
}

}  // namespace

TEST_CASE("parallel_transport_point") {
  SUBCASE("flat leaves vectors unchanged") {
    const Manifold flat = flat_manifold(2);
    const std::vector<Vec> curve{vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({3, -2})};
    CHECK(max_abs(parallel_transport_point(flat, curve, vec({0.3, 0.4})) - vec({0.3, 0.4})) == 0.0);
  }
  SUBCASE("zero-length curve") {
    const Manifold s = sphere_embedded(1.0);
    const std::vector<Vec> curve{vec({0, 0, 1})};
    CHECK(parallel_transport_point(s, curve, vec({1, 0, 0})) == vec({1, 0, 0}));
  }
  SUBCASE("octant triangle holonomy is pi/2 (embedded)") {
    const Manifold s = sphere_embedded(1.0);
    const Vec a = vec({0, 0, 1}), b = vec({1, 0, 0}), c = vec({0, 1, 0});
    const auto loop = octant_loop(a, b, c, 3334);
    const Vec v0 = vec({0.6, 0.8, 0});
    const Vec v1 = parallel_transport_point(s, loop, v0);
    CHECK(std::abs(v1.norm() - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(signed_angle(a, v0, v1)) - kPi / 2) < 1e-4);
  }
  SUBCASE("octant triangle holonomy is pi/2 (polar chart)") {
    // Rotate the triangle so both poles stay far from its edges.
    const Eigen::Vector3d u = Eigen::Vector3d(1, 1, -1).normalized();
    const Eigen::Matrix3d rot =
        Eigen::Quaterniond::FromTwoVectors(u, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const Vec a = rot.col(0), b = rot.col(1), c = rot.col(2);
    const auto loop = octant_loop(a, b, c, 3334);

    std::vector<Vec> chart_loop;
    double phi_prev = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec& p = loop[i];
      double phi = std::atan2(p[1], p[0]);
      if (i > 0) phi += 2 * kPi * std::round((phi_prev - phi) / (2 * kPi));
      phi_prev = phi;
      chart_loop.push_back(vec({std::acos(std::clamp(p[2], -1.0, 1.0)), phi}));
    }
    REQUIRE(max_abs(chart_loop.front() - chart_loop.back()) < 1e-12);

    const Manifold s = sphere_chart(1.0);
    const Vec x0 = chart_loop.front();
    const Vec v0_ambient = b;  // initial direction of the first arc
    const Vec v0 = sphere_jacobian(x0).colPivHouseholderQr().solve(v0_ambient);
    const Vec v1 = parallel_transport_point(s, chart_loop, v0);
    CHECK(s.inner(x0, v1, v1) == doctest::Approx(s.inner(x0, v0, v0)).epsilon(1e-8));
    const Vec v1_ambient = sphere_jacobian(x0) * v1;
    CHECK(std::abs(std::abs(signed_angle(a, v0_ambient, v1_ambient)) - kPi / 2) < 1e-4);
  }
  SUBCASE("curve leaving the domain") {
    const Manifold h = poincare_half_plane();
    const std::vector<Vec> curve{vec({0, 1}), vec({0, -1})};
    try {
      parallel_transport_point(h, curve, vec({1, 0}));
      FAIL("expected curve left domain");
    } catch (const GeometryError& e) {
      CHECK(e.kind() == ErrorKind::CurveLeftDomain);
    }
  }
}

TEST_CASE("structural maps of TTN") {
  const SecondTangentVector xi{vec({1, 2}), vec({3, 4}), vec({5, 6}), vec({7, 8})};
  const auto flipped = canonical_flip(xi);
  CHECK(flipped.h == xi.k);
  CHECK(flipped.k == xi.h);
  const auto back = canonical_flip(flipped);
  CHECK((back.x == xi.x && back.h == xi.h && back.k == xi.k && back.l == xi.l));
  CHECK(vertical_projection(vertical_lift(xi.x, xi.h, xi.l)).vec == xi.l);
  try {
    vertical_projection(xi);
    FAIL("expected not vertical");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == ErrorKind::NotVertical);
  }
}

TEST_CASE("registry strings") {
  CHECK(make_manifold("sphere:r=1.0:rep=embedded").name == "sphere:r=1:rep=embedded");
  CHECK(make_manifold("sphere:rep=chart:r=2").name == "sphere:r=2:rep=chart");
  CHECK(make_manifold("flat:n=3").point_dim() == 3);
  CHECK(make_manifold("hyperbolic").name == "poincare");
  CHECK(make_manifold("sphere:dim=1").point_dim() == 2);
  // Canonical names parse back to themselves.
  for (const char* spec : {"flat:n=4:rep=embedded", "sphere:r=0.5:rep=chart", "paraboloid", "poincare",
                           "sphere:r=3:rep=embedded:dim=3"}) {
    const std::string name = make_manifold(spec).name;
    CHECK(make_manifold(name).name == name);
  }
  for (const char* bad : {"sphere:r=-1", "sphere:r=0", "sphere:r=abc", "torus", "flat:n=0", "flat:m=2",
                          "sphere:r=1:r=2", "sphere:r", "poincare:rep=embedded", "sphere:rep=chart:dim=3"}) {
    try {
      make_manifold(bad);
      FAIL("accepted " << bad);
    } catch (const GeometryError& e) {
      CHECK(e.kind() == ErrorKind::InvalidParameter);
    }
  }
}
