#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mapgeom/registry.hpp"
#include "mapgeom/verification.hpp"
#include "test_support.hpp"

using namespace mapgeom;
using namespace mapgeom::testing;

TEST_CASE("OracleReport bookkeeping") {
  auto r = make_report("x", 1e-3);
  CHECK(r.passed);
  CHECK(r.instance_count == 0);
  r.record(5e-4);
  r.record(1e-4);
  CHECK(r.max_abs_error == 5e-4);
  CHECK(r.passed);
  CHECK(r.instance_count == 2);
  r.record(2e-3);
  CHECK_FALSE(r.passed);
  r.record(0.0);
  CHECK(r.max_abs_error == 2e-3);

  auto n = make_report("nan", 1.0);
  n.record(std::numeric_limits<double>::quiet_NaN());
  n.record(0.5);
  CHECK_FALSE(n.passed);
  CHECK(std::isnan(n.max_abs_error));
}

TEST_CASE("oracle_christoffel") {
  const Manifold flat = flat_manifold(2);
  const auto z = oracle_christoffel(flat.chart(), vec({0.3, 0.1}));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) CHECK(z(i, j, k) == 0.0);

  const Manifold hyp = poincare_half_plane();
  const auto g = oracle_christoffel(hyp.chart(), vec({0.0, 2.0}));
  CHECK(g(1, 1, 1) == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(g(1, 0, 0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(g(0, 0, 1) == doctest::Approx(-0.5).epsilon(1e-8));

  const Manifold s = sphere_chart(1.0);
  const auto gs = oracle_christoffel(s.chart(), vec({kPi / 4, 1.0}));
  CHECK(gs(0, 1, 1) == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(gs(1, 0, 1) == doctest::Approx(1.0).epsilon(1e-8));

  // Against the analytic callbacks at random points.
  Rng rng(1);
  for (const Manifold& m : {sphere_chart(1.0), sphere_chart(3.0), poincare_half_plane()}) {
    for (int it = 0; it < 20; ++it) {
      const Vec x = m.sample_point(rng);
      const auto a = m.chart().christoffel_at(x);
      const auto o = oracle_christoffel(m.chart(), x);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) CHECK(std::abs(a(i, j, k) - o(i, j, k)) < 1e-5);
    }
  }
  CHECK_THROWS_AS(oracle_christoffel(hyp.chart(), vec({0.0, 1e-5})), GeometryError);
}

TEST_CASE("oracle_curvature_commutator") {
  const Manifold flat = flat_manifold(3);
  CHECK(max_abs(oracle_curvature_commutator(flat, vec({1, 2, 3}), vec({1, 0, 0}), vec({0, 1, 0}),
                                            vec({0, 0, 1}))) == 0.0);
  Rng rng(2);
  for (const Manifold& m : {sphere_chart(1.0), sphere_chart(0.5), poincare_half_plane()}) {
    for (int it = 0; it < 20; ++it) {
      const Vec x = m.sample_point(rng);
      const Vec h = m.random_tangent(x, rng), k = m.random_tangent(x, rng), l = m.random_tangent(x, rng);
      CHECK(max_abs(oracle_curvature_commutator(m, x, h, k, l) - curvature_point(m, x, h, k, l)) < 1e-3);
      CHECK(max_abs(oracle_curvature_commutator(m, x, h, h, l)) < 1e-3);
    }
  }
  // Coordinate-constant extensions only make sense in a chart.
  const Manifold emb = sphere_embedded(1.0);
  CHECK_THROWS_AS(oracle_curvature_commutator(emb, vec({0, 0, 1}), vec({1, 0, 0}), vec({0, 1, 0}),
                                              vec({1, 0, 0})),
                  GeometryError);
  CHECK_THROWS_AS(oracle_curvature_commutator(poincare_half_plane(), vec({0, -1}), vec({1, 0}),
                                              vec({0, 1}), vec({1, 1})),
                  GeometryError);
}

TEST_CASE("oracle_first_variation") {
  Rng rng(3);
  SUBCASE("flat target") {
    const auto flat = make_shared_manifold("flat:n=2");
    const auto q = random_map(flat, 8, rng);
    const auto [lhs, rhs] = oracle_first_variation(q, random_tangent_field(q, rng),
                                                   random_tangent_field(q, rng),
                                                   random_tangent_field(q, rng));
    CHECK(lhs == 0.0);
    CHECK(rhs == 0.0);
  }
  SUBCASE("m = 0") {
    const auto hyp = make_shared_manifold("poincare");
    const auto q = random_map(hyp, 8, rng);
    const auto [lhs, rhs] = oracle_first_variation(q, random_tangent_field(q, rng),
                                                   random_tangent_field(q, rng), TangentField::zero(q));
    CHECK(std::abs(lhs) < 1e-10);
    CHECK(rhs == 0.0);
  }
  SUBCASE("random fields on chart targets") {
    for (const char* spec : {"poincare", "sphere:rep=chart", "sphere:r=2:rep=chart"}) {
      const auto man = make_shared_manifold(spec);
      for (int it = 0; it < 20; ++it) {
        const auto q = random_map(man, 8, rng);
        const auto [lhs, rhs] = oracle_first_variation(q, random_tangent_field(q, rng),
                                                       random_tangent_field(q, rng),
                                                       random_tangent_field(q, rng));
        CHECK(std::abs(lhs - rhs) < 1e-4);
      }
    }
  }
  SUBCASE("perturbation leaving the chart") {
    const auto hyp = make_shared_manifold("poincare");
    const auto q = MapField::make(make_domain({1.0}), hyp, {vec({0, 1e-6})});
    const auto h = TangentField::make(q, {vec({0, 1})});
    CHECK_THROWS_AS(oracle_first_variation(q, h, h, h), GeometryError);
  }
}

TEST_CASE("run_axiom_sweep") {
  const Manifold flat = flat_manifold(3);
  for (const auto& r : run_axiom_sweep(flat, 50, 123)) {
    CHECK(r.passed);
    CHECK(r.max_abs_error == 0.0);
  }
  const auto reps = run_axiom_sweep(sphere_chart(1.0), 100, 7);
  REQUIRE(reps.size() == 4);
  for (const auto& r : reps) {
    CHECK(r.passed);
    CHECK(r.instance_count == 100);
    CHECK(r.tolerance == 1e-10);
  }
  CHECK(reps[0].check_name == "connector_vertical_lift");
  CHECK(reps[3].check_name == "connector_flip_symmetry");

  for (const auto& r : run_axiom_sweep(poincare_half_plane(), 1, 7)) CHECK(r.instance_count == 1);
  CHECK_THROWS_AS(run_axiom_sweep(flat, 0, 1), GeometryError);

  // A deliberately broken connector (non-symmetric Christoffel symbols)
  // must be caught by the flip check.
  Manifold bad = poincare_half_plane();
  auto& chart = std::get<ChartManifold>(bad.geometry);
  chart.christoffel = [](const Vec&) {
    Christoffel g(2);
    g(0, 0, 1) = 1.0;
    return g;
  };
  const auto broken = run_axiom_sweep(bad, 20, 1);
  CHECK(broken[0].passed);
  CHECK_FALSE(broken[3].passed);
}

TEST_CASE("sweeps are reproducible") {
  for (const char* spec : {"sphere", "paraboloid", "poincare"}) {
    const Manifold m = make_manifold(spec);
    const auto a = run_verification_suite(m, 30, 42);
    const auto b = run_verification_suite(m, 30, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].check_name == b[i].check_name);
      CHECK(a[i].max_abs_error == b[i].max_abs_error);
      CHECK(a[i].passed);
    }
  }
}

TEST_CASE("verification suite covers charts and embeddings") {
  const auto chart = run_verification_suite(sphere_chart(1.0), 20, 5);
  const auto emb = run_verification_suite(sphere_embedded(1.0), 20, 5);
  CHECK(chart.size() == 8);
  CHECK(emb.size() == 5);
  for (const auto& r : chart) CHECK(r.passed);
  for (const auto& r : emb) CHECK(r.passed);
}
