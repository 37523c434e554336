#include "mapgeom/registry.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

namespace mapgeom {

namespace {

constexpr double kPi = std::numbers::pi;
// Width of the excluded band around the polar-chart singularities.
constexpr double kPoleBand = 1e-3;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

const char* rep_name(Representation rep) {
  return rep == Representation::Chart ? "chart" : "embedded";
}

std::optional<Vec> sphere_ambient_log(double r, const Vec& p, const Vec& q) {
  const double r2 = r * r;
  const double c = p.dot(q) / r2;
  const Vec w = q - c * p;
  const double wn = w.norm();
  if (wn <= 1e-12 * r) {
    if (c > 0.0) return Vec::Zero(p.size());
    return std::nullopt;  // antipodal: no unique log
  }
  // atan2 stays accurate for small and near-pi angles alike.
  const double angle = std::atan2(wn / r, c);
  return (r * angle / wn) * w;
}

Manifold embedded_from(std::string name, EmbeddedManifold e) {
  Manifold m;
  m.name = std::move(name);
  m.geometry = std::move(e);
  return m;
}

}  // namespace

Manifold flat_manifold(int n, Representation rep) {
  if (n < 1) throw GeometryError(ErrorKind::InvalidParameter, "flat: n must be >= 1");
  Manifold m;
  m.name = "flat:n=" + std::to_string(n) + ":rep=" + rep_name(rep);
  if (rep == Representation::Chart) {
    ChartManifold c;
    c.dim = n;
    c.metric = [n](const Vec&) { return Mat::Identity(n, n); };
    c.christoffel = [n](const Vec&) { return Christoffel(n); };
    c.christoffel_jacobian = [n](const Vec&) { return ChristoffelJacobian(n); };
    c.chart_domain = [](const Vec&) { return true; };
    m.geometry = std::move(c);
  } else {
    EmbeddedManifold e;
    e.ambient_dim = n;
    e.intrinsic_dim = n;
    e.embed_check = [](const Vec&) { return Vec(); };
    e.tangent_projector = [n](const Vec&) { return Mat::Identity(n, n); };
    e.retraction = [](const Vec& p, const Vec& v) -> Vec { return p + v; };
    e.projector_derivative = [n](const Vec&, const Vec&) { return Mat::Zero(n, n); };
    m.geometry = std::move(e);
  }
  m.flat = true;
  m.closed_form_log = [](const Vec& p, const Vec& q) -> std::optional<Vec> { return q - p; };
  m.sample_point = [n](Rng& rng) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    return x;
  };
  return m;
}

Manifold sphere_chart(double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw GeometryError(ErrorKind::InvalidParameter, "sphere: r must be positive");
  ChartManifold c;
  c.dim = 2;
  // Coordinates (theta, phi): polar angle from the +z axis, azimuth.
  c.metric = [r](const Vec& x) {
    Mat g = Mat::Zero(2, 2);
    const double s = std::sin(x[0]);
    g(0, 0) = r * r;
    g(1, 1) = r * r * s * s;
    return g;
  };
  c.christoffel = [](const Vec& x) {
    Christoffel gamma(2);
    const double s = std::sin(x[0]), co = std::cos(x[0]);
    gamma(0, 1, 1) = -s * co;
    gamma(1, 0, 1) = gamma(1, 1, 0) = co / s;
    return gamma;
  };
  c.christoffel_jacobian = [](const Vec& x) {
    ChristoffelJacobian d(2);
    const double s = std::sin(x[0]);
    d(0, 1, 1, 0) = -std::cos(2.0 * x[0]);
    d(1, 0, 1, 0) = d(1, 1, 0, 0) = -1.0 / (s * s);
    return d;
  };
  c.chart_domain = [](const Vec& x) { return x[0] > kPoleBand && x[0] < kPi - kPoleBand; };

  Manifold m;
  m.name = "sphere:r=" + format_double(r) + ":rep=chart";
  m.geometry = std::move(c);
  m.embedding = [r](const Vec& x) {
    Vec p(3);
    p << r * std::sin(x[0]) * std::cos(x[1]), r * std::sin(x[0]) * std::sin(x[1]),
        r * std::cos(x[0]);
    return p;
  };
  auto embedding = m.embedding;
  m.closed_form_log = [r, embedding](const Vec& x, const Vec& y) -> std::optional<Vec> {
    const auto v = sphere_ambient_log(r, embedding(x), embedding(y));
    if (!v) return std::nullopt;
    Eigen::Matrix<double, 3, 2> jac;
    const double st = std::sin(x[0]), ct = std::cos(x[0]);
    const double sp = std::sin(x[1]), cp = std::cos(x[1]);
    jac << r * ct * cp, -r * st * sp, r * ct * sp, r * st * cp, -r * st, 0.0;
    return Vec(jac.colPivHouseholderQr().solve(*v));
  };
  m.sample_point = [](Rng& rng) {
    Vec x(2);
    x[0] = rng.uniform(0.3, kPi - 0.3);
    x[1] = rng.uniform(-kPi, kPi);
    return x;
  };
  return m;
}

Manifold sphere_embedded(double r, int dim) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw GeometryError(ErrorKind::InvalidParameter, "sphere: r must be positive");
  if (dim < 1) throw GeometryError(ErrorKind::InvalidParameter, "sphere: dim must be >= 1");
  const int d = dim + 1;
  EmbeddedManifold e;
  e.ambient_dim = d;
  e.intrinsic_dim = dim;
  e.embed_check = [r](const Vec& p) {
    Vec res(1);
    res[0] = p.norm() - r;
    return res;
  };
  e.tangent_projector = [d](const Vec& p) -> Mat {
    return Mat::Identity(d, d) - (p * p.transpose()) / p.squaredNorm();
  };
  e.projector_derivative = [](const Vec& p, const Vec& u) -> Mat {
    const double pp = p.squaredNorm();
    return -(u * p.transpose() + p * u.transpose()) / pp +
           (2.0 * p.dot(u) / (pp * pp)) * (p * p.transpose());
  };
  e.retraction = [r](const Vec& p, const Vec& v) -> Vec {
    const Vec a = p + v;
    return (r / a.norm()) * a;
  };
  Manifold m = embedded_from("sphere:r=" + format_double(r) + ":rep=embedded" +
                                 (dim == 2 ? std::string() : ":dim=" + std::to_string(dim)),
                             std::move(e));
  m.closed_form_log = [r](const Vec& p, const Vec& q) { return sphere_ambient_log(r, p, q); };
  m.sample_point = [r, d](Rng& rng) {
    Vec x(d);
    do {
      for (int i = 0; i < d; ++i) x[i] = rng.uniform(-1.0, 1.0);
    } while (x.norm() < 0.1);
    return Vec((r / x.norm()) * x);
  };
  return m;
}

Manifold poincare_half_plane() {
  ChartManifold c;
  c.dim = 2;
  c.metric = [](const Vec& x) -> Mat { return Mat::Identity(2, 2) / (x[1] * x[1]); };
  c.christoffel = [](const Vec& x) {
    Christoffel gamma(2);
    const double inv = 1.0 / x[1];
    gamma(0, 0, 1) = gamma(0, 1, 0) = -inv;
    gamma(1, 0, 0) = inv;
    gamma(1, 1, 1) = -inv;
    return gamma;
  };
  c.christoffel_jacobian = [](const Vec& x) {
    ChristoffelJacobian d(2);
    const double inv2 = 1.0 / (x[1] * x[1]);
    d(0, 0, 1, 1) = d(0, 1, 0, 1) = inv2;
    d(1, 0, 0, 1) = -inv2;
    d(1, 1, 1, 1) = inv2;
    return d;
  };
  c.chart_domain = [](const Vec& x) { return x[1] > 0.0; };

  Manifold m;
  m.name = "poincare";
  m.geometry = std::move(c);
  m.closed_form_log = [](const Vec& a, const Vec& b) -> std::optional<Vec> {
    const double x0 = a[0], y0 = a[1], x1 = b[0], y1 = b[1];
    const double dist2 = (b - a).squaredNorm();
    if (dist2 == 0.0) return Vec::Zero(2);
    const double d = std::acosh(1.0 + dist2 / (2.0 * y0 * y1));
    Vec t(2);
    if (std::abs(x1 - x0) <= 1e-14 * std::max({1.0, std::abs(x0), std::abs(x1)})) {
      t << 0.0, (y1 > y0 ? 1.0 : -1.0);
    } else {
      // Geodesic is a half circle centred on the real axis at c.
      const double centre =
          ((x1 * x1 + y1 * y1) - (x0 * x0 + y0 * y0)) / (2.0 * (x1 - x0));
      t << y0, centre - x0;
      if (t[0] * (x1 - x0) < 0.0) t = -t;
      t.normalize();
    }
    return Vec(d * y0 * t);
  };
  m.sample_point = [](Rng& rng) {
    Vec x(2);
    x[0] = rng.uniform(-1.0, 1.0);
    x[1] = rng.uniform(0.5, 2.0);
    return x;
  };
  return m;
}

Manifold paraboloid() {
  // z = x^2 + y^2 in R^3.
  EmbeddedManifold e;
  e.ambient_dim = 3;
  e.intrinsic_dim = 2;
  e.embed_check = [](const Vec& p) {
    Vec res(1);
    res[0] = p[2] - p[0] * p[0] - p[1] * p[1];
    return res;
  };
  e.tangent_projector = [](const Vec& p) -> Mat {
    Eigen::Vector3d n(2.0 * p[0], 2.0 * p[1], -1.0);
    n.normalize();
    return Mat(Eigen::Matrix3d::Identity() - n * n.transpose());
  };
  e.projector_derivative = [](const Vec& p, const Vec& u) -> Mat {
    const Eigen::Vector3d g(2.0 * p[0], 2.0 * p[1], -1.0);
    const Eigen::Vector3d n = g / g.norm();
    const Eigen::Vector3d dg(2.0 * u[0], 2.0 * u[1], 0.0);
    const Eigen::Vector3d dn = (dg - n * n.dot(dg)) / g.norm();
    return Mat(-(dn * n.transpose() + n * dn.transpose()));
  };
  e.retraction = [](const Vec& p, const Vec& v) -> Vec {
    const Vec a = p + v;
    // Newton on the squared distance from a to (x, y, x^2 + y^2).
    double x = a[0], y = a[1];
    for (int it = 0; it < 50; ++it) {
      const double s = x * x + y * y - a[2];
      const double gx = 2.0 * (x - a[0]) + 4.0 * x * s;
      const double gy = 2.0 * (y - a[1]) + 4.0 * y * s;
      const double hxx = 2.0 + 4.0 * s + 8.0 * x * x;
      const double hyy = 2.0 + 4.0 * s + 8.0 * y * y;
      const double hxy = 8.0 * x * y;
      const double det = hxx * hyy - hxy * hxy;
      const double dx = (hyy * gx - hxy * gy) / det;
      const double dy = (hxx * gy - hxy * gx) / det;
      x -= dx;
      y -= dy;
      if (std::abs(dx) + std::abs(dy) <= 1e-16 * (1.0 + std::abs(x) + std::abs(y))) break;
    }
    Vec out(3);
    out << x, y, x * x + y * y;
    return out;
  };
  Manifold m = embedded_from("paraboloid", std::move(e));
  m.sample_point = [](Rng& rng) {
    Vec p(3);
    p[0] = rng.uniform(-1.0, 1.0);
    p[1] = rng.uniform(-1.0, 1.0);
    p[2] = p[0] * p[0] + p[1] * p[1];
    return p;
  };
  return m;
}

namespace {

double parse_positive(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v) || !(v > 0.0))
    throw GeometryError(ErrorKind::InvalidParameter, key + "=" + value);
  return v;
}

int parse_positive_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || v < 1)
    throw GeometryError(ErrorKind::InvalidParameter, key + "=" + value);
  return v;
}

Representation parse_rep(const std::string& value) {
  if (value == "chart") return Representation::Chart;
  if (value == "embedded") return Representation::Embedded;
  throw GeometryError(ErrorKind::InvalidParameter, "rep=" + value);
}

void allow_keys(const std::string& name, const std::map<std::string, std::string>& params,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw GeometryError(ErrorKind::InvalidParameter, name + ": unknown key " + key);
  }
}

}  // namespace

Manifold make_manifold(std::string_view spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = spec.find(':', start);
    parts.emplace_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const std::string name = parts.front();
  std::map<std::string, std::string> params;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::size_t eq = parts[i].find('=');
    if (eq == std::string::npos || eq == 0)
      throw GeometryError(ErrorKind::InvalidParameter, "expected key=value, got '" + parts[i] + "'");
    const std::string key = parts[i].substr(0, eq);
    if (!params.emplace(key, parts[i].substr(eq + 1)).second)
      throw GeometryError(ErrorKind::InvalidParameter, "repeated key " + key);
  }
  auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };

  if (name == "flat") {
    allow_keys(name, params, {"n", "rep"});
    const int n = get("n") ? parse_positive_int("n", *get("n")) : 2;
    const Representation rep = get("rep") ? parse_rep(*get("rep")) : Representation::Chart;
    return flat_manifold(n, rep);
  }
  if (name == "sphere") {
    allow_keys(name, params, {"r", "rep", "dim"});
    const double r = get("r") ? parse_positive("r", *get("r")) : 1.0;
    const Representation rep = get("rep") ? parse_rep(*get("rep")) : Representation::Embedded;
    const int dim = get("dim") ? parse_positive_int("dim", *get("dim")) : 2;
    if (rep == Representation::Chart) {
      if (dim != 2) throw GeometryError(ErrorKind::InvalidParameter, "sphere chart requires dim=2");
      return sphere_chart(r);
    }
    return sphere_embedded(r, dim);
  }
  if (name == "poincare" || name == "hyperbolic") {
    allow_keys(name, params, {"rep"});
    if (get("rep") && parse_rep(*get("rep")) != Representation::Chart)
      throw GeometryError(ErrorKind::InvalidParameter, "poincare is chart-only");
    return poincare_half_plane();
  }
  if (name == "paraboloid") {
    allow_keys(name, params, {"rep"});
    if (get("rep") && parse_rep(*get("rep")) != Representation::Embedded)
      throw GeometryError(ErrorKind::InvalidParameter, "paraboloid is embedded-only");
    return paraboloid();
  }
  throw GeometryError(ErrorKind::InvalidParameter, "unknown manifold '" + name + "'");
}

std::shared_ptr<const Manifold> make_shared_manifold(std::string_view spec) {
  return std::make_shared<const Manifold>(make_manifold(spec));
}

std::vector<RegistryEntry> registry_listing() {
  return {
      {"flat", "n=<int, default 2>, rep=chart|embedded (default chart)",
       "Euclidean R^n"},
      {"sphere", "r=<positive real, default 1>, rep=chart|embedded (default embedded), "
                 "dim=<int, embedded only, default 2>",
       "round sphere of radius r; chart uses polar coordinates (theta, phi)"},
      {"poincare", "(alias hyperbolic) no parameters", "Poincare upper half-plane, curvature -1"},
      {"paraboloid", "no parameters", "z = x^2 + y^2 embedded in R^3"},
  };
}

}  // namespace mapgeom
