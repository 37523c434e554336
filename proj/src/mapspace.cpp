#include "mapgeom/mapspace.hpp"

#include <cmath>
#include <cstring>

namespace mapgeom {

namespace {

bool bitwise_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void require_common(const DomainPtr& d1, const ManifoldPtr& m1, const DomainPtr& d2,
                    const ManifoldPtr& m2) {
  if (!same_domain(d1, d2) || !same_manifold(m1, m2)) throw GeometryError(ErrorKind::FieldMismatch);
}

}  // namespace

QuadratureDomain::QuadratureDomain(std::vector<double> weights, std::vector<double> coordinates)
    : weights_(std::move(weights)), coordinates_(std::move(coordinates)) {
  if (weights_.empty()) throw GeometryError(ErrorKind::InvalidParameter, "empty quadrature domain");
  if (!coordinates_.empty() && coordinates_.size() != weights_.size())
    throw GeometryError(ErrorKind::SizeMismatch, "coordinates vs weights");
  CompensatedSum total;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw GeometryError(ErrorKind::InvalidParameter, "weights must be positive");
    total.add(w);
  }
  total_ = total.value();
}

QuadratureDomain QuadratureDomain::trapezoid_interval(std::size_t m, double a, double b) {
  if (m < 2) throw GeometryError(ErrorKind::InvalidParameter, "trapezoid rule needs m >= 2");
  if (!(b > a)) throw GeometryError(ErrorKind::InvalidParameter, "interval must have b > a");
  const double h = (b - a) / static_cast<double>(m - 1);
  std::vector<double> w(m, h), x(m);
  w.front() = w.back() = 0.5 * h;
  for (std::size_t i = 0; i < m; ++i) x[i] = a + h * static_cast<double>(i);
  x.back() = b;
  return QuadratureDomain(std::move(w), std::move(x));
}

QuadratureDomain QuadratureDomain::uniform_circle(std::size_t m, double length) {
  if (m < 1) throw GeometryError(ErrorKind::InvalidParameter, "circle needs m >= 1");
  if (!(length > 0.0)) throw GeometryError(ErrorKind::InvalidParameter, "length must be positive");
  const double h = length / static_cast<double>(m);
  std::vector<double> w(m, h), x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = h * static_cast<double>(i);
  return QuadratureDomain(std::move(w), std::move(x));
}

DomainPtr make_domain(std::vector<double> weights) {
  return std::make_shared<const QuadratureDomain>(std::move(weights));
}

bool same_domain(const DomainPtr& a, const DomainPtr& b) {
  return a && b && (a == b || *a == *b);
}

bool same_manifold(const ManifoldPtr& a, const ManifoldPtr& b) {
  return a && b && (a == b || a->name == b->name);
}

void MapField::validate() const {
  if (!domain || !manifold) throw GeometryError(ErrorKind::InvalidInput, "missing domain or manifold");
  if (values.size() != domain->size())
    throw GeometryError(ErrorKind::SizeMismatch, "values vs domain size");
  const int dim = manifold->point_dim();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != dim)
      throw GeometryError(ErrorKind::SizeMismatch, "point dimension", i);
    try {
      manifold->require_point(values[i]);
    } catch (const GeometryError& e) {
      throw e.with_sample(i);
    }
  }
}

MapField MapField::make(DomainPtr domain, ManifoldPtr manifold, std::vector<Vec> values) {
  MapField q{std::move(domain), std::move(manifold), std::move(values)};
  q.validate();
  return q;
}

void TangentField::validate() const {
  base.validate();
  if (vecs.size() != base.size()) throw GeometryError(ErrorKind::SizeMismatch, "vecs vs values");
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    if (vecs[i].size() != base.manifold->point_dim())
      throw GeometryError(ErrorKind::SizeMismatch, "vector dimension", i);
    if (!base.manifold->is_tangent(base.values[i], vecs[i]))
      throw GeometryError(ErrorKind::InvalidInput, "vector not tangent", i);
  }
}

TangentField TangentField::make(MapField base, std::vector<Vec> vecs) {
  TangentField h{std::move(base), std::move(vecs)};
  h.validate();
  return h;
}

TangentField TangentField::zero(const MapField& base) {
  return {base, std::vector<Vec>(base.size(), Vec::Zero(base.manifold->point_dim()))};
}

void SecondTangentField::validate() const {
  if (!domain || !manifold) throw GeometryError(ErrorKind::InvalidInput, "missing domain or manifold");
  if (quads.size() != domain->size())
    throw GeometryError(ErrorKind::SizeMismatch, "quads vs domain size");
  const int dim = manifold->point_dim();
  for (std::size_t i = 0; i < quads.size(); ++i) {
    const auto& q = quads[i];
    if (q.x.size() != dim || q.h.size() != dim || q.k.size() != dim || q.l.size() != dim)
      throw GeometryError(ErrorKind::SizeMismatch, "quad component dimension", i);
  }
}

SecondTangentField SecondTangentField::make(DomainPtr domain, ManifoldPtr manifold,
                                            std::vector<SecondTangentVector> quads) {
  SecondTangentField xi{std::move(domain), std::move(manifold), std::move(quads)};
  xi.validate();
  return xi;
}

void require_same_base(const TangentField& h, const MapField& q) {
  require_common(h.base.domain, h.base.manifold, q.domain, q.manifold);
  if (h.vecs.size() != q.size() || h.base.size() != q.size())
    throw GeometryError(ErrorKind::FieldMismatch, "sample count");
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!bitwise_equal(h.base.values[i], q.values[i]))
      throw GeometryError(ErrorKind::FieldMismatch, "different base points", i);
}

std::vector<TangentVector> tangent_samples(const TangentField& h) {
  std::vector<TangentVector> out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = {h.base.values[i], h.vecs[i]};
  return out;
}

double l2_inner(const MapField& q, const TangentField& h, const TangentField& k) {
  require_same_base(h, q);
  require_same_base(k, q);
  const Manifold& man = *q.manifold;
  const auto& w = q.domain->weights();
  std::vector<std::size_t> idx(q.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Parallel map, then a sequential reduction in index order.
  const std::vector<double> terms = lift_left_composition(
      idx, [&](std::size_t i) { return w[i] * man.inner(q.values[i], h.vecs[i], k.vecs[i]); });
  CompensatedSum sum;
  for (double t : terms) sum.add(t);
  return sum.value();
}

double l2_inner(const TangentField& h, const TangentField& k) { return l2_inner(h.base, h, k); }

double l2_norm(const TangentField& h) { return std::sqrt(l2_inner(h, h)); }

MapField base_projection(const TangentField& h) {
  return {h.base.domain, h.base.manifold,
          lift_left_composition(tangent_samples(h), [](const TangentVector& v) { return v.base; })};
}

TangentField connector_field(const SecondTangentField& xi) {
  const Manifold& man = *xi.manifold;
  const auto out = lift_left_composition(
      xi.quads, [&](const SecondTangentVector& q) { return connector(man, q); });
  MapField base{xi.domain, xi.manifold, std::vector<Vec>(out.size())};
  std::vector<Vec> vecs(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    base.values[i] = out[i].base;
    vecs[i] = out[i].vec;
  }
  return {std::move(base), std::move(vecs)};
}

SecondTangentField spray_field(const TangentField& h) {
  const Manifold& man = *h.base.manifold;
  return {h.base.domain, h.base.manifold,
          lift_left_composition(tangent_samples(h),
                                [&](const TangentVector& v) { return spray_eval(man, v); })};
}

MapField exp_field(const TangentField& h, int steps) {
  const Manifold& man = *h.base.manifold;
  return {h.base.domain, h.base.manifold,
          lift_left_composition(tangent_samples(h), [&](const TangentVector& v) {
            return exp_point(man, v, steps);
          })};
}

TangentField curvature_field(const MapField& q, const TangentField& h, const TangentField& k,
                             const TangentField& l) {
  require_same_base(h, q);
  require_same_base(k, q);
  require_same_base(l, q);
  const Manifold& man = *q.manifold;
  std::vector<std::size_t> idx(q.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return {q, lift_left_composition(idx, [&](std::size_t i) {
            return curvature_point(man, q.values[i], h.vecs[i], k.vecs[i], l.vecs[i]);
          })};
}

SecondTangentField vertical_lift_field(const TangentField& h, const TangentField& k) {
  require_same_base(k, h.base);
  std::vector<SecondTangentVector> quads(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    quads[i] = vertical_lift(h.base.values[i], h.vecs[i], k.vecs[i]);
  return {h.base.domain, h.base.manifold, std::move(quads)};
}

TangentField vertical_projection_field(const SecondTangentField& xi, double tol) {
  const auto out = lift_left_composition(
      xi.quads, [tol](const SecondTangentVector& q) { return vertical_projection(q, tol); });
  MapField base{xi.domain, xi.manifold, std::vector<Vec>(out.size())};
  std::vector<Vec> vecs(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    base.values[i] = out[i].base;
    vecs[i] = out[i].vec;
  }
  return {std::move(base), std::move(vecs)};
}

SecondTangentField canonical_flip_field(const SecondTangentField& xi) {
  std::vector<SecondTangentVector> quads(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) quads[i] = canonical_flip(xi.quads[i]);
  return {xi.domain, xi.manifold, std::move(quads)};
}

MapField embed_map_field(const MapField& q, ManifoldPtr target) {
  const Manifold& src = *q.manifold;
  if (!src.embedding)
    throw GeometryError(ErrorKind::RepresentationMismatch, src.name + " has no embedding");
  return MapField::make(q.domain, std::move(target),
                        lift_left_composition(q.values, [&](const Vec& x) { return src.embedding(x); }));
}

TangentField embed_tangent_field(const TangentField& h, ManifoldPtr target) {
  const Manifold& src = *h.base.manifold;
  if (!src.embedding)
    throw GeometryError(ErrorKind::RepresentationMismatch, src.name + " has no embedding");
  MapField base = embed_map_field(h.base, target);
  // Fourth-order central difference of the embedding along h.
  const auto vecs = lift_left_composition(tangent_samples(h), [&](const TangentVector& v) {
    const double s = 1e-3;
    const auto f = [&](double t) { return src.embedding(v.base + t * v.vec); };
    return Vec((-f(2 * s) + 8.0 * f(s) - 8.0 * f(-s) + f(-2 * s)) / (12.0 * s));
  });
  return TangentField::make(std::move(base), vecs);
}

}  // namespace mapgeom
