#include "mapgeom/reparam.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace mapgeom {

namespace {

void require_size(const DiscreteDiffeo& phi, std::size_t m) {
  if (phi.size() != m) throw GeometryError(ErrorKind::SizeMismatch, "permutation vs sample count");
}

template <class T>
std::vector<T> reindex(const DiscreteDiffeo& phi, const std::vector<T>& v) {
  require_size(phi, v.size());
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[phi.perm[i]];
  return out;
}

// Returns the largest coordinate difference and whether all bits agree.
struct Comparison {
  double max_abs = 0.0;
  bool bitwise = true;

  void add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
      bitwise = false;
      max_abs = std::numeric_limits<double>::infinity();
      return;
    }
    if (std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) != 0)
      bitwise = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double d = std::abs(a[i] - b[i]);
      if (std::isnan(d) || d > max_abs) max_abs = d;
    }
  }
};

}  // namespace

DiscreteDiffeo DiscreteDiffeo::from_permutation(std::vector<std::size_t> perm,
                                                const QuadratureDomain& domain) {
  DiscreteDiffeo phi;
  phi.perm = std::move(perm);
  require_size(phi, domain.size());
  phi.validate();
  phi.pulled_weights.resize(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi.pulled_weights[i] = domain.weight(phi.perm[i]);
  return phi;
}

DiscreteDiffeo DiscreteDiffeo::identity(const QuadratureDomain& domain) {
  std::vector<std::size_t> perm(domain.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  return from_permutation(std::move(perm), domain);
}

void DiscreteDiffeo::validate() const {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p])
      throw GeometryError(ErrorKind::InvalidInput, "not a permutation");
    seen[p] = true;
  }
  if (!pulled_weights.empty() && pulled_weights.size() != perm.size())
    throw GeometryError(ErrorKind::SizeMismatch, "pulled weights vs permutation");
}

bool DiscreteDiffeo::is_measure_preserving(const QuadratureDomain& domain) const {
  require_size(*this, domain.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (domain.weight(perm[i]) != domain.weight(i)) return false;
  return true;
}

QuadratureDomain DiscreteDiffeo::pulled_domain() const { return QuadratureDomain(pulled_weights); }

DiscreteDiffeo compose(const DiscreteDiffeo& phi, const DiscreteDiffeo& psi,
                       const QuadratureDomain& domain) {
  require_size(phi, psi.size());
  std::vector<std::size_t> perm(phi.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = phi.perm[psi.perm[i]];
  return DiscreteDiffeo::from_permutation(std::move(perm), domain);
}

DiscreteDiffeo random_diffeo(const QuadratureDomain& domain, Rng& rng) {
  std::vector<std::size_t> perm(domain.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return DiscreteDiffeo::from_permutation(std::move(perm), domain);
}

MapField act_on_map(const DiscreteDiffeo& phi, const MapField& q) {
  return {q.domain, q.manifold, reindex(phi, q.values)};
}

TangentField act_on_tangent(const DiscreteDiffeo& phi, const TangentField& h) {
  return {act_on_map(phi, h.base), reindex(phi, h.vecs)};
}

SecondTangentField act_on_second(const DiscreteDiffeo& phi, const SecondTangentField& xi) {
  return {xi.domain, xi.manifold, reindex(phi, xi.quads)};
}

InvarianceReport check_metric_invariance(const DiscreteDiffeo& phi, const MapField& q,
                                         const TangentField& h, const TangentField& k) {
  require_size(phi, q.size());
  InvarianceReport r;
  r.rhs = l2_inner(q, h, k);
  const MapField qp = act_on_map(phi, q);
  const TangentField hp = act_on_tangent(phi, h), kp = act_on_tangent(phi, k);
  r.lhs = l2_inner(qp, hp, kp);
  const MapField pulled{std::make_shared<const QuadratureDomain>(phi.pulled_domain()), q.manifold,
                        qp.values};
  r.pulled_back = l2_inner(pulled, {pulled, hp.vecs}, {pulled, kp.vecs});
  r.measure_preserving = phi.is_measure_preserving(*q.domain);
  return r;
}

std::optional<EquivariantOp> parse_equivariant_op(const std::string& name) {
  if (name == "connector") return EquivariantOp::Connector;
  if (name == "spray") return EquivariantOp::Spray;
  if (name == "exp") return EquivariantOp::Exp;
  if (name == "curvature") return EquivariantOp::Curvature;
  return std::nullopt;
}

const char* to_string(EquivariantOp op) {
  switch (op) {
    case EquivariantOp::Connector: return "connector";
    case EquivariantOp::Spray: return "spray";
    case EquivariantOp::Exp: return "exp";
    case EquivariantOp::Curvature: return "curvature";
  }
  return "unknown";
}

OracleReport check_equivariance(const DiscreteDiffeo& phi, EquivariantOp op,
                                const EquivarianceInputs& in) {
  auto need = [op](const auto& opt) -> const auto& {
    if (!opt)
      throw GeometryError(ErrorKind::InvalidInput,
                          std::string("missing input for ") + to_string(op));
    return *opt;
  };
  Comparison cmp;
  auto compare_tangent = [&](const TangentField& a, const TangentField& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      cmp.add(a.base.values[i], b.base.values[i]);
      cmp.add(a.vecs[i], b.vecs[i]);
    }
  };

  switch (op) {
    case EquivariantOp::Connector: {
      const auto& xi = need(in.xi);
      compare_tangent(connector_field(act_on_second(phi, xi)),
                      act_on_tangent(phi, connector_field(xi)));
      break;
    }
    case EquivariantOp::Spray: {
      const auto& h = need(in.h);
      const auto a = spray_field(act_on_tangent(phi, h));
      const auto b = act_on_second(phi, spray_field(h));
      for (std::size_t i = 0; i < a.size(); ++i) {
        cmp.add(a.quads[i].x, b.quads[i].x);
        cmp.add(a.quads[i].h, b.quads[i].h);
        cmp.add(a.quads[i].k, b.quads[i].k);
        cmp.add(a.quads[i].l, b.quads[i].l);
      }
      break;
    }
    case EquivariantOp::Exp: {
      const auto& h = need(in.h);
      const auto a = exp_field(act_on_tangent(phi, h), in.steps);
      const auto b = act_on_map(phi, exp_field(h, in.steps));
      for (std::size_t i = 0; i < a.size(); ++i) cmp.add(a.values[i], b.values[i]);
      break;
    }
    case EquivariantOp::Curvature: {
      const auto& h = need(in.h);
      const auto& k = need(in.k);
      const auto& l = need(in.l);
      compare_tangent(curvature_field(act_on_map(phi, h.base), act_on_tangent(phi, h),
                                      act_on_tangent(phi, k), act_on_tangent(phi, l)),
                      act_on_tangent(phi, curvature_field(h.base, h, k, l)));
      break;
    }
  }

  OracleReport report = make_report(std::string("equivariance_") + to_string(op), 0.0);
  report.instance_count = 1;
  report.max_abs_error = cmp.max_abs;
  report.passed = cmp.bitwise;
  return report;
}

}  // namespace mapgeom
