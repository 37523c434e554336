#include "mapgeom/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mapgeom {

namespace {

constexpr double kMassTolerance = 1e-12;

void require_monge(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  mu.validate();
  nu.validate();
  if (mu.size() != nu.size())
    throw GeometryError(ErrorKind::MongeRequired, "atom counts differ");
  const double expected = 1.0 / static_cast<double>(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (std::abs(mu.masses[i] - expected) > kMassTolerance ||
        std::abs(nu.masses[i] - expected) > kMassTolerance)
      throw GeometryError(ErrorKind::MongeRequired, "masses must all equal 1/n");
}

std::vector<std::vector<double>> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             const CostFunction& cost) {
  const std::size_t n = mu.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i][j] = cost(mu.atoms[i], nu.atoms[j]);
  return c;
}

double matched_cost(const std::vector<double>& masses, const std::vector<std::vector<double>>& c,
                    const std::vector<std::size_t>& perm) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < perm.size(); ++i) sum.add(masses[i] * c[i][perm[i]]);
  return sum.value();
}

}  // namespace

void DiscreteMeasure::validate() const {
  if (atoms.empty()) throw GeometryError(ErrorKind::InvalidInput, "empty measure");
  if (atoms.size() != masses.size()) throw GeometryError(ErrorKind::SizeMismatch, "atoms vs masses");
  CompensatedSum total;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(masses[i] > 0.0)) throw GeometryError(ErrorKind::InvalidInput, "masses must be positive", i);
    if (atoms[i].size() != atoms.front().size())
      throw GeometryError(ErrorKind::SizeMismatch, "atom dimension", i);
    total.add(masses[i]);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance)
    throw GeometryError(ErrorKind::MeasureNotNormalized);
}

DiscreteMeasure DiscreteMeasure::make(std::vector<Vec> atoms, std::vector<double> masses) {
  DiscreteMeasure m{std::move(atoms), std::move(masses)};
  m.validate();
  return m;
}

double squared_euclidean(const Vec& a, const Vec& b) { return (a - b).squaredNorm(); }

CostFunction squared_geodesic_cost(ManifoldPtr man, ShootingOptions opts) {
  return [man = std::move(man), opts](const Vec& a, const Vec& b) {
    const Vec h = log_point(*man, a, b, opts);
    return man->inner(a, h, h);
  };
}

DiscreteMeasure pushforward_measure(const MapField& q) {
  if (std::abs(q.domain->total_weight() - 1.0) > kMassTolerance)
    throw GeometryError(ErrorKind::MeasureNotNormalized);
  DiscreteMeasure out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec& p = q.values[i];
    auto it = std::find_if(out.atoms.begin(), out.atoms.end(), [&](const Vec& a) { return a == p; });
    if (it == out.atoms.end()) {
      out.atoms.push_back(p);
      out.masses.push_back(q.domain->weight(i));
    } else {
      out.masses[static_cast<std::size_t>(it - out.atoms.begin())] += q.domain->weight(i);
    }
  }
  return out;
}

double transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const std::vector<std::size_t>& perm, const CostFunction& cost) {
  if (perm.size() != mu.size() || nu.size() != mu.size())
    throw GeometryError(ErrorKind::SizeMismatch, "permutation vs atom count");
  return matched_cost(mu.masses, cost_matrix(mu, nu, cost), perm);
}

Assignment wasserstein2_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostFunction& cost) {
  if (mu.size() > kBruteForceLimit || nu.size() > kBruteForceLimit)
    throw GeometryError(ErrorKind::UseAssignmentSolver);
  require_monge(mu, nu);
  const auto c = cost_matrix(mu, nu, cost);
  std::vector<std::size_t> perm(mu.size());
  std::iota(perm.begin(), perm.end(), 0);
  Assignment best{perm, matched_cost(mu.masses, c, perm)};
  // next_permutation walks lexicographic order, so strict improvement keeps
  // the smallest permutation among ties.
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double v = matched_cost(mu.masses, c, perm);
    if (v < best.cost) best = {perm, v};
  }
  return best;
}

Assignment wasserstein2_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostFunction& cost) {
  require_monge(mu, nu);
  const auto c = cost_matrix(mu, nu, cost);
  const std::size_t n = mu.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based potentials; column 0 is the virtual root of each augmenting path.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = c[r - 1][j - 1] - u[r] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t prev = way[col0];
      match[col0] = match[prev];
      col0 = prev;
    } while (col0 != 0);
  }

  Assignment out;
  out.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.perm[match[j] - 1] = j - 1;
  out.cost = matched_cost(mu.masses, c, out.perm);
  return out;
}

SubmersionResult submersion_check(const MapField& base, const MapField& phi,
                                  const CostFunction& cost, double tolerance) {
  if (!same_domain(base.domain, phi.domain) || base.size() != phi.size())
    throw GeometryError(ErrorKind::FieldMismatch);
  const DiscreteMeasure mu = DiscreteMeasure::make(base.values, base.domain->weights());
  const DiscreteMeasure nu = DiscreteMeasure::make(phi.values, phi.domain->weights());
  require_monge(mu, nu);

  SubmersionResult r;
  std::vector<std::size_t> identity(base.size());
  std::iota(identity.begin(), identity.end(), 0);
  const auto c = cost_matrix(mu, nu, cost);
  r.l2_cost = matched_cost(mu.masses, c, identity);
  const Assignment best = wasserstein2_assignment(mu, nu, cost);
  r.w2_cost = best.cost;
  r.optimal_perm = best.perm;
  r.inequality_holds = r.l2_cost >= r.w2_cost - tolerance;
  r.equality = std::abs(r.l2_cost - r.w2_cost) <= tolerance;
  return r;
}

}  // namespace mapgeom
