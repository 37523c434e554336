#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mapgeom/mapspace.hpp"
#include "mapgeom/verification.hpp"

namespace mapgeom {

// A permutation of quadrature nodes standing in for phi in Diff(M).
// Acting on fields: (q o phi)_i = q_{perm[i]}. The pulled-back measure
// phi^* mu has weights w_{perm[i]}; phi preserves mu iff those equal w_i.
struct DiscreteDiffeo {
  std::vector<std::size_t> perm;
  std::vector<double> pulled_weights;

  static DiscreteDiffeo from_permutation(std::vector<std::size_t> perm,
                                         const QuadratureDomain& domain);
  static DiscreteDiffeo identity(const QuadratureDomain& domain);

  std::size_t size() const { return perm.size(); }
  void validate() const;
  bool is_measure_preserving(const QuadratureDomain& domain) const;
  QuadratureDomain pulled_domain() const;
};

// phi o psi, i.e. perm[i] = phi.perm[psi.perm[i]].
DiscreteDiffeo compose(const DiscreteDiffeo& phi, const DiscreteDiffeo& psi,
                       const QuadratureDomain& domain);

DiscreteDiffeo random_diffeo(const QuadratureDomain& domain, Rng& rng);

// Fields keep the domain (M, mu); only the samples are reindexed.
MapField act_on_map(const DiscreteDiffeo& phi, const MapField& q);
TangentField act_on_tangent(const DiscreteDiffeo& phi, const TangentField& h);
SecondTangentField act_on_second(const DiscreteDiffeo& phi, const SecondTangentField& xi);

struct InvarianceReport {
  // G_{q o phi}(h o phi, k o phi) against the fixed measure mu.
  double lhs = 0.0;
  // G_q(h, k).
  double rhs = 0.0;
  // The acted fields integrated against phi^* mu; equals rhs for every phi.
  double pulled_back = 0.0;
  bool measure_preserving = false;
};

InvarianceReport check_metric_invariance(const DiscreteDiffeo& phi, const MapField& q,
                                         const TangentField& h, const TangentField& k);

enum class EquivariantOp { Connector, Spray, Exp, Curvature };

std::optional<EquivariantOp> parse_equivariant_op(const std::string& name);
const char* to_string(EquivariantOp op);

struct EquivarianceInputs {
  std::optional<SecondTangentField> xi;  // connector
  std::optional<TangentField> h;         // spray, exp, curvature
  std::optional<TangentField> k;         // curvature
  std::optional<TangentField> l;         // curvature
  int steps = kDefaultSteps;             // exp
};

// Compares op(inputs o phi) with op(inputs) o phi. Passes only on bitwise
// equality; max_abs_error records the largest coordinate difference.
OracleReport check_equivariance(const DiscreteDiffeo& phi, EquivariantOp op,
                                const EquivarianceInputs& inputs);

}  // namespace mapgeom
