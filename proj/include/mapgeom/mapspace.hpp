#pragma once

#include <cmath>
#include <memory>
#include <type_traits>
#include <vector>

#include "mapgeom/manifold.hpp"
#include "mapgeom/parallel.hpp"

namespace mapgeom {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Discretized (M, mu): m samples with positive weights. Coordinates on M
// are optional and only kept for provenance.
class QuadratureDomain {
 public:
  explicit QuadratureDomain(std::vector<double> weights, std::vector<double> coordinates = {});

  // Trapezoid rule on [a, b] with m >= 2 nodes.
  static QuadratureDomain trapezoid_interval(std::size_t m, double a = 0.0, double b = 1.0);
  // Equal weights on a circle of the given circumference.
  static QuadratureDomain uniform_circle(std::size_t m, double length = 1.0);

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  double total_weight() const { return total_; }
  const std::vector<double>& coordinates() const { return coordinates_; }

  bool operator==(const QuadratureDomain& other) const { return weights_ == other.weights_; }

 private:
  std::vector<double> weights_;
  std::vector<double> coordinates_;
  double total_ = 0.0;
};

using DomainPtr = std::shared_ptr<const QuadratureDomain>;
using ManifoldPtr = std::shared_ptr<const Manifold>;

DomainPtr make_domain(std::vector<double> weights);

bool same_domain(const DomainPtr& a, const DomainPtr& b);
bool same_manifold(const ManifoldPtr& a, const ManifoldPtr& b);

// q in C(M, N) sampled at the quadrature nodes.
struct MapField {
  DomainPtr domain;
  ManifoldPtr manifold;
  std::vector<Vec> values;

  // Checks sizes and that every value lies in the chart domain / on N.
  static MapField make(DomainPtr domain, ManifoldPtr manifold, std::vector<Vec> values);
  void validate() const;
  std::size_t size() const { return values.size(); }
};

// h in T_q C(M, N) = C(M, TN): one tangent vector per sample.
struct TangentField {
  MapField base;
  std::vector<Vec> vecs;

  static TangentField make(MapField base, std::vector<Vec> vecs);
  static TangentField zero(const MapField& base);
  void validate() const;
  std::size_t size() const { return vecs.size(); }
};

// xi in C(M, TTN).
struct SecondTangentField {
  DomainPtr domain;
  ManifoldPtr manifold;
  std::vector<SecondTangentVector> quads;

  static SecondTangentField make(DomainPtr domain, ManifoldPtr manifold,
                                 std::vector<SecondTangentVector> quads);
  void validate() const;
  std::size_t size() const { return quads.size(); }
};

void require_same_base(const TangentField& h, const MapField& q);

// Applies f sample by sample (in parallel when worthwhile). A failure at
// sample i is rethrown as a GeometryError carrying i.
template <class T, class Fn>
auto lift_left_composition(const std::vector<T>& samples, Fn&& f)
    -> std::vector<std::decay_t<std::invoke_result_t<Fn&, const T&>>> {
  using R = std::decay_t<std::invoke_result_t<Fn&, const T&>>;
  std::vector<R> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    try {
      out[i] = f(samples[i]);
    } catch (const GeometryError& e) {
      throw e.with_sample(i);
    } catch (const std::exception& e) {
      throw GeometryError(ErrorKind::InvalidInput, e.what(), i);
    }
  });
  return out;
}

std::vector<TangentVector> tangent_samples(const TangentField& h);

// G_q(h, k) = sum_i w_i g_{q_i}(h_i, k_i), compensated, in index order.
double l2_inner(const MapField& q, const TangentField& h, const TangentField& k);
double l2_inner(const TangentField& h, const TangentField& k);
double l2_norm(const TangentField& h);

// Base-point projection L_{pi_N}: TangentField -> MapField.
MapField base_projection(const TangentField& h);

TangentField connector_field(const SecondTangentField& xi);
SecondTangentField spray_field(const TangentField& h);
MapField exp_field(const TangentField& h, int steps = kDefaultSteps);
TangentField curvature_field(const MapField& q, const TangentField& h, const TangentField& k,
                             const TangentField& l);

SecondTangentField vertical_lift_field(const TangentField& h, const TangentField& k);
TangentField vertical_projection_field(const SecondTangentField& xi, double tol = 0.0);
SecondTangentField canonical_flip_field(const SecondTangentField& xi);

// Explicit chart -> ambient conversion through the manifold's embedding.
MapField embed_map_field(const MapField& q, ManifoldPtr target);
TangentField embed_tangent_field(const TangentField& h, ManifoldPtr target);

}  // namespace mapgeom
