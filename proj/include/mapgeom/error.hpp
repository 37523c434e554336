#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mapgeom {

enum class ErrorKind {
  DegenerateMetric,
  ChartBoundary,
  PointOffManifold,
  GeodesicLeftDomain,
  CurveLeftDomain,
  FieldMismatch,
  NotVertical,
  NoConvergence,
  InvalidParameter,
  SizeMismatch,
  MeasureNotNormalized,
  MongeRequired,
  UseAssignmentSolver,
  NoVelocities,
  InvalidInput,
  RepresentationMismatch,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library. Field-level operations attach the
// sample index; integrators attach the time at which the domain was left.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorKind kind, const std::string& detail = {},
                std::optional<std::size_t> sample = std::nullopt,
                std::optional<double> time = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> sample() const noexcept { return sample_; }
  std::optional<double> time() const noexcept { return time_; }
  const std::string& detail() const noexcept { return detail_; }

  GeometryError with_sample(std::size_t sample) const;

 private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<std::size_t> sample_;
  std::optional<double> time_;
};

}  // namespace mapgeom
