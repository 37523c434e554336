#include "mapgeom/error.hpp"

#include <sstream>

namespace mapgeom {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateMetric: return "degenerate metric";
    case ErrorKind::ChartBoundary: return "chart boundary";
    case ErrorKind::PointOffManifold: return "point off manifold";
    case ErrorKind::GeodesicLeftDomain: return "geodesic left domain";
    case ErrorKind::CurveLeftDomain: return "curve left domain";
    case ErrorKind::FieldMismatch: return "field mismatch";
    case ErrorKind::NotVertical: return "not vertical";
    case ErrorKind::NoConvergence: return "no convergence";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::SizeMismatch: return "size mismatch";
    case ErrorKind::MeasureNotNormalized: return "measure not normalized";
    case ErrorKind::MongeRequired: return "Monge regime required";
    case ErrorKind::UseAssignmentSolver: return "use assignment solver";
    case ErrorKind::NoVelocities: return "no velocities";
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::RepresentationMismatch: return "representation mismatch";
  }
  return "unknown error";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& detail,
                           std::optional<std::size_t> sample,
                           std::optional<double> time) {
  std::ostringstream os;
  os << to_string(kind);
  if (!detail.empty()) os << ": " << detail;
  if (sample) os << " [sample " << *sample << "]";
  if (time) os << " [t=" << *time << "]";
  return os.str();
}

}  // namespace

GeometryError::GeometryError(ErrorKind kind, const std::string& detail,
                             std::optional<std::size_t> sample,
                             std::optional<double> time)
    : std::runtime_error(format_message(kind, detail, sample, time)),
      kind_(kind),
      detail_(detail),
      sample_(sample),
      time_(time) {}

GeometryError GeometryError::with_sample(std::size_t sample) const {
  return GeometryError(kind_, detail_, sample, time_);
}

}  // namespace mapgeom
