#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mapgeom/manifold.hpp"

namespace mapgeom {

// Built-in targets. Registry strings are a name followed by colon-separated
// key=value pairs, e.g. "sphere:r=1.0:rep=embedded".
Manifold flat_manifold(int n, Representation rep = Representation::Chart);
Manifold sphere_chart(double radius);
Manifold sphere_embedded(double radius, int dim = 2);
Manifold poincare_half_plane();
Manifold paraboloid();

// Parses a registry string. Throws GeometryError(InvalidParameter) on
// unknown names, unknown or repeated keys, and out-of-range values.
Manifold make_manifold(std::string_view spec);
std::shared_ptr<const Manifold> make_shared_manifold(std::string_view spec);

struct RegistryEntry {
  std::string name;
  std::string parameters;
  std::string description;
};

std::vector<RegistryEntry> registry_listing();

}  // namespace mapgeom
