#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapgeom/dynamics.hpp"
#include "mapgeom/reparam.hpp"
#include "mapgeom/transport.hpp"
#include "mapgeom/verification.hpp"

namespace mapgeom::io {

using nlohmann::json;

// Field files: {"domain": {"weights": [...]}, "manifold": "<registry string>",
// "values": [[...], ...], "vecs": [[...], ...] (optional)}.
struct FieldFile {
  MapField map;
  std::optional<std::vector<Vec>> vecs;

  // Throws InvalidInput when the file carries no vecs.
  TangentField tangent() const;
};

json to_json(const MapField& q);
json to_json(const TangentField& h);
FieldFile field_from_json(const json& j);

// {"times": [...], "maps": [<field>...], "velocities": [<field with vecs>...]}
json to_json(const FieldPath& path);
FieldPath path_from_json(const json& j);

json to_json(const GeodesicReport& report, const std::vector<double>& times);
// Header "time,energy,residual,drift", one row per snapshot.
std::string report_csv(const GeodesicReport& report, const std::vector<double>& times);

// {"atoms": [[...]...], "masses": [...]}
json to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const json& j);

std::vector<std::size_t> permutation_from_json(const json& j);

json to_json(const OracleReport& r);
json to_json(const std::vector<OracleReport>& reports);
json to_json(const InvarianceReport& r);

// File helpers; failures become GeometryError(InvalidInput) naming the path.
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
// Pretty-printed with a trailing newline.
std::string dump(const json& j);

}  // namespace mapgeom::io
