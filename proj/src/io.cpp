#include "mapgeom/io.hpp"

#include <fstream>
#include <sstream>

#include "mapgeom/registry.hpp"

namespace mapgeom::io {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw GeometryError(ErrorKind::InvalidInput, where + ": " + what);
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

Vec vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<Vec> rows_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of rows");
  std::vector<Vec> rows;
  rows.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    rows.push_back(vec_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return rows;
}

std::vector<double> reals_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json rows_to_json(const std::vector<Vec>& rows) {
  json out = json::array();
  for (const Vec& r : rows) out.push_back(std::vector<double>(r.data(), r.data() + r.size()));
  return out;
}

// Rethrows validation failures with the location prefixed.
template <class Fn>
auto located(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const GeometryError& e) {
    if (e.kind() == ErrorKind::InvalidParameter) throw;
    bad(where, e.what());
  }
}

FieldFile field_at(const json& j, const std::string& where) {
  const std::vector<double> weights =
      reals_from_json(member(member(j, "domain", where), "weights", where + ".domain"),
                      where + ".domain.weights");
  const json& man = member(j, "manifold", where);
  if (!man.is_string()) bad(where + ".manifold", "expected a registry string");
  ManifoldPtr manifold = make_shared_manifold(man.get<std::string>());
  DomainPtr domain = located(where + ".domain", [&] { return make_domain(weights); });
  std::vector<Vec> values = rows_from_json(member(j, "values", where), where + ".values");

  FieldFile f{located(where, [&] { return MapField::make(domain, manifold, std::move(values)); }),
              std::nullopt};
  if (j.contains("vecs")) {
    f.vecs = rows_from_json(j.at("vecs"), where + ".vecs");
    located(where, [&] { return TangentField::make(f.map, *f.vecs); });
  }
  return f;
}

}  // namespace

TangentField FieldFile::tangent() const {
  if (!vecs) throw GeometryError(ErrorKind::InvalidInput, "field has no 'vecs'");
  return {map, *vecs};
}

json to_json(const MapField& q) {
  json j;
  j["domain"]["weights"] = q.domain->weights();
  j["manifold"] = q.manifold->name;
  j["values"] = rows_to_json(q.values);
  return j;
}

json to_json(const TangentField& h) {
  json j = to_json(h.base);
  j["vecs"] = rows_to_json(h.vecs);
  return j;
}

FieldFile field_from_json(const json& j) { return field_at(j, "field"); }

json to_json(const FieldPath& path) {
  json j;
  j["times"] = path.times;
  j["maps"] = json::array();
  for (const auto& q : path.maps) j["maps"].push_back(to_json(q));
  if (path.has_velocities()) {
    j["velocities"] = json::array();
    for (const auto& v : path.velocities) j["velocities"].push_back(to_json(v));
  }
  return j;
}

FieldPath path_from_json(const json& j) {
  FieldPath path;
  path.times = reals_from_json(member(j, "times", "path"), "path.times");
  const json& maps = member(j, "maps", "path");
  if (!maps.is_array()) bad("path.maps", "expected an array of fields");
  for (std::size_t t = 0; t < maps.size(); ++t)
    path.maps.push_back(field_at(maps[t], "path.maps[" + std::to_string(t) + "]").map);
  if (j.contains("velocities")) {
    const json& vel = j.at("velocities");
    if (!vel.is_array()) bad("path.velocities", "expected an array of fields");
    for (std::size_t t = 0; t < vel.size(); ++t) {
      const std::string where = "path.velocities[" + std::to_string(t) + "]";
      const FieldFile f = field_at(vel[t], where);
      if (!f.vecs) bad(where, "missing field 'vecs'");
      path.velocities.push_back(f.tangent());
    }
  }
  located("path", [&] {
    path.validate();
    return 0;
  });
  return path;
}

json to_json(const GeodesicReport& report, const std::vector<double>& times) {
  json j;
  j["times"] = times;
  j["energy_series"] = report.energy_series;
  j["residual_series"] = report.residual_series;
  j["drift_series"] = report.drift_series;
  j["max_pointwise_geodesic_residual"] = report.max_pointwise_geodesic_residual;
  j["constraint_drift"] = report.constraint_drift;
  return j;
}

std::string report_csv(const GeodesicReport& report, const std::vector<double>& times) {
  std::ostringstream os;
  os.precision(17);
  os << "time,energy,residual,drift\n";
  for (std::size_t j = 0; j < times.size(); ++j)
    os << times[j] << ',' << report.energy_series[j] << ',' << report.residual_series[j] << ','
       << report.drift_series[j] << '\n';
  return os.str();
}

json to_json(const DiscreteMeasure& mu) {
  json j;
  j["atoms"] = rows_to_json(mu.atoms);
  j["masses"] = mu.masses;
  return j;
}

DiscreteMeasure measure_from_json(const json& j) {
  auto atoms = rows_from_json(member(j, "atoms", "measure"), "measure.atoms");
  auto masses = reals_from_json(member(j, "masses", "measure"), "measure.masses");
  return located("measure", [&] { return DiscreteMeasure::make(std::move(atoms), std::move(masses)); });
}

std::vector<std::size_t> permutation_from_json(const json& j) {
  const json& arr = j.is_object() ? member(j, "perm", "permutation") : j;
  if (!arr.is_array()) bad("permutation", "expected an array of indices");
  std::vector<std::size_t> perm;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number_unsigned())
      bad("permutation[" + std::to_string(i) + "]", "expected a non-negative integer");
    perm.push_back(arr[i].get<std::size_t>());
  }
  return perm;
}

json to_json(const OracleReport& r) {
  return {{"check_name", r.check_name},
          {"max_abs_error", r.max_abs_error},
          {"tolerance", r.tolerance},
          {"passed", r.passed},
          {"instance_count", r.instance_count}};
}

json to_json(const std::vector<OracleReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

json to_json(const InvarianceReport& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"pulled_back", r.pulled_back},
          {"measure_preserving", r.measure_preserving}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError(ErrorKind::InvalidInput, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw GeometryError(ErrorKind::InvalidInput, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError(ErrorKind::InvalidInput, "cannot write " + path.string());
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace mapgeom::io
