#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "mapgeom/dynamics.hpp"
#include "mapgeom/io.hpp"
#include "mapgeom/parallel.hpp"
#include "mapgeom/registry.hpp"
#include "mapgeom/reparam.hpp"
#include "mapgeom/transport.hpp"
#include "mapgeom/verification.hpp"

namespace mapgeom::cli {

namespace {

using io::json;

struct RunConfig {
  std::string subcommand;
  std::string manifold;
  std::string field, from, to, h, k, l, perm, source, target;
  std::string output, report_json, report_csv;
  int steps = kDefaultSteps;
  std::size_t snapshots = 101;
  int steps_per_snapshot = 10;
  std::uint64_t seed = 0;
  std::size_t instances = 100;
  unsigned threads = 0;
};

void emit(const RunConfig& cfg, const json& j, std::ostream& out) {
  if (cfg.output.empty())
    out << io::dump(j);
  else
    io::write_text_file(cfg.output, io::dump(j));
}

std::string fixed17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int cmd_list(std::ostream& out) {
  for (const auto& e : registry_listing())
    out << e.name << "\n  parameters: " << e.parameters << "\n  " << e.description << "\n";
  return kOk;
}

int cmd_geodesic(const RunConfig& cfg, std::ostream& out) {
  const auto f = io::field_from_json(io::read_json_file(cfg.field));
  const GeodesicRun run = integrate_geodesic(f.tangent(), cfg.snapshots, cfg.steps_per_snapshot);
  io::write_text_file(cfg.output, io::dump(io::to_json(run.path)));
  const json report = io::to_json(run.report, run.path.times);
  if (!cfg.report_json.empty()) io::write_text_file(cfg.report_json, io::dump(report));
  if (!cfg.report_csv.empty())
    io::write_text_file(cfg.report_csv, io::report_csv(run.report, run.path.times));
  out << "energy " << fixed17(path_energy(run.path)) << "\n"
      << "max_pointwise_geodesic_residual " << fixed17(run.report.max_pointwise_geodesic_residual)
      << "\nconstraint_drift " << fixed17(run.report.constraint_drift) << "\n";
  return kOk;
}

int cmd_exp(const RunConfig& cfg, std::ostream& out) {
  const auto f = io::field_from_json(io::read_json_file(cfg.field));
  emit(cfg, io::to_json(exp_field(f.tangent(), cfg.steps)), out);
  return kOk;
}

ShootingOptions shooting(const RunConfig& cfg) {
  ShootingOptions opts;
  opts.steps = cfg.steps;
  return opts;
}

int cmd_log(const RunConfig& cfg, std::ostream& out) {
  const auto a = io::field_from_json(io::read_json_file(cfg.from));
  const auto b = io::field_from_json(io::read_json_file(cfg.to));
  emit(cfg, io::to_json(log_field(a.map, b.map, shooting(cfg))), out);
  return kOk;
}

int cmd_distance(const RunConfig& cfg, std::ostream& out) {
  const auto a = io::field_from_json(io::read_json_file(cfg.from));
  const auto b = io::field_from_json(io::read_json_file(cfg.to));
  const double d = geodesic_distance(a.map, b.map, shooting(cfg));
  if (!cfg.output.empty()) io::write_text_file(cfg.output, io::dump(json{{"distance", d}}));
  out << fixed17(d) << "\n";
  return kOk;
}

int cmd_curvature(const RunConfig& cfg, std::ostream& out) {
  const TangentField h = io::field_from_json(io::read_json_file(cfg.h)).tangent();
  const TangentField k = io::field_from_json(io::read_json_file(cfg.k)).tangent();
  const TangentField l = io::field_from_json(io::read_json_file(cfg.l)).tangent();
  emit(cfg, io::to_json(curvature_field(h.base, h, k, l)), out);
  return kOk;
}

void print_table(const std::vector<OracleReport>& reports, std::ostream& out) {
  out << std::left << std::setw(36) << "check" << std::setw(8) << "result" << std::setw(14)
      << "max_error" << std::setw(12) << "tolerance"
      << "instances\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(36) << r.check_name << std::setw(8) << (r.passed ? "PASS" : "FAIL")
        << std::setw(14) << std::setprecision(3) << std::scientific << r.max_abs_error
        << std::setw(12) << r.tolerance << std::defaultfloat << r.instance_count << "\n";
  }
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const Manifold man = make_manifold(cfg.manifold);
  const auto reports = run_verification_suite(man, cfg.instances, cfg.seed);
  print_table(reports, out);
  if (!cfg.output.empty()) io::write_text_file(cfg.output, io::dump(io::to_json(reports)));
  for (const auto& r : reports)
    if (!r.passed) return kCheckFailed;
  return kOk;
}

int cmd_reparam(const RunConfig& cfg, std::ostream& out) {
  const TangentField h = io::field_from_json(io::read_json_file(cfg.field)).tangent();
  const auto perm = io::permutation_from_json(io::read_json_file(cfg.perm));
  const auto phi = DiscreteDiffeo::from_permutation(perm, *h.base.domain);

  const InvarianceReport inv = check_metric_invariance(phi, h.base, h, h);
  EquivarianceInputs in;
  in.h = h;
  in.k = h;
  in.l = h;
  in.xi = spray_field(h);
  in.steps = cfg.steps;
  std::vector<OracleReport> eq;
  for (auto op : {EquivariantOp::Connector, EquivariantOp::Spray, EquivariantOp::Exp})
    eq.push_back(check_equivariance(phi, op, in));
  eq.push_back(check_equivariance(phi, EquivariantOp::Curvature, in));

  bool ok = true;
  for (const auto& r : eq) ok = ok && r.passed;
  const bool invariance_ok = !inv.measure_preserving || std::abs(inv.lhs - inv.rhs) < 1e-12;
  ok = ok && invariance_ok;

  json j;
  j["invariance"] = io::to_json(inv);
  j["invariance"]["passed"] = invariance_ok;
  j["equivariance"] = io::to_json(eq);
  emit(cfg, j, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_transport(const RunConfig& cfg, std::ostream& out) {
  const DiscreteMeasure mu = io::measure_from_json(io::read_json_file(cfg.source));
  const DiscreteMeasure nu = io::measure_from_json(io::read_json_file(cfg.target));
  if (mu.size() != nu.size())
    throw GeometryError(ErrorKind::MongeRequired, "atom counts differ");
  std::vector<std::size_t> identity(mu.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;

  const Assignment best = wasserstein2_assignment(mu, nu);
  json j;
  j["identity_cost"] = transport_cost(mu, nu, identity);
  j["w2_cost"] = best.cost;
  j["optimal_perm"] = best.perm;
  if (mu.size() <= kBruteForceLimit) j["bruteforce_cost"] = wasserstein2_bruteforce(mu, nu).cost;
  emit(cfg, j, out);
  return kOk;
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidParameter:
    case ErrorKind::SizeMismatch:
    case ErrorKind::FieldMismatch:
    case ErrorKind::MeasureNotNormalized:
    case ErrorKind::MongeRequired:
    case ErrorKind::RepresentationMismatch:
    case ErrorKind::PointOffManifold:
    case ErrorKind::ChartBoundary:
    case ErrorKind::NoVelocities:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Riemannian geometry of the L2 metric on discretized mapping spaces", "mapgeom"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  app.add_option("--threads", cfg.threads, "Cap on worker threads (env MAPGEOM_THREADS)")
      ->check(CLI::PositiveNumber);
  app.require_subcommand(1);
  app.footer(
      "Manifold strings: name[:key=value]..., e.g. sphere:r=1.0:rep=embedded.\n"
      "Exit codes: 0 success, 1 check failed or no convergence, 2 input error.");

  auto add_steps = [&](CLI::App* sub) {
    sub->add_option("--steps", cfg.steps, "RK4 steps per unit time")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_output = [&](CLI::App* sub, bool required = false) {
    auto* o = sub->add_option("--output,-o", cfg.output, "Output file (default: stdout)");
    if (required) o->required();
  };
  auto existing = [](CLI::Option* o) { return o->check(CLI::ExistingFile)->required(); };

  app.add_subcommand("list-manifolds", "List registry manifolds and parameters");

  auto* geo = app.add_subcommand("geodesic", "Integrate an L2 geodesic from a field with vecs");
  existing(geo->add_option("--field", cfg.field, "Field file with vecs"));
  geo->add_option("--snapshots", cfg.snapshots, "Number of snapshots (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30))
      ->capture_default_str();
  geo->add_option("--steps-per-snapshot", cfg.steps_per_snapshot, "RK4 steps between snapshots")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  geo->add_option("--report-json", cfg.report_json, "Geodesic report as JSON");
  geo->add_option("--report-csv", cfg.report_csv, "Geodesic report as CSV");
  add_output(geo, true);

  auto* exp = app.add_subcommand("exp", "Exponential map of a tangent field");
  existing(exp->add_option("--field", cfg.field, "Field file with vecs"));
  add_steps(exp);
  add_output(exp);

  auto* log = app.add_subcommand("log", "Log map between two fields by shooting");
  existing(log->add_option("--from", cfg.from, "Base field"));
  existing(log->add_option("--to", cfg.to, "Target field"));
  add_steps(log);
  add_output(log);

  auto* dist = app.add_subcommand("distance", "L2 geodesic distance between two fields");
  existing(dist->add_option("--from", cfg.from, "First field"));
  existing(dist->add_option("--to", cfg.to, "Second field"));
  add_steps(dist);
  add_output(dist);

  auto* curv = app.add_subcommand("curvature", "Pointwise curvature R(h,k)l of three fields");
  existing(curv->add_option("--h-field", cfg.h, "Field file with vecs"));
  existing(curv->add_option("--k-field", cfg.k, "Field file with vecs"));
  existing(curv->add_option("--l-field", cfg.l, "Field file with vecs"));
  add_output(curv);

  auto* ver = app.add_subcommand("verify", "Run connector axioms and numerical oracles");
  ver->add_option("--manifold", cfg.manifold, "Registry string")->required();
  ver->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  ver->add_option("--instances", cfg.instances, "Random instances per check")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_output(ver);

  auto* rep = app.add_subcommand("reparam", "Invariance and equivariance under a permutation");
  existing(rep->add_option("--field", cfg.field, "Field file with vecs"));
  existing(rep->add_option("--perm", cfg.perm, "JSON array permutation"));
  add_steps(rep);
  add_output(rep);

  auto* tr = app.add_subcommand("transport", "Wasserstein-2 cost between two measures");
  existing(tr->add_option("--source", cfg.source, "Measure file"));
  existing(tr->add_option("--target", cfg.target, "Measure file"));
  add_output(tr);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    if (args.empty()) throw CLI::CallForHelp();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return args.empty() ? kInputError : kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  if (cfg.threads > 0) set_thread_cap(cfg.threads);
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (cfg.subcommand == "list-manifolds") return cmd_list(out);
    if (cfg.subcommand == "geodesic") return cmd_geodesic(cfg, out);
    if (cfg.subcommand == "exp") return cmd_exp(cfg, out);
    if (cfg.subcommand == "log") return cmd_log(cfg, out);
    if (cfg.subcommand == "distance") return cmd_distance(cfg, out);
    if (cfg.subcommand == "curvature") return cmd_curvature(cfg, out);
    if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
    if (cfg.subcommand == "reparam") return cmd_reparam(cfg, out);
    if (cfg.subcommand == "transport") return cmd_transport(cfg, out);
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kInputError : kCheckFailed;
  }
  return kInputError;
}

}  // namespace mapgeom::cli
