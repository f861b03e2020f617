#include "simplexflow/serialize.hpp"

#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>

namespace simplexflow {

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a number");
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json points_json(const PointSet& p) {
  Json a = Json::array();
  for (Eigen::Index j = 0; j < p.cols(); ++j) a.push_back(vector_json(p.col(j)));
  return a;
}

Json measure_json(const DiscreteMeasure& mu) {
  return {{"dim", mu.dim()}, {"points", points_json(mu.points())}, {"weights", vector_json(mu.weights())}};
}

DiscreteMeasure measure_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("measure must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "dim" && key != "points" && key != "weights")
      throw std::invalid_argument("unknown measure key: " + key);
  }
  if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
    throw std::invalid_argument("measure needs a non-empty \"points\" array");
  const Json& pts = j["points"];
  const auto count = static_cast<Eigen::Index>(pts.size());
  if (!pts[0].is_array()) throw std::invalid_argument("points must be arrays of coordinates");
  const auto dim = static_cast<Eigen::Index>(pts[0].size());
  if (j.contains("dim") && j["dim"].get<Eigen::Index>() != dim)
    throw std::invalid_argument("\"dim\" disagrees with the point coordinates");
  if (dim == 0) throw std::invalid_argument("points must have at least one coordinate");
  PointSet p(dim, count);
  for (Eigen::Index c = 0; c < count; ++c) {
    const Json& row = pts[static_cast<std::size_t>(c)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
      throw std::invalid_argument("points have inconsistent dimensions");
    for (Eigen::Index d = 0; d < dim; ++d) p(d, c) = number_from(row[static_cast<std::size_t>(d)]);
  }
  if (!j.contains("weights")) return DiscreteMeasure::uniform(std::move(p));
  const Json& w = j["weights"];
  if (!w.is_array() || static_cast<Eigen::Index>(w.size()) != count)
    throw std::invalid_argument("\"weights\" must match the number of points");
  Vector m(count);
  for (Eigen::Index c = 0; c < count; ++c) m[c] = number_from(w[static_cast<std::size_t>(c)]);
  return DiscreteMeasure(std::move(p), std::move(m));
}

Json params_json(const PowerLawParams& params) {
  if (params.is_hard()) return {{"alpha", "inf"}, {"beta", number(params.beta())}};
  return {{"alpha", number(params.alpha())}, {"beta", number(params.beta())}};
}

Json flow_config_json(const FlowConfig& c) {
  return {{"dt_init", number(c.dt_init)},       {"t_max", number(c.t_max)},
          {"integrator", to_string(c.integrator)}, {"adapt", c.adapt},
          {"grad_tol", number(c.grad_tol)},     {"record_every", c.record_every},
          {"dt_max", number(c.dt_max)},         {"max_steps", c.max_steps}};
}

Json minimize_config_json(const MinimizeConfig& c) {
  return {{"n", c.n},
          {"atoms", c.atoms},
          {"restarts", c.restarts},
          {"init_radius", number(c.init_radius)},
          {"cluster_tol", number(c.cluster_tol)},
          {"polish_iters", c.polish_iters},
          {"seed", c.seed},
          {"flow", flow_config_json(c.flow)}};
}

Json perturbation_config_json(const PerturbationConfig& c) {
  return {{"radius", number(c.radius)}, {"trials", c.trials}, {"split_factor", c.split_factor}, {"seed", c.seed}};
}

Json report_json(const EnergyReport& r) {
  return {{"energy", number(r.value)},
          {"potential_at_atoms", vector_json(r.potential_at_atoms)},
          {"el_residual", number(r.el_residual)}};
}

Json report_json(const EulerLagrangeResidual& r) {
  Json v = Json::array();
  for (const ProbeViolation& p : r.violations)
    v.push_back({{"point", vector_json(p.point)}, {"potential", number(p.potential)}});
  return {{"spread", number(r.spread)},
          {"energy_gap", number(r.energy_gap)},
          {"min_atom_potential", number(r.min_atom_potential)},
          {"violations", v}};
}

Json report_json(const CouplingPlan& plan) {
  Json e = Json::array();
  for (const CouplingPlan::Entry& x : plan.entries) e.push_back({x.row, x.col, number(x.mass)});
  return {{"rows", plan.rows}, {"cols", plan.cols}, {"entries", e}};
}

Json report_json(const TransportResult& r) {
  return {{"distance", number(r.distance)}, {"plan", report_json(r.plan)}};
}

Json report_json(const FlowTrace& t) {
  Json snaps = Json::array();
  for (std::size_t k = 0; k < t.configs.size(); ++k)
    snaps.push_back({{"t", number(t.config_times[k])}, {"measure", measure_json(t.configs[k])}});
  return {{"terminated_by", to_string(t.terminated_by)},
          {"accepted_steps", t.accepted_steps},
          {"rejected_steps", t.rejected_steps},
          {"final_time", number(t.times.empty() ? 0.0 : t.times.back())},
          {"initial_energy", number(t.energies.empty() ? 0.0 : t.energies.front())},
          {"final_energy", number(t.energies.empty() ? 0.0 : t.energies.back())},
          {"max_barycenter_drift", number(t.max_barycenter_drift)},
          {"final_speed", number(t.final_speed)},
          {"seed", t.seed},
          {"final", measure_json(t.final_config())},
          {"snapshots", snaps}};
}

Json report_json(const MinimizerReport& r) {
  Json restarts = Json::array();
  for (const RestartOutcome& o : r.restarts)
    restarts.push_back({{"index", o.index},
                        {"ok", o.ok},
                        {"termination", o.termination},
                        {"energy", number(o.energy)},
                        {"atoms", o.atoms}});
  Json masses = Json::array();
  for (double m : r.mass_profile) masses.push_back(number(m));
  return {{"best", measure_json(r.best)},
          {"energy", number(r.energy)},
          {"atom_count_after_collapse", r.atom_count_after_collapse},
          {"is_unit_simplex", r.is_unit_simplex},
          {"mass_profile", masses},
          {"diam", number(r.diam)},
          {"el_spread", number(r.el_spread)},
          {"candidate_min", number(r.candidate_min)},
          {"converged", r.converged},
          {"restarts", restarts}};
}

Json report_json(const CandidateEnergies& c) {
  return {{"simplex", number(c.simplex)},
          {"sphere", number(c.sphere)},
          {"sphere_radius", number(c.sphere_radius)},
          {"sphere_atoms", c.sphere_atoms},
          {"single_atom", number(c.single_atom)},
          {"min", number(c.min())}};
}

Json report_json(const MaxVarianceResult& r) {
  return {{"value", number(r.value)},
          {"weights", vector_json(r.weights)},
          {"scale", number(r.scale)},
          {"kkt_residual", number(r.kkt_residual)},
          {"iterations", r.iterations}};
}

Json report_json(const IsodiametricReport& r) {
  Json ext = Json::array();
  for (const SweepCase& c : r.extremal)
    ext.push_back({{"cloud", c.cloud}, {"points", c.points}, {"embeds_simplex", c.embeds_simplex}, {"value", number(c.value)}});
  return {{"n", r.n},
          {"clouds", r.clouds},
          {"bound", number(r.bound)},
          {"max_value", number(r.max_value)},
          {"min_simplex_value", number(r.min_simplex_value)},
          {"max_noise_weight", number(r.max_noise_weight)},
          {"max_kkt_residual", number(r.max_kkt_residual)},
          {"bound_ok", r.bound_ok},
          {"attained_ok", r.attained_ok},
          {"extremal", ext}};
}

Json report_json(const VertexPotentialReport& r) {
  Json arg = Json::array();
  for (const Vector& x : r.argmin) arg.push_back(vector_json(x));
  return {{"beta", number(r.beta)},
          {"n", r.n},
          {"grid_h", number(r.grid_h)},
          {"grid_points", r.grid_points},
          {"min_value", number(r.min_value)},
          {"argmin", arg},
          {"argmin_vertex_distance", number(r.argmin_vertex_distance)},
          {"margin", number(r.margin)},
          {"v_vertex", number(r.v_vertex)},
          {"v_vertex_expected", number(r.v_vertex_expected)},
          {"v_center", number(r.v_center)},
          {"v_center_expected", number(r.v_center_expected)},
          {"pass", r.pass}};
}

Json report_json(const LocalMinReport& r) {
  Json dec = Json::array();
  for (const VertexDecomposition& d : r.worst_decomposition)
    dec.push_back({{"mass", number(d.mass)},
                   {"variance", number(d.variance)},
                   {"barycenter_shift", number(d.barycenter_shift)},
                   {"edge_defect", number(d.edge_defect)}});
  const ThresholdConstants& c = r.constants;
  return {{"config", perturbation_config_json(r.config)},
          {"constants",
           {{"rho", number(c.rho)},
            {"beta_star", number(c.beta_star)},
            {"alpha_star", number(c.alpha_star)},
            {"eta", number(c.eta)},
            {"lambda", number(c.lambda)},
            {"epsilon", number(c.epsilon)},
            {"variance_coefficient", number(c.variance_coefficient)}}},
          {"energy_hat", number(r.energy_hat)},
          {"min_gap", number(r.min_gap)},
          {"violations", r.violations},
          {"worst_trial", r.worst_trial},
          {"worst_decomposition", dec},
          {"lower_bound_worst", number(r.lower_bound_worst)},
          {"pass", r.pass}};
}

Json report_json(const ThresholdEstimate& r) {
  Json m = Json::array();
  for (double x : r.masses) m.push_back(number(x));
  return {{"lower", number(r.lower)},
          {"upper", number(r.upper)},
          {"beta", number(r.beta)},
          {"masses", m},
          {"method", r.method},
          {"analytic_bound", number(r.analytic_bound)},
          {"evaluations", r.evaluations}};
}

Json report_json(const GammaReport& r) {
  Json rows = Json::array();
  for (const GammaRow& g : r.rows)
    rows.push_back({{"alpha", number(g.alpha)},
                    {"energy", number(g.energy)},
                    {"distance", number(g.distance)},
                    {"is_unit_simplex", g.is_unit_simplex},
                    {"atoms", g.atoms}});
  return {{"beta", number(r.beta)}, {"n", r.n}, {"rows", rows}, {"monotone_ok", r.monotone_ok}};
}

Json report_json(const std::vector<JungRow>& rows) {
  Json out = Json::array();
  for (const JungRow& r : rows)
    out.push_back({{"n", r.n},
                   {"jung_radius", number(r.jung_radius)},
                   {"circumradius", number(r.circumradius)},
                   {"variance", number(r.variance)},
                   {"max_variance", number(r.max_variance)},
                   {"hilbert_defect", number(r.hilbert_defect)},
                   {"pass", r.pass}});
  return out;
}

std::string flow_trace_csv(const FlowTrace& trace) {
  std::ostringstream out;
  out << "t,E\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    out << Json(trace.times[k]).dump() << ',' << number(trace.energies[k]).dump() << '\n';
  return out.str();
}

std::vector<std::string> validate_output_document(const Json& doc) {
  static const std::set<std::string> commands{
      "energy", "flow", "minimize", "metric", "verify variance", "verify vertex-potential",
      "verify local-min", "verify jung", "verify gamma", "scan-threshold", "candidates"};
  std::vector<std::string> errors;
  if (!doc.is_object()) return {"document must be a JSON object"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "command" && key != "config" && key != "result") errors.push_back("unexpected key: " + key);
  }
  if (!doc.contains("command") || !doc["command"].is_string())
    errors.emplace_back("\"command\" must be a string");
  else if (!commands.count(doc["command"].get<std::string>()))
    errors.push_back("unknown command: " + doc["command"].get<std::string>());
  if (!doc.contains("config") || !doc["config"].is_object())
    errors.emplace_back("\"config\" must be an object");
  else if (!doc["config"].contains("seed") || !doc["config"]["seed"].is_number_integer() ||
           doc["config"]["seed"].get<std::int64_t>() < 0)
    errors.emplace_back("\"config\" must record the seed");
  if (!doc.contains("result") || !(doc["result"].is_object() || doc["result"].is_array()))
    errors.emplace_back("\"result\" must be an object or array");
  return errors;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace simplexflow
