#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/energy.hpp"
#include "simplexflow/kernel.hpp"
#include "simplexflow/minimize.hpp"
#include "simplexflow/parallel.hpp"
#include "simplexflow/serialize.hpp"
#include "simplexflow/transport.hpp"
#include "simplexflow/verify.hpp"

namespace simplexflow {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Kind { kInt, kUInt, kReal, kExponent, kBool, kString, kRealList, kMeasure };

struct Field {
  std::string key;
  Kind kind;
  Json fallback;  // null means required
  std::string help;
};

struct Outcome {
  Json result;
  std::string csv;  // empty when the command has no tabular form
  bool numerical_failure = false;
};

struct Command {
  std::string name;  // "verify gamma" for nested commands
  std::string help;
  std::vector<Field> fields;
  std::function<Outcome(const Json&)> run;
};

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(key + ": expected a number, got '" + text + "'");
  }
  if (used != text.size()) throw UsageError(key + ": expected a number, got '" + text + "'");
  return v;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Json canonical_measure(const Json& j) {
  try {
    return measure_json(measure_from_json(j));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("measure: ") + e.what());
  }
}

// Converts a command-line string into the field's JSON representation.
Json from_flag(const Field& f, const std::string& text) {
  switch (f.kind) {
    case Kind::kInt:
    case Kind::kUInt: {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(text, &used);
      } catch (const std::exception&) {
        throw UsageError(f.key + ": expected an integer, got '" + text + "'");
      }
      if (used != text.size()) throw UsageError(f.key + ": expected an integer, got '" + text + "'");
      if (f.kind == Kind::kUInt) {
        if (v < 0) throw UsageError(f.key + ": must be non-negative");
        return static_cast<std::uint64_t>(std::stoull(text));
      }
      return v;
    }
    case Kind::kReal: return parse_real(f.key, text);
    case Kind::kExponent:
      if (text == "inf") return "inf";
      return parse_real(f.key, text);
    case Kind::kBool:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw UsageError(f.key + ": expected true or false");
    case Kind::kString: return text;
    case Kind::kRealList: {
      Json list = Json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) list.push_back(parse_real(f.key, item));
      return list;
    }
    case Kind::kMeasure: {
      // A value that starts with '{' is an inline measure, anything else a path.
      const auto first = text.find_first_not_of(" \t\n");
      if (first != std::string::npos && text[first] == '{') {
        try {
          return canonical_measure(Json::parse(text));
        } catch (const Json::parse_error& e) {
          throw UsageError(flag_name(f.key) + ": " + e.what());
        }
      }
      return canonical_measure(load_json_file(text));
    }
  }
  return nullptr;
}

// Type-checks a value taken from a --config file.
Json from_config(const Field& f, const Json& v) {
  auto fail = [&](const char* what) { return UsageError(f.key + ": expected " + std::string(what)); };
  switch (f.kind) {
    case Kind::kInt:
      if (!v.is_number_integer()) throw fail("an integer");
      return v;
    case Kind::kUInt:
      if (!v.is_number_unsigned()) throw fail("a non-negative integer");
      return v;
    case Kind::kReal:
      if (!v.is_number()) throw fail("a number");
      return v.get<double>();
    case Kind::kExponent:
      if (v.is_string() && v.get<std::string>() == "inf") return v;
      if (!v.is_number()) throw fail("a number or \"inf\"");
      return v.get<double>();
    case Kind::kBool:
      if (!v.is_boolean()) throw fail("a boolean");
      return v;
    case Kind::kString:
      if (!v.is_string()) throw fail("a string");
      return v;
    case Kind::kRealList: {
      if (!v.is_array()) throw fail("an array of numbers");
      Json list = Json::array();
      for (const Json& x : v) {
        if (!x.is_number()) throw fail("an array of numbers");
        list.push_back(x.get<double>());
      }
      return list;
    }
    case Kind::kMeasure:
      if (v.is_string()) return canonical_measure(load_json_file(v.get<std::string>()));
      if (v.is_object()) return canonical_measure(v);
      throw fail("a measure object or a path");
  }
  return nullptr;
}

// ---- typed access to a resolved config -------------------------------------

double real(const Json& c, const char* key) { return c.at(key).get<double>(); }
int integer(const Json& c, const char* key) {
  const long long v = c.at(key).get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw UsageError(std::string(key) + ": out of range");
  return static_cast<int>(v);
}
std::uint64_t seed_of(const Json& c) { return c.at("seed").get<std::uint64_t>(); }

std::vector<double> real_list(const Json& c, const char* key) {
  return c.at(key).get<std::vector<double>>();
}

PowerLawParams params_of(const Json& c) {
  const double beta = real(c, "beta");
  const Json& a = c.at("alpha");
  if (a.is_string()) return PowerLawParams::hard_confinement(beta);
  const double alpha = a.get<double>();
  if (alpha == beta) return PowerLawParams::null_line(beta);
  return PowerLawParams::finite(alpha, beta);
}

FlowConfig flow_of(const Json& c) {
  FlowConfig f;
  f.dt_init = real(c, "dt_init");
  f.t_max = real(c, "t_max");
  const std::string integ = c.at("integrator").get<std::string>();
  if (integ == "rk4")
    f.integrator = Integrator::kRk4;
  else if (integ == "euler")
    f.integrator = Integrator::kEuler;
  else
    throw UsageError("integrator must be euler or rk4");
  f.adapt = c.at("adapt").get<bool>();
  f.grad_tol = real(c, "grad_tol");
  f.record_every = integer(c, "record_every");
  f.dt_max = real(c, "dt_max");
  f.max_steps = c.at("max_steps").get<long>();
  return f;
}

MinimizeConfig minimize_of(const Json& c) {
  MinimizeConfig m;
  m.n = integer(c, "n");
  m.atoms = integer(c, "atoms");
  m.restarts = integer(c, "restarts");
  m.init_radius = real(c, "init_radius");
  m.cluster_tol = real(c, "cluster_tol");
  m.polish_iters = integer(c, "polish_iters");
  m.flow.t_max = real(c, "t_max");
  m.flow.grad_tol = real(c, "grad_tol");
  m.seed = seed_of(c);
  return m;
}

std::vector<Field> minimize_fields() {
  return {{"atoms", Kind::kInt, 60, "atoms per restart"},
          {"restarts", Kind::kInt, 8, "independent restarts"},
          {"init_radius", Kind::kReal, 0.0, "initial ball radius (0 = zero of the potential)"},
          {"cluster_tol", Kind::kReal, 1e-3, "single-linkage collapse distance"},
          {"polish_iters", Kind::kInt, 4000, "polish iterations"},
          {"t_max", Kind::kReal, 500.0, "flow time limit per restart"},
          {"grad_tol", Kind::kReal, 1e-7, "flow speed tolerance"}};
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  for (const std::string& c : cells) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

std::string num_text(double x) { return number(x).dump(); }

std::vector<Command> command_table() {
  const Field alpha{"alpha", Kind::kExponent, nullptr, "attraction exponent (number or inf)"};
  const Field beta{"beta", Kind::kReal, nullptr, "repulsion exponent"};
  std::vector<Command> t;

  t.push_back({"energy", "energy, potentials and Euler-Lagrange residual of a measure",
               {alpha, beta, {"measure", Kind::kMeasure, nullptr, "measure JSON file or inline object"}},
               [](const Json& c) {
                 const PowerLawParams p = params_of(c);
                 const DiscreteMeasure mu = measure_from_json(c.at("measure"));
                 if (p.is_hard()) return Outcome{Json{{"energy", number(energy(mu, p))}}, "", false};
                 Json r = report_json(energy_report(mu, p));
                 r["euler_lagrange"] = report_json(euler_lagrange_residual(mu, p));
                 return Outcome{r, "", false};
               }});

  t.push_back({"flow", "integrate the aggregation flow",
               {alpha, beta, {"measure", Kind::kMeasure, nullptr, "initial measure JSON file"},
                {"dt_init", Kind::kReal, 1e-2, "initial step"}, {"t_max", Kind::kReal, 100.0, "time limit"},
                {"integrator", Kind::kString, "rk4", "euler or rk4"},
                {"adapt", Kind::kBool, true, "energy-monitored step control"},
                {"grad_tol", Kind::kReal, 1e-8, "stop when the speed drops below this"},
                {"record_every", Kind::kInt, 10, "snapshot stride"},
                {"dt_max", Kind::kReal, 1.0, "largest step"},
                {"max_steps", Kind::kInt, 2000000, "step budget"}},
               [](const Json& c) {
                 const FlowTrace tr =
                     flow(measure_from_json(c.at("measure")), params_of(c), flow_of(c), seed_of(c));
                 return Outcome{report_json(tr), flow_trace_csv(tr),
                                tr.terminated_by == FlowTermination::kStepFailure};
               }});

  {
    std::vector<Field> f{{"n", Kind::kInt, 2, "dimension"}, alpha, beta};
    for (Field& x : minimize_fields()) f.push_back(std::move(x));
    t.push_back({"minimize", "multistart search for a global minimizer", f, [](const Json& c) {
                   return Outcome{report_json(minimize_global(params_of(c), minimize_of(c))), "", false};
                 }});
  }

  t.push_back({"metric", "transport distance between two measures",
               {{"p", Kind::kString, nullptr, "1, 2 or inf"},
                {"a", Kind::kMeasure, nullptr, "first measure JSON file"},
                {"b", Kind::kMeasure, nullptr, "second measure JSON file"}},
               [](const Json& c) {
                 const DiscreteMeasure a = measure_from_json(c.at("a"));
                 const DiscreteMeasure b = measure_from_json(c.at("b"));
                 const std::string p = c.at("p").get<std::string>();
                 if (p == "inf") return Outcome{report_json(wasserstein_inf(a, b)), "", false};
                 if (p == "1" || p == "2") return Outcome{report_json(wasserstein_p(a, b, std::stoi(p))), "", false};
                 throw UsageError("p must be 1, 2 or inf");
               }});

  t.push_back({"verify variance", "isodiametric variance sweep over random clouds",
               {{"n", Kind::kInt, 2, "dimension"}, {"clouds", Kind::kInt, 1000, "number of clouds"}},
               [](const Json& c) {
                 return Outcome{report_json(isodiametric_sweep(integer(c, "n"), integer(c, "clouds"), seed_of(c))), "",
                                false};
               }});

  t.push_back({"verify vertex-potential", "grid scan of the simplex vertex potential",
               {{"beta", Kind::kReal, 2.0, "exponent"}, {"n", Kind::kInt, 2, "dimension"},
                {"grid_h", Kind::kReal, 1e-2, "grid spacing"}},
               [](const Json& c) {
                 return Outcome{report_json(vertex_potential_argmin(real(c, "beta"), integer(c, "n"), real(c, "grid_h"))),
                                "", false};
               }});

  t.push_back({"verify local-min", "perturbation test around a weighted simplex",
               {alpha, beta, {"masses", Kind::kRealList, nullptr, "vertex masses, comma separated"},
                {"radius", Kind::kReal, 1e-2, "perturbation radius"},
                {"trials", Kind::kInt, 1000, "random trials"},
                {"split_factor", Kind::kInt, 3, "pieces per vertex"},
                {"radii", Kind::kRealList, Json::array(), "optional radius sweep"}},
               [](const Json& c) {
                 const DiscreteMeasure mu = simplex_measure(real_list(c, "masses"));
                 const PowerLawParams p = params_of(c);
                 PerturbationConfig pc{real(c, "radius"), integer(c, "trials"), integer(c, "split_factor"), seed_of(c)};
                 Json r = report_json(local_min_perturbation_test(mu, p, pc));
                 const std::vector<double> radii = real_list(c, "radii");
                 if (!radii.empty()) {
                   const auto best = largest_passing_radius(mu, p, pc, radii);
                   r["largest_passing_radius"] = best ? number(*best) : Json(nullptr);
                 }
                 return Outcome{r, "", false};
               }});

  t.push_back({"verify jung", "Jung radius, simplex variance and Hilbert identity",
               {{"n_max", Kind::kInt, 6, "largest dimension"}},
               [](const Json& c) {
                 const std::vector<JungRow> rows = jung_check(integer(c, "n_max"));
                 std::string csv = "n,jung_radius,circumradius,variance,max_variance,hilbert_defect,pass\n";
                 for (const JungRow& r : rows)
                   csv += csv_line({std::to_string(r.n), num_text(r.jung_radius), num_text(r.circumradius),
                                    num_text(r.variance), num_text(r.max_variance), num_text(r.hilbert_defect),
                                    r.pass ? "true" : "false"});
                 return Outcome{report_json(rows), csv, false};
               }});

  {
    std::vector<Field> f{{"beta", Kind::kReal, 2.0, "repulsion exponent"},
                         {"alphas", Kind::kRealList, Json::array({6.0, 10.0, 20.0, 40.0}), "increasing exponents"},
                         {"n", Kind::kInt, 2, "dimension"}};
    for (Field& x : minimize_fields()) f.push_back(std::move(x));
    t.push_back({"verify gamma", "distance of minimizers to the simplex family as alpha grows", f,
                 [](const Json& c) {
                   const GammaReport g = gamma_convergence_experiment(real(c, "beta"), real_list(c, "alphas"),
                                                                      integer(c, "n"), minimize_of(c));
                   std::string csv = "alpha,energy,distance,is_unit_simplex,atoms\n";
                   for (const GammaRow& r : g.rows)
                     csv += csv_line({num_text(r.alpha), num_text(r.energy), num_text(r.distance),
                                      r.is_unit_simplex ? "true" : "false", std::to_string(r.atoms)});
                   return Outcome{report_json(g), csv, false};
                 }});
  }

  t.push_back({"scan-threshold", "bracket the local-minimality threshold on the centrifugal line",
               {{"beta", Kind::kReal, 2.0, "must be 2"},
                {"masses", Kind::kRealList, nullptr, "vertex masses, comma separated"},
                {"bracket_tol", Kind::kReal, 0.25, "bracket width"},
                {"radius", Kind::kReal, 1e-2, "perturbation radius"}},
               [](const Json& c) {
                 if (real(c, "beta") != 2.0) throw UsageError("scan-threshold requires beta = 2");
                 return Outcome{report_json(scan_local_threshold(real_list(c, "masses"), real(c, "bracket_tol"),
                                                                 real(c, "radius"), seed_of(c))),
                                "", false};
               }});

  t.push_back({"candidates", "energies of the simplex, sphere and single-atom baselines",
               {{"n", Kind::kInt, 2, "dimension"}, alpha, beta,
                {"sphere_atoms", Kind::kInt, 720, "sphere discretisation"}},
               [](const Json& c) {
                 return Outcome{report_json(energy_of_candidates(params_of(c), integer(c, "n"), integer(c, "sphere_atoms"))),
                                "", false};
               }});
  return t;
}

struct Globals {
  std::string seed, out, format = "json", threads, config;
};

void add_globals(CLI::App* app, Globals& g) {
  app->add_option("--seed", g.seed, "random seed (default 0)");
  app->add_option("--out", g.out, "output file (default stdout)");
  app->add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--threads", g.threads, "worker threads (default SIMPLEXFLOW_THREADS or 1)");
  app->add_option("--config", g.config, "JSON file with parameters; flags override it");
}

Json resolve(const Command& cmd, const std::map<std::string, CLI::Option*>& opts,
             const std::map<std::string, std::string>& raw, const Globals& g) {
  Json file = Json::object();
  if (!g.config.empty()) {
    file = load_json_file(g.config);
    if (!file.is_object()) throw UsageError("config file must hold a JSON object");
  }
  const Field seed_field{"seed", Kind::kUInt, std::uint64_t{0}, ""};
  std::vector<Field> fields = cmd.fields;
  fields.push_back(seed_field);
  for (const auto& [key, value] : file.items()) {
    (void)value;
    const bool known = std::any_of(fields.begin(), fields.end(), [&](const Field& f) { return f.key == key; });
    if (!known) throw UsageError("unknown config key for '" + cmd.name + "': " + key);
  }
  Json resolved = Json::object();
  for (const Field& f : fields) {
    const bool from_flag_set = f.key == "seed" ? !g.seed.empty() : opts.at(f.key)->count() > 0;
    if (from_flag_set)
      resolved[f.key] = from_flag(f, f.key == "seed" ? g.seed : raw.at(f.key));
    else if (file.contains(f.key))
      resolved[f.key] = from_config(f, file[f.key]);
    else if (!f.fallback.is_null())
      resolved[f.key] = f.fallback;
    else
      throw UsageError("missing required parameter: " + flag_name(f.key));
  }
  return resolved;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power-law interaction energies: minimizers, flows, transport distances and checks"};
  app.require_subcommand(1);
  std::vector<Command> commands = command_table();
  Globals globals;
  std::map<std::string, CLI::App*> apps;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, std::map<std::string, std::string>> raw;
  CLI::App* verify = app.add_subcommand("verify", "numerical checks");
  verify->require_subcommand(1);
  for (const Command& cmd : commands) {
    CLI::App* sub = nullptr;
    if (cmd.name.rfind("verify ", 0) == 0)
      sub = verify->add_subcommand(cmd.name.substr(7), cmd.help);
    else
      sub = app.add_subcommand(cmd.name, cmd.help);
    auto& store = raw[cmd.name];
    for (const Field& f : cmd.fields) options[cmd.name][f.key] = sub->add_option(flag_name(f.key), store[f.key], f.help);
    add_globals(sub, globals);
    apps[cmd.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  const Command* chosen = nullptr;
  for (const Command& cmd : commands)
    if (apps[cmd.name]->parsed()) chosen = &cmd;
  if (chosen == nullptr) {
    err << "no command given\n";
    return kExitValidation;
  }

  try {
    int threads = thread_count_from_env(1);
    if (!globals.threads.empty()) {
      threads = static_cast<int>(parse_real("threads", globals.threads));
      if (std::to_string(threads) != globals.threads) throw UsageError("threads: expected an integer");
    }
    if (threads < 1) throw UsageError("threads must be >= 1");
    set_thread_count(threads);

    const Json config = resolve(*chosen, options[chosen->name], raw[chosen->name], globals);
    const bool want_csv = globals.format == "csv";
    Outcome outcome = chosen->run(config);
    if (want_csv && outcome.csv.empty())
      throw UsageError("'" + chosen->name + "' has no CSV output; use --format json");

    std::string text;
    if (want_csv) {
      text = outcome.csv;
    } else {
      const Json doc{{"command", chosen->name}, {"config", config}, {"result", outcome.result}};
      const std::vector<std::string> problems = validate_output_document(doc);
      if (!problems.empty()) throw std::logic_error("malformed output document: " + problems.front());
      text = dump(doc);
    }
    if (globals.out.empty()) {
      out << text;
    } else {
      std::ofstream file(globals.out, std::ios::binary);
      if (!file) throw UsageError("cannot write " + globals.out);
      file << text;
    }
    if (outcome.numerical_failure) {
      err << "numerical failure: the flow could not make progress\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace simplexflow
