#include "run_config.hpp"

#include <sstream>

#include "tmsq/errors.hpp"

namespace tmsq::cli {

namespace {

double number(const Json& j, const std::string& key, const std::string& where) {
  if (!j[key].is_number()) throw ConfigError("key '" + where + key + "' must be a number");
  return j[key].get<double>();
}

int integer(const Json& j, const std::string& key, const std::string& where) {
  if (!j[key].is_number_integer()) throw ConfigError("key '" + where + key + "' must be an integer");
  return j[key].get<int>();
}

Complex complex_at(const Json& j, const std::string& key) {
  const Json& v = j[key];
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError("key 'initial." + key + "' must be a number or [re, im]");
}

InitialCondition initial_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "vacuum") return InitialCondition::vacuum();
    throw ConfigError("key 'run.initial' must be \"vacuum\" or an object");
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw ConfigError("missing key 'run.initial.kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "vacuum") return InitialCondition::vacuum();
  if (kind == "fock") {
    return InitialCondition::fock(j.contains("n1") ? integer(j, "n1", "run.initial.") : 0,
                                  j.contains("n2") ? integer(j, "n2", "run.initial.") : 0);
  }
  if (kind == "coherent") {
    return InitialCondition::coherent(j.contains("alpha1") ? complex_at(j, "alpha1") : Complex{},
                                      j.contains("alpha2") ? complex_at(j, "alpha2") : Complex{});
  }
  if (kind == "thermal") {
    if (!j.contains("nbar")) throw ConfigError("missing key 'run.initial.nbar'");
    return InitialCondition::thermal(number(j, "nbar", "run.initial."));
  }
  throw ConfigError("key 'run.initial.kind': unknown kind '" + kind + "'");
}

void read_run_section(const Json& run, RunConfig& cfg) {
  if (!run.is_object()) throw ConfigError("key 'run' must be an object");
  ProtocolSpec& d = cfg.defaults;
  try {
    if (run.contains("engine")) d.engine = parse_engine(run["engine"].get<std::string>());
    if (run.contains("policy")) d.policy = parse_policy(run["policy"].get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const Json::exception&) {
    throw ConfigError("keys 'run.engine' and 'run.policy' must be strings");
  }
  if (run.contains("seed")) {
    if (!run["seed"].is_number_unsigned()) throw ConfigError("key 'run.seed' must be a non-negative integer");
    d.seed = run["seed"].get<std::uint64_t>();
  }
  if (run.contains("truncation")) {
    const Json& t = run["truncation"];
    if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number_integer())
      throw ConfigError("key 'run.truncation' must be [N1, N2]");
    d.n1 = t[0].get<int>();
    d.n2 = t[1].get<int>();
  }
  if (run.contains("samples_per_step")) d.samples_per_step = integer(run, "samples_per_step", "run.");
  if (run.contains("trajectories")) d.trajectories = integer(run, "trajectories", "run.");
  if (run.contains("gamma_dt")) d.gamma_dt = number(run, "gamma_dt", "run.");
  if (run.contains("include_stark")) {
    if (!run["include_stark"].is_boolean()) throw ConfigError("key 'run.include_stark' must be a boolean");
    d.include_stark = run["include_stark"].get<bool>();
  }
  if (run.contains("n_target")) cfg.n_target = number(run, "n_target", "run.");
  if (run.contains("step_duration_s")) cfg.step_duration = number(run, "step_duration_s", "run.");
  if (run.contains("initial")) cfg.initial = initial_from_json(run["initial"]);
}

void read_fig2_section(const Json& f, RunConfig& cfg) {
  if (!f.is_object()) throw ConfigError("key 'fig2' must be an object");
  if (f.contains("r_grid")) {
    if (!f["r_grid"].is_array()) throw ConfigError("key 'fig2.r_grid' must be an array");
    cfg.r_grid.clear();
    for (const Json& v : f["r_grid"]) {
      if (!v.is_number()) throw ConfigError("key 'fig2.r_grid' must hold numbers");
      cfg.r_grid.push_back(v.get<double>());
    }
  }
  if (f.contains("gamma_per_s")) cfg.fig2.gamma = number(f, "gamma_per_s", "fig2.");
  if (f.contains("tau_s")) cfg.fig2.tau = number(f, "tau_s", "fig2.");
  if (f.contains("theta_b_tau")) cfg.fig2.theta_b_tau = number(f, "theta_b_tau", "fig2.");
  if (f.contains("ra_tau")) cfg.fig2.ra_tau = number(f, "ra_tau", "fig2.");
  if (f.contains("n_target")) cfg.fig2.n_target = number(f, "n_target", "fig2.");
}

}  // namespace

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  if (j.contains("run")) read_run_section(j["run"], cfg);
  if (j.contains("fig2")) read_fig2_section(j["fig2"], cfg);
  if (j.contains("steps")) {
    cfg.protocol = protocol_from_json(j);
    cfg.defaults.engine = cfg.protocol->engine;
    cfg.defaults.seed = cfg.protocol->seed;
    cfg.defaults.n1 = cfg.protocol->n1;
    cfg.defaults.n2 = cfg.protocol->n2;
    cfg.defaults.samples_per_step = cfg.protocol->samples_per_step;
    cfg.defaults.trajectories = cfg.protocol->trajectories;
    cfg.defaults.gamma_dt = cfg.protocol->gamma_dt;
    cfg.defaults.policy = cfg.protocol->policy;
    cfg.defaults.include_stark = cfg.protocol->include_stark;
    cfg.params = cfg.protocol->steps.front().params;
  } else if (j.contains("params")) {
    cfg.params = params_from_json(j["params"]);
  } else if (j.contains("omega1_hz")) {
    cfg.params = params_from_json(j);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(load_json_file(path)); }

PhysicalParams step1_params(const PhysicalParams& p, std::vector<std::string>* notes) {
  const DerivedParams d = derive_rates(p);
  if (d.channel == Channel::b1) return p;
  if (notes) notes->push_back("config has theta1 < theta2; it is used as step 2 and the symmetric swap gives step 1");
  return as_step1(p);
}

std::pair<int, int> parse_truncation(const std::string& text) {
  const std::vector<double> v = parse_number_list(text, "--truncation");
  if (v.size() != 2 || v[0] != static_cast<int>(v[0]) || v[1] != static_cast<int>(v[1]) || v[0] < 1 || v[1] < 1) {
    throw ConfigError("--truncation expects two positive integers N1,N2");
  }
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + cell + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  return out;
}

}  // namespace tmsq::cli
