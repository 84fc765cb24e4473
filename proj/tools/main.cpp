// tmsq: derive rates, run protocols, reproduce the preparation-time curve and
// run the validation battery.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "tmsq/errors.hpp"
#include "tmsq/gaussian.hpp"
#include "tmsq/io.hpp"
#include "tmsq/parallel.hpp"
#include "tmsq/protocol.hpp"
#include "tmsq/validation.hpp"

namespace fs = std::filesystem;
using namespace tmsq;

namespace {

enum Exit { ok = 0, config_error = 1, hard_failure = 2, test_failure = 3 };

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string engine;
  std::string truncation;
  std::string out;
  std::optional<double> n_target;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config (// comments allowed)");
  cmd->add_option("--seed", f.seed, "RNG seed (default 0)");
  cmd->add_option("--engine", f.engine, "fock, gaussian or collision");
  cmd->add_option("--truncation", f.truncation, "Fock truncation N1,N2");
  cmd->add_option("--out", f.out, "output directory or file");
  cmd->add_option("--n-target", f.n_target, "target residual b-mode occupation");
}

cli::RunConfig load_config(const CommonFlags& f) {
  cli::RunConfig cfg = f.config.empty() ? cli::RunConfig{} : cli::load_run_config(f.config);
  if (!f.engine.empty()) {
    try {
      cfg.defaults.engine = parse_engine(f.engine);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--engine: ") + e.what());
    }
  }
  if (f.seed) cfg.defaults.seed = *f.seed;
  if (!f.truncation.empty()) std::tie(cfg.defaults.n1, cfg.defaults.n2) = cli::parse_truncation(f.truncation);
  if (f.n_target) {
    if (!(*f.n_target > 0.0)) throw ConfigError("--n-target must be positive");
    cfg.n_target = *f.n_target;
  }
  return cfg;
}

const PhysicalParams& require_params(const cli::RunConfig& cfg) {
  if (!cfg.params) throw ConfigError("config has no parameter set (missing key 'omega1_hz')");
  return *cfg.params;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    write_text_file(out, text);
  }
}

void copy_run_settings(const ProtocolSpec& from, ProtocolSpec& to) {
  to.engine = from.engine;
  to.seed = from.seed;
  to.n1 = from.n1;
  to.n2 = from.n2;
  to.samples_per_step = from.samples_per_step;
  to.gamma_dt = from.gamma_dt;
  to.trajectories = from.trajectories;
  to.policy = from.policy;
  to.include_stark = from.include_stark;
}

ProtocolSpec protocol_for(const cli::RunConfig& cfg, std::vector<std::string>* notes) {
  ProtocolSpec spec;
  if (cfg.protocol) {
    spec = *cfg.protocol;
  } else {
    spec = build_two_step_protocol(cli::step1_params(require_params(cfg), notes), SwapRule::symmetric_exchange(),
                                   cfg.step_duration, cfg.n_target);
  }
  copy_run_settings(cfg.defaults, spec);
  return spec;
}

// --- derive ---

int cmd_derive(const CommonFlags& f) {
  const cli::RunConfig cfg = load_config(f);
  const PhysicalParams& p = require_params(cfg);
  const DerivedParams d = derive_rates(p);
  Json out;
  out["params"] = params_to_json(p);
  out["derived"] = derived_to_json(d);
  out["regime"] = regime_to_json(validate_regime(p, d));
  const SpontaneousDecay sd = spontaneous_decay_estimate(p);
  out["spontaneous_decay"] = {{"excited_occupation", sd.excited_occupation}, {"rate_per_s", sd.rate}};
  std::vector<std::string> notes;
  if (d.gamma > 0.0) {
    const PhysicalParams s1 = cli::step1_params(p, &notes);
    const PhysicalParams s2 = step2_params(s1, SwapRule::symmetric_exchange());
    const PreparationTime t = preparation_time(d.r, d.gamma, cfg.n_target);
    out["protocol"] = {{"n_target", cfg.n_target},
                       {"step_duration_s", t.per_step},
                       {"total_time_s", t.total},
                       {"step1", {{"params", params_to_json(s1)}, {"derived", derived_to_json(derive_rates(s1))}}},
                       {"step2", {{"params", params_to_json(s2)}, {"derived", derived_to_json(derive_rates(s2))}}}};
  } else {
    notes.push_back("gamma is zero (r_a or tau unset); no protocol timing");
  }
  out["notes"] = notes;
  emit(f.out, out.dump(2) + "\n");
  return ok;
}

// --- simulate ---

int cmd_simulate(const CommonFlags& f, int samples, int trajectories, const std::string& policy,
                 const std::string& initial) {
  cli::RunConfig cfg = load_config(f);
  if (samples > 0) cfg.defaults.samples_per_step = samples;
  if (trajectories > 0) cfg.defaults.trajectories = trajectories;
  if (!policy.empty()) {
    try {
      cfg.defaults.policy = parse_policy(policy);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--policy: ") + e.what());
    }
  }
  if (!initial.empty()) cfg.initial = cli::run_config_from_json(parse_json_text(
                                          "{\"run\":{\"initial\":" + initial + "}}", "--initial")).initial;
  std::vector<std::string> notes;
  const ProtocolSpec spec = protocol_for(cfg, &notes);
  const ProtocolResult res = run_protocol(spec, cfg.initial);

  Json report;
  report["engine"] = engine_name(spec.engine);
  report["seed"] = spec.seed;
  report["report"] = report_to_json(res.report);
  Json regimes = Json::array();
  for (const auto& r : res.regimes) regimes.push_back(regime_to_json(r));
  report["regimes"] = regimes;
  report["warnings"] = res.warnings;
  report["notes"] = notes;
  report["protocol"] = protocol_to_json(spec);
  if (res.final_gaussian) report["final_gaussian"] = gaussian_to_json(*res.final_gaussian);

  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  const std::string csv = trajectory_csv(res.trajectory);
  if (f.out.empty() || f.out == "-") {
    std::cout << csv;
    return ok;
  }
  fs::create_directories(f.out);
  write_text_file((fs::path(f.out) / "trajectory.csv").string(), csv);
  write_text_file((fs::path(f.out) / "report.json").string(), report.dump(2) + "\n");
  std::vector<double> t_ms;
  for (double t : res.trajectory.times()) t_ms.push_back(t * 1e3);
  std::vector<PlotSeries> series;
  for (const char* name : {"v_x_minus", "v_p_plus", "duan_sum"}) series.push_back({name, res.trajectory.column(name)});
  write_text_file((fs::path(f.out) / "variances.svg").string(), svg_line_plot("EPR variances", "t (ms)", t_ms, series));
  return ok;
}

// --- fig2 ---

int cmd_fig2(const CommonFlags& f, std::optional<double> gamma, const std::string& grid, bool gamma_from_params) {
  cli::RunConfig cfg = load_config(f);
  Fig2Settings settings = cfg.fig2;
  if (f.n_target) settings.n_target = *f.n_target;
  if (gamma) {
    if (!(*gamma > 0.0)) throw ConfigError("--gamma must be positive");
    settings.gamma = *gamma;
  }
  if (gamma_from_params) {
    const PhysicalParams p = require_params(cfg);
    const DerivedParams d = derive_rates(p);
    const double theta_max = std::max(d.theta1, d.theta2);
    settings.gamma.reset();
    settings.gamma_of_r = [p, theta_max](double r) {
      const double theta_b = theta_max * std::sqrt(1.0 - r * r);
      return p.r_a * theta_b * theta_b * p.tau * p.tau;
    };
  }
  std::vector<double> r_grid = !grid.empty() ? cli::parse_number_list(grid, "--r-grid")
                               : !cfg.r_grid.empty() ? cfg.r_grid
                                                     : default_fig2_grid();
  std::vector<Fig2Row> rows;
  try {
    rows = fig2_rows(r_grid, settings);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  std::vector<std::vector<double>> table;
  std::vector<double> xs, n_bar, t_ms;
  for (const auto& r : rows) {
    table.push_back({r.r, r.n_bar, r.total_time});
    xs.push_back(r.r);
    n_bar.push_back(r.n_bar);
    t_ms.push_back(r.total_time * 1e3);
  }
  std::ostringstream csv;
  write_table_csv(csv, {"r", "n_bar", "total_time_2T"}, table);
  if (f.out.empty() || f.out == "-") {
    std::cout << csv.str();
    return ok;
  }
  fs::create_directories(f.out);
  write_text_file((fs::path(f.out) / "fig2.csv").string(), csv.str());
  write_text_file((fs::path(f.out) / "fig2.svg").string(),
                  svg_line_plot("Preparation time and photon number", "r", xs, {{"2T (ms)", t_ms}, {"n_bar", n_bar}}));
  return ok;
}

// --- validate ---

int cmd_validate(const CommonFlags& f, const std::vector<std::string>& tolerances,
                 const std::vector<std::string>& only, bool list) {
  ValidationOptions opts;
  if (!f.config.empty()) opts.microwave = require_params(cli::load_run_config(f.config));
  for (const auto& t : tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--tolerance expects ID=VALUE or ID.KEY=VALUE, got '" + t + "'");
    opts.overrides[t.substr(0, eq)] = cli::parse_number_list(t.substr(eq + 1), "--tolerance").at(0);
  }
  for (const auto& group : only) {
    std::istringstream in(group);
    std::string id;
    while (std::getline(in, id, ',')) opts.only.push_back(id);
  }
  std::vector<CheckDefinition> defs;
  try {
    defs = validation_checks(opts);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (list) {
    for (const auto& d : defs) {
      std::cout << d.id << " " << d.name << ": " << d.description;
      for (const auto& t : d.tolerances)
        std::cout << "  [" << t.key << (t.bound == Bound::at_most ? " <= " : " >= ") << t.value << "]";
      std::cout << "\n";
    }
    return ok;
  }
  const auto results = run_validation(opts, [](const CheckResult& r) { std::cout << format_check_line(r) << std::endl; });
  const Json summary = validation_summary(results);
  if (!f.out.empty()) emit(f.out, summary.dump(2) + "\n");
  const bool all = summary["passed"].get<bool>();
  std::cout << (all ? "all checks passed" : "some checks FAILED") << " (" << results.size() << ")\n";
  return all ? ok : test_failure;
}

// --- sweep ---

int cmd_sweep(const CommonFlags& f, const std::string& grid) {
  const cli::RunConfig cfg = load_config(f);
  const std::vector<double> r_grid = cli::parse_number_list(grid, "--r-grid");
  const PhysicalParams base = cfg.params ? cli::step1_params(*cfg.params, nullptr) : reference_params(0.5);
  struct Row {
    std::vector<double> values;
    std::vector<std::string> warnings;
  };
  std::vector<Row> rows(r_grid.size());
  for (double r : r_grid)
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("--r-grid values must lie in (0, 1)");
  parallel_for(r_grid.size(), [&](std::size_t i) {
    const double r = r_grid[i];
    PhysicalParams p = base;
    const double theta1 = std::abs(p.omega1 * p.g1 / p.delta1);
    p.omega2 = std::copysign(r * theta1 * std::abs(p.delta2 / p.g2), p.omega2 == 0.0 ? 1.0 : p.omega2);
    ProtocolSpec spec = build_two_step_protocol(p, SwapRule::symmetric_exchange(), cfg.step_duration, cfg.n_target);
    copy_run_settings(cfg.defaults, spec);
    spec.seed = cfg.defaults.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1));
    const ProtocolResult res = run_protocol(spec, cfg.initial);
    const DerivedParams d = derive_rates(p);
    const auto& rep = res.report;
    rows[i].values = {r, d.epsilon, d.gamma, 2.0 * spec.steps[0].duration, rep.n1_mean, rep.n2_mean,
                      rep.v_squeezed, rep.v_antisqueezed, rep.duan_sum, rep.fidelity};
    rows[i].warnings = res.warnings;
  });
  std::vector<std::vector<double>> table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& w : rows[i].warnings) std::cerr << "warning (r = " << r_grid[i] << "): " << w << "\n";
    table.push_back(rows[i].values);
  }
  std::ostringstream csv;
  write_table_csv(csv,
                  {"r", "epsilon", "gamma", "total_time_2T", "n_a1", "n_a2", "v_squeezed", "v_antisqueezed",
                   "duan_sum", "fidelity"},
                  table);
  emit(f.out, csv.str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode squeezing by two-channel Raman excitation: simulator and checks"};
  app.require_subcommand(1);

  CommonFlags derive_f, sim_f, fig_f, val_f, sweep_f;
  auto* derive = app.add_subcommand("derive", "Raman rates, squeeze parameter and regime checks as JSON");
  add_common(derive, derive_f);

  auto* simulate = app.add_subcommand("simulate", "run the two-step protocol; CSV trajectory + JSON report");
  add_common(simulate, sim_f);
  int samples = 0, trajectories = 0;
  std::string policy, initial;
  simulate->add_option("--samples", samples, "samples per step");
  simulate->add_option("--trajectories", trajectories, "collision runs per step");
  simulate->add_option("--policy", policy, "overlap policy: drop or defer");
  simulate->add_option("--initial", initial, "initial state as JSON, e.g. '{\"kind\":\"fock\",\"n1\":1,\"n2\":1}'");

  auto* fig2 = app.add_subcommand("fig2", "preparation time 2T and photon number versus r");
  add_common(fig2, fig_f);
  std::optional<double> gamma;
  std::string r_grid;
  bool gamma_from_params = false;
  fig2->add_option("--gamma", gamma, "effective decay rate in 1/s (overrides the default inputs)");
  fig2->add_option("--r-grid", r_grid, "comma-separated r values");
  fig2->add_flag("--gamma-from-params", gamma_from_params, "γ(r) = r_a Θ_b(r)² τ² from the config parameters");

  auto* validate = app.add_subcommand("validate", "run the oracle and cross-engine battery");
  add_common(validate, val_f);
  std::vector<std::string> tolerances;
  std::vector<std::string> only;
  bool list = false;
  validate->add_option("--tolerance", tolerances, "override, ID=VALUE or ID.KEY=VALUE (repeatable)");
  validate->add_option("--only", only, "check ids or names, comma-separated or repeated");
  validate->add_flag("--list", list, "list checks and tolerances without running them");

  auto* sweep = app.add_subcommand("sweep", "run the protocol over a grid of r values");
  add_common(sweep, sweep_f);
  std::string sweep_grid = "0.2,0.4,0.6,0.8,0.9,0.95";
  sweep->add_option("--r-grid", sweep_grid, "comma-separated r values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (*derive) return cmd_derive(derive_f);
    if (*simulate) return cmd_simulate(sim_f, samples, trajectories, policy, initial);
    if (*fig2) return cmd_fig2(fig_f, gamma, r_grid, gamma_from_params);
    if (*validate) return cmd_validate(val_f, tolerances, only, list);
    if (*sweep) return cmd_sweep(sweep_f, sweep_grid);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const DegenerateChannel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hard_failure;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << " (suggested truncation " << e.suggested_truncation() << ")\n";
    return hard_failure;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hard_failure;
  }
  return ok;
}
