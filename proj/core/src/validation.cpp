#include "tmsq/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tmsq/analysis.hpp"
#include "tmsq/collision.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/errors.hpp"
#include "tmsq/gaussian.hpp"
#include "tmsq/io.hpp"
#include "tmsq/protocol.hpp"

namespace tmsq {

namespace {

double rel_err(double value, double ref) { return std::abs(value - ref) / std::abs(ref); }

std::vector<std::vector<double>> parse_numeric_csv(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw InvalidArgument("unexpected CSV header '" + line + "' (expected '" + header + "')");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Small collision-engine protocol used when no external simulate runner is given.
std::string in_process_simulate(std::uint64_t seed) {
  const PhysicalParams p = reference_params(0.5);
  const double gamma = derive_rates(p).gamma;
  ProtocolSpec spec = build_two_step_protocol(p, SwapRule::symmetric_exchange(), 2.0 / gamma);
  spec.engine = Engine::collision;
  spec.seed = seed;
  spec.n1 = spec.n2 = 8;
  spec.trajectories = 40;
  spec.samples_per_step = 11;
  return trajectory_csv(run_protocol(spec, InitialCondition::vacuum()).trajectory);
}

std::string in_process_fig2() {
  std::ostringstream out;
  std::vector<std::vector<double>> rows;
  for (const Fig2Row& r : fig2_rows(default_fig2_grid(), Fig2Settings{})) rows.push_back({r.r, r.n_bar, r.total_time});
  write_table_csv(out, {"r", "n_bar", "total_time_2T"}, rows);
  return out.str();
}

// Max over every sample and column of |a − b| for two trajectories on the same grid.
double trajectory_distance(const Trajectory& a, const Trajectory& b, const std::vector<std::string>& columns) {
  if (a.size() != b.size()) throw InvalidArgument("trajectories have different sample counts");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.times()[i] - b.times()[i]) > 1e-9 * std::max(1.0, std::abs(a.times()[i]))) {
      throw InvalidArgument("trajectories sample different times");
    }
    for (const auto& c : columns) worst = std::max(worst, std::abs(a.value(i, c) - b.value(i, c)));
  }
  return worst;
}

// Least-squares slope of ln y against t over samples with y > floor.
double log_slope(const std::vector<double>& t, const std::vector<double>& y, double floor) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > floor)) continue;
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
    ++n;
  }
  if (n < 3) throw InvalidArgument("too few positive samples for an exponential fit");
  return (n * sty - st * sy) / (n * stt - st * st);
}

void check_raman_rate(CheckContext& ctx, const PhysicalParams& microwave) {
  const DerivedParams d = derive_rates(microwave);
  const double theta1_hz = d.theta1 / kTwoPi;
  ctx.info("theta1_over_2pi_hz", theta1_hz);
  ctx.check("abs_error_hz", std::abs(theta1_hz - 2000.0), "abs_hz");
}

void check_bogoliubov(CheckContext& ctx) {
  const double eps = 0.5;
  const SpaceDescriptor fs = SpaceDescriptor::field(25, 25);
  const double c = std::cosh(eps), s = std::sinh(eps);
  double worst = 0.0;
  for (int mode = 1; mode <= 2; ++mode) {
    const Matrix got = squeezed_ladder_operator(fs, eps, mode).matrix();
    const Matrix want = (Complex(c) * annihilation_op(fs, mode) - Complex(s) * creation_op(fs, 3 - mode)).matrix();
    for (int n1 = 0; n1 <= 12; ++n1) {
      for (int n2 = 0; n2 <= 12; ++n2) {
        const Eigen::Index col = fs.index(0, n1, n2);
        worst = std::max(worst, (got.col(col) - want.col(col)).cwiseAbs().maxCoeff());
      }
    }
  }
  ctx.check("max_abs_error", worst, "max_abs");
}

void check_tmsv_equivalence(CheckContext& ctx) {
  const SpaceDescriptor fs = SpaceDescriptor::field(25, 25);
  double worst = 1.0;
  for (double eps : {0.2, 0.5, std::atanh(0.6)}) {
    const Operator sq = build_squeeze_operator(fs, eps);
    const StateVector from_op(fs, sq.adjoint().matrix().col(fs.index(0, 0, 0)));
    worst = std::min(worst, overlap(tmsv_state_vector(fs, eps), from_op));
  }
  ctx.check("min_overlap", worst, "min_overlap");
}

void check_variance_formula(CheckContext& ctx) {
  const double eps = std::atanh(0.6);
  const double want = 0.5 * std::exp(-2.0 * eps);
  ctx.info("target", want);
  const SpaceDescriptor fs = SpaceDescriptor::field(20, 20);
  const Operator sq = build_squeeze_operator(fs, eps);
  const DensityMatrix rho = DensityMatrix::pure(StateVector(fs, sq.adjoint().matrix().col(0)));
  const EprVariances fock = epr_variances_fock(rho);
  ctx.check("fock_abs_error", std::abs(fock.v_x_minus - want), "fock");
  const EprVariances gauss = gaussian_epr_variances(gaussian_tmsv(eps));
  ctx.check("gaussian_abs_error", std::abs(gauss.v_x_minus - want), "gaussian");
}

void check_adiabatic_elimination(CheckContext& ctx) {
  PhysicalParams p;
  p.delta1 = -1.0;
  p.delta2 = 2.0;
  p.omega1 = p.g1 = 0.05;
  p.omega2 = p.g2 = 0.1;
  const DerivedParams d = derive_rates(p);
  const double t = kTwoPi / 4.0 / d.theta_b;
  ctx.info("dispersive_ratio", p.dispersive_ratio());
  ctx.info("t", t);
  const SpaceDescriptor s3(3, 6, 6);
  const FullHamiltonian full(p, s3);
  const StateVector psi_full = evolve_time_dependent(full, basis_state(s3, Level::g, 0, 0), 0.0, t, 0.02);
  const SpaceDescriptor s2 = s3.with_atom_levels(2);
  const Operator u = unitary_propagator(build_effective_hamiltonian(p, s2), t);
  Vector eff = Vector::Zero(s3.dim());
  eff.head(s2.dim()) = u.matrix().col(s2.index(0, 0, 0));
  ctx.check("overlap", overlap(psi_full.normalized(), StateVector(s3, eff)), "min_overlap");
}

void check_collision_rate(CheckContext& ctx) {
  const PhysicalParams p = reference_params(0.4, 0.1, 0.1);
  const DerivedParams d = derive_rates(p);
  const double duration = 3.0 / d.gamma;
  const ProtocolStep step = make_step(p, duration);
  const SpaceDescriptor fs = SpaceDescriptor::field(12, 12);
  const Probe probe = standard_probe(fs, d.epsilon);
  const DensityMatrix vac = DensityMatrix::pure(field_basis_state(fs, 0, 0));
  CollisionOptions opts;
  opts.samples = 61;
  opts.keep_final_state = false;
  const std::string column = "n_" + channel_name(d.channel);
  auto fitted = [&](OverlapPolicy policy) {
    const Trajectory tr = run_collision_ensemble(vac, step, duration, {p.r_a, 20240601u, policy}, 200, probe, opts);
    return -log_slope(tr.times(), tr.column(column), 1e-12);
  };
  ctx.info("gamma", d.gamma);
  const double defer_rate = fitted(OverlapPolicy::defer);
  ctx.info("fitted_rate_defer", defer_rate);
  ctx.check("relative_deviation", rel_err(defer_rate, d.gamma), "relative");
  const double drop_rate = fitted(OverlapPolicy::drop);
  ctx.info("fitted_rate_drop", drop_rate);
  ctx.info("relative_deviation_drop", rel_err(drop_rate, d.gamma));
}

void check_fock_steady_state(CheckContext& ctx) {
  const PhysicalParams p = reference_params(0.6);
  const DerivedParams d = derive_rates(p);
  ProtocolSpec spec = build_two_step_protocol(p, SwapRule::symmetric_exchange(), 9.0 / d.gamma);
  spec.engine = Engine::fock;
  spec.n1 = spec.n2 = 15;
  spec.samples_per_step = 5;
  const ProtocolResult vac = run_protocol(spec, InitialCondition::vacuum());
  const ProtocolResult one = run_protocol(spec, InitialCondition::fock(1, 1));
  ctx.check("fidelity_from_vacuum", vac.report.fidelity, "min_fidelity");
  ctx.check("fidelity_from_11", one.report.fidelity, "min_fidelity");
  const double spread = std::max({std::abs(vac.report.fidelity - one.report.fidelity),
                                  std::abs(vac.report.v_squeezed - one.report.v_squeezed),
                                  std::abs(vac.report.v_antisqueezed - one.report.v_antisqueezed),
                                  std::abs(vac.report.duan_sum - one.report.duan_sum)});
  ctx.check("initial_state_spread", spread, "independence");
  ctx.info("min_eigenvalue_from_11", one.final_density->min_eigenvalue());
}

void check_gaussian_high_squeezing(CheckContext& ctx) {
  const double r = 0.95;
  ProtocolSpec spec = build_two_step_protocol(reference_params(r));
  spec.engine = Engine::gaussian;
  const ProtocolResult res = run_protocol(spec, InitialCondition::vacuum());
  const double n_want = r * r / (1.0 - r * r);
  const double v_want = 0.5 * std::exp(-2.0 * std::atanh(r));
  ctx.info("gamma_t_per_step", spec.steps[0].duration * derive_rates(spec.steps[0].params).gamma);
  ctx.info("n1_mean", res.report.n1_mean);
  ctx.info("v_squeezed", res.report.v_squeezed);
  ctx.check("photon_rel_error", std::max(rel_err(res.report.n1_mean, n_want), rel_err(res.report.n2_mean, n_want)),
            "photon");
  ctx.check("variance_rel_error", rel_err(res.report.v_squeezed, v_want), "variance");
  ctx.check("uncertainty_margin", res.final_gaussian->uncertainty_margin(), "margin");
}

void check_fig2(CheckContext& ctx, const std::string& csv) {
  const auto rows = parse_numeric_csv(csv, "r,n_bar,total_time_2T");
  if (rows.size() < 2) throw InvalidArgument("fig2 produced fewer than two rows");
  double worst = 0.0;
  bool n_increasing = true, t_increasing = true;
  double t095 = std::nan("");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 3) throw InvalidArgument("fig2 row with wrong width");
    const double r = rows[i][0];
    const double s = std::sinh(std::atanh(r));
    worst = std::max(worst, rel_err(rows[i][1], s * s));
    if (std::abs(r - 0.95) < 1e-12) t095 = rows[i][2];
    if (i == 0) continue;
    n_increasing = n_increasing && rows[i][1] > rows[i - 1][1];
    // Rows already at n̄ <= n̄∞ need no time; past that 2T must rise strictly.
    t_increasing = t_increasing && (rows[i][2] > rows[i - 1][2] || (rows[i][2] == 0.0 && rows[i - 1][2] == 0.0));
  }
  ctx.check("n_bar_rel_error", worst, "n_bar");
  ctx.require("n_bar_increasing", n_increasing);
  ctx.require("total_time_increasing", t_increasing);
  ctx.info("total_time_at_095_ms", t095 * 1e3);
  ctx.check("total_time_at_095_ms_low", t095 * 1e3, "band_low_ms");
  ctx.check("total_time_at_095_ms_high", t095 * 1e3, "band_high_ms");
}

void check_spontaneous(CheckContext& ctx, const PhysicalParams& microwave) {
  const SpontaneousDecay sd = spontaneous_decay_estimate(microwave);
  ctx.info("ratio", sd.excited_occupation);
  ctx.check("rel_error", rel_err(sd.excited_occupation, 1.6e-3), "relative");
}

void check_cross_engine(CheckContext& ctx) {
  ProtocolSpec spec = build_two_step_protocol(reference_params(0.5));
  spec.n1 = spec.n2 = 20;
  spec.samples_per_step = 11;
  spec.engine = Engine::gaussian;
  const ProtocolResult g = run_protocol(spec, InitialCondition::vacuum());
  spec.engine = Engine::fock;
  const ProtocolResult f = run_protocol(spec, InitialCondition::vacuum());
  const std::vector<std::string> cols = {"n_a1", "n_a2", "v_x_minus", "v_x_plus", "v_p_minus", "v_p_plus", "duan_sum"};
  ctx.check("max_abs_difference", trajectory_distance(f.trajectory, g.trajectory, cols), "max_abs");
  ctx.info("fock_fidelity", f.report.fidelity);
}

void check_determinism(CheckContext& ctx, const std::function<std::string(std::uint64_t)>& runner) {
  const std::string a = runner(7);
  const std::string b = runner(7);
  ctx.info("csv_bytes", static_cast<double>(a.size()));
  ctx.require("non_empty", a.find('\n') != std::string::npos);
  ctx.require("byte_identical", a == b);
}

// Invariants.

void check_commutator(CheckContext& ctx) {
  const SpaceDescriptor fs = SpaceDescriptor::field(25, 25);
  double worst = 0.0;
  for (int mode = 1; mode <= 2; ++mode) {
    const Operator b = squeezed_ladder_operator(fs, 0.5, mode);
    const Operator other = squeezed_ladder_operator(fs, 0.5, 3 - mode);
    const Matrix comm = (b * b.adjoint() - b.adjoint() * b).matrix();
    const Matrix cross = (b * other.adjoint() - other.adjoint() * b).matrix();
    for (int n1 = 0; n1 <= 8; ++n1) {
      for (int n2 = 0; n2 <= 8; ++n2) {
        const Eigen::Index k = fs.index(0, n1, n2);
        Vector unit = Vector::Zero(fs.dim());
        unit(k) = 1.0;
        worst = std::max({worst, (comm.col(k) - unit).cwiseAbs().maxCoeff(), cross.col(k).cwiseAbs().maxCoeff()});
      }
    }
  }
  ctx.check("max_abs_error", worst, "max_abs");
}

void check_tmsv_b_vacuum(CheckContext& ctx) {
  const SpaceDescriptor fs = SpaceDescriptor::field(25, 25);
  double worst = 0.0;
  for (double eps : {0.3, std::atanh(0.6)}) {
    const Vector psi = tmsv_state_vector(fs, eps, 1e-10).amplitudes();
    for (int mode = 1; mode <= 2; ++mode) worst = std::max(worst, (squeezed_ladder_operator(fs, eps, mode).matrix() * psi).norm());
  }
  ctx.check("max_residual_norm", worst, "max_abs");
}

void check_gaussian_fixed_point(CheckContext& ctx) {
  double worst = 0.0;
  for (double eps : {0.5, 1.832}) {
    const GaussianState tmsv = gaussian_tmsv(eps);
    for (int which = 1; which <= 2; ++which) {
      const GaussianState out = gaussian_lindblad_evolve(tmsv, eps, 1.0, which, 7.0);
      worst = std::max(worst, (out.cov() - tmsv.cov()).cwiseAbs().maxCoeff() / tmsv.cov().cwiseAbs().maxCoeff());
    }
  }
  ctx.check("max_rel_change", worst, "max_rel");
}

void check_duan(CheckContext& ctx) {
  double worst = 0.0;
  for (double eps : {0.1, 0.5, 1.0, 1.832}) worst = std::max(worst, gaussian_epr_variances(gaussian_tmsv(eps)).duan_sum);
  ctx.check("max_duan_sum", worst, "below");
}

void check_swap_consistency(CheckContext& ctx, const PhysicalParams& microwave) {
  double eps_gap = 0.0, sum_gap = 0.0;
  for (const PhysicalParams& p : {as_step1(microwave), reference_params(0.3), reference_params(0.95)}) {
    const ProtocolSpec spec = build_two_step_protocol(p, SwapRule::symmetric_exchange(), 1.0);
    const DerivedParams d1 = derive_rates(spec.steps[0].params), d2 = derive_rates(spec.steps[1].params);
    eps_gap = std::max(eps_gap, std::abs(d1.epsilon - d2.epsilon));
    const auto sum = [](const PhysicalParams& q) { return std::abs(q.delta1) + std::abs(q.delta2); };
    sum_gap = std::max(sum_gap, rel_err(sum(spec.steps[1].params), sum(spec.steps[0].params)));
    if (d1.channel != Channel::b1 || d2.channel != Channel::b2) throw InvalidArgument("steps have the wrong channels");
  }
  ctx.check("epsilon_gap", eps_gap, "epsilon");
  ctx.check("detuning_sum_rel_gap", sum_gap, "detuning_sum");
}

void check_lindblad_trace(CheckContext& ctx) {
  const PhysicalParams p = reference_params(0.5);
  const DerivedParams d = derive_rates(p);
  const SpaceDescriptor fs = SpaceDescriptor::field(10, 10);
  const DensityMatrix rho0 = initial_density(InitialCondition::coherent({0.6, 0.2}, {-0.3, 0.4}), fs);
  LindbladOptions opts;
  opts.samples = 5;
  const Trajectory tr = lindblad_evolve(rho0, {{b_mode_jump_operator(fs, d.epsilon, 1), d.gamma}}, 2.0 / d.gamma,
                                        0.02 / d.gamma, standard_probe(fs, d.epsilon), opts);
  ctx.check("trace_error", std::abs(tr.final_state->trace() - 1.0), "trace");
  ctx.check("min_eigenvalue", tr.final_state->min_eigenvalue(), "eigen_floor");
}

}  // namespace

PhysicalParams microwave_params() {
  PhysicalParams p;
  p.omega1 = kTwoPi * 40e3;
  p.omega2 = kTwoPi * 40e3 / 0.48;
  p.g1 = p.g2 = kTwoPi * 50e3;
  p.delta1 = -kTwoPi * 1e6;
  p.delta2 = kTwoPi * 2e6;
  p.gamma_e = kTwoPi * 1e3;
  p.r_a = 3700.0;
  p.tau = 2.7e-5;
  return p;
}

double CheckContext::tol(const std::string& key) const {
  for (const auto& t : tolerances_)
    if (t.key == key) return t.value;
  throw InvalidArgument("check " + result_.name + " has no tolerance '" + key + "'");
}

void CheckContext::check(const std::string& name, double value, const std::string& key) {
  const auto it = std::find_if(tolerances_.begin(), tolerances_.end(), [&](const Tolerance& t) { return t.key == key; });
  if (it == tolerances_.end()) throw InvalidArgument("check " + result_.name + " has no tolerance '" + key + "'");
  const bool ok = it->bound == Bound::at_most ? value <= it->value : value >= it->value;
  result_.metrics.push_back({name, value, *it, ok});
}

void CheckContext::require(const std::string& name, bool holds) {
  result_.metrics.push_back({name, holds ? 1.0 : 0.0, Tolerance{"", 1.0, Bound::at_least}, holds});
}

void CheckContext::info(const std::string& name, double value) { result_.metrics.push_back({name, value, {}, true}); }

std::vector<CheckDefinition> validation_checks(const ValidationOptions& options) {
  const PhysicalParams microwave = options.microwave.value_or(microwave_params());
  const auto simulate = options.simulate_csv ? options.simulate_csv : in_process_simulate;
  const auto fig2 = options.fig2_csv ? options.fig2_csv : in_process_fig2;
  const Bound le = Bound::at_most, ge = Bound::at_least;

  std::vector<CheckDefinition> defs = {
      {"1", "raman_rate", "Θ₁/2π from the experimental parameter set is 2000 Hz",
       {{"abs_hz", 1e-9, le}}, [microwave](CheckContext& c) { check_raman_rate(c, microwave); }},
      {"2", "bogoliubov_identity", "S†a_jS = cosh ε a_j − sinh ε a_k† on n₁,n₂ <= 12, N = 25, ε = 0.5",
       {{"max_abs", 1e-6, le}}, check_bogoliubov},
      {"3", "tmsv_equivalence", "series TMSV vs S†|0,0⟩ for ε ∈ {0.2, 0.5, atanh 0.6}, N = 25",
       {{"min_overlap", 1.0 - 1e-6, ge}}, check_tmsv_equivalence},
      {"4", "variance_formula", "V(X₁−X₂) = e^{−2ε}/2 at ε = atanh 0.6",
       {{"fock", 1e-4, le}, {"gaussian", 1e-10, le}}, check_variance_formula},
      {"5", "adiabatic_elimination", "three-level vs effective evolution over t = π/(2Θ_b)",
       {{"min_overlap", 0.99, ge}}, check_adiabatic_elimination},
      {"6", "collision_lindblad_rate", "fitted ensemble decay of ⟨b†b⟩ vs γ = r_aΘ_b²τ² (200 runs, defer policy)",
       {{"relative", 0.10, le}}, check_collision_rate},
      {"7", "fock_steady_state", "Fock protocol at r = 0.6, N = 15, γT = 9 from |0,0⟩ and |1,1⟩",
       {{"min_fidelity", 0.99, ge}, {"independence", 1e-3, le}}, check_fock_steady_state},
      {"8", "gaussian_high_squeezing", "Gaussian protocol at r = 0.95: photon number and squeezed variance",
       {{"photon", 0.02, le}, {"variance", 0.03, le}, {"margin", GaussianState::kUncertaintyFloor, ge}},
       check_gaussian_high_squeezing},
      {"9", "fig2_curve", "n̄(r) exact, 2T(r) increasing, 2T(0.95) within [5, 9] ms",
       {{"n_bar", 1e-12, le}, {"band_low_ms", 5.0, ge}, {"band_high_ms", 9.0, le}},
       [fig2](CheckContext& c) { check_fig2(c, fig2()); }},
      {"10", "spontaneous_decay", "Γₑ/γₑ = 1.6e-3 for Ω₁/Δ₁ = 0.04",
       {{"relative", 1e-12, le}}, [microwave](CheckContext& c) { check_spontaneous(c, microwave); }},
      {"11", "cross_engine", "Fock (N = 20) vs Gaussian trajectories for the r = 0.5 protocol",
       {{"max_abs", 1e-3, le}}, check_cross_engine},
      {"12", "determinism", "two simulate runs with seed 7 give byte-identical CSV", {},
       [simulate](CheckContext& c) { check_determinism(c, simulate); }},
      {"I1", "canonical_commutators", "[b_j, b_k†] = δ_jk on n <= 8, N = 25", {{"max_abs", 1e-8, le}},
       check_commutator},
      {"I2", "tmsv_is_b_vacuum", "b_j annihilates the two-mode squeezed vacuum", {{"max_abs", 1e-6, le}},
       check_tmsv_b_vacuum},
      {"I3", "gaussian_fixed_point", "TMSV covariance is stationary under either b-mode jump",
       {{"max_rel", 1e-10, le}}, check_gaussian_fixed_point},
      {"I4", "duan_entangled", "Duan sum of the TMSV stays below 1", {{"below", 1.0 - 1e-9, le}}, check_duan},
      {"I5", "swap_consistency", "both steps share ε and |Δ₁|+|Δ₂|",
       {{"epsilon", 1e-12, le}, {"detuning_sum", 1e-9, le}}, [microwave](CheckContext& c) { check_swap_consistency(c, microwave); }},
      {"I6", "lindblad_trace_positivity", "Lindblad evolution keeps unit trace and a positive state",
       {{"trace", 1e-8, le}, {"eigen_floor", DensityMatrix::kEigenFloor, ge}}, check_lindblad_trace},
  };

  for (const auto& [spec, value] : options.overrides) {
    const auto dot = spec.find('.');
    const std::string who = spec.substr(0, dot);
    const auto it = std::find_if(defs.begin(), defs.end(), [&](const CheckDefinition& d) { return d.id == who || d.name == who; });
    if (it == defs.end()) throw InvalidArgument("unknown check '" + who + "'");
    if (it->tolerances.empty()) throw InvalidArgument("check " + it->name + " has no tolerance to override");
    if (dot == std::string::npos) {
      it->tolerances.front().value = value;
      continue;
    }
    const std::string key = spec.substr(dot + 1);
    auto t = std::find_if(it->tolerances.begin(), it->tolerances.end(), [&](const Tolerance& x) { return x.key == key; });
    if (t == it->tolerances.end()) throw InvalidArgument("check " + it->name + " has no tolerance '" + key + "'");
    t->value = value;
  }
  if (!options.only.empty()) {
    for (const auto& want : options.only) {
      if (std::none_of(defs.begin(), defs.end(), [&](const CheckDefinition& d) { return d.id == want || d.name == want; }))
        throw InvalidArgument("unknown check '" + want + "'");
    }
    std::erase_if(defs, [&](const CheckDefinition& d) {
      return std::none_of(options.only.begin(), options.only.end(),
                          [&](const std::string& w) { return w == d.id || w == d.name; });
    });
  }
  return defs;
}

std::vector<CheckResult> run_validation(const ValidationOptions& options,
                                        const std::function<void(const CheckResult&)>& on_result) {
  std::vector<CheckResult> results;
  for (const CheckDefinition& def : validation_checks(options)) {
    CheckResult r;
    r.id = def.id;
    r.name = def.name;
    r.description = def.description;
    const auto start = std::chrono::steady_clock::now();
    try {
      CheckContext ctx(def.tolerances, r);
      def.run(ctx);
      r.passed = std::all_of(r.metrics.begin(), r.metrics.end(), [](const Metric& m) { return m.passed; });
    } catch (const std::exception& e) {
      r.error = e.what();
      r.passed = false;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

nlohmann::json validation_summary(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& m : r.metrics) {
      nlohmann::json jm = {{"name", m.name}, {"value", m.value}, {"passed", m.passed}};
      if (m.limit) {
        jm["bound"] = m.limit->bound == Bound::at_most ? "<=" : ">=";
        jm["tolerance"] = m.limit->value;
      }
      metrics.push_back(jm);
    }
    nlohmann::json jr = {{"id", r.id},           {"name", r.name},       {"description", r.description},
                         {"passed", r.passed},   {"metrics", metrics},   {"notes", r.notes},
                         {"seconds", r.seconds}};
    if (!r.error.empty()) jr["error"] = r.error;
    checks.push_back(jr);
    all = all && r.passed;
  }
  return {{"passed", all}, {"count", results.size()}, {"checks", checks}};
}

std::string format_check_line(const CheckResult& r) {
  std::string line = std::string(r.passed ? "[PASS] " : "[FAIL] ") + r.id + " " + r.name;
  if (!r.error.empty()) return line + "  error: " + r.error;
  char buf[160];
  for (const auto& m : r.metrics) {
    if (!m.limit) continue;
    if (m.limit->key.empty()) {
      std::snprintf(buf, sizeof buf, "  %s=%s", m.name.c_str(), m.passed ? "yes" : "no");
    } else {
      std::snprintf(buf, sizeof buf, "  %s=%.6g (%s %.6g)", m.name.c_str(), m.value,
                    m.limit->bound == Bound::at_most ? "<=" : ">=", m.limit->value);
    }
    line += buf;
  }
  std::snprintf(buf, sizeof buf, "  [%.1fs]", r.seconds);
  return line + buf;
}

}  // namespace tmsq
