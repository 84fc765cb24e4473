#include "tmsq/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "tmsq/collision.hpp"
#include "tmsq/errors.hpp"

namespace tmsq {

namespace {

bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

constexpr double kBasisLossWarning = 1e-6;

double detuning_sum(const PhysicalParams& p) { return std::abs(p.delta1) + std::abs(p.delta2); }

}  // namespace

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::fock: return "fock";
    case Engine::gaussian: return "gaussian";
    case Engine::collision: return "collision";
  }
  return "?";
}

Engine parse_engine(std::string_view name) {
  if (name == "fock") return Engine::fock;
  if (name == "gaussian") return Engine::gaussian;
  if (name == "collision") return Engine::collision;
  throw InvalidArgument("unknown engine '" + std::string(name) + "' (expected fock, gaussian or collision)");
}

std::string policy_name(OverlapPolicy p) { return p == OverlapPolicy::drop ? "drop" : "defer"; }

OverlapPolicy parse_policy(std::string_view name) {
  if (name == "drop") return OverlapPolicy::drop;
  if (name == "defer") return OverlapPolicy::defer;
  throw InvalidArgument("unknown overlap policy '" + std::string(name) + "' (expected drop or defer)");
}

ProtocolStep make_step(const PhysicalParams& params, double duration) {
  if (!(duration >= 0.0)) throw InvalidArgument("step duration must be >= 0");
  const DerivedParams d = derive_rates(params);
  return {params, channel_atom_state(d.channel), duration, d.channel};
}

void ProtocolSpec::validate() const {
  if (steps.empty()) throw InvalidArgument("protocol has no steps");
  if (n1 < 1 || n2 < 1) throw InvalidArgument("truncation must be >= 1");
  if (samples_per_step < 1) throw InvalidArgument("samples_per_step must be >= 1");
  if (!(gamma_dt > 0.0)) throw InvalidArgument("gamma_dt must be positive");
  if (trajectories < 1) throw InvalidArgument("trajectories must be >= 1");
  const DerivedParams first = derive_rates(steps.front().params);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const ProtocolStep& s = steps[j];
    const DerivedParams d = derive_rates(s.params);
    const std::string tag = "step " + std::to_string(j + 1);
    if (!(s.duration >= 0.0)) throw InvalidArgument(tag + ": duration must be >= 0");
    if (d.channel != s.channel) throw InvalidArgument(tag + ": channel does not match the parameters");
    if (s.atom_state != channel_atom_state(s.channel)) {
      throw InvalidArgument(tag + ": atoms must enter in " + std::string(1, level_name(channel_atom_state(s.channel))));
    }
    if (std::abs(d.epsilon - first.epsilon) > 1e-12 * std::max(1.0, first.epsilon)) {
      throw InvalidArgument(tag + ": squeeze parameter differs from step 1");
    }
    if (!close_relative(detuning_sum(s.params), detuning_sum(steps.front().params), 1e-9)) {
      throw InvalidArgument(tag + ": |delta1| + |delta2| differs from step 1");
    }
  }
}

PhysicalParams step2_params(const PhysicalParams& step1, const SwapRule& rule) {
  step1.validate();
  const double t1 = step1.omega1 * step1.g1;
  const double t2 = step1.omega2 * step1.g2;
  if (t1 == 0.0 || t2 == 0.0) throw InvalidArgument("both Raman channels must be driven");
  const double t1p = rule.symmetric ? t2 : rule.tilde1;
  const double t2p = rule.symmetric ? t1 : rule.tilde2;
  if (!std::isfinite(t1p) || !std::isfinite(t2p) || t1p == 0.0 || t2p == 0.0) {
    throw InvalidArgument("swap rule products must be finite and nonzero");
  }
  const double lhs = std::abs(t1) - std::abs(t2p);
  const double rhs = std::abs(t1p) - std::abs(t2);
  const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t1p), std::abs(t2p)});
  if (lhs < rhs - 1e-12 * scale) {
    throw InvalidArgument("swap rule violates |Ω̃1| − |Ω̃'2| >= |Ω̃'1| − |Ω̃2|");
  }
  PhysicalParams p = step1;
  p.delta1 = std::copysign(std::abs(t1p / t2) * std::abs(step1.delta2), step1.delta1);
  p.delta2 = std::copysign(std::abs(t2p / t1) * std::abs(step1.delta1), step1.delta2);
  p.omega1 = t1p / step1.g1;
  p.omega2 = t2p / step1.g2;
  if (!close_relative(detuning_sum(p), detuning_sum(step1), 1e-9)) {
    throw InvalidArgument("swap rule changes |delta1| + |delta2|");
  }
  return p;
}

PhysicalParams as_step1(const PhysicalParams& p) {
  const DerivedParams d = derive_rates(p);
  if (d.channel == Channel::b1) return p;
  return step2_params(p, SwapRule::symmetric_exchange());
}

ProtocolSpec build_two_step_protocol(const PhysicalParams& step1, const SwapRule& rule,
                                     std::optional<double> step_duration, double n_target) {
  const DerivedParams d1 = derive_rates(step1);
  if (d1.channel != Channel::b1) throw InvalidArgument("step 1 needs Θ1 > Θ2");
  const PhysicalParams p2 = step2_params(step1, rule);
  const DerivedParams d2 = derive_rates(p2);
  if (d2.channel != Channel::b2) throw InvalidArgument("step 2 needs Θ1 < Θ2");
  double duration = 0.0;
  if (step_duration) {
    duration = *step_duration;
  } else {
    if (!(d1.gamma > 0.0)) throw InvalidArgument("step durations need gamma > 0 (set r_a and tau)");
    duration = preparation_time(d1.r, d1.gamma, n_target).per_step;
  }
  ProtocolSpec spec;
  spec.steps = {make_step(step1, duration), make_step(p2, duration)};
  spec.validate();
  return spec;
}

PhysicalParams reference_params(double r, double coupling, double occupancy) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("r must lie in (0, 1)");
  if (!(coupling > 0.0) || !(occupancy >= 0.0)) throw InvalidArgument("coupling must be > 0 and occupancy >= 0");
  PhysicalParams p;
  p.delta1 = -1.0;
  p.delta2 = 2.0;
  p.g1 = 0.05;
  p.g2 = 0.05;
  p.omega1 = 0.05;
  p.omega2 = 0.1 * r;
  const double theta_b = 0.0025 * std::sqrt(1.0 - r * r);
  p.tau = coupling / theta_b;
  p.r_a = occupancy / p.tau;
  return p;
}

bool RegimeReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const RegimeCheck& c) { return c.pass; });
}

const RegimeCheck& RegimeReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw InvalidArgument("no regime check named '" + name + "'");
}

RegimeReport validate_regime(const PhysicalParams& p, const DerivedParams& d,
                             std::optional<double> protocol_time) {
  RegimeReport r;
  auto add = [&](const char* name, double value, double threshold) {
    r.checks.push_back({name, value, threshold, value <= threshold});
  };
  add("dispersive", p.dispersive_ratio(), 0.1);
  add("weak_coupling", d.theta_b * p.tau, 0.2);
  add("single_atom", p.r_a * p.tau, 0.2);
  double total = 0.0;
  if (protocol_time) {
    total = *protocol_time;
  } else if (d.gamma > 0.0 && d.r > 0.0) {
    total = preparation_time(d.r, d.gamma, kDefaultStepTarget).total;
  }
  add("spontaneous_decay", spontaneous_decay_estimate(p).rate * total, 0.1);
  return r;
}

DensityMatrix initial_density(const InitialCondition& init, const SpaceDescriptor& field) {
  if (!field.is_field_only()) throw SpaceMismatch("initial state must live on a field-only space");
  switch (init.kind) {
    case InitialCondition::Kind::vacuum:
      return DensityMatrix::pure(field_basis_state(field, 0, 0));
    case InitialCondition::Kind::fock:
      return DensityMatrix::pure(field_basis_state(field, init.n1, init.n2));
    case InitialCondition::Kind::coherent: {
      if (!displacement_within_truncation(field, init.alpha1, init.alpha2)) {
        throw TruncationError("coherent amplitude too large for the truncation",
                              static_cast<int>(std::ceil(4.0 * std::max(std::norm(init.alpha1),
                                                                        std::norm(init.alpha2)))));
      }
      const Operator d = build_displacement_operator(field, init.alpha1, init.alpha2);
      return DensityMatrix::pure(StateVector(field, d.matrix().col(0)).normalized());
    }
    case InitialCondition::Kind::thermal: {
      if (!(init.nbar >= 0.0)) throw InvalidArgument("thermal occupation must be >= 0");
      auto weights = [&](int n) {
        Eigen::VectorXd w(n);
        const double q = init.nbar / (1.0 + init.nbar);
        for (int k = 0; k < n; ++k) w(k) = std::pow(q, k) / (1.0 + init.nbar);
        return w;
      };
      const Eigen::VectorXd w1 = weights(field.n1());
      const Eigen::VectorXd w2 = weights(field.n2());
      Matrix m = Matrix::Zero(field.dim(), field.dim());
      for (int a = 0; a < field.n1(); ++a)
        for (int b = 0; b < field.n2(); ++b) m(field.index(0, a, b), field.index(0, a, b)) = w1(a) * w2(b);
      return DensityMatrix::renormalized(field, std::move(m));
    }
  }
  throw InvalidArgument("unknown initial condition");
}

GaussianState initial_gaussian(const InitialCondition& init) {
  switch (init.kind) {
    case InitialCondition::Kind::vacuum:
      return gaussian_vacuum();
    case InitialCondition::Kind::fock:
      if (init.n1 == 0 && init.n2 == 0) return gaussian_vacuum();
      throw InvalidArgument("Fock states other than the vacuum are not Gaussian");
    case InitialCondition::Kind::coherent:
      return gaussian_displaced(gaussian_vacuum(), init.alpha1, init.alpha2);
    case InitialCondition::Kind::thermal:
      return gaussian_thermal(init.nbar, init.nbar);
  }
  throw InvalidArgument("unknown initial condition");
}

ProtocolResult run_protocol(const ProtocolSpec& spec, const InitialCondition& initial) {
  if (spec.engine == Engine::gaussian) {
    spec.validate();
    ProtocolResult out;
    GaussianRun run = run_protocol_gaussian(spec, initial_gaussian(initial));
    const double eps = derive_rates(spec.steps.front().params).epsilon;
    double total = 0.0;
    for (const auto& s : spec.steps) total += s.duration;
    for (const auto& s : spec.steps) out.regimes.push_back(validate_regime(s.params, derive_rates(s.params), total));
    out.trajectory = std::move(run.trajectory);
    out.report = gaussian_report(run.final_state, eps);
    out.final_gaussian = run.final_state;
    for (const auto& r : out.regimes)
      for (const auto& c : r.checks)
        if (!c.pass) out.warnings.push_back("regime check " + c.name + " failed (" + std::to_string(c.value) + ")");
    return out;
  }
  return run_protocol(spec, initial_density(initial, SpaceDescriptor::field(spec.n1, spec.n2)));
}

ProtocolResult run_protocol(const ProtocolSpec& spec, const DensityMatrix& initial) {
  spec.validate();
  if (spec.engine == Engine::gaussian) {
    throw InvalidArgument("engine/truncation mismatch: the gaussian engine takes a Gaussian initial condition");
  }
  const SpaceDescriptor field = SpaceDescriptor::field(spec.n1, spec.n2);
  if (!(initial.space() == field)) {
    throw SpaceMismatch("engine/truncation mismatch: initial state does not match the protocol truncation");
  }
  ProtocolResult out;
  out.trajectory = Trajectory(standard_observable_names());
  double total = 0.0;
  for (const auto& s : spec.steps) total += s.duration;

  // Steps run in the Bogoliubov basis: the jumps only lower the retained
  // occupations there, so the cutoff cannot feed population back.
  const double eps = derive_rates(spec.steps.front().params).epsilon;
  const FieldBasis basis = FieldBasis::bogoliubov;
  const Probe probe = standard_probe(field, eps, basis);
  double lost = 0.0;
  DensityMatrix rho = to_bogoliubov_basis(initial, eps, &lost);
  if (lost > kBasisLossWarning) {
    out.warnings.push_back("initial state loses " + std::to_string(lost) +
                           " of its weight beyond the truncation in the Bogoliubov basis");
  }
  double offset = 0.0;
  for (std::size_t j = 0; j < spec.steps.size(); ++j) {
    const ProtocolStep& step = spec.steps[j];
    const DerivedParams d = derive_rates(step.params);
    out.regimes.push_back(validate_regime(step.params, d, total));
    Trajectory part;
    if (spec.engine == Engine::fock) {
      const int which = channel_mode(d.channel);
      std::vector<Jump> jumps;
      double dt = 1.0;
      if (d.gamma > 0.0) {
        jumps.push_back({bogoliubov_ladder_operator(field, d.epsilon, which, basis), d.gamma});
        dt = spec.gamma_dt / d.gamma;
      }
      LindbladOptions opts;
      opts.samples = spec.samples_per_step;
      part = lindblad_evolve(rho, jumps, step.duration, dt, probe, opts);
    } else {
      ArrivalProcess master{step.params.r_a, spec.seed ^ (static_cast<std::uint64_t>(j) << 32), spec.policy};
      CollisionOptions opts;
      opts.samples = spec.samples_per_step;
      opts.include_stark = spec.include_stark;
      opts.basis = basis;
      part = run_collision_ensemble(rho, step, step.duration, master, spec.trajectories, probe, opts);
    }
    rho = *part.final_state;
    part.final_state.reset();
    for (const auto& msg : part.diagnostics) out.warnings.push_back("step " + std::to_string(j + 1) + ": " + msg);
    part.diagnostics.clear();
    out.trajectory.extend(part, offset);
    offset += step.duration;
  }
  for (const auto& r : out.regimes)
    for (const auto& c : r.checks)
      if (!c.pass) out.warnings.push_back("regime check " + c.name + " failed (" + std::to_string(c.value) + ")");
  if (truncation_leak(rho) > kLeakWarning) {
    out.warnings.push_back("Bogoliubov-basis truncation leak " + std::to_string(truncation_leak(rho)) +
                           " exceeds " + std::to_string(kLeakWarning));
  }
  const DensityMatrix photon = from_bogoliubov_basis(rho, eps, &lost);
  if (lost > kBasisLossWarning) {
    out.warnings.push_back("final state loses " + std::to_string(lost) + " of its weight beyond the truncation");
  }
  epr_variances_fock(photon, &out.warnings);
  out.report = squeezing_report(photon, eps);
  out.final_density = photon;
  return out;
}

}  // namespace tmsq
