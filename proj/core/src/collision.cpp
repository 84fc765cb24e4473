#include "tmsq/collision.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tmsq/errors.hpp"
#include "tmsq/parallel.hpp"

namespace tmsq {

namespace {

std::vector<double> sample_times(double duration, int samples) {
  if (samples < 1) throw InvalidArgument("need at least one sample");
  if (duration <= 0.0 || samples == 1) return {0.0};
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) t[s] = duration * s / (samples - 1);
  t.back() = duration;
  return t;
}

void check_leak(const DensityMatrix& rho) {
  const double leak = truncation_leak(rho);
  if (leak > kLeakWarning) {
    const int n = std::min(rho.space().n1(), rho.space().n2());
    throw TruncationError("boundary Fock population " + std::to_string(leak) +
                              " exceeds 1e-3; increase the truncation",
                          n + n / 2 + 1);
  }
}

void add_schedule_diagnostics(Trajectory& traj, std::size_t completed, const ArrivalSchedule& s) {
  traj.diagnostics.push_back("collisions " + std::to_string(completed) + ", dropped " +
                             std::to_string(s.dropped) + ", deferred " + std::to_string(s.deferred) +
                             ", unfinished " + std::to_string(s.unfinished));
}

}  // namespace

void ArrivalProcess::validate() const {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidArgument("arrival rate must be finite and >= 0");
}

double exponential_sample(std::uint64_t bits, double rate) {
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
  return -std::log1p(-u) / rate;
}

std::vector<double> interarrival_times(const ArrivalProcess& arrivals, std::size_t n) {
  arrivals.validate();
  if (arrivals.rate == 0.0) throw InvalidArgument("zero-rate process has no arrivals");
  std::mt19937_64 rng(arrivals.seed);
  std::vector<double> out(n);
  for (auto& x : out) x = exponential_sample(rng(), arrivals.rate);
  return out;
}

ArrivalSchedule schedule_arrivals(const ArrivalProcess& arrivals, double tau, double duration) {
  arrivals.validate();
  if (!(tau >= 0.0)) throw InvalidArgument("interaction time must be >= 0");
  ArrivalSchedule s;
  if (arrivals.rate == 0.0 || duration <= 0.0) return s;
  std::mt19937_64 rng(arrivals.seed);
  double t = 0.0;
  double busy_until = -1.0;
  while (true) {
    t += exponential_sample(rng(), arrivals.rate);
    if (t >= duration) break;
    double start = t;
    if (t < busy_until) {
      if (arrivals.policy == OverlapPolicy::drop) {
        ++s.dropped;
        continue;
      }
      start = busy_until;
      ++s.deferred;
    }
    busy_until = start + tau;
    if (busy_until <= duration) {
      s.completions.push_back(busy_until);
    } else {
      ++s.unfinished;
    }
  }
  return s;
}

DensityMatrix collision_step(const DensityMatrix& rho_field, Level atom_init, const Operator& h_int,
                             double tau) {
  if (!rho_field.space().is_field_only()) throw SpaceMismatch("collision_step expects a field-only state");
  if (!(h_int.space().field_space() == rho_field.space())) {
    throw SpaceMismatch("collision_step: interaction and field truncations differ");
  }
  if (!h_int.space().has_level(atom_init)) {
    throw InvalidArgument(std::string("atomic level ") + level_name(atom_init) +
                          " is not present in the interaction space");
  }
  if (tau == 0.0) return rho_field;
  const DensityMatrix joint = compose_with_atom(atom_init, h_int.space().atom_levels(), rho_field);
  const DensityMatrix evolved = evolve_time_independent(h_int, joint, tau);
  return partial_trace(evolved, SubsystemSet::field());
}

CollisionMap::CollisionMap(const Operator& h_int, Level atom_init, double tau)
    : field_(h_int.space().field_space()) {
  if (!h_int.space().has_level(atom_init)) {
    throw InvalidArgument(std::string("atomic level ") + level_name(atom_init) +
                          " is not present in the interaction space");
  }
  if (h_int.hermiticity_error() > 1e-8) throw InvalidArgument("interaction Hamiltonian is not Hermitian");
  const Matrix u = unitary_propagator(h_int, tau).matrix();
  const Eigen::Index fd = field_.dim();
  const Eigen::Index col = static_cast<int>(atom_init) * fd;
  for (int m = 0; m < h_int.space().atom_levels(); ++m) {
    kraus_.push_back(u.block(m * fd, col, fd, fd));
  }
}

Matrix CollisionMap::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const Matrix& k : kraus_) {
    const Matrix kr = k * rho;
    out.noalias() += kr * k.adjoint();
  }
  return out;
}

DensityMatrix CollisionMap::apply(const DensityMatrix& rho_field) const {
  if (!(rho_field.space() == field_)) throw SpaceMismatch("CollisionMap: state lives on a different space");
  return DensityMatrix::renormalized(field_, apply(rho_field.matrix()));
}

Operator collision_hamiltonian(const ProtocolStep& step, const SpaceDescriptor& field_space,
                               bool include_stark, std::vector<std::string>* warnings, FieldBasis basis) {
  const DerivedParams d = derive_rates(step.params);
  if (d.channel != step.channel) throw InvalidArgument("step channel does not match its parameters");
  if (step.atom_state != channel_atom_state(step.channel)) {
    throw InvalidArgument("atoms must enter in the channel's dark state");
  }
  const double ra_tau = step.params.r_a * step.params.tau;
  if (ra_tau > 0.2) {
    throw InvalidArgument("r_a*tau = " + std::to_string(ra_tau) +
                          " exceeds 0.2; more than one atom would share the cavity");
  }
  const double coupling = d.theta_b * step.params.tau;
  if (coupling >= 0.5) {
    throw InvalidArgument("Theta_b*tau = " + std::to_string(coupling) + " is not a weak collision (< 0.5)");
  }
  if (coupling > 0.2 && warnings) {
    warnings->push_back("Theta_b*tau = " + std::to_string(coupling) + " above 0.2");
  }
  const StarkCoefficients stark = include_stark ? stark_coefficients(step.params) : StarkCoefficients::none();
  return build_selective_hamiltonian(d, stark, field_space.with_atom_levels(2), basis);
}

Trajectory run_collision_model(const DensityMatrix& rho0, const ProtocolStep& step, double duration,
                               const ArrivalProcess& arrivals, const Probe& probe,
                               const CollisionOptions& options) {
  if (!rho0.space().is_field_only()) throw SpaceMismatch("run_collision_model expects a field-only state");
  Trajectory traj(probe.names);
  const Operator h = collision_hamiltonian(step, rho0.space(), options.include_stark, &traj.diagnostics, options.basis);
  const CollisionMap phi(h, step.atom_state, step.params.tau);
  const ArrivalSchedule sched = schedule_arrivals(arrivals, step.params.tau, duration);
  add_schedule_diagnostics(traj, sched.completions.size(), sched);

  Matrix rho = rho0.matrix();
  std::size_t next = 0;
  DensityMatrix state = rho0;
  for (double t : sample_times(duration, options.samples)) {
    bool changed = false;
    while (next < sched.completions.size() && sched.completions[next] <= t) {
      rho = phi.apply(rho);
      ++next;
      changed = true;
    }
    if (changed) {
      state = DensityMatrix::renormalized(rho0.space(), rho);
      rho = state.matrix();
      check_leak(state);
    }
    traj.append(t, probe.evaluate(state));
  }
  if (options.keep_final_state) traj.final_state = state;
  return traj;
}

Trajectory run_collision_ensemble(const DensityMatrix& rho0, const ProtocolStep& step, double duration,
                                  const ArrivalProcess& master, int count, const Probe& probe,
                                  const CollisionOptions& options) {
  if (!rho0.space().is_field_only()) throw SpaceMismatch("run_collision_ensemble expects a field-only state");
  if (count < 1) throw InvalidArgument("ensemble needs at least one trajectory");
  Trajectory traj(probe.names);
  const Operator h = collision_hamiltonian(step, rho0.space(), options.include_stark, &traj.diagnostics, options.basis);
  const CollisionMap phi(h, step.atom_state, step.params.tau);
  const std::vector<double> times = sample_times(duration, options.samples);

  // counts[i][s]: collisions completed by run i at sample s
  std::vector<std::vector<std::size_t>> counts(static_cast<std::size_t>(count));
  std::vector<ArrivalSchedule> schedules(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    ArrivalProcess a = master;
    a.seed = master.seed ^ static_cast<std::uint64_t>(i);
    schedules[i] = schedule_arrivals(a, step.params.tau, duration);
    const auto& c = schedules[i].completions;
    counts[i].resize(times.size());
    for (std::size_t s = 0; s < times.size(); ++s) {
      counts[i][s] = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), times[s]) - c.begin());
    }
  });
  ArrivalSchedule total;
  std::size_t k_max = 0;
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    total.dropped += schedules[i].dropped;
    total.deferred += schedules[i].deferred;
    total.unfinished += schedules[i].unfinished;
    k_max = std::max(k_max, counts[i].back());
  }
  std::size_t completed = 0;
  for (const auto& c : counts) completed += c.back();
  add_schedule_diagnostics(traj, completed, total);

  std::vector<std::vector<double>> weight(times.size(), std::vector<double>(k_max + 1, 0.0));
  for (const auto& c : counts) {
    for (std::size_t s = 0; s < times.size(); ++s) weight[s][c[s]] += 1.0 / count;
  }
  const Eigen::Index dim = rho0.space().dim();
  std::vector<Matrix> mean(times.size(), Matrix::Zero(dim, dim));
  Matrix phi_k = rho0.matrix();
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (k > 0) phi_k = phi.apply(phi_k);
    for (std::size_t s = 0; s < times.size(); ++s) {
      if (weight[s][k] > 0.0) mean[s] += weight[s][k] * phi_k;
    }
  }
  std::optional<DensityMatrix> last;
  for (std::size_t s = 0; s < times.size(); ++s) {
    DensityMatrix state = DensityMatrix::renormalized(rho0.space(), mean[s]);
    check_leak(state);
    traj.append(times[s], probe.evaluate(state));
    last = std::move(state);
  }
  if (options.keep_final_state) traj.final_state = last;
  return traj;
}

}  // namespace tmsq
