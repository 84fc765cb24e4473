#include "tmsq/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "tmsq/errors.hpp"

namespace tmsq {

namespace {

void require_same_space(const SpaceDescriptor& a, const SpaceDescriptor& b, const char* what) {
  if (!(a == b)) throw SpaceMismatch(std::string(what) + ": operands live on different spaces");
}

void require_hermitian(const Operator& h, const char* what) {
  if (h.hermiticity_error() > 1e-8) throw InvalidArgument(std::string(what) + ": Hamiltonian is not Hermitian");
}

// Number of equal steps of at most dt covering span.
long step_count(double span, double dt) {
  if (span <= 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
}

void check_time_dependent_step(double dt, double max_frequency) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (max_frequency > 0.0 && dt * max_frequency > 0.05) {
    const double need = 0.05 / max_frequency;
    throw StepSizeError("time step " + std::to_string(dt) + " exceeds 0.05/max|detuning| = " +
                            std::to_string(need),
                        need);
  }
}

}  // namespace

void Trajectory::append(double t, std::vector<double> values) {
  if (values.size() != names_.size()) {
    throw InvalidArgument("trajectory record has " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(names_.size()));
  }
  if (!times_.empty() && !(t > times_.back())) {
    throw InvalidArgument("trajectory times must be strictly increasing");
  }
  times_.push_back(t);
  records_.push_back(std::move(values));
}

void Trajectory::extend(const Trajectory& other, double offset) {
  if (other.names_ != names_) throw InvalidArgument("cannot join trajectories with different observables");
  for (std::size_t i = 0; i < other.size(); ++i) {
    const double t = other.times_[i] + offset;
    if (!times_.empty() && !(t > times_.back())) continue;
    append(t, other.records_[i]);
  }
  diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
}

std::size_t Trajectory::column_index(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidArgument("no observable named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> Trajectory::column(std::string_view name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r[c]);
  return out;
}

double Trajectory::value(std::size_t sample, std::string_view name) const {
  return records_.at(sample)[column_index(name)];
}

DensityMatrix evolve_time_independent(const Operator& h, const DensityMatrix& rho0, double t) {
  require_same_space(h.space(), rho0.space(), "evolve_time_independent");
  require_hermitian(h, "evolve_time_independent");
  if (t == 0.0) return rho0;
  const Matrix u = unitary_propagator(h, t).matrix();
  return DensityMatrix::renormalized(rho0.space(), u * rho0.matrix() * u.adjoint());
}

DensityMatrix evolve_time_dependent(const TimeDependentHamiltonian& h_of_t, double max_frequency,
                                    const DensityMatrix& rho0, double t0, double t1, double dt) {
  check_time_dependent_step(dt, max_frequency);
  const long n = step_count(t1 - t0, dt);
  if (n == 0) return rho0;
  const double h = (t1 - t0) / static_cast<double>(n);

  auto hmat = [&](double t) {
    Operator op = h_of_t(t);
    require_same_space(op.space(), rho0.space(), "evolve_time_dependent");
    return op.matrix();
  };
  // −i[H, ρ] = −i(Hρ − (Hρ)†) for Hermitian H and ρ
  auto rhs = [](const Matrix& hm, const Matrix& rho) {
    const Matrix x = hm * rho;
    return Matrix(-kI * (x - x.adjoint()));
  };

  Matrix rho = rho0.matrix();
  Matrix h_start = hmat(t0);
  for (long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const Matrix h_mid = hmat(t + 0.5 * h);
    const Matrix h_end = hmat(t + h);
    const Matrix k1 = rhs(h_start, rho);
    const Matrix k2 = rhs(h_mid, rho + 0.5 * h * k1);
    const Matrix k3 = rhs(h_mid, rho + 0.5 * h * k2);
    const Matrix k4 = rhs(h_end, rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    h_start = h_end;
  }
  return DensityMatrix::renormalized(rho0.space(), std::move(rho));
}

StateVector evolve_time_dependent(const TimeDependentHamiltonian& h_of_t, double max_frequency,
                                  const StateVector& psi0, double t0, double t1, double dt) {
  check_time_dependent_step(dt, max_frequency);
  const long n = step_count(t1 - t0, dt);
  if (n == 0) return psi0;
  const double h = (t1 - t0) / static_cast<double>(n);

  auto hmat = [&](double t) {
    Operator op = h_of_t(t);
    require_same_space(op.space(), psi0.space(), "evolve_time_dependent");
    return op.matrix();
  };
  Vector psi = psi0.amplitudes();
  Matrix h_start = hmat(t0);
  for (long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const Matrix h_mid = hmat(t + 0.5 * h);
    const Matrix h_end = hmat(t + h);
    const Vector k1 = -kI * (h_start * psi);
    const Vector k2 = -kI * (h_mid * (psi + 0.5 * h * k1));
    const Vector k3 = -kI * (h_mid * (psi + 0.5 * h * k2));
    const Vector k4 = -kI * (h_end * (psi + h * k3));
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    h_start = h_end;
  }
  return {psi0.space(), std::move(psi)};
}

DensityMatrix evolve_time_dependent(const FullHamiltonian& h, const DensityMatrix& rho0, double t0,
                                    double t1, double dt) {
  return evolve_time_dependent([&h](double t) { return h.at(t); }, h.max_frequency(), rho0, t0, t1, dt);
}

StateVector evolve_time_dependent(const FullHamiltonian& h, const StateVector& psi0, double t0,
                                  double t1, double dt) {
  return evolve_time_dependent([&h](double t) { return h.at(t); }, h.max_frequency(), psi0, t0, t1, dt);
}

Trajectory lindblad_evolve(const DensityMatrix& rho0, const std::vector<Jump>& jumps, double t_span,
                           double dt, const Probe& probe, const LindbladOptions& options) {
  const SpaceDescriptor& space = rho0.space();
  if (!(t_span >= 0.0)) throw InvalidArgument("lindblad_evolve: negative time span");
  if (!(dt > 0.0)) throw InvalidArgument("lindblad_evolve: time step must be positive");
  if (options.samples < 1) throw InvalidArgument("lindblad_evolve: need at least one sample");

  double max_rate = 0.0;
  double stiffness = 0.0;  // 2‖H‖ + 2Σ γ λmax(L†L) bounds the superoperator norm
  const Eigen::Index dim = space.dim();
  Matrix drift = Matrix::Zero(dim, dim);  // −iH − ½ Σ γ L†L
  std::vector<Matrix> lops;
  std::vector<double> rates;
  for (const Jump& j : jumps) {
    require_same_space(j.op.space(), space, "lindblad_evolve");
    if (!(j.rate >= 0.0)) throw InvalidArgument("lindblad_evolve: jump rates must be non-negative");
    if (j.rate == 0.0) continue;
    const Matrix k = j.op.matrix().adjoint() * j.op.matrix();
    drift -= 0.5 * j.rate * k;
    Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
    stiffness += 2.0 * j.rate * es.eigenvalues().maxCoeff();
    max_rate = std::max(max_rate, j.rate);
    lops.push_back(j.op.matrix());
    rates.push_back(j.rate);
  }
  double h_norm = 0.0;
  if (options.hamiltonian) {
    require_same_space(options.hamiltonian->space(), space, "lindblad_evolve");
    require_hermitian(*options.hamiltonian, "lindblad_evolve");
    drift -= kI * options.hamiltonian->matrix();
    h_norm = options.hamiltonian->matrix().cwiseAbs().rowwise().sum().maxCoeff();
    stiffness += 2.0 * h_norm;
  }
  const double scale = std::max(max_rate, h_norm);
  if (dt * scale > 0.05) {
    const double need = 0.05 / scale;
    throw StepSizeError("Lindblad step " + std::to_string(dt) + " exceeds 0.05/max(rate, |H|) = " +
                            std::to_string(need),
                        need);
  }

  Trajectory traj(probe.names);
  // RK4 is stable on the negative real axis down to about −2.78; stay well inside.
  double step_cap = dt;
  if (stiffness > 0.0 && dt * stiffness > 2.5) {
    step_cap = 2.5 / stiffness;
    traj.diagnostics.push_back("Lindblad step reduced to " + std::to_string(step_cap) +
                               " for stability (generator norm " + std::to_string(stiffness) + ")");
  }

  auto rhs = [&](const Matrix& rho) {
    const Matrix g = drift * rho;
    Matrix out = g + g.adjoint();
    for (std::size_t i = 0; i < lops.size(); ++i) {
      const Matrix lr = lops[i] * rho;
      out.noalias() += rates[i] * (lr * lops[i].adjoint());
    }
    return out;
  };

  const int intervals = t_span > 0.0 ? std::max(options.samples - 1, 1) : 0;
  const double sample_span = intervals > 0 ? t_span / intervals : 0.0;
  const long per_sample = intervals > 0 ? step_count(sample_span, step_cap) : 0;
  const double h = per_sample > 0 ? sample_span / static_cast<double>(per_sample) : 0.0;

  DensityMatrix state = rho0;
  traj.append(0.0, probe.evaluate(state));
  Matrix rho = rho0.matrix();
  bool drift_reported = false;
  const bool active = !lops.empty() || options.hamiltonian.has_value();
  for (int s = 1; s <= intervals; ++s) {
    if (active) {
      for (long k = 0; k < per_sample; ++k) {
        const Matrix k1 = rhs(rho);
        const Matrix k2 = rhs(rho + 0.5 * h * k1);
        const Matrix k3 = rhs(rho + 0.5 * h * k2);
        const Matrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    double drift_amount = 0.0;
    state = DensityMatrix::renormalized(space, rho, &drift_amount);
    if (drift_amount > DensityMatrix::kTraceTol && !drift_reported) {
      traj.diagnostics.push_back("trace drift " + std::to_string(drift_amount) + " renormalised");
      drift_reported = true;
    }
    rho = state.matrix();
    const double t = s == intervals ? t_span : sample_span * s;
    traj.append(t, probe.evaluate(state));
  }
  if (dim <= 1024) {
    const double lowest = state.min_eigenvalue();
    if (lowest < DensityMatrix::kEigenFloor) {
      traj.diagnostics.push_back("final state has eigenvalue " + std::to_string(lowest));
    }
  }
  if (options.keep_final_state) traj.final_state = state;
  return traj;
}

Operator b_mode_jump_operator(const SpaceDescriptor& field_space, double epsilon, int which) {
  if (!field_space.is_field_only()) throw SpaceMismatch("b_mode_jump_operator expects a field-only space");
  field_space.truncation(which);
  const int n = std::min(field_space.n1(), field_space.n2());
  const double tail = tmsv_tail_mass(n, epsilon);
  if (tail > 1e-3) {
    const int need = truncation_for_tail(epsilon, 1e-6);
    throw TruncationError("truncation " + std::to_string(n) + " is too small for epsilon " +
                              std::to_string(epsilon) + "; use at least " + std::to_string(need),
                          need);
  }
  return squeezed_ladder_operator(field_space, epsilon, which);
}

}  // namespace tmsq
