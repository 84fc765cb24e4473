#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmsq/analysis.hpp"
#include "tmsq/hilbert.hpp"
#include "tmsq/model.hpp"

namespace tmsq {

// Sampled observables. Every record has one value per name.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<std::string> names) : names_(std::move(names)) {}

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<std::vector<double>>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  // Throws InvalidArgument if t does not increase or the record has the wrong width.
  void append(double t, std::vector<double> values);
  // Appends another trajectory shifted by `offset`, skipping samples that do
  // not lie strictly after the current last time.
  void extend(const Trajectory& other, double offset);

  std::size_t column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;
  double value(std::size_t sample, std::string_view name) const;

  std::optional<DensityMatrix> final_state;
  std::vector<std::string> diagnostics;

 private:
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<std::vector<double>> records_;
};

// e^{−iHt} ρ e^{iHt}.
DensityMatrix evolve_time_independent(const Operator& h, const DensityMatrix& rho0, double t);

using TimeDependentHamiltonian = std::function<Operator(double)>;

// Fixed-step RK4 from t0 to t1. The step is shrunk to divide the span evenly.
// Throws StepSizeError when dt > 0.05/max_frequency.
DensityMatrix evolve_time_dependent(const TimeDependentHamiltonian& h_of_t, double max_frequency,
                                    const DensityMatrix& rho0, double t0, double t1, double dt);
StateVector evolve_time_dependent(const TimeDependentHamiltonian& h_of_t, double max_frequency,
                                  const StateVector& psi0, double t0, double t1, double dt);
DensityMatrix evolve_time_dependent(const FullHamiltonian& h, const DensityMatrix& rho0, double t0,
                                    double t1, double dt);
StateVector evolve_time_dependent(const FullHamiltonian& h, const StateVector& psi0, double t0,
                                  double t1, double dt);

struct Jump {
  Operator op;
  double rate = 0.0;
};

struct LindbladOptions {
  std::optional<Operator> hamiltonian;
  int samples = 41;  // including both ends
  bool keep_final_state = true;
};

// dρ/dt = −i[H,ρ] + Σ γ (LρL† − ½{L†L, ρ}) with fixed-step RK4. Samples are
// equally spaced over [0, t_span]. Throws StepSizeError when
// dt·max(rate, ‖H‖) > 0.05.
Trajectory lindblad_evolve(const DensityMatrix& rho0, const std::vector<Jump>& jumps, double t_span,
                           double dt, const Probe& probe, const LindbladOptions& options = {});

// S₁₂†(ε) a_which S₁₂(ε) on a field-only space. Throws TruncationError when
// the squeezed vacuum does not fit the truncation (same rule as the squeeze
// operator).
Operator b_mode_jump_operator(const SpaceDescriptor& field_space, double epsilon, int which);

}  // namespace tmsq
