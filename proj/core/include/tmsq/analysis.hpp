#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tmsq/hilbert.hpp"
#include "tmsq/model.hpp"

namespace tmsq {

// Joint-quadrature variances. For S₁₂†(ε)|0,0⟩ with ε > 0 the squeezed pair is
// (X₁−X₂, P₁+P₂); duan_sum adds those two.
struct EprVariances {
  double v_x_minus = 0.0;
  double v_x_plus = 0.0;
  double v_p_minus = 0.0;
  double v_p_plus = 0.0;
  double duan_sum = 0.0;

  bool entangled() const noexcept { return duan_sum < 1.0; }
};

EprVariances make_epr_variances(double v_x_minus, double v_x_plus, double v_p_minus, double v_p_plus);

struct SqueezingReport {
  double epsilon_target = 0.0;
  double v_squeezed = 0.0;      // V(X₁−X₂)
  double v_antisqueezed = 0.0;  // V(P₁−P₂), canonical partner of X₁−X₂
  double duan_sum = 0.0;
  double n1_mean = 0.0;
  double n2_mean = 0.0;
  double fidelity = 0.0;
  double truncation_leak = 0.0;
};

// Σ tanhⁿε/cosh ε |n,n⟩ from n = 0, renormalised after truncation. Throws
// TruncationError (with the required N) when the neglected tail exceeds max_tail.
StateVector tmsv_state_vector(const SpaceDescriptor& field_space, double epsilon, double max_tail = 1e-6);

struct Quadratures {
  Operator x1;
  Operator p1;
  Operator x2;
  Operator p2;
};

// X = (a + a†)/2, P = −i(a − a†)/2 on every factor of the space.
Quadratures quadrature_ops(const SpaceDescriptor& space);

// Population of Fock states at the truncation edge (n₁ = N₁−1 or n₂ = N₂−1).
double truncation_leak(const DensityMatrix& rho);

// Boundary populations above this are reported as a truncation warning.
inline constexpr double kLeakWarning = 1e-3;

// Variances from expectation values. Appends a warning to `warnings` (if
// given) when the truncation leak exceeds kLeakWarning.
EprVariances epr_variances_fock(const DensityMatrix& rho, std::vector<std::string>* warnings = nullptr);

// ⟨ψ_ε|ρ|ψ_ε⟩ for a field-only ρ. Throws TruncationError when the target's
// neglected tail exceeds 1e-3.
double fidelity_to_tmsv(const DensityMatrix& rho, double epsilon);

struct PreparationTime {
  double per_step = 0.0;     // T = ln(n̄₀/n̄∞)/γ
  double total = 0.0;        // 2T
  double n_initial = 0.0;    // n̄₀ = r²/(1−r²)
  bool already_prepared = false;  // n̄∞ >= n̄₀, T = 0
};

PreparationTime preparation_time(double r, double gamma, double n_target);

double mean_photon(const DensityMatrix& rho, int mode);

// Rate inputs for the preparation-time curve. γ = r_a Θ_b² τ² is written as
// (r_aτ)(Θ_bτ)²/τ; an explicit gamma or a per-r function takes precedence.
struct Fig2Settings {
  double theta_b_tau = 0.1;
  double ra_tau = 0.1;
  double tau = 0.7e-6;  // s
  std::optional<double> gamma;
  std::function<double(double)> gamma_of_r;
  double n_target = 0.1;

  double gamma_at(double r) const;
};

struct Fig2Row {
  double r = 0.0;
  double n_bar = 0.0;       // r²/(1−r²)
  double total_time = 0.0;  // 2T, zero when n_bar <= n_target
};

// Throws InvalidArgument for r outside (0, 1).
std::vector<Fig2Row> fig2_rows(const std::vector<double>& r_grid, const Fig2Settings& settings);
std::vector<double> default_fig2_grid();

SqueezingReport squeezing_report(const DensityMatrix& rho, double epsilon);

// Named scalar observables evaluated on field-only density matrices.
struct Probe {
  std::vector<std::string> names;
  std::function<std::vector<double>(const DensityMatrix&)> evaluate;
};

// Observable names shared by every engine, in output order.
const std::vector<std::string>& standard_observable_names();

// n_b1, n_b2, n_a1, n_a2 and the EPR variances for a given squeeze parameter,
// for states written in `basis`. Operators are built once; evaluation is a
// handful of traces.
Probe standard_probe(const SpaceDescriptor& field_space, double epsilon, FieldBasis basis = FieldBasis::photon);

}  // namespace tmsq
