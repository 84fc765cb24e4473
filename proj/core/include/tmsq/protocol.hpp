#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmsq/analysis.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/gaussian.hpp"
#include "tmsq/protocol_types.hpp"

namespace tmsq {

// Step-2 products Ω̃′ᵢ = Ω′ᵢgᵢ. The symmetric exchange uses Ω̃′₁ = Ω̃₂ and
// Ω̃′₂ = Ω̃₁.
struct SwapRule {
  bool symmetric = true;
  double tilde1 = 0.0;  // Ω̃′₁ (rad²/s²), used when !symmetric
  double tilde2 = 0.0;  // Ω̃′₂

  static SwapRule symmetric_exchange() { return {}; }
  static SwapRule explicit_products(double tilde1, double tilde2) { return {false, tilde1, tilde2}; }
};

// Step-2 parameters: |Δ′₁| = |Ω̃′₁/Ω̃₂||Δ₂|, |Δ′₂| = |Ω̃′₂/Ω̃₁||Δ₁| with the
// detuning signs kept, couplings unchanged and Ω′ᵢ = Ω̃′ᵢ/gᵢ. Throws
// InvalidArgument when |Ω̃₁|−|Ω̃′₂| >= |Ω̃′₁|−|Ω̃₂| fails or the detuning sum
// changes by more than 1e-9 (relative).
PhysicalParams step2_params(const PhysicalParams& step1, const SwapRule& rule);

// Step durations default to preparation_time(r, γ, n_target).per_step.
inline constexpr double kDefaultStepTarget = 1e-3;

ProtocolSpec build_two_step_protocol(const PhysicalParams& step1,
                                     const SwapRule& rule = SwapRule::symmetric_exchange(),
                                     std::optional<double> step_duration = std::nullopt,
                                     double n_target = kDefaultStepTarget);

// Θ₁ < Θ₂ parameter sets are Step-2 sets; the symmetric exchange maps them to
// the matching Step 1 (the exchange is its own inverse).
PhysicalParams as_step1(const PhysicalParams& p);

// Dimensionless Step-1 set with Θ₂/Θ₁ = r. |Δ₁| = 1 fixes the unit:
// Δ₁ = −1, Δ₂ = 2, Ω₁ = g₁ = g₂ = 0.05 (Θ₁ = 0.0025), Ω₂ = 0.1r, γₑ = 0.
// τ and r_a give Θ_bτ = coupling and r_aτ = occupancy.
PhysicalParams reference_params(double r, double coupling = 0.1, double occupancy = 0.1);

struct RegimeCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RegimeReport {
  std::vector<RegimeCheck> checks;
  bool all_pass() const;
  const RegimeCheck& find(const std::string& name) const;
};

// dispersive_ratio <= 0.1, Θ_bτ <= 0.2, r_aτ <= 0.2 and Γₑ·2T <= 0.1. When
// protocol_time is not given, 2T comes from preparation_time at the default
// step target (0 if γ = 0).
RegimeReport validate_regime(const PhysicalParams& p, const DerivedParams& d,
                             std::optional<double> protocol_time = std::nullopt);

// Initial field state for a protocol run.
struct InitialCondition {
  enum class Kind { vacuum, fock, coherent, thermal };
  Kind kind = Kind::vacuum;
  int n1 = 0;
  int n2 = 0;
  Complex alpha1{};
  Complex alpha2{};
  double nbar = 0.0;

  static InitialCondition vacuum() { return {}; }
  static InitialCondition fock(int n1, int n2) { return {Kind::fock, n1, n2, {}, {}, 0.0}; }
  static InitialCondition coherent(Complex a1, Complex a2) { return {Kind::coherent, 0, 0, a1, a2, 0.0}; }
  static InitialCondition thermal(double nbar) { return {Kind::thermal, 0, 0, {}, {}, nbar}; }
};

DensityMatrix initial_density(const InitialCondition& init, const SpaceDescriptor& field_space);
// Throws InvalidArgument for Fock states other than the vacuum (not Gaussian).
GaussianState initial_gaussian(const InitialCondition& init);

struct ProtocolResult {
  Trajectory trajectory;
  SqueezingReport report;
  std::vector<RegimeReport> regimes;  // one per step
  std::vector<std::string> warnings;
  std::optional<DensityMatrix> final_density;
  std::optional<GaussianState> final_gaussian;
};

// Runs the steps in order on spec.engine. Collision runs use seed
// spec.seed ⊕ (j << 32) for step j and spec.trajectories runs per step.
ProtocolResult run_protocol(const ProtocolSpec& spec, const InitialCondition& initial);

// The same with an explicit photon-basis starting state. The Fock and collision
// engines evolve in the Bogoliubov basis of the protocol's ε; trajectories and
// final_density are reported for the photon basis.
ProtocolResult run_protocol(const ProtocolSpec& spec, const DensityMatrix& initial);

}  // namespace tmsq
