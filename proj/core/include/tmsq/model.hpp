#pragma once

#include <string>

#include "tmsq/hilbert.hpp"

namespace tmsq {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Field basis for states and operators. photon: Fock states of a₁, a₂.
// bogoliubov: Fock states of b₁, b₂, |m₁,m₂⟩_b = S₁₂†(ε)|m₁,m₂⟩. There b_j is a
// plain ladder operator, so b-mode damping only lowers the retained
// occupations, and the two-mode squeezed vacuum is |0,0⟩_b.
enum class FieldBasis { photon, bogoliubov };

// Drive, coupling and detuning inputs. Frequencies are angular (rad/s);
// r_a is an arrival rate (1/s) and tau a duration (s).
struct PhysicalParams {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double gamma_e = 0.0;
  double r_a = 0.0;
  double tau = 0.0;

  // max(|Ω₁|,|Ω₂|,|g₁|,|g₂|) / min(|Δ₁|,|Δ₂|,|Δ₁−Δ₂|); infinite when Δ₁ = Δ₂.
  double dispersive_ratio() const;
  bool is_dispersive(double threshold = 0.1) const { return dispersive_ratio() <= threshold; }

  // Throws InvalidArgument("delta1 must be nonzero") and friends.
  void validate() const;
};

// Which transformed mode the effective two-level transition couples to.
//   b1: Θ₁ > Θ₂, H₁ = −Θ_b (b₁σ_hg + b₁†σ_gh), atoms enter in |g⟩
//   b2: Θ₁ < Θ₂, H₁ = +Θ_b (b₂†σ_hg + b₂σ_gh), atoms enter in |h⟩
enum class Channel { b1 = 1, b2 = 2 };

inline int channel_mode(Channel c) { return static_cast<int>(c); }
inline Level channel_atom_state(Channel c) { return c == Channel::b1 ? Level::g : Level::h; }
std::string channel_name(Channel c);

struct DerivedParams {
  double theta1 = 0.0;   // |Ω₁g₁/Δ₁|
  double theta2 = 0.0;   // |Ω₂g₂/Δ₂|
  double r = 0.0;        // min(Θ)/max(Θ)
  double epsilon = 0.0;  // atanh r
  double theta_b = 0.0;  // (Θ₁+Θ₂)·√((1−r)/(1+r))
  double gamma = 0.0;    // r_a Θ_b² τ²
  Channel channel = Channel::b1;
};

DerivedParams derive_rates(const PhysicalParams& p);

// True when the signed Raman amplitudes of the effective Hamiltonian take the
// rewritten form (Θ₂a₂† − Θ₁a₁)σ_hg, i.e. Ω₁g₁/Δ₁ < 0 and Ω₂g₂/Δ₂ > 0.
bool matches_rewritten_form(const PhysicalParams& p);

// Light-shift part H₀ written with magnitudes:
//   H₀ = (hh_const + hh_n2·n₂)σ_hh + (gg_const + gg_n1·n₁)σ_gg
struct StarkCoefficients {
  double hh_const = 0.0;  // −|Ω₁²/Δ₁|
  double hh_n2 = 0.0;     // +|g₂²/Δ₂|
  double gg_const = 0.0;  // +|Ω₂²/Δ₂|
  double gg_n1 = 0.0;     // −|g₁²/Δ₁|

  static StarkCoefficients none() { return {}; }
};

StarkCoefficients stark_coefficients(const PhysicalParams& p);

// Three-level interaction-picture Hamiltonian with classical drives and the
// two cavity couplings. The time dependence is split off so repeated
// evaluation is a pair of scaled additions.
class FullHamiltonian {
 public:
  FullHamiltonian(const PhysicalParams& p, const SpaceDescriptor& space);

  Operator at(double t) const;
  const SpaceDescriptor& space() const noexcept { return space_; }
  // Fastest phase in the time dependence, max(|Δ₁|, |Δ₂|).
  double max_frequency() const noexcept { return max_frequency_; }

 private:
  SpaceDescriptor space_;
  Matrix part1_;  // rotates at Δ₁
  Matrix part2_;  // rotates at Δ₂
  double delta1_;
  double delta2_;
  double max_frequency_;
};

Operator build_full_hamiltonian(const PhysicalParams& p, const SpaceDescriptor& space, double t);

// Adiabatically eliminated two-channel Raman Hamiltonian (real parameters).
Operator build_effective_hamiltonian(const PhysicalParams& p, const SpaceDescriptor& space);

// H₀ + H₁ in terms of the Bogoliubov modes b_j = S₁₂†(ε) a_j S₁₂(ε).
Operator build_selective_hamiltonian(const DerivedParams& d, const StarkCoefficients& stark,
                                     const SpaceDescriptor& space, FieldBasis basis = FieldBasis::photon);

// S₁₂(ε) = exp(ε a₁a₂ − ε a₁†a₂†) on the truncated space (exactly unitary).
// Throws TruncationError if the two-mode squeezed vacuum at this ε puts more
// than 1e-3 of its weight beyond min(N₁, N₂).
Operator build_squeeze_operator(const SpaceDescriptor& space, double epsilon);

// Matrix elements of S₁₂†(ε) a_mode S₁₂(ε) between retained Fock states. The
// conjugation runs in an enlarged workspace that grows until the projected
// result stops changing, so boundary reflections of the truncated exponential
// do not leak in. Field-only space.
Operator squeezed_ladder_operator(const SpaceDescriptor& field_space, double epsilon, int mode);


// a_mode in `basis`; cosh ε A_mode + sinh ε A_other† for bogoliubov, where A
// are the ladder operators of the basis.
Operator cavity_ladder_operator(const SpaceDescriptor& field_space, double epsilon, int mode, FieldBasis basis);
// b_mode in `basis`.
Operator bogoliubov_ladder_operator(const SpaceDescriptor& field_space, double epsilon, int mode,
                                    FieldBasis basis);

// ⟨m|S₁₂(ε)|n⟩ between retained photon-number states, converged in a padded
// workspace like squeezed_ladder_operator. Not unitary on the truncation.
Operator squeeze_block(const SpaceDescriptor& field_space, double epsilon);

// Basis changes for field density matrices. Weight carried beyond the
// truncation is dropped and the result renormalised; `lost` receives it.
DensityMatrix to_bogoliubov_basis(const DensityMatrix& rho, double epsilon, double* lost = nullptr);
DensityMatrix from_bogoliubov_basis(const DensityMatrix& rho, double epsilon, double* lost = nullptr);

// Weight of Σ tanh²ⁿε/cosh²ε beyond n ≥ n_trunc, which is tanh^{2N}ε.
double tmsv_tail_mass(int n_trunc, double epsilon);
// Smallest N with tmsv_tail_mass(N, ε) <= max_tail.
int truncation_for_tail(double epsilon, double max_tail);

// D₁(α₁)D₂(α₂), D(α) = exp(α a† − α* a).
Operator build_displacement_operator(const SpaceDescriptor& space, Complex alpha1, Complex alpha2);
// |α_i|² <= N_i/4 for both modes.
bool displacement_within_truncation(const SpaceDescriptor& space, Complex alpha1, Complex alpha2);

struct SpontaneousDecay {
  double excited_occupation = 0.0;  // |Ω₁/Δ₁|²
  double rate = 0.0;                // Γₑ = |Ω₁/Δ₁|² γₑ
};

SpontaneousDecay spontaneous_decay_estimate(const PhysicalParams& p);

}  // namespace tmsq
