#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tmsq/analysis.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/protocol_types.hpp"

namespace tmsq {

// Poisson atom arrivals. A zero rate means no atoms.
struct ArrivalProcess {
  double rate = 0.0;  // 1/s
  std::uint64_t seed = 0;
  OverlapPolicy policy = OverlapPolicy::drop;

  void validate() const;
};

// Exponential(rate) draw from a 64-bit generator output.
double exponential_sample(std::uint64_t bits, double rate);

// First n inter-arrival times of the process.
std::vector<double> interarrival_times(const ArrivalProcess& arrivals, std::size_t n);

struct ArrivalSchedule {
  std::vector<double> completions;  // times at which a collision finishes, ascending
  std::size_t dropped = 0;          // arrivals discarded under the drop policy
  std::size_t deferred = 0;         // arrivals delayed under the defer policy
  std::size_t unfinished = 0;       // interactions still running at the end
};

// Interactions start at arrival (or when the cavity frees up, for defer) and
// act at start + tau. Only those completing within [0, duration] are listed.
ArrivalSchedule schedule_arrivals(const ArrivalProcess& arrivals, double tau, double duration);

// |atom⟩⟨atom| ⊗ ρ, evolve for tau under h_int, trace out the atom.
DensityMatrix collision_step(const DensityMatrix& rho_field, Level atom_init, const Operator& h_int,
                             double tau);

// The same map in Kraus form, K_m = ⟨m|e^{−i h τ}|atom⟩.
class CollisionMap {
 public:
  CollisionMap(const Operator& h_int, Level atom_init, double tau);

  DensityMatrix apply(const DensityMatrix& rho_field) const;
  Matrix apply(const Matrix& rho_field) const;
  const SpaceDescriptor& field_space() const noexcept { return field_; }

 private:
  SpaceDescriptor field_;
  std::vector<Matrix> kraus_;
};

struct CollisionOptions {
  int samples = 41;
  bool include_stark = false;
  bool keep_final_state = true;
  // Basis in which rho0 is written; the probe must use the same one.
  FieldBasis basis = FieldBasis::photon;
};

// Interaction Hamiltonian for one atom in the step's channel on a 2-level
// composite space, and the checks on Θ_bτ and r_aτ. Throws InvalidArgument
// when r_a τ > 0.2 or Θ_b τ >= 0.5; Θ_b τ > 0.2 goes to `warnings`.
Operator collision_hamiltonian(const ProtocolStep& step, const SpaceDescriptor& field_space,
                               bool include_stark, std::vector<std::string>* warnings,
                               FieldBasis basis = FieldBasis::photon);

// One stochastic run. Observables are sampled at equally spaced times.
Trajectory run_collision_model(const DensityMatrix& rho0, const ProtocolStep& step, double duration,
                               const ArrivalProcess& arrivals, const Probe& probe,
                               const CollisionOptions& options = {});

// Mean state of `count` runs with seeds master ⊕ i. Every collision applies the
// same map Φ, so the mean is Σ_k w(k) Φᵏ(ρ₀) with w the fraction of runs that
// have completed k collisions by the sample time.
Trajectory run_collision_ensemble(const DensityMatrix& rho0, const ProtocolStep& step, double duration,
                                  const ArrivalProcess& master, int count, const Probe& probe,
                                  const CollisionOptions& options = {});

}  // namespace tmsq
