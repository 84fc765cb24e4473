#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tmsq/model.hpp"

namespace tmsq {

enum class Engine { fock, gaussian, collision };

std::string engine_name(Engine e);
Engine parse_engine(std::string_view name);

// What happens to an atom that arrives while another is still inside.
enum class OverlapPolicy {
  drop,   // discarded and counted
  defer,  // enters as soon as the cavity is free
};

std::string policy_name(OverlapPolicy p);
OverlapPolicy parse_policy(std::string_view name);

struct ProtocolStep {
  PhysicalParams params;
  Level atom_state = Level::g;
  double duration = 0.0;  // s
  Channel channel = Channel::b1;
};

// Builds a step whose channel and atom state follow from the parameters.
ProtocolStep make_step(const PhysicalParams& params, double duration);

struct ProtocolSpec {
  std::vector<ProtocolStep> steps;
  Engine engine = Engine::gaussian;
  std::uint64_t seed = 0;
  int n1 = 15;
  int n2 = 15;
  int samples_per_step = 41;
  // Fock and collision engines: Lindblad step in units of 1/γ.
  double gamma_dt = 0.04;
  // Collision engine.
  int trajectories = 200;
  OverlapPolicy policy = OverlapPolicy::drop;
  bool include_stark = false;

  // Throws InvalidArgument when steps disagree on ε, violate the
  // detuning-sum constraint, or carry an atom state that does not match
  // their channel.
  void validate() const;
};

}  // namespace tmsq
