#include "tmsq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tmsq/errors.hpp"

namespace tmsq {

namespace {

void require_levels(const SpaceDescriptor& s, int levels, const char* what) {
  if (s.atom_levels() < levels) {
    throw SpaceMismatch(std::string(what) + " needs a space with at least " +
                        std::to_string(levels) + " atom levels");
  }
}

}  // namespace

double PhysicalParams::dispersive_ratio() const {
  const double strongest = std::max({std::abs(omega1), std::abs(omega2), std::abs(g1), std::abs(g2)});
  const double weakest = std::min({std::abs(delta1), std::abs(delta2), std::abs(delta1 - delta2)});
  if (weakest == 0.0) return std::numeric_limits<double>::infinity();
  return strongest / weakest;
}

void PhysicalParams::validate() const {
  const double all[] = {omega1, omega2, g1, g2, delta1, delta2, gamma_e, r_a, tau};
  for (double v : all) {
    if (!std::isfinite(v)) throw InvalidArgument("physical parameters must be finite");
  }
  if (delta1 == 0.0) throw InvalidArgument("delta1 must be nonzero");
  if (delta2 == 0.0) throw InvalidArgument("delta2 must be nonzero");
  if (gamma_e < 0.0) throw InvalidArgument("gamma_e must be non-negative");
  if (r_a < 0.0) throw InvalidArgument("r_a must be non-negative");
  if (tau < 0.0) throw InvalidArgument("tau must be non-negative");
}

std::string channel_name(Channel c) { return c == Channel::b1 ? "b1" : "b2"; }

DerivedParams derive_rates(const PhysicalParams& p) {
  p.validate();
  DerivedParams d;
  d.theta1 = std::abs(p.omega1 * p.g1 / p.delta1);
  d.theta2 = std::abs(p.omega2 * p.g2 / p.delta2);
  const double hi = std::max(d.theta1, d.theta2);
  const double lo = std::min(d.theta1, d.theta2);
  if (hi == 0.0 || std::abs(d.theta1 - d.theta2) <= 1e-12 * hi) {
    throw DegenerateChannel("degenerate channel: r = 1, ε diverges");
  }
  d.r = lo / hi;
  d.epsilon = std::atanh(d.r);
  d.theta_b = (d.theta1 + d.theta2) * std::sqrt((1.0 - d.r) / (1.0 + d.r));
  d.gamma = p.r_a * d.theta_b * d.theta_b * p.tau * p.tau;
  d.channel = d.theta1 > d.theta2 ? Channel::b1 : Channel::b2;
  return d;
}

bool matches_rewritten_form(const PhysicalParams& p) {
  return p.omega1 * p.g1 / p.delta1 < 0.0 && p.omega2 * p.g2 / p.delta2 > 0.0;
}

StarkCoefficients stark_coefficients(const PhysicalParams& p) {
  p.validate();
  StarkCoefficients s;
  s.hh_const = -std::abs(p.omega1 * p.omega1 / p.delta1);
  s.hh_n2 = std::abs(p.g2 * p.g2 / p.delta2);
  s.gg_const = std::abs(p.omega2 * p.omega2 / p.delta2);
  s.gg_n1 = -std::abs(p.g1 * p.g1 / p.delta1);
  return s;
}

FullHamiltonian::FullHamiltonian(const PhysicalParams& p, const SpaceDescriptor& space)
    : space_(space), delta1_(p.delta1), delta2_(p.delta2) {
  require_levels(space, 3, "build_full_hamiltonian");
  const Operator a1 = annihilation_op(space, 1);
  const Operator a2 = annihilation_op(space, 2);
  const Operator s_eh = atom_transition_op(space, Level::e, Level::h);
  const Operator s_eg = atom_transition_op(space, Level::e, Level::g);
  part1_ = (Complex(p.omega1) * s_eh + Complex(p.g1) * (s_eg * a1)).matrix();
  part2_ = (Complex(p.omega2) * s_eg + Complex(p.g2) * (s_eh * a2)).matrix();
  max_frequency_ = std::max(std::abs(p.delta1), std::abs(p.delta2));
}

Operator FullHamiltonian::at(double t) const {
  const Complex ph1 = std::exp(-kI * (delta1_ * t));
  const Complex ph2 = std::exp(-kI * (delta2_ * t));
  Matrix h = ph1 * part1_ + ph2 * part2_;
  Matrix full = h + h.adjoint();
  return {space_, std::move(full)};
}

Operator build_full_hamiltonian(const PhysicalParams& p, const SpaceDescriptor& space, double t) {
  p.validate();
  return FullHamiltonian(p, space).at(t);
}

Operator build_effective_hamiltonian(const PhysicalParams& p, const SpaceDescriptor& space) {
  p.validate();
  require_levels(space, 2, "build_effective_hamiltonian");
  const Operator n1 = number_op(space, 1);
  const Operator n2 = number_op(space, 2);
  const Operator a1 = annihilation_op(space, 1);
  const Operator a2 = annihilation_op(space, 2);
  const Operator id = identity(space);
  const Operator s_hh = atom_transition_op(space, Level::h, Level::h);
  const Operator s_gg = atom_transition_op(space, Level::g, Level::g);
  const Operator s_gh = atom_transition_op(space, Level::g, Level::h);

  const double k1 = p.omega1 * p.g1 / p.delta1;
  const double k2 = p.omega2 * p.g2 / p.delta2;
  Operator h = (Complex(p.omega1 * p.omega1 / p.delta1) * id +
                Complex(p.g2 * p.g2 / p.delta2) * n2) * s_hh;
  h += (Complex(p.omega2 * p.omega2 / p.delta2) * id + Complex(p.g1 * p.g1 / p.delta1) * n1) * s_gg;
  // (k1 a1† + k2 a2) σ_gh + h.c.
  const Operator flip = (Complex(k1) * a1.adjoint() + Complex(k2) * a2) * s_gh;
  h += flip + flip.adjoint();
  return h;
}

Operator build_selective_hamiltonian(const DerivedParams& d, const StarkCoefficients& stark,
                                     const SpaceDescriptor& space, FieldBasis basis) {
  require_levels(space, 2, "build_selective_hamiltonian");
  if (!(d.r < 1.0) || !std::isfinite(d.epsilon)) {
    throw DegenerateChannel("degenerate channel: r = 1, ε diverges");
  }
  const SpaceDescriptor field = space.field_space();
  const int mode = channel_mode(d.channel);
  const Operator b = embed_field_operator(bogoliubov_ladder_operator(field, d.epsilon, mode, basis),
                                          space.atom_levels());
  auto number = [&](int m) {
    const Operator a = cavity_ladder_operator(field, d.epsilon, m, basis);
    return embed_field_operator(a.adjoint() * a, space.atom_levels());
  };
  const Operator id = identity(space);
  const Operator s_hh = atom_transition_op(space, Level::h, Level::h);
  const Operator s_gg = atom_transition_op(space, Level::g, Level::g);
  const Operator s_hg = atom_transition_op(space, Level::h, Level::g);

  Operator h = (Complex(stark.hh_const) * id + Complex(stark.hh_n2) * number(2)) * s_hh;
  h += (Complex(stark.gg_const) * id + Complex(stark.gg_n1) * number(1)) * s_gg;

  // b1: −Θ_b b1 σ_hg + h.c.;  b2: +Θ_b b2† σ_hg + h.c.
  const Operator lower = d.channel == Channel::b1 ? Complex(-d.theta_b) * (b * s_hg)
                                                  : Complex(d.theta_b) * (b.adjoint() * s_hg);
  h += lower + lower.adjoint();
  return h;
}

SpontaneousDecay spontaneous_decay_estimate(const PhysicalParams& p) {
  if (p.delta1 == 0.0) throw InvalidArgument("delta1 must be nonzero");
  SpontaneousDecay out;
  const double ratio = p.omega1 / p.delta1;
  out.excited_occupation = ratio * ratio;
  out.rate = out.excited_occupation * p.gamma_e;
  return out;
}

}  // namespace tmsq
