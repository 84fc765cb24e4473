#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/errors.hpp"

using namespace tmsq;
using tmsq::test::max_abs;

namespace {

Probe photon_probe() {
  return {{"n1", "n2"}, [](const DensityMatrix& r) {
            return std::vector<double>{mean_photon(r, 1), mean_photon(r, 2)};
          }};
}

Probe trace_probe() {
  return {{"trace"}, [](const DensityMatrix& r) { return std::vector<double>{r.trace()}; }};
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("trajectory bookkeeping") {
  Trajectory t({"x", "y"});
  t.append(0.0, {1.0, 2.0});
  t.append(0.5, {3.0, 4.0});
  CHECK_THROWS_AS(t.append(0.5, {0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(t.append(1.0, {0.0}), InvalidArgument);
  CHECK(t.value(1, "y") == 4.0);
  CHECK(t.column("x") == std::vector<double>{1.0, 3.0});
  CHECK_THROWS_AS(t.column_index("z"), InvalidArgument);

  Trajectory u({"x", "y"});
  u.append(0.0, {5.0, 6.0});  // coincides with the join point and is skipped
  u.append(0.25, {7.0, 8.0});
  u.diagnostics.push_back("note");
  t.extend(u, 0.5);
  CHECK(t.size() == 3);
  CHECK(t.times().back() == doctest::Approx(0.75));
  CHECK(t.diagnostics.size() == 1);
  CHECK_THROWS_AS(t.extend(Trajectory({"x"}), 0.0), InvalidArgument);
}

TEST_CASE("resonant two-level oscillation") {
  const SpaceDescriptor s(3, 1, 1);
  const double rabi = 0.7;
  const Operator flip = atom_transition_op(s, Level::e, Level::h);
  const Operator h = Complex(rabi) * (flip + flip.adjoint());
  const DensityMatrix rho0 = DensityMatrix::pure(basis_state(s, Level::h, 0, 0));
  for (double t : {0.3, 1.1, 2.0}) {
    const DensityMatrix r = evolve_time_independent(h, rho0, t);
    CHECK(r.matrix()(2, 2).real() == doctest::Approx(std::pow(std::sin(rabi * t), 2)).epsilon(1e-12));
    const DensityMatrix rk = evolve_time_dependent([&](double) { return h; }, 0.0, rho0, 0.0, t, 0.01);
    CHECK(max_abs(rk.matrix() - r.matrix()) < 1e-9);
  }
}

TEST_CASE("time-dependent step limit") {
  PhysicalParams p;
  p.omega1 = p.omega2 = p.g1 = p.g2 = 0.05;
  p.delta1 = -1.0;
  p.delta2 = 2.0;
  const SpaceDescriptor s(3, 2, 2);
  const FullHamiltonian h(p, s);
  const StateVector psi = basis_state(s, Level::g, 0, 0);
  try {
    evolve_time_dependent(h, psi, 0.0, 1.0, 0.1);
    FAIL("expected StepSizeError");
  } catch (const StepSizeError& e) {
    CHECK(e.max_step() == doctest::Approx(0.025));
  }
  CHECK_THROWS_AS(evolve_time_dependent(h, psi, 0.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("state-vector and density-matrix propagation agree") {
  PhysicalParams p;
  p.omega1 = 0.2;
  p.omega2 = 0.3;
  p.g1 = 0.1;
  p.g2 = 0.15;
  p.delta1 = -1.0;
  p.delta2 = 2.0;
  const SpaceDescriptor s(3, 3, 3);
  const FullHamiltonian h(p, s);
  const StateVector psi0 = basis_state(s, Level::g, 1, 0);
  const StateVector psi = evolve_time_dependent(h, psi0, 0.0, 5.0, 0.02);
  const DensityMatrix rho = evolve_time_dependent(h, DensityMatrix::pure(psi0), 0.0, 5.0, 0.02);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(max_abs(DensityMatrix::pure(psi.normalized()).matrix() - rho.matrix()) < 1e-8);
}

TEST_CASE("single-mode damping decays the photon number exponentially") {
  const SpaceDescriptor f = SpaceDescriptor::field(6, 1);
  const double rate = 0.8;
  const DensityMatrix rho0 = DensityMatrix::pure(field_basis_state(f, 4, 0));
  LindbladOptions opt;
  opt.samples = 11;
  const Trajectory t = lindblad_evolve(rho0, {{annihilation_op(f, 1), rate}}, 2.0, 0.01, photon_probe(), opt);
  REQUIRE(t.size() == 11);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t.value(i, "n1") == doctest::Approx(4.0 * std::exp(-rate * t.times()[i])).epsilon(1e-8));
  }
  REQUIRE(t.final_state);
  // populations follow the binomial law of independent photon loss
  const double keep = std::exp(-rate * 2.0);
  CHECK(t.final_state->matrix()(0, 0).real() == doctest::Approx(std::pow(1.0 - keep, 4)).epsilon(1e-8));
}

TEST_CASE("Lindblad step limits") {
  const SpaceDescriptor f = SpaceDescriptor::field(40, 1);
  const DensityMatrix rho0 = DensityMatrix::pure(field_basis_state(f, 1, 0));
  try {
    lindblad_evolve(rho0, {{annihilation_op(f, 1), 1.0}}, 1.0, 0.1, photon_probe());
    FAIL("expected StepSizeError");
  } catch (const StepSizeError& e) {
    CHECK(e.max_step() == doctest::Approx(0.05));
  }
  // a tall ladder forces the stability cap below the requested step
  const Trajectory t = lindblad_evolve(rho0, {{annihilation_op(f, 1), 1.0}}, 0.5, 0.05, photon_probe());
  REQUIRE_FALSE(t.diagnostics.empty());
  CHECK(t.diagnostics.front().find("for stability") != std::string::npos);
  CHECK(t.value(t.size() - 1, "n1") == doctest::Approx(std::exp(-0.5)).epsilon(1e-7));
  CHECK_THROWS_AS(lindblad_evolve(rho0, {{annihilation_op(f, 1), -1.0}}, 1.0, 0.01, photon_probe()),
                  InvalidArgument);
  CHECK_THROWS_AS(lindblad_evolve(rho0, {{annihilation_op(SpaceDescriptor::field(3, 1), 1), 1.0}}, 1.0, 0.01,
                                  photon_probe()),
                  SpaceMismatch);
}

TEST_CASE("property: Lindblad evolution keeps trace one and positivity") {
  std::mt19937_64 rng(99);
  const SpaceDescriptor f = SpaceDescriptor::field(4, 4);
  for (int trial = 0; trial < 4; ++trial) {
    const DensityMatrix rho0 = tmsq::test::random_density(f, rng);
    LindbladOptions opt;
    opt.hamiltonian = Operator(f, tmsq::test::random_hermitian(f.dim(), rng, 0.3));
    opt.samples = 6;
    const std::vector<Jump> jumps{{annihilation_op(f, 1), 0.5},
                                  {Operator(f, tmsq::test::random_hermitian(f.dim(), rng, 0.5)), 0.2}};
    const Trajectory t = lindblad_evolve(rho0, jumps, 3.0, 0.005, trace_probe(), opt);
    for (double v : t.column("trace")) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(t.final_state->min_eigenvalue() > -1e-10);
    CHECK(t.diagnostics.empty());
  }
}

TEST_CASE("zero span and no generators") {
  const SpaceDescriptor f = SpaceDescriptor::field(3, 3);
  const DensityMatrix rho0 = DensityMatrix::pure(field_basis_state(f, 1, 2));
  const Trajectory a = lindblad_evolve(rho0, {}, 0.0, 0.1, photon_probe());
  CHECK(a.size() == 1);
  const Trajectory b = lindblad_evolve(rho0, {}, 2.0, 0.1, photon_probe());
  CHECK(b.size() == 41);
  CHECK(b.value(40, "n2") == doctest::Approx(2.0));
}

TEST_CASE("b-mode jump operator guards the truncation") {
  CHECK_THROWS_AS(b_mode_jump_operator(SpaceDescriptor::field(3, 3), 1.2, 1), TruncationError);
  CHECK_THROWS_AS(b_mode_jump_operator(SpaceDescriptor(2, 10, 10), 0.2, 1), SpaceMismatch);
  const SpaceDescriptor f = SpaceDescriptor::field(12, 12);
  CHECK(max_abs((b_mode_jump_operator(f, 0.3, 2) - squeezed_ladder_operator(f, 0.3, 2)).matrix()) == 0.0);
}

}  // TEST_SUITE
