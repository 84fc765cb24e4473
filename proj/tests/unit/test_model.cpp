#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "tmsq/analysis.hpp"
#include "tmsq/errors.hpp"
#include "tmsq/model.hpp"
#include "tmsq/protocol.hpp"
#include "tmsq/validation.hpp"

using namespace tmsq;
using tmsq::test::max_abs;

namespace {

// Interior block: Fock indices below `keep` in both modes.
double interior_diff(const SpaceDescriptor& f, const Matrix& a, const Matrix& b, int keep) {
  double worst = 0.0;
  for (int m1 = 0; m1 < keep; ++m1)
    for (int m2 = 0; m2 < keep; ++m2)
      for (int n1 = 0; n1 < keep; ++n1)
        for (int n2 = 0; n2 < keep; ++n2) {
          const auto i = f.index(0, m1, m2), j = f.index(0, n1, n2);
          worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
        }
  return worst;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("derived rates for the microwave parameter set") {
  const PhysicalParams p = microwave_params();
  const DerivedParams d = derive_rates(p);
  CHECK(d.theta1 / kTwoPi == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(d.theta2 / kTwoPi == doctest::Approx(40e3 / 0.48 * 50e3 / 2e6).epsilon(1e-12));
  CHECK(d.r == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(d.epsilon == doctest::Approx(std::atanh(0.96)).epsilon(1e-12));
  CHECK(d.channel == Channel::b2);
  CHECK(d.theta_b == doctest::Approx((d.theta1 + d.theta2) * std::sqrt(0.04 / 1.96)).epsilon(1e-12));
  CHECK(d.gamma == doctest::Approx(p.r_a * d.theta_b * d.theta_b * p.tau * p.tau).epsilon(1e-12));
  CHECK(matches_rewritten_form(p));
  CHECK(p.is_dispersive());
  CHECK(p.dispersive_ratio() == doctest::Approx((40e3 / 0.48) / 1e6).epsilon(1e-12));
}

TEST_CASE("degenerate channel and invalid parameters") {
  PhysicalParams p = microwave_params();
  p.omega2 = p.omega1 * 2.0;  // Θ₁ = Θ₂
  try {
    derive_rates(p);
    FAIL("expected DegenerateChannel");
  } catch (const DegenerateChannel& e) {
    CHECK(std::string(e.what()).find("degenerate channel") != std::string::npos);
  }
  PhysicalParams q = microwave_params();
  q.delta1 = 0.0;
  try {
    derive_rates(q);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()) == "delta1 must be nonzero");
  }
  PhysicalParams z;
  z.delta1 = 1.0;
  z.delta2 = 2.0;
  CHECK_THROWS_AS(derive_rates(z), DegenerateChannel);  // both rates zero
  q = microwave_params();
  q.r_a = -1.0;
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
  q = microwave_params();
  q.delta2 = q.delta1;
  CHECK(std::isinf(q.dispersive_ratio()));
}

TEST_CASE("light-shift coefficients carry fixed signs") {
  const StarkCoefficients s = stark_coefficients(microwave_params());
  CHECK(s.hh_const < 0.0);
  CHECK(s.hh_n2 > 0.0);
  CHECK(s.gg_const > 0.0);
  CHECK(s.gg_n1 < 0.0);
  const PhysicalParams p = microwave_params();
  CHECK(s.gg_n1 == doctest::Approx(-p.g1 * p.g1 / std::abs(p.delta1)));
}

TEST_CASE("full Hamiltonian matrix elements and phases") {
  PhysicalParams p;
  p.omega1 = 0.3;
  p.omega2 = 0.7;
  p.g1 = 0.2;
  p.g2 = 0.5;
  p.delta1 = -1.0;
  p.delta2 = 2.0;
  const SpaceDescriptor s(3, 3, 3);
  const double t = 0.37;
  const Matrix h = build_full_hamiltonian(p, s, t).matrix();
  const auto e00 = s.index(2, 0, 0);
  CHECK(std::abs(h(e00, s.index(1, 0, 0)) - p.omega1 * std::exp(-kI * (p.delta1 * t))) < 1e-15);
  CHECK(std::abs(h(e00, s.index(0, 0, 0)) - p.omega2 * std::exp(-kI * (p.delta2 * t))) < 1e-15);
  CHECK(std::abs(h(e00, s.index(0, 1, 0)) - p.g1 * std::exp(-kI * (p.delta1 * t))) < 1e-15);
  CHECK(std::abs(h(e00, s.index(1, 0, 1)) - p.g2 * std::exp(-kI * (p.delta2 * t))) < 1e-15);
  CHECK(build_full_hamiltonian(p, s, t).hermiticity_error() == 0.0);
  CHECK_THROWS_AS(build_full_hamiltonian(p, SpaceDescriptor(2, 3, 3), 0.0), SpaceMismatch);
  CHECK(FullHamiltonian(p, s).max_frequency() == 2.0);
}

TEST_CASE("effective Hamiltonian Raman and light-shift elements") {
  PhysicalParams p;
  p.omega1 = 0.3;
  p.omega2 = 0.7;
  p.g1 = 0.2;
  p.g2 = 0.5;
  p.delta1 = -1.0;
  p.delta2 = 2.0;
  const SpaceDescriptor s(2, 3, 3);
  const Matrix h = build_effective_hamiltonian(p, s).matrix();
  const double k1 = p.omega1 * p.g1 / p.delta1;
  const double k2 = p.omega2 * p.g2 / p.delta2;
  // |h,0,0⟩ → |g,1,0⟩ through a₁†, |h,0,1⟩ → |g,0,0⟩ through a₂
  CHECK(std::abs(h(s.index(0, 1, 0), s.index(1, 0, 0)) - k1) < 1e-15);
  CHECK(std::abs(h(s.index(0, 0, 0), s.index(1, 0, 1)) - k2) < 1e-15);
  CHECK(h(s.index(1, 0, 2), s.index(1, 0, 2)).real() ==
        doctest::Approx(p.omega1 * p.omega1 / p.delta1 + 2.0 * p.g2 * p.g2 / p.delta2));
  CHECK(h(s.index(0, 2, 0), s.index(0, 2, 0)).real() ==
        doctest::Approx(p.omega2 * p.omega2 / p.delta2 + 2.0 * p.g1 * p.g1 / p.delta1));
  CHECK(build_effective_hamiltonian(p, s).hermiticity_error() == 0.0);
}

TEST_CASE("the squeezed vacuum is dark for the selective Hamiltonian") {
  const DerivedParams d = derive_rates(reference_params(0.5));
  const SpaceDescriptor s(2, 20, 20);
  // photon basis: |g⟩ ⊗ S†|0,0⟩
  const StateVector tmsv = tmsv_state_vector(s.field_space(), d.epsilon, 1e-12);
  Vector psi = Vector::Zero(s.dim());
  psi.head(s.field_dim()) = tmsv.amplitudes();
  const Operator h = build_selective_hamiltonian(d, StarkCoefficients::none(), s);
  CHECK((h.matrix() * psi).norm() < 1e-6);
  // Bogoliubov basis: |g,0,0⟩ exactly
  const Operator hb = build_selective_hamiltonian(d, StarkCoefficients::none(), s, FieldBasis::bogoliubov);
  CHECK((hb.matrix() * basis_state(s, Level::g, 0, 0).amplitudes()).norm() < 1e-14);
  // |g,1,0⟩_b couples to |h,0,0⟩_b with −Θ_b
  CHECK(std::abs(hb.matrix()(s.index(1, 0, 0), s.index(0, 1, 0)) + d.theta_b) < 1e-15);
}

TEST_CASE("squeeze operator produces the two-mode squeezed vacuum") {
  const SpaceDescriptor f = SpaceDescriptor::field(20, 20);
  const double eps = 0.5;
  const Operator s = build_squeeze_operator(f, eps);
  CHECK(unitarity_error(s) < 1e-12);
  const Vector out = s.adjoint().matrix() * field_basis_state(f, 0, 0).amplitudes();
  const StateVector target = tmsv_state_vector(f, eps);
  CHECK(overlap(StateVector(f, out), target) > 1.0 - 1e-8);
  // ⟨1,1|S†|0,0⟩ = tanh ε / cosh ε
  CHECK(out(f.index(0, 1, 1)).real() == doctest::Approx(std::tanh(eps) / std::cosh(eps)).epsilon(1e-8));
}

TEST_CASE("squeeze operator reports the truncation it needs") {
  const double eps = 1.5;
  try {
    build_squeeze_operator(SpaceDescriptor::field(4, 4), eps);
    FAIL("expected TruncationError");
  } catch (const TruncationError& e) {
    CHECK(e.suggested_truncation() >= truncation_for_tail(eps, 1e-3));
    CHECK(tmsv_tail_mass(e.suggested_truncation(), eps) <= 1e-3);
  }
  CHECK(tmsv_tail_mass(5, 0.5) == doctest::Approx(std::pow(std::tanh(0.5), 10)));
  const int n = truncation_for_tail(0.8, 1e-6);
  CHECK(tmsv_tail_mass(n, 0.8) <= 1e-6);
  CHECK(tmsv_tail_mass(n - 1, 0.8) > 1e-6);
}

TEST_CASE("Bogoliubov ladder operators in both bases") {
  const SpaceDescriptor f = SpaceDescriptor::field(16, 16);
  const double eps = 0.4, c = std::cosh(eps), s = std::sinh(eps);
  const Operator a1 = annihilation_op(f, 1), a2 = annihilation_op(f, 2);
  for (int mode : {1, 2}) {
    const Operator ap = cavity_ladder_operator(f, eps, mode, FieldBasis::photon);
    CHECK(max_abs((ap - annihilation_op(f, mode)).matrix()) == 0.0);
    const Operator bb = bogoliubov_ladder_operator(f, eps, mode, FieldBasis::bogoliubov);
    CHECK(max_abs((bb - annihilation_op(f, mode)).matrix()) == 0.0);
  }
  // b₁ = c a₁ − s a₂† away from the truncation edge
  const Operator b1 = bogoliubov_ladder_operator(f, eps, 1, FieldBasis::photon);
  CHECK(interior_diff(f, b1.matrix(), (Complex(c) * a1 - Complex(s) * a2.adjoint()).matrix(), 10) < 1e-8);
  CHECK(max_abs((b1 - squeezed_ladder_operator(f, eps, 1)).matrix()) < 1e-12);
  // a₂ = c A₂ + s A₁† in the Bogoliubov basis
  const Operator a2b = cavity_ladder_operator(f, eps, 2, FieldBasis::bogoliubov);
  CHECK(max_abs((a2b - (Complex(c) * a2 + Complex(s) * a1.adjoint())).matrix()) < 1e-14);
}

TEST_CASE("property: Bogoliubov commutators hold in the interior") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.8);
  const SpaceDescriptor f = SpaceDescriptor::field(18, 18);
  const Matrix id = Matrix::Identity(f.dim(), f.dim());
  for (int trial = 0; trial < 3; ++trial) {
    const double eps = u(rng);
    const Matrix b1 = squeezed_ladder_operator(f, eps, 1).matrix();
    const Matrix b2 = squeezed_ladder_operator(f, eps, 2).matrix();
    CHECK(interior_diff(f, b1 * b1.adjoint() - b1.adjoint() * b1, id, 8) < 1e-8);
    CHECK(interior_diff(f, b1 * b2 - b2 * b1, Matrix::Zero(f.dim(), f.dim()), 8) < 1e-8);
    CHECK(interior_diff(f, b1 * b2.adjoint() - b2.adjoint() * b1, Matrix::Zero(f.dim(), f.dim()), 8) < 1e-8);
  }
}

TEST_CASE("basis change round trip maps the squeezed vacuum to the b vacuum") {
  // the truncated input misses amplitudes of order tanh^N ε, so N is generous
  const SpaceDescriptor f = SpaceDescriptor::field(24, 24);
  const double eps = 0.45;
  const DensityMatrix tmsv = DensityMatrix::pure(tmsv_state_vector(f, eps, 1e-12));
  double lost = 1.0;
  const DensityMatrix b = to_bogoliubov_basis(tmsv, eps, &lost);
  CHECK(lost < 1e-10);
  CHECK(b.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
  const DensityMatrix back = from_bogoliubov_basis(b, eps, &lost);
  CHECK(max_abs(back.matrix() - tmsv.matrix()) < 1e-9);
  // squeeze_block(−ε) column |0,0⟩ is the squeezed vacuum
  const Matrix blk = squeeze_block(f, -eps).matrix();
  CHECK(overlap(StateVector(f, blk.col(0)), tmsv_state_vector(f, eps, 1e-12)) > 1.0 - 1e-10);
  CHECK_THROWS_AS(to_bogoliubov_basis(DensityMatrix::pure(basis_state(SpaceDescriptor(2, 2, 2), Level::g, 0, 0)), eps),
                  SpaceMismatch);
}

TEST_CASE("property: basis changes preserve expectation values") {
  std::mt19937_64 rng(21);
  const SpaceDescriptor f = SpaceDescriptor::field(18, 18);
  const double eps = 0.3;
  // low-lying random state so nothing reaches the edge
  const SpaceDescriptor small = SpaceDescriptor::field(3, 3);
  const DensityMatrix r3 = tmsq::test::random_density(small, rng);
  Matrix m = Matrix::Zero(f.dim(), f.dim());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) m(f.index(0, a, b), f.index(0, c, d)) = r3.matrix()(small.index(0, a, b), small.index(0, c, d));
  const DensityMatrix rho(f, m);
  const DensityMatrix rb = to_bogoliubov_basis(rho, eps);
  for (int mode : {1, 2}) {
    const Operator np = number_op(f, mode);
    const Operator a = cavity_ladder_operator(f, eps, mode, FieldBasis::bogoliubov);
    CHECK(expectation(rb, a.adjoint() * a).real() == doctest::Approx(expectation(rho, np).real()).epsilon(1e-7));
  }
}

TEST_CASE("displacement operator gives coherent amplitudes") {
  const SpaceDescriptor f = SpaceDescriptor::field(24, 24);
  const Complex a1(0.8, -0.3), a2(-0.5, 0.6);
  const Operator d = build_displacement_operator(f, a1, a2);
  CHECK(unitarity_error(d) < 1e-10);
  const StateVector psi(f, d.matrix() * field_basis_state(f, 0, 0).amplitudes());
  CHECK(std::abs(expectation(psi, annihilation_op(f, 1)) - a1) < 1e-8);
  CHECK(std::abs(expectation(psi, annihilation_op(f, 2)) - a2) < 1e-8);
  CHECK(displacement_within_truncation(f, a1, a2));
  CHECK_FALSE(displacement_within_truncation(SpaceDescriptor::field(2, 2), a1, a2));
}

TEST_CASE("spontaneous decay estimate") {
  const SpontaneousDecay s = spontaneous_decay_estimate(microwave_params());
  CHECK(s.excited_occupation == doctest::Approx(1.6e-3).epsilon(1e-12));
  CHECK(s.rate == doctest::Approx(1.6e-3 * kTwoPi * 1e3).epsilon(1e-12));
}

}  // TEST_SUITE
