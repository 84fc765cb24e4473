#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "tmsq/analysis.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/errors.hpp"
#include "tmsq/gaussian.hpp"

using namespace tmsq;

TEST_SUITE("gaussian") {

TEST_CASE("vacuum, thermal and displaced states") {
  const GaussianState v = gaussian_vacuum();
  CHECK(v.purity() == doctest::Approx(1.0));
  CHECK(std::abs(v.uncertainty_margin()) < 1e-14);
  CHECK(gaussian_mean_photon(v, 1) == doctest::Approx(0.0));
  const GaussianState th = gaussian_thermal(0.5, 2.0);
  CHECK(gaussian_mean_photon(th, 1) == doctest::Approx(0.5));
  CHECK(gaussian_mean_photon(th, 2) == doctest::Approx(2.0));
  CHECK(th.purity() == doctest::Approx(1.0 / (2.0 * 5.0)));
  const GaussianState d = gaussian_displaced(v, {0.3, -0.4}, {1.0, 0.0});
  CHECK(d.mean()(1) == doctest::Approx(-0.4));
  CHECK(gaussian_mean_photon(d, 1) == doctest::Approx(0.25));
  CHECK(gaussian_mean_photon(d, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gaussian_thermal(-0.1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(gaussian_mean_photon(v, 3), InvalidArgument);
}

TEST_CASE("invalid covariances are rejected") {
  CHECK_THROWS_AS(GaussianState(Vec4::Zero(), Mat4::Identity() * 0.1), InvalidArgument);
  Mat4 asym = Mat4::Identity() / 4.0;
  asym(0, 2) = 0.1;
  CHECK_THROWS_AS(GaussianState(Vec4::Zero(), asym), InvalidArgument);
  Vec4 bad = Vec4::Zero();
  bad(0) = std::nan("");
  CHECK_THROWS_AS(GaussianState(bad, Mat4::Identity() / 4.0), InvalidArgument);
  CHECK_THROWS_AS(gaussian_tmsv(-0.1), InvalidArgument);
}

TEST_CASE("two-mode squeezed vacuum moments") {
  const double eps = 0.7;
  const GaussianState s = gaussian_tmsv(eps);
  const Mat4& c = s.cov();
  CHECK(c(0, 0) == doctest::Approx(std::cosh(2 * eps) / 4));
  CHECK(c(0, 2) == doctest::Approx(std::sinh(2 * eps) / 4));
  CHECK(c(1, 3) == doctest::Approx(-std::sinh(2 * eps) / 4));
  CHECK(s.purity() == doctest::Approx(1.0).epsilon(1e-12));
  const Mat4 m = symplectic_squeeze(eps);
  CHECK((m * symplectic_form() * m.transpose() - symplectic_form()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((m * m.transpose() / 4.0 - c).cwiseAbs().maxCoeff() < 1e-13);
  const EprVariances v = gaussian_epr_variances(s);
  CHECK(v.v_x_minus == doctest::Approx(std::exp(-2 * eps) / 2));
  CHECK(v.v_p_minus == doctest::Approx(std::exp(2 * eps) / 2));
  CHECK(v.duan_sum == doctest::Approx(std::exp(-2 * eps)));
  CHECK(v.entangled());
  CHECK(gaussian_mean_photon(s, 1) == doctest::Approx(std::pow(std::sinh(eps), 2)));
  CHECK(gaussian_b_occupation(s, eps, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gaussian_b_occupation(gaussian_vacuum(), eps, 2) == doctest::Approx(std::pow(std::sinh(eps), 2)));
  CHECK(gaussian_overlap(gaussian_vacuum(), s) == doctest::Approx(1.0 / std::pow(std::cosh(eps), 2)));
  CHECK(gaussian_overlap(s, s) == doctest::Approx(1.0));
}

TEST_CASE("damping of one Bogoliubov mode") {
  const double eps = 0.5, gamma = 2.0;
  const GaussianState v = gaussian_vacuum();
  for (double t : {0.1, 0.5, 2.0}) {
    const GaussianState s = gaussian_lindblad_evolve(v, eps, gamma, 1, t);
    CHECK(gaussian_b_occupation(s, eps, 1) ==
          doctest::Approx(std::pow(std::sinh(eps), 2) * std::exp(-gamma * t)).epsilon(1e-10));
    // the other mode commutes with the jump and is untouched
    CHECK(gaussian_b_occupation(s, eps, 2) == doctest::Approx(std::pow(std::sinh(eps), 2)).epsilon(1e-10));
    CHECK(s.uncertainty_margin() > -1e-12);
  }
  // both steps in turn relax to the squeezed vacuum
  const GaussianState both = gaussian_lindblad_evolve(gaussian_lindblad_evolve(v, eps, gamma, 1, 20.0), eps, gamma, 2, 20.0);
  CHECK(gaussian_overlap(both, gaussian_tmsv(eps)) == doctest::Approx(1.0).epsilon(1e-12));
  // mean amplitudes of the damped mode decay at γ/2
  const GaussianState disp = gaussian_displaced(gaussian_tmsv(eps), {0.5, 0.0}, {});
  const GaussianState dd = gaussian_lindblad_evolve(disp, eps, gamma, 1, 1.0);
  const GaussianState free = gaussian_lindblad_evolve(disp, eps, 0.0, 1, 1.0);
  CHECK((free.mean() - disp.mean()).norm() < 1e-14);
  CHECK(dd.mean().norm() < disp.mean().norm());
}

TEST_CASE("property: propagators compose") {
  const double eps = 0.4, gamma = 1.3;
  const GaussianState s0 = gaussian_displaced(gaussian_thermal(0.2, 0.7), {0.1, 0.2}, {-0.3, 0.05});
  for (int which : {1, 2}) {
    const GaussianState once = GaussianPropagator(eps, gamma, which, 0.9).apply(s0);
    const GaussianPropagator half1(eps, gamma, which, 0.4), half2(eps, gamma, which, 0.5);
    const GaussianState twice = half2.apply(half1.apply(s0));
    CHECK((once.cov() - twice.cov()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((once.mean() - twice.mean()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(GaussianPropagator(eps, -1.0, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(GaussianPropagator(eps, 1.0, 1, -1.0), InvalidArgument);
  CHECK_THROWS_AS(jump_coefficients(eps, 3), InvalidArgument);
}

TEST_CASE("moment equations agree with the truncated master equation") {
  const double eps = 0.3, gamma = 1.0, t = 1.0;
  const SpaceDescriptor f = SpaceDescriptor::field(14, 14);
  const DensityMatrix vac = DensityMatrix::pure(field_basis_state(f, 0, 0));
  LindbladOptions opt;
  opt.samples = 2;
  const Trajectory fock =
      lindblad_evolve(vac, {{squeezed_ladder_operator(f, eps, 2), gamma}}, t, 0.005, standard_probe(f, eps), opt);
  const std::vector<double> g = gaussian_observables(gaussian_lindblad_evolve(gaussian_vacuum(), eps, gamma, 2, t), eps);
  const auto& names = standard_observable_names();
  REQUIRE(g.size() == names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    CAPTURE(names[i]);
    CHECK(fock.value(1, names[i]) == doctest::Approx(g[i]).epsilon(1e-6));
  }
}

TEST_CASE("report of the target state") {
  const double eps = 0.6;
  const SqueezingReport r = gaussian_report(gaussian_tmsv(eps), eps);
  CHECK(r.fidelity == doctest::Approx(1.0));
  CHECK(r.v_squeezed == doctest::Approx(std::exp(-2 * eps) / 2));
  CHECK(r.v_antisqueezed == doctest::Approx(std::exp(2 * eps) / 2));
  CHECK(r.epsilon_target == eps);
}

}  // TEST_SUITE
