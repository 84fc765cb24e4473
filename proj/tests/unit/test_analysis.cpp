#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "tmsq/analysis.hpp"
#include "tmsq/errors.hpp"
#include "tmsq/gaussian.hpp"

using namespace tmsq;

namespace {

// Random state confined to n ≤ 2 in both modes, embedded in a larger space.
DensityMatrix low_lying(const SpaceDescriptor& f, std::mt19937_64& rng) {
  const SpaceDescriptor small = SpaceDescriptor::field(3, 3);
  const DensityMatrix r = tmsq::test::random_density(small, rng);
  Matrix m = Matrix::Zero(f.dim(), f.dim());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) m(f.index(0, a, b), f.index(0, c, d)) = r.matrix()(small.index(0, a, b), small.index(0, c, d));
  return {f, m};
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("EPR variance bookkeeping") {
  const EprVariances v = make_epr_variances(0.1, 0.2, 0.3, 0.4);
  CHECK(v.duan_sum == doctest::Approx(0.5));
  CHECK(v.entangled());
  CHECK_FALSE(make_epr_variances(0.5, 0.0, 0.0, 0.5).entangled());
}

TEST_CASE("Fock-space variances of the squeezed vacuum") {
  const double eps = 0.5;
  const SpaceDescriptor f = SpaceDescriptor::field(24, 24);
  const DensityMatrix rho = DensityMatrix::pure(tmsv_state_vector(f, eps, 1e-14));
  std::vector<std::string> warnings;
  const EprVariances v = epr_variances_fock(rho, &warnings);
  CHECK(warnings.empty());
  const EprVariances g = gaussian_epr_variances(gaussian_tmsv(eps));
  CHECK(v.v_x_minus == doctest::Approx(g.v_x_minus).epsilon(1e-10));
  CHECK(v.v_x_plus == doctest::Approx(g.v_x_plus).epsilon(1e-10));
  CHECK(v.v_p_minus == doctest::Approx(g.v_p_minus).epsilon(1e-10));
  CHECK(v.duan_sum == doctest::Approx(std::exp(-2 * eps)).epsilon(1e-10));
  CHECK(fidelity_to_tmsv(rho, eps) == doctest::Approx(1.0));
  CHECK(fidelity_to_tmsv(DensityMatrix::pure(field_basis_state(f, 0, 0)), eps) ==
        doctest::Approx(1.0 / std::pow(std::cosh(eps), 2)));
  const SqueezingReport r = squeezing_report(rho, eps);
  CHECK(r.n1_mean == doctest::Approx(std::pow(std::sinh(eps), 2)).epsilon(1e-10));
  CHECK(r.truncation_leak < 1e-12);
}

TEST_CASE("truncation guards") {
  const SpaceDescriptor f = SpaceDescriptor::field(5, 5);
  CHECK_THROWS_AS(tmsv_state_vector(f, 1.0), TruncationError);
  const DensityMatrix edge = DensityMatrix::pure(field_basis_state(f, 4, 1));
  CHECK(truncation_leak(edge) == doctest::Approx(1.0));
  std::vector<std::string> warnings;
  epr_variances_fock(edge, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(truncation_leak(DensityMatrix::pure(field_basis_state(f, 3, 3))) == 0.0);
  CHECK_THROWS_AS(fidelity_to_tmsv(edge, 1.5), TruncationError);
}

TEST_CASE("preparation time") {
  const PreparationTime t = preparation_time(0.5, 2.0, 0.01);
  CHECK(t.n_initial == doctest::Approx(1.0 / 3.0));
  CHECK(t.per_step == doctest::Approx(std::log(100.0 / 3.0) / 2.0));
  CHECK(t.total == doctest::Approx(2.0 * t.per_step));
  CHECK_FALSE(t.already_prepared);
  const PreparationTime done = preparation_time(0.1, 2.0, 0.5);
  CHECK(done.already_prepared);
  CHECK(done.total == 0.0);
  CHECK_THROWS_AS(preparation_time(1.0, 1.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(preparation_time(0.5, 0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(preparation_time(0.5, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("property: preparation time grows with r at fixed rate") {
  double previous = 0.0;
  for (double r = 0.02; r < 0.999; r += 0.01) {
    const double t = preparation_time(r, 1.0, 1e-3).total;
    CHECK(t >= previous);
    previous = t;
  }
}

TEST_CASE("preparation-time curve") {
  const Fig2Settings s;
  CHECK(s.gamma_at(0.3) == doctest::Approx(0.1 * 0.01 / 0.7e-6));
  const std::vector<Fig2Row> rows = fig2_rows({0.1, 0.5, 0.9}, s);
  CHECK(rows[0].n_bar == doctest::Approx(0.01 / 0.99));
  CHECK(rows[0].total_time == 0.0);
  CHECK(rows[2].n_bar == doctest::Approx(0.81 / 0.19));
  CHECK(rows[2].total_time == doctest::Approx(2.0 * std::log(0.81 / 0.19 / 0.1) / s.gamma_at(0.9)));
  Fig2Settings fixed;
  fixed.gamma = 5.0;
  CHECK(fixed.gamma_at(0.7) == 5.0);
  Fig2Settings per_r;
  per_r.gamma_of_r = [](double r) { return 1.0 + r; };
  CHECK(per_r.gamma_at(0.5) == 1.5);
  CHECK_THROWS_AS(fig2_rows({0.5, 1.0}, s), InvalidArgument);
  const std::vector<double> grid = default_fig2_grid();
  CHECK(grid.size() == 21);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == 0.97);
}

TEST_CASE("probe gives the same numbers in both bases") {
  std::mt19937_64 rng(8);
  const double eps = 0.35;
  const SpaceDescriptor f = SpaceDescriptor::field(18, 18);
  const DensityMatrix rho = low_lying(f, rng);
  const std::vector<double> a = standard_probe(f, eps).evaluate(rho);
  const std::vector<double> b = standard_probe(f, eps, FieldBasis::bogoliubov).evaluate(to_bogoliubov_basis(rho, eps));
  REQUIRE(a.size() == standard_observable_names().size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(standard_observable_names()[i]);
    CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-7));
  }
}

TEST_CASE("property: canonical pairs respect the uncertainty bound") {
  std::mt19937_64 rng(12);
  const SpaceDescriptor f = SpaceDescriptor::field(8, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = low_lying(f, rng);
    const EprVariances v = epr_variances_fock(rho);
    // [X₁−X₂, P₁−P₂] = i, [X₁+X₂, P₁+P₂] = i
    CHECK(v.v_x_minus * v.v_p_minus >= 0.25 - 1e-12);
    CHECK(v.v_x_plus * v.v_p_plus >= 0.25 - 1e-12);
    // Duan bound for separable states is not guaranteed here, only positivity
    CHECK(v.duan_sum > 0.0);
  }
}

}  // TEST_SUITE
