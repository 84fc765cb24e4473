#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "tmsq/errors.hpp"
#include "tmsq/io.hpp"
#include "tmsq/validation.hpp"

using namespace tmsq;
using tmsq::test::max_abs;

namespace {

void check_params_close(const PhysicalParams& a, const PhysicalParams& b) {
  CHECK(a.omega1 == doctest::Approx(b.omega1).epsilon(1e-14));
  CHECK(a.omega2 == doctest::Approx(b.omega2).epsilon(1e-14));
  CHECK(a.g1 == doctest::Approx(b.g1).epsilon(1e-14));
  CHECK(a.g2 == doctest::Approx(b.g2).epsilon(1e-14));
  CHECK(a.delta1 == doctest::Approx(b.delta1).epsilon(1e-14));
  CHECK(a.delta2 == doctest::Approx(b.delta2).epsilon(1e-14));
  CHECK(a.gamma_e == doctest::Approx(b.gamma_e).epsilon(1e-14));
  CHECK(a.r_a == doctest::Approx(b.r_a).epsilon(1e-14));
  CHECK(a.tau == doctest::Approx(b.tau).epsilon(1e-14));
}

std::string config_error(const std::string& text) {
  try {
    params_from_json(parse_json_text(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("linear frequencies are converted to angular ones") {
  const Json j = parse_json_text(R"({
    // comment lines are accepted
    "omega1_hz": 1, "omega2_hz": 2, "g1_hz": 3, "g2_hz": 4,
    "delta1_hz": -5, "delta2_hz": 6, /* block */ "gamma_e_hz": 7,
    "r_a_hz": 8, "tau_s": 9
  })");
  const PhysicalParams p = params_from_json(j);
  CHECK(p.omega1 == doctest::Approx(kTwoPi));
  CHECK(p.delta1 == doctest::Approx(-5 * kTwoPi));
  CHECK(p.gamma_e == doctest::Approx(7 * kTwoPi));
  CHECK(p.r_a == 8.0);  // arrivals per second, no 2π
  CHECK(p.tau == 9.0);
  check_params_close(params_from_json(params_to_json(p)), p);
}

TEST_CASE("configuration errors name the key") {
  const std::string base = R"("omega1_hz": 1, "omega2_hz": 2, "g1_hz": 3, "g2_hz": 4, "delta2_hz": 6, "gamma_e_hz": 7, "r_a_hz": 8, "tau_s": 9)";
  CHECK(config_error("{" + base + "}") == "missing key 'delta1_hz'");
  CHECK(config_error("{" + base + R"(, "delta1_hz": "fast"})") == "key 'delta1_hz' must be a number");
  CHECK(config_error("{" + base + R"(, "delta1_hz": 0})") == "delta1 must be nonzero");
  CHECK_THROWS_AS(parse_json_text("{ \"a\": ", "broken.json"), ConfigError);
  try {
    parse_json_text("{ \"a\": ", "broken.json");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("broken.json", 0) == 0);
  }
  CHECK_THROWS_AS(load_json_file("/nonexistent/file.json"), ConfigError);
}

TEST_CASE("bundled experimental config matches the built-in set") {
  const PhysicalParams p = params_from_json(load_json_file(std::string(TMSQ_SOURCE_DIR) + "/configs/microwave.json"));
  check_params_close(p, microwave_params());
}

TEST_CASE("protocol round trip") {
  ProtocolSpec spec = build_two_step_protocol(reference_params(0.4), SwapRule::symmetric_exchange(), 12.5);
  spec.engine = Engine::collision;
  spec.seed = 123456789012345ULL;
  spec.n1 = 9;
  spec.n2 = 11;
  spec.policy = OverlapPolicy::defer;
  spec.include_stark = true;
  const ProtocolSpec back = protocol_from_json(protocol_to_json(spec));
  CHECK(back.engine == spec.engine);
  CHECK(back.seed == spec.seed);
  CHECK(back.n1 == 9);
  CHECK(back.n2 == 11);
  CHECK(back.policy == OverlapPolicy::defer);
  CHECK(back.include_stark);
  REQUIRE(back.steps.size() == 2);
  for (int i = 0; i < 2; ++i) {
    check_params_close(back.steps[i].params, spec.steps[i].params);
    CHECK(back.steps[i].duration == spec.steps[i].duration);
    CHECK(back.steps[i].atom_state == spec.steps[i].atom_state);
    CHECK(back.steps[i].channel == spec.steps[i].channel);
  }
  CHECK_THROWS_AS(protocol_from_json(Json::object()), ConfigError);
}

TEST_CASE("operator, state, Gaussian and report round trips") {
  std::mt19937_64 rng(31);
  const SpaceDescriptor s(2, 2, 3);
  const Operator op(s, tmsq::test::random_hermitian(s.dim(), rng));
  const Operator op2 = operator_from_json(operator_to_json(op));
  CHECK(op2.space() == s);
  CHECK(max_abs(op2.matrix() - op.matrix()) == 0.0);
  const StateVector psi(s, tmsq::test::random_state(s.dim(), rng));
  CHECK((state_from_json(state_to_json(psi)).amplitudes() - psi.amplitudes()).norm() == 0.0);
  const GaussianState g = gaussian_displaced(gaussian_tmsv(0.4), {0.1, 0.2}, {0.3, -0.4});
  const GaussianState g2 = gaussian_from_json(gaussian_to_json(g));
  CHECK((g2.cov() - g.cov()).norm() == 0.0);
  CHECK((g2.mean() - g.mean()).norm() == 0.0);
  const SqueezingReport r = gaussian_report(g, 0.4);
  const SqueezingReport r2 = report_from_json(report_to_json(r));
  CHECK(r2.fidelity == r.fidelity);
  CHECK(r2.duan_sum == r.duan_sum);
  Json bad = operator_to_json(op);
  bad["space"] = {2, 2};
  CHECK_THROWS_AS(operator_from_json(bad), ConfigError);
}

TEST_CASE("CSV and SVG output") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  Trajectory t({"a", "b"});
  t.append(0.0, {1.0, 0.5});
  t.append(0.25, {-2.0, 0.125});
  CHECK(trajectory_csv(t) == "t,a,b\n0,1,0.5\n0.25,-2,0.125\n");
  std::ostringstream out;
  write_table_csv(out, {"x", "y"}, {{1.0, 2.0}});
  CHECK(out.str() == "x,y\n1,2\n");
  const std::string svg = svg_line_plot("title <&>", "x", {0.0, 1.0}, {{"y", {0.0, 1.0}}});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("title &lt;&amp;&gt;") != std::string::npos);
}

}  // TEST_SUITE
