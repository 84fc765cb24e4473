#include "tmsq/gaussian.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "tmsq/errors.hpp"

namespace tmsq {

namespace {

constexpr double kCommutator = 0.5;  // [X, P] = i/2

using Mat4c = Eigen::Matrix4cd;
using Vec4c = Eigen::Vector4cd;
using Generator = Eigen::Matrix<double, 21, 21>;

// d⟨R_a R_b⟩/dt for second moments W under the jump lᵀR at rate gamma:
// (γ/2) iκ [p uᵀ + u pᵀ − ū qᵀ − q ūᵀ], u = Ωl, ū = Ωl*, p = Wᵀl*, q = Wl.
Mat4c moment_flow(const Mat4c& w, const Vec4c& l, double gamma) {
  const Mat4c omega = symplectic_form().cast<Complex>();
  const Vec4c u = omega * l;
  const Vec4c ubar = omega * l.conjugate();
  const Vec4c p = w.transpose() * l.conjugate();
  const Vec4c q = w * l;
  const Mat4c bracket = p * u.transpose() + u * p.transpose() - ubar * q.transpose() - q * ubar.transpose();
  return (0.5 * gamma) * (kI * kCommutator) * bracket;
}

Generator build_generator(double epsilon, double gamma, int which) {
  const Vec4c l = jump_coefficients(epsilon, which);
  Generator g = Generator::Zero();
  // first moments: dm/dt = −γκ Ω Im(l l†) m
  const Mat4 drift = -gamma * kCommutator * symplectic_form() * (l * l.adjoint()).imag();
  g.block<4, 4>(0, 0) = drift;
  // covariance: dV/dt = Re F(V) + Re F(C), C = (iκ/2)Ω
  for (int b = 0; b < 4; ++b) {
    for (int a = 0; a < 4; ++a) {
      Mat4c e = Mat4c::Zero();
      e(a, b) = 1.0;
      const Mat4 col = moment_flow(e, l, gamma).real();
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) g(4 + i + 4 * j, 4 + a + 4 * b) = col(i, j);
    }
  }
  const Mat4c c = (kI * (0.5 * kCommutator)) * symplectic_form().cast<Complex>();
  const Mat4 source = moment_flow(c, l, gamma).real();
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) g(4 + i + 4 * j, 20) = source(i, j);
  return g;
}

}  // namespace

GaussianState::GaussianState(Vec4 mean, Mat4 cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (!mean_.allFinite() || !cov_.allFinite()) throw InvalidArgument("Gaussian state has non-finite entries");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw InvalidArgument("covariance matrix is not symmetric");
  }
  const double margin = uncertainty_margin();
  if (margin < kUncertaintyFloor) {
    throw InvalidArgument("covariance violates the uncertainty principle (margin " + std::to_string(margin) + ")");
  }
}

double GaussianState::uncertainty_margin() const {
  const Mat4c m = cov_.cast<Complex>() + (kI * 0.25) * symplectic_form().cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Mat4c> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double GaussianState::purity() const { return 1.0 / (16.0 * std::sqrt(cov_.determinant())); }

Mat4 symplectic_form() {
  Mat4 o = Mat4::Zero();
  o(0, 1) = 1.0;
  o(1, 0) = -1.0;
  o(2, 3) = 1.0;
  o(3, 2) = -1.0;
  return o;
}

GaussianState gaussian_vacuum() { return {Vec4::Zero(), Mat4::Identity() / 4.0}; }

GaussianState gaussian_thermal(double n1_mean, double n2_mean) {
  if (!(n1_mean >= 0.0) || !(n2_mean >= 0.0)) throw InvalidArgument("thermal occupation must be >= 0");
  Mat4 cov = Mat4::Zero();
  cov(0, 0) = cov(1, 1) = (2.0 * n1_mean + 1.0) / 4.0;
  cov(2, 2) = cov(3, 3) = (2.0 * n2_mean + 1.0) / 4.0;
  return {Vec4::Zero(), cov};
}

GaussianState gaussian_displaced(const GaussianState& s, Complex alpha1, Complex alpha2) {
  const Vec4 shift(alpha1.real(), alpha1.imag(), alpha2.real(), alpha2.imag());
  return {s.mean() + shift, s.cov()};
}

GaussianState gaussian_tmsv(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be finite and >= 0");
  const double c = std::cosh(2.0 * epsilon) / 4.0;
  const double s = std::sinh(2.0 * epsilon) / 4.0;
  Mat4 cov = c * Mat4::Identity();
  cov(0, 2) = cov(2, 0) = s;
  cov(1, 3) = cov(3, 1) = -s;
  return {Vec4::Zero(), cov};
}

Mat4 symplectic_squeeze(double epsilon) {
  const double c = std::cosh(epsilon);
  const double s = std::sinh(epsilon);
  Mat4 m;
  m << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return m;
}

Eigen::Vector4cd jump_coefficients(double epsilon, int which) {
  const double c = std::cosh(epsilon);
  const double s = std::sinh(epsilon);
  // a = X + iP, a† = X − iP
  if (which == 1) return {Complex(c), Complex(0.0, c), Complex(-s), Complex(0.0, s)};
  if (which == 2) return {Complex(-s), Complex(0.0, s), Complex(c), Complex(0.0, c)};
  throw InvalidArgument("jump index must be 1 or 2");
}

GaussianPropagator::GaussianPropagator(double epsilon, double gamma, int which, double t) {
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  if (!(t >= 0.0)) throw InvalidArgument("evolution time must be >= 0");
  const Generator g = build_generator(epsilon, gamma, which);
  map_ = (g * t).exp();
}

GaussianState GaussianPropagator::apply(const GaussianState& s) const {
  Eigen::Matrix<double, 21, 1> z;
  z.head<4>() = s.mean();
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) z(4 + i + 4 * j) = s.cov()(i, j);
  z(20) = 1.0;
  const Eigen::Matrix<double, 21, 1> out = map_ * z;
  Mat4 cov;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) cov(i, j) = out(4 + i + 4 * j);
  const Mat4 sym = 0.5 * (cov + cov.transpose());
  return {out.head<4>(), sym};
}

GaussianState gaussian_lindblad_evolve(const GaussianState& s0, double epsilon, double gamma, int which,
                                       double t) {
  if (t == 0.0 || gamma == 0.0) return s0;
  return GaussianPropagator(epsilon, gamma, which, t).apply(s0);
}

EprVariances gaussian_epr_variances(const GaussianState& s) {
  const Mat4& v = s.cov();
  auto var = [&](int i, int j, double sign) { return v(i, i) + v(j, j) + 2.0 * sign * v(i, j); };
  return make_epr_variances(var(0, 2, -1.0), var(0, 2, 1.0), var(1, 3, -1.0), var(1, 3, 1.0));
}

double gaussian_mean_photon(const GaussianState& s, int mode) {
  if (mode != 1 && mode != 2) throw InvalidArgument("mode index must be 1 or 2");
  const int x = 2 * (mode - 1);
  const int p = x + 1;
  const Vec4& m = s.mean();
  return s.cov()(x, x) + s.cov()(p, p) + m(x) * m(x) + m(p) * m(p) - 0.5;
}

double gaussian_b_occupation(const GaussianState& s, double epsilon, int which) {
  const Vec4c l = jump_coefficients(epsilon, which);
  // ⟨L†L⟩ = l† W l with W = V + m mᵀ + (iκ/2)Ω
  const Mat4c w = (s.cov() + s.mean() * s.mean().transpose()).cast<Complex>() +
                  (kI * (0.5 * kCommutator)) * symplectic_form().cast<Complex>();
  return (l.adjoint() * w * l)(0, 0).real();
}

double gaussian_overlap(const GaussianState& a, const GaussianState& b) {
  const Mat4 sum = a.cov() + b.cov();
  const Vec4 d = a.mean() - b.mean();
  const double quad = d.dot(sum.ldlt().solve(d));
  return std::exp(-0.5 * quad) / std::sqrt((2.0 * sum).determinant());
}

SqueezingReport gaussian_report(const GaussianState& s, double epsilon) {
  const EprVariances v = gaussian_epr_variances(s);
  SqueezingReport r;
  r.epsilon_target = epsilon;
  r.v_squeezed = v.v_x_minus;
  r.v_antisqueezed = v.v_p_minus;
  r.duan_sum = v.duan_sum;
  r.n1_mean = gaussian_mean_photon(s, 1);
  r.n2_mean = gaussian_mean_photon(s, 2);
  r.fidelity = gaussian_overlap(s, gaussian_tmsv(epsilon));
  r.truncation_leak = 0.0;
  return r;
}

std::vector<double> gaussian_observables(const GaussianState& s, double epsilon) {
  const EprVariances v = gaussian_epr_variances(s);
  return {gaussian_b_occupation(s, epsilon, 1), gaussian_b_occupation(s, epsilon, 2),
          gaussian_mean_photon(s, 1),           gaussian_mean_photon(s, 2),
          v.v_x_minus,                          v.v_x_plus,
          v.v_p_minus,                          v.v_p_plus,
          v.duan_sum};
}

GaussianRun run_protocol_gaussian(const ProtocolSpec& protocol, const GaussianState& initial) {
  protocol.validate();
  GaussianRun run{Trajectory(standard_observable_names()), initial};
  double offset = 0.0;
  for (const ProtocolStep& step : protocol.steps) {
    const DerivedParams d = derive_rates(step.params);
    const int which = channel_mode(d.channel);
    Trajectory part(standard_observable_names());
    part.append(0.0, gaussian_observables(run.final_state, d.epsilon));
    if (step.duration > 0.0) {
      const int intervals = std::max(1, protocol.samples_per_step - 1);
      const GaussianPropagator prop(d.epsilon, d.gamma, which, step.duration / intervals);
      for (int s = 1; s <= intervals; ++s) {
        run.final_state = prop.apply(run.final_state);
        const double t = s == intervals ? step.duration : step.duration * s / intervals;
        part.append(t, gaussian_observables(run.final_state, d.epsilon));
      }
    }
    run.trajectory.extend(part, offset);
    offset += step.duration;
  }
  return run;
}

}  // namespace tmsq
