#include "tmsq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "tmsq/errors.hpp"
#include "tmsq/model.hpp"

namespace tmsq {

namespace {

void require_field(const SpaceDescriptor& s, const char* what) {
  if (!s.is_field_only()) throw SpaceMismatch(std::string(what) + " expects a field-only state");
}

// Tr(ρ O) for Hermitian O, real part.
double trace_real(const Matrix& rho, const Matrix& op) {
  return rho.cwiseProduct(op.transpose()).sum().real();
}

}  // namespace

EprVariances make_epr_variances(double v_x_minus, double v_x_plus, double v_p_minus, double v_p_plus) {
  return {v_x_minus, v_x_plus, v_p_minus, v_p_plus, v_x_minus + v_p_plus};
}

StateVector tmsv_state_vector(const SpaceDescriptor& field_space, double epsilon, double max_tail) {
  require_field(field_space, "tmsv_state_vector");
  if (!std::isfinite(epsilon)) throw InvalidArgument("squeeze parameter must be finite");
  const int n = std::min(field_space.n1(), field_space.n2());
  const double tail = tmsv_tail_mass(n, epsilon);
  if (tail > max_tail) {
    const int need = truncation_for_tail(epsilon, max_tail);
    throw TruncationError("two-mode squeezed vacuum at epsilon " + std::to_string(epsilon) +
                              " needs a truncation of at least " + std::to_string(need) +
                              " (tail " + std::to_string(tail) + " at N = " + std::to_string(n) + ")",
                          need);
  }
  Vector v = Vector::Zero(field_space.dim());
  const double t = std::tanh(epsilon);
  double amp = 1.0 / std::cosh(epsilon);
  for (int k = 0; k < n; ++k) {
    v(field_space.index(0, k, k)) = amp;
    amp *= t;
  }
  v /= v.norm();
  return {field_space, std::move(v)};
}

namespace {

Quadratures quadratures_from(const Operator& a1, const Operator& a2) {
  auto x = [](const Operator& a) { return Complex(0.5) * (a + a.adjoint()); };
  auto p = [](const Operator& a) { return Complex(0.0, -0.5) * (a - a.adjoint()); };
  return {x(a1), p(a1), x(a2), p(a2)};
}

}  // namespace

Quadratures quadrature_ops(const SpaceDescriptor& space) {
  return quadratures_from(annihilation_op(space, 1), annihilation_op(space, 2));
}

double truncation_leak(const DensityMatrix& rho) {
  const SpaceDescriptor& s = rho.space();
  double leak = 0.0;
  for (int a = 0; a < s.atom_levels(); ++a) {
    for (int n1 = 0; n1 < s.n1(); ++n1) {
      for (int n2 = 0; n2 < s.n2(); ++n2) {
        if (n1 == s.n1() - 1 || n2 == s.n2() - 1) {
          const Eigen::Index i = s.index(a, n1, n2);
          leak += rho.matrix()(i, i).real();
        }
      }
    }
  }
  return leak;
}

EprVariances epr_variances_fock(const DensityMatrix& rho, std::vector<std::string>* warnings) {
  require_field(rho.space(), "epr_variances_fock");
  const Quadratures q = quadrature_ops(rho.space());
  auto variance = [&](const Operator& op) {
    const double mean = trace_real(rho.matrix(), op.matrix());
    return trace_real(rho.matrix(), (op * op).matrix()) - mean * mean;
  };
  const EprVariances v = make_epr_variances(variance(q.x1 - q.x2), variance(q.x1 + q.x2),
                                            variance(q.p1 - q.p2), variance(q.p1 + q.p2));
  if (warnings) {
    const double leak = truncation_leak(rho);
    if (leak > kLeakWarning) {
      warnings->push_back("truncation leak " + std::to_string(leak) + " exceeds " +
                          std::to_string(kLeakWarning));
    }
  }
  return v;
}

double fidelity_to_tmsv(const DensityMatrix& rho, double epsilon) {
  require_field(rho.space(), "fidelity_to_tmsv");
  const StateVector psi = tmsv_state_vector(rho.space(), epsilon, 1e-3);
  const Vector& v = psi.amplitudes();
  return v.dot(rho.matrix() * v).real();
}

PreparationTime preparation_time(double r, double gamma, double n_target) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("r must lie in (0, 1)");
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!(n_target > 0.0)) throw InvalidArgument("n_target must be positive");
  PreparationTime out;
  out.n_initial = r * r / (1.0 - r * r);
  if (n_target >= out.n_initial) {
    out.already_prepared = true;
    return out;
  }
  out.per_step = std::log(out.n_initial / n_target) / gamma;
  out.total = 2.0 * out.per_step;
  return out;
}

double mean_photon(const DensityMatrix& rho, int mode) {
  return trace_real(rho.matrix(), number_op(rho.space(), mode).matrix());
}

double Fig2Settings::gamma_at(double r) const {
  if (gamma) return *gamma;
  if (gamma_of_r) return gamma_of_r(r);
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  return ra_tau * theta_b_tau * theta_b_tau / tau;
}

std::vector<Fig2Row> fig2_rows(const std::vector<double>& r_grid, const Fig2Settings& settings) {
  std::vector<Fig2Row> rows;
  rows.reserve(r_grid.size());
  for (double r : r_grid) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("r values must lie in (0, 1), got " + std::to_string(r));
    const PreparationTime t = preparation_time(r, settings.gamma_at(r), settings.n_target);
    rows.push_back({r, t.n_initial, t.total});
  }
  return rows;
}

std::vector<double> default_fig2_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
  grid.push_back(0.96);
  grid.push_back(0.97);
  return grid;
}

SqueezingReport squeezing_report(const DensityMatrix& rho, double epsilon) {
  const EprVariances v = epr_variances_fock(rho);
  SqueezingReport r;
  r.epsilon_target = epsilon;
  r.v_squeezed = v.v_x_minus;
  r.v_antisqueezed = v.v_p_minus;
  r.duan_sum = v.duan_sum;
  r.n1_mean = mean_photon(rho, 1);
  r.n2_mean = mean_photon(rho, 2);
  r.fidelity = fidelity_to_tmsv(rho, epsilon);
  r.truncation_leak = truncation_leak(rho);
  return r;
}

const std::vector<std::string>& standard_observable_names() {
  static const std::vector<std::string> names = {"n_b1",      "n_b2",      "n_a1",
                                                 "n_a2",      "v_x_minus", "v_x_plus",
                                                 "v_p_minus", "v_p_plus",  "duan_sum"};
  return names;
}

Probe standard_probe(const SpaceDescriptor& field_space, double epsilon, FieldBasis basis) {
  require_field(field_space, "standard_probe");
  struct Ops {
    Matrix nb1, nb2, na1, na2;
    Matrix lin[4];   // X₁−X₂, X₁+X₂, P₁−P₂, P₁+P₂
    Matrix quad[4];  // their squares
  };
  auto ops = std::make_shared<Ops>();
  const Operator b1 = bogoliubov_ladder_operator(field_space, epsilon, 1, basis);
  const Operator b2 = bogoliubov_ladder_operator(field_space, epsilon, 2, basis);
  const Operator a1 = cavity_ladder_operator(field_space, epsilon, 1, basis);
  const Operator a2 = cavity_ladder_operator(field_space, epsilon, 2, basis);
  ops->nb1 = (b1.adjoint() * b1).matrix();
  ops->nb2 = (b2.adjoint() * b2).matrix();
  ops->na1 = (a1.adjoint() * a1).matrix();
  ops->na2 = (a2.adjoint() * a2).matrix();
  const Quadratures q = quadratures_from(a1, a2);
  const Operator combos[4] = {q.x1 - q.x2, q.x1 + q.x2, q.p1 - q.p2, q.p1 + q.p2};
  for (int i = 0; i < 4; ++i) {
    ops->lin[i] = combos[i].matrix();
    ops->quad[i] = (combos[i] * combos[i]).matrix();
  }
  Probe probe;
  probe.names = standard_observable_names();
  probe.evaluate = [ops](const DensityMatrix& rho) {
    const Matrix& m = rho.matrix();
    double var[4];
    for (int i = 0; i < 4; ++i) {
      const double mean = trace_real(m, ops->lin[i]);
      var[i] = trace_real(m, ops->quad[i]) - mean * mean;
    }
    return std::vector<double>{trace_real(m, ops->nb1), trace_real(m, ops->nb2),
                               trace_real(m, ops->na1), trace_real(m, ops->na2),
                               var[0], var[1], var[2], var[3], var[0] + var[3]};
  };
  return probe;
}

}  // namespace tmsq
