// Two-mode squeeze operator and its Bogoliubov images.
//
// S₁₂(ε) conserves n₁ − n₂, so in every sector d = n₁ − n₂ it acts on the
// chain |k+p, k+q⟩ (p = max(d,0), q = max(−d,0), k = 0, 1, ...). On a chain the
// generator ε(a₁a₂ − a₁†a₂†) is a real antisymmetric tridiagonal matrix and the
// exponential is a small real orthogonal matrix.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "tmsq/errors.hpp"
#include "tmsq/model.hpp"

namespace tmsq {

namespace {

struct Chain {
  int p = 0;
  int q = 0;
  int length = 0;
  Eigen::MatrixXd propagator;  // exp(ε K_d) on the chain

  int position(int n1, int n2) const { return std::min(n1 - p, n2 - q); }
};

Chain make_chain(int d, int n1_trunc, int n2_trunc, double epsilon) {
  Chain c;
  c.p = std::max(d, 0);
  c.q = std::max(-d, 0);
  c.length = std::max(0, std::min(n1_trunc - c.p, n2_trunc - c.q));
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(c.length, c.length);
  for (int i = 1; i < c.length; ++i) {
    // a₁a₂ |i+p, i+q⟩ = √((i+p)(i+q)) |i−1+p, i−1+q⟩
    const double amp = std::sqrt(static_cast<double>(i + c.p) * static_cast<double>(i + c.q));
    k(i - 1, i) = amp;
    k(i, i - 1) = -amp;
  }
  c.propagator = (epsilon * k).exp();
  return c;
}

void check_squeeze_truncation(const SpaceDescriptor& space, double epsilon) {
  const int n = std::min(space.n1(), space.n2());
  const double tail = tmsv_tail_mass(n, epsilon);
  if (tail > 1e-3) {
    const int need = truncation_for_tail(epsilon, 1e-6);
    throw TruncationError("squeeze parameter " + std::to_string(epsilon) + " leaves " +
                              std::to_string(tail) + " of the squeezed vacuum beyond N = " +
                              std::to_string(n) + "; use a truncation of at least " +
                              std::to_string(need),
                          need);
  }
}

// Columns: retained states |n₁,n₂⟩; rows: retained states. Workspace of size
// (n1_work, n2_work) >= target.
Matrix conjugated_ladder(const SpaceDescriptor& target, int n1_work, int n2_work, double epsilon,
                         int mode) {
  std::map<int, Chain> chains;
  auto chain = [&](int d) -> const Chain& {
    auto it = chains.find(d);
    if (it == chains.end()) it = chains.emplace(d, make_chain(d, n1_work, n2_work, epsilon)).first;
    return it->second;
  };

  const Eigen::Index dim = target.field_dim();
  Matrix out = Matrix::Zero(dim, dim);
  const int shift = mode == 1 ? -1 : 1;  // a₁ lowers d, a₂ raises it

  for (int n1 = 0; n1 < target.n1(); ++n1) {
    for (int n2 = 0; n2 < target.n2(); ++n2) {
      const int d = n1 - n2;
      const Chain& src = chain(d);
      const Chain& dst = chain(d + shift);
      const Eigen::VectorXd v = src.propagator.col(src.position(n1, n2));
      Eigen::VectorXd w = Eigen::VectorXd::Zero(dst.length);
      for (int i = 0; i < src.length; ++i) {
        const int m1 = i + src.p;
        const int m2 = i + src.q;
        if (mode == 1 && m1 > 0) {
          w(dst.position(m1 - 1, m2)) += std::sqrt(static_cast<double>(m1)) * v(i);
        } else if (mode == 2 && m2 > 0) {
          w(dst.position(m1, m2 - 1)) += std::sqrt(static_cast<double>(m2)) * v(i);
        }
      }
      const Eigen::VectorXd u = dst.propagator.transpose() * w;
      const Eigen::Index col = target.index(0, n1, n2);
      for (int j = 0; j < dst.length; ++j) {
        const int s1 = j + dst.p;
        const int s2 = j + dst.q;
        if (s1 < target.n1() && s2 < target.n2()) out(target.index(0, s1, s2), col) = u(j);
      }
    }
  }
  return out;
}

Matrix squeeze_block_at(const SpaceDescriptor& target, int pad, double epsilon) {
  Matrix out = Matrix::Zero(target.field_dim(), target.field_dim());
  for (int d = -(target.n2() - 1); d <= target.n1() - 1; ++d) {
    const Chain c = make_chain(d, target.n1() + pad, target.n2() + pad, epsilon);
    const int kept = std::max(0, std::min(target.n1() - c.p, target.n2() - c.q));
    for (int i = 0; i < kept; ++i)
      for (int j = 0; j < kept; ++j) out(target.index(0, i + c.p, i + c.q), target.index(0, j + c.p, j + c.q)) = c.propagator(i, j);
  }
  return out;
}

constexpr int kMaxWorkspace = 1500;
constexpr double kConvergence = 1e-13;

// Grows the padding until build(pad) stops changing.
template <class Build>
Matrix converge_padded(const SpaceDescriptor& field_space, const char* what, Build build) {
  int pad = std::max({16, field_space.n1(), field_space.n2()});
  Matrix previous = build(pad);
  while (true) {
    pad += std::max(16, pad / 2);
    if (std::max(field_space.n1(), field_space.n2()) + pad > kMaxWorkspace) {
      throw TruncationError(std::string(what) + " did not converge within a workspace of " +
                                std::to_string(kMaxWorkspace) + " Fock states; reduce epsilon",
                            field_space.n1());
    }
    Matrix current = build(pad);
    const double scale = 1.0 + current.cwiseAbs().maxCoeff();
    const double change = (current - previous).cwiseAbs().maxCoeff();
    previous = std::move(current);
    if (change <= kConvergence * scale) return previous;
  }
}

}  // namespace

double tmsv_tail_mass(int n_trunc, double epsilon) {
  const double t2 = std::tanh(epsilon) * std::tanh(epsilon);
  return std::pow(t2, n_trunc);
}

int truncation_for_tail(double epsilon, double max_tail) {
  const double t2 = std::tanh(epsilon) * std::tanh(epsilon);
  if (t2 == 0.0) return 1;
  if (t2 >= 1.0) throw InvalidArgument("squeeze parameter is not finite");
  return std::max(1, static_cast<int>(std::ceil(std::log(max_tail) / std::log(t2))));
}

Operator build_squeeze_operator(const SpaceDescriptor& space, double epsilon) {
  if (!std::isfinite(epsilon)) throw InvalidArgument("squeeze parameter must be finite");
  check_squeeze_truncation(space, epsilon);
  const SpaceDescriptor field = space.field_space();
  Matrix s = Matrix::Zero(field.dim(), field.dim());
  for (int d = -(field.n2() - 1); d <= field.n1() - 1; ++d) {
    const Chain c = make_chain(d, field.n1(), field.n2(), epsilon);
    for (int i = 0; i < c.length; ++i) {
      for (int j = 0; j < c.length; ++j) {
        s(field.index(0, i + c.p, i + c.q), field.index(0, j + c.p, j + c.q)) = c.propagator(i, j);
      }
    }
  }
  return embed_field_operator(Operator(field, std::move(s)), space.atom_levels());
}

Operator squeezed_ladder_operator(const SpaceDescriptor& field_space, double epsilon, int mode) {
  if (!field_space.is_field_only()) {
    throw SpaceMismatch("squeezed_ladder_operator expects a field-only space");
  }
  field_space.truncation(mode);
  if (!std::isfinite(epsilon)) throw InvalidArgument("squeeze parameter must be finite");
  if (epsilon == 0.0) return annihilation_op(field_space, mode);

  Matrix m = converge_padded(field_space, "squeezed ladder operator", [&](int pad) {
    return conjugated_ladder(field_space, field_space.n1() + pad, field_space.n2() + pad, epsilon, mode);
  });
  return {field_space, std::move(m)};
}

Operator squeeze_block(const SpaceDescriptor& field_space, double epsilon) {
  if (!field_space.is_field_only()) throw SpaceMismatch("squeeze_block expects a field-only space");
  if (!std::isfinite(epsilon)) throw InvalidArgument("squeeze parameter must be finite");
  if (epsilon == 0.0) return identity(field_space);
  Matrix m = converge_padded(field_space, "squeeze operator block",
                             [&](int pad) { return squeeze_block_at(field_space, pad, epsilon); });
  return {field_space, std::move(m)};
}

Operator cavity_ladder_operator(const SpaceDescriptor& field_space, double epsilon, int mode, FieldBasis basis) {
  if (basis == FieldBasis::photon) return annihilation_op(field_space, mode);
  return Complex(std::cosh(epsilon)) * annihilation_op(field_space, mode) +
         Complex(std::sinh(epsilon)) * creation_op(field_space, 3 - mode);
}

Operator bogoliubov_ladder_operator(const SpaceDescriptor& field_space, double epsilon, int mode,
                                    FieldBasis basis) {
  if (basis == FieldBasis::bogoliubov) return annihilation_op(field_space, mode);
  return squeezed_ladder_operator(field_space, epsilon, mode);
}

namespace {

DensityMatrix change_basis(const DensityMatrix& rho, const Matrix& v, double* lost) {
  const Matrix m = v * rho.matrix() * v.adjoint();
  const double kept = m.trace().real();
  if (lost) *lost = 1.0 - kept;
  if (!(kept > 0.0)) throw TruncationError("state lies entirely outside the truncation after the basis change", 0);
  return DensityMatrix::renormalized(rho.space(), m);
}

}  // namespace

DensityMatrix to_bogoliubov_basis(const DensityMatrix& rho, double epsilon, double* lost) {
  if (!rho.space().is_field_only()) throw SpaceMismatch("to_bogoliubov_basis expects a field-only state");
  return change_basis(rho, squeeze_block(rho.space(), epsilon).matrix(), lost);
}

DensityMatrix from_bogoliubov_basis(const DensityMatrix& rho, double epsilon, double* lost) {
  if (!rho.space().is_field_only()) throw SpaceMismatch("from_bogoliubov_basis expects a field-only state");
  return change_basis(rho, squeeze_block(rho.space(), -epsilon).matrix(), lost);
}

Operator build_displacement_operator(const SpaceDescriptor& space, Complex alpha1, Complex alpha2) {
  auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  if (!finite(alpha1) || !finite(alpha2)) throw InvalidArgument("displacement amplitude must be finite");

  auto single = [](int n, Complex alpha) {
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
    return Matrix(gen.exp());
  };
  const Matrix d1 = single(space.n1(), alpha1);
  const Matrix d2 = single(space.n2(), alpha2);
  Operator field(space.field_space(), Eigen::kroneckerProduct(d1, d2).eval());
  return embed_field_operator(field, space.atom_levels());
}

bool displacement_within_truncation(const SpaceDescriptor& space, Complex alpha1, Complex alpha2) {
  return std::norm(alpha1) <= space.n1() / 4.0 && std::norm(alpha2) <= space.n2() / 4.0;
}

}  // namespace tmsq
