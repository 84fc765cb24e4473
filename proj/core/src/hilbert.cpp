#include "tmsq/hilbert.hpp"

#include <array>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "tmsq/errors.hpp"

namespace tmsq {

namespace {

void require_same_space(const SpaceDescriptor& a, const SpaceDescriptor& b, const char* what) {
  if (!(a == b)) {
    throw SpaceMismatch(std::string(what) + ": operands live on different spaces");
  }
}

Matrix ladder_block(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

}  // namespace

char level_name(Level level) {
  switch (level) {
    case Level::g: return 'g';
    case Level::h: return 'h';
    case Level::e: return 'e';
  }
  return '?';
}

Level parse_level(std::string_view name) {
  if (name == "g") return Level::g;
  if (name == "h") return Level::h;
  if (name == "e") return Level::e;
  throw InvalidArgument("unknown atomic level '" + std::string(name) + "' (expected g, h or e)");
}

SpaceDescriptor::SpaceDescriptor(int atom_levels, int n1_trunc, int n2_trunc)
    : atom_levels_(atom_levels), n1_(n1_trunc), n2_(n2_trunc) {
  if (atom_levels < 1 || atom_levels > 3) {
    throw InvalidArgument("atom_levels must be 1, 2 or 3, got " + std::to_string(atom_levels));
  }
  if (n1_trunc < 1 || n2_trunc < 1) {
    throw InvalidArgument("Fock truncations must be >= 1");
  }
}

int SpaceDescriptor::truncation(int mode) const {
  if (mode == 1) return n1_;
  if (mode == 2) return n2_;
  throw InvalidArgument("mode index must be 1 or 2, got " + std::to_string(mode));
}

Operator::Operator(SpaceDescriptor space, Matrix matrix) : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw SpaceMismatch("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                        std::to_string(matrix_.cols()) + " but the space has dimension " +
                        std::to_string(space_.dim()));
  }
}

double Operator::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_space(space_, rhs.space_, "operator +");
  matrix_ += rhs.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_space(space_, rhs.space_, "operator -");
  matrix_ -= rhs.matrix_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  matrix_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space(), rhs.space(), "operator *");
  return {lhs.space(), lhs.matrix() * rhs.matrix()};
}

StateVector::StateVector(SpaceDescriptor space, Vector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.dim()) {
    throw SpaceMismatch("state vector length does not match the space dimension");
  }
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw InvalidArgument("cannot normalise the zero vector");
  return {space_, amplitudes_ / n};
}

DensityMatrix::DensityMatrix(SpaceDescriptor space, Matrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw SpaceMismatch("density matrix shape does not match the space dimension");
  }
  if (!matrix_.allFinite()) throw InvalidArgument("density matrix has non-finite entries");
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw InvalidArgument("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
  }
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvalidArgument("density matrix trace is " + std::to_string(tr));
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const StateVector n = psi.normalized();
  return {n.space(), n.amplitudes() * n.amplitudes().adjoint()};
}

DensityMatrix DensityMatrix::renormalized(SpaceDescriptor space, Matrix matrix, double* trace_drift) {
  Matrix sym = 0.5 * (matrix + matrix.adjoint());
  const double tr = sym.trace().real();
  if (trace_drift) *trace_drift = std::abs(tr - 1.0);
  if (!(tr > 0.0)) throw InvalidArgument("density matrix has non-positive trace");
  sym /= tr;
  return {space, std::move(sym)};
}

double DensityMatrix::purity() const {
  // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
  return matrix_.squaredNorm();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Operator identity(const SpaceDescriptor& space) {
  return {space, Matrix::Identity(space.dim(), space.dim())};
}

Operator annihilation_op(const SpaceDescriptor& space, int mode) {
  const int n = space.truncation(mode);
  const Matrix a = ladder_block(n);
  const Matrix id_atom = Matrix::Identity(space.atom_levels(), space.atom_levels());
  Matrix field;
  if (mode == 1) {
    field = Eigen::kroneckerProduct(a, Matrix::Identity(space.n2(), space.n2())).eval();
  } else {
    field = Eigen::kroneckerProduct(Matrix::Identity(space.n1(), space.n1()), a).eval();
  }
  return {space, Eigen::kroneckerProduct(id_atom, field).eval()};
}

Operator creation_op(const SpaceDescriptor& space, int mode) {
  return annihilation_op(space, mode).adjoint();
}

Operator number_op(const SpaceDescriptor& space, int mode) {
  space.truncation(mode);  // validates the mode index
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  for (int a = 0; a < space.atom_levels(); ++a) {
    for (int n1 = 0; n1 < space.n1(); ++n1) {
      for (int n2 = 0; n2 < space.n2(); ++n2) {
        const Eigen::Index i = space.index(a, n1, n2);
        m(i, i) = mode == 1 ? n1 : n2;
      }
    }
  }
  return {space, std::move(m)};
}

Operator atom_transition_op(const SpaceDescriptor& space, Level j, Level m) {
  if (!space.has_level(j) || !space.has_level(m)) {
    throw InvalidArgument(std::string("atomic level ") + level_name(space.has_level(j) ? m : j) +
                          " is not present in a " + std::to_string(space.atom_levels()) +
                          "-level space");
  }
  Matrix block = Matrix::Zero(space.atom_levels(), space.atom_levels());
  block(static_cast<int>(j), static_cast<int>(m)) = 1.0;
  const Matrix id_field = Matrix::Identity(space.field_dim(), space.field_dim());
  return {space, Eigen::kroneckerProduct(block, id_field).eval()};
}

Operator embed_field_operator(const Operator& field_op, int atom_levels) {
  if (!field_op.space().is_field_only()) {
    throw SpaceMismatch("embed_field_operator expects a field-only operator");
  }
  const SpaceDescriptor target = field_op.space().with_atom_levels(atom_levels);
  if (atom_levels == 1) return field_op;
  const Matrix id_atom = Matrix::Identity(atom_levels, atom_levels);
  return {target, Eigen::kroneckerProduct(id_atom, field_op.matrix()).eval()};
}

DensityMatrix compose_with_atom(Level atom, int atom_levels, const DensityMatrix& field) {
  if (!field.space().is_field_only()) {
    throw SpaceMismatch("compose_with_atom expects a field-only density matrix");
  }
  const SpaceDescriptor target = field.space().with_atom_levels(atom_levels);
  if (!target.has_level(atom)) {
    throw InvalidArgument(std::string("atomic level ") + level_name(atom) + " is not present in a " +
                          std::to_string(atom_levels) + "-level space");
  }
  const Eigen::Index fd = target.field_dim();
  const Eigen::Index offset = static_cast<int>(atom) * fd;
  Matrix m = Matrix::Zero(target.dim(), target.dim());
  m.block(offset, offset, fd, fd) = field.matrix();
  return {target, std::move(m)};
}

StateVector basis_state(const SpaceDescriptor& space, Level atom, int n1, int n2) {
  if (!space.has_level(atom)) throw InvalidArgument("atomic level not present in space");
  if (n1 < 0 || n1 >= space.n1() || n2 < 0 || n2 >= space.n2()) {
    throw InvalidArgument("Fock index outside the truncation");
  }
  Vector v = Vector::Zero(space.dim());
  v(space.index(static_cast<int>(atom), n1, n2)) = 1.0;
  return {space, std::move(v)};
}

StateVector field_basis_state(const SpaceDescriptor& field_space, int n1, int n2) {
  return basis_state(field_space, Level::g, n1, n2);
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  require_same_space(rho.space(), op.space(), "expectation");
  // Tr(ρO) = Σ_ij ρ_ij O_ji
  return rho.matrix().cwiseProduct(op.matrix().transpose()).sum();
}

Complex expectation(const StateVector& psi, const Operator& op) {
  require_same_space(psi.space(), op.space(), "expectation");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

Complex inner_product(const StateVector& lhs, const StateVector& rhs) {
  require_same_space(lhs.space(), rhs.space(), "inner_product");
  return lhs.amplitudes().dot(rhs.amplitudes());
}

double overlap(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

double overlap(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_space(a.space(), b.space(), "overlap");
  return a.matrix().cwiseProduct(b.matrix().transpose()).sum().real();
}

DensityMatrix partial_trace(const DensityMatrix& rho, SubsystemSet keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  const SpaceDescriptor& s = rho.space();
  const std::array<int, 3> dims{s.atom_levels(), s.n1(), s.n2()};
  const std::array<bool, 3> kept{keep.atom, keep.mode1, keep.mode2};
  std::array<int, 3> out_dims{};
  std::array<int, 3> traced_dims{};
  for (int k = 0; k < 3; ++k) {
    out_dims[k] = kept[k] ? dims[k] : 1;
    traced_dims[k] = kept[k] ? 1 : dims[k];
  }
  const SpaceDescriptor out(out_dims[0], out_dims[1], out_dims[2]);
  const Matrix& m = rho.matrix();
  Matrix r = Matrix::Zero(out.dim(), out.dim());

  auto full_index = [&](const std::array<int, 3>& kept_idx, const std::array<int, 3>& traced_idx) {
    std::array<int, 3> idx{};
    for (int k = 0; k < 3; ++k) idx[k] = kept[k] ? kept_idx[k] : traced_idx[k];
    return s.index(idx[0], idx[1], idx[2]);
  };

  std::array<int, 3> ri{}, ci{}, ti{};
  for (ri[0] = 0; ri[0] < out_dims[0]; ++ri[0])
    for (ri[1] = 0; ri[1] < out_dims[1]; ++ri[1])
      for (ri[2] = 0; ri[2] < out_dims[2]; ++ri[2]) {
        const Eigen::Index row = out.index(ri[0], ri[1], ri[2]);
        for (ci[0] = 0; ci[0] < out_dims[0]; ++ci[0])
          for (ci[1] = 0; ci[1] < out_dims[1]; ++ci[1])
            for (ci[2] = 0; ci[2] < out_dims[2]; ++ci[2]) {
              const Eigen::Index col = out.index(ci[0], ci[1], ci[2]);
              Complex acc = 0.0;
              for (ti[0] = 0; ti[0] < traced_dims[0]; ++ti[0])
                for (ti[1] = 0; ti[1] < traced_dims[1]; ++ti[1])
                  for (ti[2] = 0; ti[2] < traced_dims[2]; ++ti[2])
                    acc += m(full_index(ri, ti), full_index(ci, ti));
              r(row, col) = acc;
            }
      }
  // Hermitian to rounding; fold back exactly so the checks downstream see it.
  r = 0.5 * (r + r.adjoint()).eval();
  return {out, std::move(r)};
}

Operator matrix_exponential(const Operator& op, Complex scale) {
  if (!op.matrix().allFinite() || !std::isfinite(scale.real()) || !std::isfinite(scale.imag())) {
    throw InvalidArgument("matrix_exponential: non-finite input");
  }
  Matrix scaled = scale * op.matrix();
  Matrix result = scaled.exp();
  return {op.space(), std::move(result)};
}

Operator unitary_propagator(const Operator& hamiltonian, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian.matrix());
  if (solver.info() != Eigen::Success) throw Error("unitary_propagator: diagonalisation failed");
  const Vector phases = (solver.eigenvalues().cast<Complex>() * (-kI * t)).array().exp();
  const Matrix& v = solver.eigenvectors();
  return {hamiltonian.space(), v * phases.asDiagonal() * v.adjoint()};
}

double unitarity_error(const Operator& u) {
  const Matrix d = u.matrix().adjoint() * u.matrix() - Matrix::Identity(u.space().dim(), u.space().dim());
  return d.cwiseAbs().maxCoeff();
}

}  // namespace tmsq
