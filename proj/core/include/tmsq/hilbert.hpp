#pragma once

// Truncated Fock-space linear algebra for one (optional) three-level atom and
// two cavity modes.
//
// Basis ordering for a space (A, N1, N2) is fixed:
//     flat index = (atom * N1 + n1) * N2 + n2,   atom: g = 0, h = 1, e = 2
// which is the Kronecker ordering atom ⊗ mode1 ⊗ mode2.

#include <complex>
#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace tmsq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class Level : int { g = 0, h = 1, e = 2 };

char level_name(Level level);
Level parse_level(std::string_view name);

class SpaceDescriptor {
 public:
  // atom_levels == 1 denotes a field-only space.
  SpaceDescriptor(int atom_levels, int n1_trunc, int n2_trunc);

  static SpaceDescriptor field(int n1_trunc, int n2_trunc) { return {1, n1_trunc, n2_trunc}; }

  int atom_levels() const noexcept { return atom_levels_; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  int truncation(int mode) const;
  Eigen::Index dim() const noexcept { return Eigen::Index{atom_levels_} * n1_ * n2_; }
  Eigen::Index field_dim() const noexcept { return Eigen::Index{n1_} * n2_; }
  bool is_field_only() const noexcept { return atom_levels_ == 1; }
  bool has_level(Level level) const noexcept { return static_cast<int>(level) < atom_levels_; }

  Eigen::Index index(int atom, int n1, int n2) const noexcept {
    return (Eigen::Index{atom} * n1_ + n1) * n2_ + n2;
  }

  SpaceDescriptor field_space() const { return {1, n1_, n2_}; }
  SpaceDescriptor with_atom_levels(int levels) const { return {levels, n1_, n2_}; }

  friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;

 private:
  int atom_levels_;
  int n1_;
  int n2_;
};

// Dense square operator tagged with the space it acts on.
class Operator {
 public:
  Operator(SpaceDescriptor space, Matrix matrix);

  const SpaceDescriptor& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  Operator adjoint() const { return {space_, matrix_.adjoint()}; }
  // max |M - M†| over all entries
  double hermiticity_error() const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, Complex s) { return lhs *= s; }
  friend Operator operator*(Complex s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  SpaceDescriptor space_;
  Matrix matrix_;
};

// Unnormalised kets are allowed; call normalized() where it matters.
class StateVector {
 public:
  StateVector(SpaceDescriptor space, Vector amplitudes);

  const SpaceDescriptor& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;

 private:
  SpaceDescriptor space_;
  Vector amplitudes_;
};

// Hermitian, unit trace. Construction checks Hermiticity (1e-10) and trace
// (1e-8); positivity is checked on demand because it needs a diagonalisation.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-8;
  static constexpr double kEigenFloor = -1e-8;

  DensityMatrix(SpaceDescriptor space, Matrix matrix);

  static DensityMatrix pure(const StateVector& psi);
  // Symmetrises and rescales to unit trace before the checks; the returned
  // drift is |Tr ρ - 1| before rescaling.
  static DensityMatrix renormalized(SpaceDescriptor space, Matrix matrix, double* trace_drift = nullptr);

  const SpaceDescriptor& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  double trace() const { return matrix_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;
  bool is_positive(double floor = kEigenFloor) const { return min_eigenvalue() >= floor; }

 private:
  SpaceDescriptor space_;
  Matrix matrix_;
};

// Which tensor factors survive a partial trace.
struct SubsystemSet {
  bool atom = false;
  bool mode1 = false;
  bool mode2 = false;

  static constexpr SubsystemSet field() { return {false, true, true}; }
  bool empty() const noexcept { return !(atom || mode1 || mode2); }
};

Operator identity(const SpaceDescriptor& space);
Operator annihilation_op(const SpaceDescriptor& space, int mode);
Operator creation_op(const SpaceDescriptor& space, int mode);
Operator number_op(const SpaceDescriptor& space, int mode);
// |j><m| on the atom, identity on both modes.
Operator atom_transition_op(const SpaceDescriptor& space, Level j, Level m);

// Lifts a field-only operator to identity_atom ⊗ op.
Operator embed_field_operator(const Operator& field_op, int atom_levels);
// |atom><atom| ⊗ rho_field
DensityMatrix compose_with_atom(Level atom, int atom_levels, const DensityMatrix& field);

StateVector basis_state(const SpaceDescriptor& space, Level atom, int n1, int n2);
StateVector field_basis_state(const SpaceDescriptor& field_space, int n1, int n2);

Complex expectation(const DensityMatrix& rho, const Operator& op);
Complex expectation(const StateVector& psi, const Operator& op);
Complex inner_product(const StateVector& lhs, const StateVector& rhs);
// |<a|b>|^2 for normalised inputs
double overlap(const StateVector& a, const StateVector& b);
// Tr(ρσ)
double overlap(const DensityMatrix& a, const DensityMatrix& b);

DensityMatrix partial_trace(const DensityMatrix& rho, SubsystemSet keep);

// exp(scale * M) by scaling and squaring.
Operator matrix_exponential(const Operator& op, Complex scale);
// exp(-i H t) for Hermitian H via its eigendecomposition.
Operator unitary_propagator(const Operator& hamiltonian, double t);

// max |U†U - I|
double unitarity_error(const Operator& u);

}  // namespace tmsq
