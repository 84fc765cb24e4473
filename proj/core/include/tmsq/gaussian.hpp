#pragma once

// Covariance-matrix description of the two cavity modes.
// Quadrature order R = (X₁, P₁, X₂, P₂) with X = (a + a†)/2, P = −i(a − a†)/2,
// so [R_a, R_b] = (i/2) Ω_ab and the vacuum covariance is I/4.

#include <Eigen/Dense>

#include "tmsq/analysis.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/protocol_types.hpp"

namespace tmsq {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

class GaussianState {
 public:
  static constexpr double kSymmetryTol = 1e-12;
  static constexpr double kUncertaintyFloor = -1e-10;

  // Throws InvalidArgument when cov is not symmetric or violates
  // cov + (i/4)Ω >= 0.
  GaussianState(Vec4 mean, Mat4 cov);

  const Vec4& mean() const noexcept { return mean_; }
  const Mat4& cov() const noexcept { return cov_; }

  // Smallest eigenvalue of cov + (i/4)Ω.
  double uncertainty_margin() const;
  double purity() const;

 private:
  Vec4 mean_;
  Mat4 cov_;
};

// Ω = diag(J, J), J = [[0, 1], [−1, 0]].
Mat4 symplectic_form();

GaussianState gaussian_vacuum();
GaussianState gaussian_thermal(double n1_mean, double n2_mean);
// Shifts the mean by (Re α₁, Im α₁, Re α₂, Im α₂).
GaussianState gaussian_displaced(const GaussianState& s, Complex alpha1, Complex alpha2);
// Covariance of S₁₂†(ε)|0,0⟩: cosh2ε/4 on the diagonal, +sinh2ε/4 between
// X₁ and X₂, −sinh2ε/4 between P₁ and P₂.
GaussianState gaussian_tmsv(double epsilon);

// Linear map R → M R implemented by S₁₂(ε) R S₁₂†(ε); gaussian_tmsv(ε) has
// covariance M (I/4) Mᵀ.
Mat4 symplectic_squeeze(double epsilon);

// Coefficients l with b_which = lᵀ R, b_which = cosh ε a_which − sinh ε a_other†.
Eigen::Vector4cd jump_coefficients(double epsilon, int which);

// Exact evolution of first and second moments under the Lindbladian with the
// single jump b_which at rate gamma.
GaussianState gaussian_lindblad_evolve(const GaussianState& s0, double epsilon, double gamma, int which,
                                       double t);

// Propagator for gaussian_lindblad_evolve acting on z = (mean, vec(cov), 1).
class GaussianPropagator {
 public:
  GaussianPropagator(double epsilon, double gamma, int which, double t);
  GaussianState apply(const GaussianState& s) const;

 private:
  Eigen::Matrix<double, 21, 21> map_;
};

EprVariances gaussian_epr_variances(const GaussianState& s);
double gaussian_mean_photon(const GaussianState& s, int mode);
// ⟨b_which† b_which⟩
double gaussian_b_occupation(const GaussianState& s, double epsilon, int which);
// Tr(ρσ) for two Gaussian states; equals the fidelity when one is pure.
double gaussian_overlap(const GaussianState& a, const GaussianState& b);

SqueezingReport gaussian_report(const GaussianState& s, double epsilon);
std::vector<double> gaussian_observables(const GaussianState& s, double epsilon);

struct GaussianRun {
  Trajectory trajectory;
  GaussianState final_state;
};

// Applies each step's (ε, γ, channel, duration) in order and samples the
// standard observables. Times are in seconds from the protocol start.
GaussianRun run_protocol_gaussian(const ProtocolSpec& protocol, const GaussianState& initial);

}  // namespace tmsq
