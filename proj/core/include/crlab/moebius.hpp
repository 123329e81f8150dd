#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "crlab/ambient.hpp"
#include "crlab/chart.hpp"

namespace crlab {

struct FundamentalData;  // immersion.hpp
struct QuadratureGrid;   // quadrature.hpp

// Parameter of the sphere automorphism Psi_b, a point of the open unit ball
// in R^{2n+2}. Construction enforces |b| <= 1 - 1e-9; closer to the boundary
// the closed-form denominators lose all precision.
class MoebiusParam {
 public:
  MoebiusParam() = default;
  explicit MoebiusParam(AmbientVector b);

  const AmbientVector& b() const { return b_; }
  double norm() const { return b_.norm(); }
  int dim_n() const { return n_; }

 private:
  AmbientVector b_;
  int n_ = 0;
};

// Unitary of C^{n+1} stored as its real 2(n+1) x 2(n+1) matrix. Construction
// enforces orthogonality and commutation with J to 1e-12, so the matrix
// preserves the sphere, the contact form and the horizontal distribution.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Eigen::MatrixXd mat);

  const Eigen::MatrixXd& mat() const { return mat_; }
  int dim_n() const { return n_; }

 private:
  Eigen::MatrixXd mat_;
  int n_ = 0;
};

UnitaryMatrix identity_unitary(int n);

// Deterministic Haar-like unitary: seeded complex Gaussian matrix, QR with
// the phase of each R diagonal entry fixed positive, then realified.
UnitaryMatrix random_unitary(int n, std::uint64_t seed);

// Psi_b(z): the sphere automorphism with weight W_b. Psi_0 = id and Psi_b
// fixes b/|b| for b != 0.
SpherePoint apply_psi_b(const MoebiusParam& b, const SpherePoint& z);

// Conformal factor W_b(z) = (1 - |b|^2) / |1 + cdot(b, z)|^2.
double weight(const MoebiusParam& b, const SpherePoint& z);

// Ambient gradient of log W_b at z.
AmbientVector grad_log_weight(const MoebiusParam& b, const SpherePoint& z);

// S_b(p) = -(1/2) J(grad^H log W_b), the horizontal field driving every
// curvature transformation law.
AmbientVector s_field(const MoebiusParam& b, const SpherePoint& p);

// Differential of Psi_b at z in direction v, closed form.
AmbientVector psi_differential(const MoebiusParam& b, const SpherePoint& z, const AmbientVector& v);

// Second differential of Psi_b at z in directions (v, u), closed form.
AmbientVector psi_second_differential(const MoebiusParam& b, const SpherePoint& z,
                                      const AmbientVector& v, const AmbientVector& u);

// Differential by central differences of apply_psi_b along the great-circle
// direction v, followed by projection tangent to the sphere at Psi_b(z).
AmbientVector psi_differential_fd(const MoebiusParam& b, const SpherePoint& z,
                                  const AmbientVector& v, double step = 1e-6);

// Chart u -> Psi_b(phi(u)). Jets are chained in closed form when the base
// chart has analytic jets; otherwise the composition differentiates the base
// map by finite differences and chains analytically on top.
ImmersionChart compose(const ImmersionChart& chart, const MoebiusParam& b);

// Chart u -> A phi(u) with exact linear jets.
ImmersionChart compose(const ImmersionChart& chart, const UnitaryMatrix& a);

// Max over grid nodes of | <dPsi_b phi_i, dPsi_b phi_j> - W_b g_ij | with the
// differential taken by finite differences of apply_psi_b through the chart.
double pullback_conformal_residual(const MoebiusParam& b, const ImmersionChart& chart,
                                   const QuadratureGrid& grid);

// Right-hand side of the mean curvature transformation law,
//   H^b = (1/W) H - (2/W) J(S^T) - (m/W) (J S)^perp,
// expressed in the source picture. Pushing the result through dPsi_b gives the
// mean curvature of the composed chart at the image point.
AmbientVector mean_curvature_transform_rhs(const MoebiusParam& b, const FundamentalData& data);

// Right-hand side of the second fundamental form transformation law,
//   A^b(X,Y) = A(X,Y) - g(S^T, Y) J(X) - g(S^T, X) J(Y) - g(X, Y) (J S)^perp,
// evaluated on the coordinate pair (d_i, d_j) in the source picture.
AmbientVector second_fund_transform_rhs(const MoebiusParam& b, const FundamentalData& data,
                                        int i, int j);

// Right-hand side of the divergence transformation law for J(H^N): a scalar,
// so no identification is needed when comparing against the composed chart.
double div_transform_rhs(const MoebiusParam& b, const ImmersionChart& chart,
                         const Eigen::VectorXd& u);

// One normalization stage: apply Psi_b, then the unitary correction that
// returns the base point and realigns the horizontal tangent frame.
struct AutStage {
  UnitaryMatrix unitary;
  MoebiusParam moebius;
};

// Pointwise curvature magnitudes at the tracked base point after each stage,
// entry [k] taken after stage k has been applied (entry [0] = input chart).
struct NormalizationReport {
  std::vector<double> h_hat_norm;   // |H^Nhat(p)|
  std::vector<double> h_norm;      // |H(p)|
  std::vector<double> div_j_h_n;   // |div J(H^N)(p)|
};

// Three-stage pointwise normalization at p = phi(u): an initial unitary moves
// p to e_1 with T(p) -> e_{n+2} and the tangent frame onto coordinate lines;
// stage 1 kills H^Nhat(p), stage 2 kills H(p), stage 3 kills div J(H^N)(p),
// each stage followed by its frame-restoring unitary so earlier residuals stay
// dead. Stages apply left to right: chart_k = compose(compose(chart_{k-1},
// stage.moebius), stage.unitary). A chart already normalized at p returns
// zero Moebius parameters and identity stage unitaries after the alignment.
std::pair<std::vector<AutStage>, NormalizationReport> normalize_at_point(
    const ImmersionChart& chart, const Eigen::VectorXd& u);

// Folds the stages over the chart in order.
ImmersionChart apply_stages(const ImmersionChart& chart, const std::vector<AutStage>& stages);

}  // namespace crlab
