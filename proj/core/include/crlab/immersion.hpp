#pragma once

#include <vector>

#include "crlab/ambient.hpp"
#include "crlab/chart.hpp"
#include "crlab/quadrature.hpp"

namespace crlab {

// Pointwise fundamental data of a horizontal chart at a parameter point.
// The ambient tangent space splits orthogonally at p as
//   T_p S^{2n+1} = T_p Sigma (+) J(T_p Sigma) (+) R T(p) (+) Nhat_p,
// and every normal-valued tensor below is stored split along it. Symmetric
// 2-tensors are packed with sym_index; sigma is the full cubic array.
struct FundamentalData {
  Eigen::VectorXd u;
  SpherePoint point;
  AmbientVector reeb;
  std::vector<AmbientVector> frame;  // d_i phi, i = 0..m-1

  Eigen::MatrixXd metric;          // g_ij = <d_i phi, d_j phi>
  Eigen::MatrixXd inverse_metric;
  double sqrt_det_metric = 0.0;

  // Second fundamental form of Sigma in S^{2n+1}: raw second derivatives with
  // the sphere-radial part (+g_ij p) and the Sigma-tangential part removed.
  std::vector<AmbientVector> second_fund;

  AmbientVector mean_curv;  // H = g^{ij} A_ij, un-averaged trace
  AmbientVector h_normal;   // component of H in J(T Sigma)
  AmbientVector h_hat;      // component of H in Nhat
  double h_reeb = 0.0;      // <H, T(p)>, zero for horizontal charts

  std::vector<AmbientVector> a_normal;  // packed, J(T Sigma) part of A
  std::vector<AmbientVector> a_hat;     // packed, Nhat part of A
  Eigen::VectorXd a_reeb;               // packed, <A_ij, T(p)>

  std::vector<double> sigma;  // sigma(i,j,k) = <A_ij, J d_k phi>, full m^3
  Eigen::VectorXd beta;       // beta_k = g^{ij} sigma(i,j,k)

  // U = A^N - E^N/(m+2) with E^N(X,Y) = g(X,Y) H^N + beta(X) J(Y) + beta(Y) J(X).
  std::vector<AmbientVector> u_tensor;           // packed, trace free
  std::vector<AmbientVector> a_hat_traceless;    // packed, Ahat - (1/m) Hhat g

  int m() const { return static_cast<int>(frame.size()); }
  double sigma_at(int i, int j, int k) const {
    int mm = m();
    return sigma[static_cast<std::size_t>((i * mm + j) * mm + k)];
  }
};

// Computes the full pointwise package. Throws std::runtime_error when the
// chart is not horizontal at u beyond horiz_tol (max_i |theta(d_i phi)|) or
// when the induced metric is numerically degenerate.
FundamentalData fundamental_data(const ImmersionChart& chart, const Eigen::VectorXd& u,
                                 double horiz_tol = 1e-8);

// Squared tensor norm tr_g(B . B) = g^{ik} g^{jl} <B_ij, B_kl> of a packed
// symmetric ambient-vector-valued 2-tensor.
double sym2_norm2(const std::vector<AmbientVector>& packed, const Eigen::MatrixXd& inverse_metric);

// Projection of an ambient vector onto span{J d_k phi} (the J-tangent summand
// of the normal space); solves the Gram system, which equals the metric.
AmbientVector normal_j_projection(const FundamentalData& data, const AmbientVector& v);

// Projection onto T Sigma.
AmbientVector tangent_projection(const FundamentalData& data, const AmbientVector& v);

// Max over grid nodes of max_i |theta(d_i phi)|; zero exactly when the chart
// is horizontal on the grid.
double horizontality_residual(const ImmersionChart& chart, const QuadratureGrid& grid);

// Intrinsic scalar curvature of the induced metric at u. Christoffel symbols
// are exact in the chart jets; their derivatives use a 5-point stencil of
// half-width 2*step per axis.
double scalar_curvature(const ImmersionChart& chart, const Eigen::VectorXd& u,
                        double step = 1e-2);

// Residual of the horizontal Gauss identity
//   R = m(m-1) + ((m-1)/m)|H|^2 - |U|^2 - |Ahat_0|^2 - (2(m-1)/(m(m+2)))|H^N|^2
// with R computed intrinsically from the metric.
double scalar_curvature_residual(const ImmersionChart& chart, const Eigen::VectorXd& u);

// Surface divergence of the tangent field J(H^N) at u: components are pushed
// through g^{ij}, then (1/sqrt(det g)) d_i (sqrt(det g) V^i) with central
// differences of fundamental data at shifted parameter points.
double div_j_h_normal(const ImmersionChart& chart, const Eigen::VectorXd& u,
                      double step = 1e-4);

}  // namespace crlab
