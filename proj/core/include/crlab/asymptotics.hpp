#pragma once

#include <cstdint>
#include <vector>

#include "crlab/ambient.hpp"
#include "crlab/chart.hpp"
#include "crlab/immersion.hpp"
#include "crlab/quadrature.hpp"

namespace crlab {

// J_{k,l}(tau; a) = integral_0^a r^{l-1} / (1 + tau r^2)^k dr, evaluated by
// the closed forms at (k = 0), (l = 1), (l = 2) and the reduction
// J_{k,l} = (J_{k-1,l-2} - J_{k,l-2}) / tau for l >= 3.
// Pre: k >= 0, l >= 1, tau > 0, a > 0.
double j_integral(int k, int l, double tau, double a);

// The same integral by adaptive Simpson quadrature of the defining integrand;
// the independent reference for j_integral.
double j_integral_quadrature(int k, int l, double tau, double a, double tol = 1e-12);

// I_{k,l}(t; eps) = integral_eps^1 (1 - x)^{l/2 - 1} / (1 - (1 - t) x)^k dx
//                 = 2 t^{-k} J_{k,l}(1/t - 1; sqrt(1 - eps)).
// Pre: k >= 1, l >= 1, t in (0, 1), eps in (0, 1).
double i_integral(int k, int l, double t, double eps);

// Adaptive Simpson quadrature of the defining integral of I_{k,l}.
double i_integral_quadrature(int k, int l, double t, double eps, double tol = 1e-12);

// Leading coefficient C_{k,l} of I_{k,l}(t; eps) as t -> 0 (defined for
// 2k > l >= 1, independent of eps): the three-point fit of
// t^{k - l/2} I_{k,l}(t; eps) / (1 + l t / 2) against the basis {1, sqrt(t), t}
// at t = 1e-8 / 4^j. Satisfies C_{k,l} = C_{k-1,l-2} - C_{k,l-2} for
// 2k > l >= 3 and C_{k,l} = ((l-2)/(2(k-1))) C_{k-1,l-2} for 2k >= l >= 3.
double c_coefficient(int k, int l, double eps = 0.1);

// Fully symmetric cubic coefficient array C^{ijk} on R^m, stored once per
// sorted index triple so the permutation symmetry is exact by construction.
class SymmetricCubic {
 public:
  explicit SymmetricCubic(int m);

  int m() const { return m_; }
  double at(int i, int j, int k) const;
  void set(int i, int j, int k, double value);

  // P(xi) = sum_{ijk} C^{ijk} xi_i xi_j xi_k.
  double eval(const Eigen::VectorXd& xi) const;

  // trace(C)^i = sum_j C^{ijj}.
  Eigen::VectorXd trace() const;

  // sum over all m^3 index triples of (C^{ijk})^2.
  double norm2() const;

 private:
  int m_ = 0;
  std::vector<double> packed_;
};

enum class SexticMethod { automatic, quadrature, monte_carlo };

// Both sides of the sphere average of the squared cubic form:
//   LHS = integral_{S^{m-1}} P(xi)^2 dxi,
//   RHS = (9 |S^{m-1}| / (m (m+2) (m+4))) ((2/3) |C|^2 + |trace C|^2).
// Quadrature is exact for m <= 3; Monte Carlo (seeded, with standard error)
// covers every m. automatic picks quadrature for m <= 3.
struct SexticResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double std_error = 0.0;
};

SexticResult sextic_identity_residual(const SymmetricCubic& cubic,
                                      SexticMethod method = SexticMethod::automatic,
                                      std::uint64_t seed = 2024, long samples = 1000000);

// Curvature coefficient of the degeneration expansion:
//   alpha_m = ((3m+2)/(3m+3)) |U|^2 + |Ahat_0|^2
//           - ((m-2)/(2m)) ((m^2/((m+2)(m+1))) |H^N|^2 + |H^Nhat|^2).
double alpha_coefficient(const FundamentalData& data);

// Surface measure of the unit sphere S^d.
double sphere_measure(int d);

// Logarithmically spaced degeneration window, count samples in [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

struct ScanOptions {
  int base_resolution = 64;    // first quadrature rung per sample
  int max_resolution = 4096;   // per-axis cap (reduced internally for m = 3)
  double rel_tol = 1e-8;       // rung-to-rung convergence threshold
};

// One degeneration sample: the volume of compose(chart, -(1 - t) phi(u))
// together with the quadrature ladder that produced it.
struct ScanSample {
  double t = 0.0;
  double value = 0.0;
  int resolution = 0;  // finest rung used
  bool converged = false;
};

// Least-squares fit of scan samples against the expansion basis
// {1, t(-log t), t} for m = 2 and {1, t} for m >= 3.
struct ExpansionFit {
  int m = 0;
  double c0 = 0.0;       // limit volume
  double c1 = 0.0;       // coefficient of t(-log t) for m = 2, of t otherwise
  double c2 = 0.0;       // coefficient of t for m = 2, zero otherwise
  double residual = 0.0; // RMS fit residual
};

// Volumes of Psi_{-(1 - t) X(p)}(Sigma) over the sample window, p = phi(u).
// Each sample climbs a doubling resolution ladder until successive rungs agree
// to rel_tol; rungs are shared across samples so chart jets are evaluated once
// per node. Non-converged samples are reported, never silently dropped.
std::vector<ScanSample> degeneration_scan(const ImmersionChart& chart, const Eigen::VectorXd& u,
                                          const std::vector<double>& t_samples,
                                          const ScanOptions& options = {});

ExpansionFit fit_expansion(int m, const std::vector<ScanSample>& samples);

}  // namespace crlab
