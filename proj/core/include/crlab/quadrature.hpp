#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "crlab/ambient.hpp"
#include "crlab/chart.hpp"
#include "crlab/moebius.hpp"

namespace crlab {

// Tensor-product quadrature rule over a chart domain, stored per axis so huge
// grids never materialize. Node k is decoded mixed-radix with the last axis
// fastest. Sum of weights equals the domain volume to 1e-12.
struct QuadratureGrid {
  std::vector<Eigen::VectorXd> axis_nodes;
  std::vector<Eigen::VectorXd> axis_weights;
  std::vector<int> resolution;
  std::string scheme;

  long node_count() const;
  Eigen::VectorXd node(long k) const;
  double weight(long k) const;
  double domain_volume() const;
};

// Periodic axes get uniform nodes (the trapezoid rule, spectrally accurate for
// smooth periodic integrands); non-periodic axes get Gauss-Legendre. Each
// resolution must be >= 4.
QuadratureGrid build_grid(const ImmersionChart& chart, const std::vector<int>& resolution);
QuadratureGrid build_grid(const ImmersionChart& chart, int resolution);

// Gauss-Legendre nodes and weights on [lo, hi], Newton iteration on the
// Legendre recurrence. Weights sum to hi - lo exactly up to roundoff.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int count, double lo, double hi);

// Deterministic pairwise summation; order independent of any threading.
double pairwise_sum(std::vector<double>& terms);

// Riemannian volume sum_k w_k sqrt(det g(u_k)). Throws std::runtime_error on
// a degenerate metric at a node.
double volume(const ImmersionChart& chart, const QuadratureGrid& grid);

// Cached sphere points and area elements of a chart over a grid, the inner
// loop of every weighted functional.
struct VolumeTable {
  int m = 0;
  Eigen::MatrixXd points;  // node_count x (2n+2), row k = phi(u_k)
  Eigen::VectorXd darea;   // w_k sqrt(det g(u_k))

  double total() const { return darea.sum(); }
};

VolumeTable build_volume_table(const ImmersionChart& chart, const QuadratureGrid& grid);

// Weighted volume integral(W_b^{m/2} dV). Equals the volume of the composed
// chart compose(chart, b), and plain volume at b = 0.
double weighted_volume(const VolumeTable& table, const MoebiusParam& b);
double weighted_volume(const ImmersionChart& chart, const QuadratureGrid& grid,
                       const MoebiusParam& b);

// Adaptive Simpson integration of a scalar function, the reference quadrature
// for closed forms that also have recursion implementations.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol = 1e-12, int max_depth = 48);

}  // namespace crlab
