#include "crlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crlab {

long QuadratureGrid::node_count() const {
  long count = 1;
  for (int r : resolution) count *= r;
  return count;
}

Eigen::VectorXd QuadratureGrid::node(long k) const {
  const int m = static_cast<int>(resolution.size());
  Eigen::VectorXd u(m);
  // Mixed-radix decode, last axis fastest.
  for (int a = m - 1; a >= 0; --a) {
    const long r = resolution[static_cast<std::size_t>(a)];
    u[a] = axis_nodes[static_cast<std::size_t>(a)][k % r];
    k /= r;
  }
  return u;
}

double QuadratureGrid::weight(long k) const {
  const int m = static_cast<int>(resolution.size());
  double w = 1.0;
  for (int a = m - 1; a >= 0; --a) {
    const long r = resolution[static_cast<std::size_t>(a)];
    w *= axis_weights[static_cast<std::size_t>(a)][k % r];
    k /= r;
  }
  return w;
}

double QuadratureGrid::domain_volume() const {
  double v = 1.0;
  for (const Eigen::VectorXd& w : axis_weights) v *= w.sum();
  return v;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int count, double lo, double hi) {
  if (count < 1) throw std::invalid_argument("gauss_legendre requires count >= 1");
  if (!(hi > lo)) throw std::invalid_argument("gauss_legendre requires hi > lo");
  Eigen::VectorXd x(count), w(count);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_count.
    double z = std::cos(M_PI * (i + 0.75) / (count + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < count; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      // p0 = P_count(z), p1 = P_{count-1}(z).
      pp = count * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    x[i] = -z;
    w[i] = wi;
    x[count - 1 - i] = z;
    w[count - 1 - i] = wi;
  }
  const double mid = 0.5 * (lo + hi);
  const double halflen = 0.5 * (hi - lo);
  for (int i = 0; i < count; ++i) {
    x[i] = mid + halflen * x[i];
    w[i] *= halflen;
  }
  return {x, w};
}

QuadratureGrid build_grid(const ImmersionChart& chart, const std::vector<int>& resolution) {
  const int m = chart.m();
  if (static_cast<int>(resolution.size()) != m) {
    throw std::invalid_argument("build_grid needs one resolution per axis");
  }
  QuadratureGrid grid;
  grid.resolution = resolution;
  bool any_periodic = false, any_open = false;
  for (int a = 0; a < m; ++a) {
    const int r = resolution[static_cast<std::size_t>(a)];
    if (r < 4) throw std::invalid_argument("build_grid requires resolution >= 4 per axis");
    const AxisDomain& axis = chart.domain()[static_cast<std::size_t>(a)];
    if (axis.periodic) {
      any_periodic = true;
      const double h = axis.length() / r;
      Eigen::VectorXd nodes(r), weights(r);
      for (int k = 0; k < r; ++k) {
        nodes[k] = axis.lo + h * k;
        weights[k] = h;
      }
      grid.axis_nodes.push_back(std::move(nodes));
      grid.axis_weights.push_back(std::move(weights));
    } else {
      any_open = true;
      auto [nodes, weights] = gauss_legendre(r, axis.lo, axis.hi);
      grid.axis_nodes.push_back(std::move(nodes));
      grid.axis_weights.push_back(std::move(weights));
    }
  }
  grid.scheme = any_periodic && any_open ? "mixed"
               : any_periodic           ? "periodic-uniform"
                                        : "gauss-legendre";
  return grid;
}

QuadratureGrid build_grid(const ImmersionChart& chart, int resolution) {
  return build_grid(chart, std::vector<int>(static_cast<std::size_t>(chart.m()), resolution));
}

namespace {

double pairwise_block(const double* data, long count) {
  if (count <= 8) {
    double s = 0.0;
    for (long i = 0; i < count; ++i) s += data[i];
    return s;
  }
  const long half = count / 2;
  return pairwise_block(data, half) + pairwise_block(data + half, count - half);
}

}  // namespace

double pairwise_sum(std::vector<double>& terms) {
  if (terms.empty()) return 0.0;
  return pairwise_block(terms.data(), static_cast<long>(terms.size()));
}

namespace {

double area_element(const Jet& jet, const Eigen::VectorXd& u) {
  const int m = jet.m();
  Eigen::MatrixXd g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      g(i, j) = jet.d1(i).dot(jet.d1(j));
      g(j, i) = g(i, j);
    }
  }
  const double det = g.determinant();
  const double scale = std::max(1.0, g.diagonal().maxCoeff());
  if (!(det > 1e-14 * std::pow(scale, m))) {
    throw std::runtime_error("degenerate metric at parameter point, det " + std::to_string(det) +
                             " at u[0] = " + std::to_string(u[0]));
  }
  return std::sqrt(det);
}

}  // namespace

double volume(const ImmersionChart& chart, const QuadratureGrid& grid) {
  const long count = grid.node_count();
  std::vector<double> terms(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    const Eigen::VectorXd u = grid.node(k);
    const Jet jet = evaluate_jet(chart, u);
    terms[static_cast<std::size_t>(k)] = grid.weight(k) * area_element(jet, u);
  }
  return pairwise_sum(terms);
}

VolumeTable build_volume_table(const ImmersionChart& chart, const QuadratureGrid& grid) {
  const long count = grid.node_count();
  VolumeTable table;
  table.m = chart.m();
  table.points.resize(count, chart.ambient_dim());
  table.darea.resize(count);
  for (long k = 0; k < count; ++k) {
    const Eigen::VectorXd u = grid.node(k);
    const Jet jet = evaluate_jet(chart, u);
    table.points.row(k) = jet.value.transpose();
    table.darea[k] = grid.weight(k) * area_element(jet, u);
  }
  return table;
}

double weighted_volume(const VolumeTable& table, const MoebiusParam& b) {
  if (b.b().size() == 0 || b.norm() == 0.0) return table.total();
  if (b.b().size() != table.points.cols()) {
    throw std::invalid_argument("Moebius parameter dimension does not match the table");
  }
  const AmbientVector jb = apply_complex_structure(b.b());
  const double b2 = b.b().squaredNorm();
  const Eigen::ArrayXd bx = (table.points * b.b()).array();
  const Eigen::ArrayXd jbx = (table.points * jb).array();
  const Eigen::ArrayXd w = (1.0 - b2) / ((1.0 + bx).square() + jbx.square());
  Eigen::ArrayXd wpow;
  switch (table.m) {
    case 1: wpow = w.sqrt(); break;
    case 2: wpow = w; break;
    case 3: wpow = w * w.sqrt(); break;
    default: wpow = w.pow(0.5 * table.m); break;
  }
  return (table.darea.array() * wpow).sum();
}

double weighted_volume(const ImmersionChart& chart, const QuadratureGrid& grid,
                       const MoebiusParam& b) {
  return weighted_volume(build_volume_table(chart, grid), b);
}

namespace {

double simpson_rule(double fa, double fm, double fb, double h6) { return h6 * (fa + 4.0 * fm + fb); }

double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                             double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(fa, flm, fm, (m - a) / 6.0);
  const double right = simpson_rule(fm, frm, fb, (b - m) / 6.0);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol,
                        int max_depth) {
  if (!(hi > lo)) throw std::invalid_argument("adaptive_simpson requires hi > lo");
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(0.5 * (lo + hi));
  const double whole = simpson_rule(fa, fm, fb, (hi - lo) / 6.0);
  return adaptive_simpson_step(f, lo, hi, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace crlab
