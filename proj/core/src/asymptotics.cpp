#include "crlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crlab/rng.hpp"

namespace crlab {

double j_integral(int k, int l, double tau, double a) {
  if (k < 0 || l < 1) throw std::invalid_argument("j_integral requires k >= 0 and l >= 1");
  if (!(tau > 0.0) || !(a > 0.0)) throw std::invalid_argument("j_integral requires tau, a > 0");
  // The k = 0 base precedes the l-reduction: J_{0,l} = a^l / l for every l.
  if (k == 0) return std::pow(a, l) / l;
  if (l >= 3) return (j_integral(k - 1, l - 2, tau, a) - j_integral(k, l - 2, tau, a)) / tau;
  if (l == 1) {
    const double root = std::sqrt(tau);
    double j = std::atan(a * root) / root;
    for (int i = 1; i < k; ++i) {
      j = (2.0 * i - 1.0) / (2.0 * i) * j + a / (2.0 * i * std::pow(1.0 + tau * a * a, i));
    }
    return j;
  }
  // l == 2.
  if (k == 1) return std::log(a * a * tau + 1.0) / (2.0 * tau);
  return (1.0 - std::pow(1.0 + tau * a * a, 1.0 - k)) / (2.0 * (k - 1.0) * tau);
}

double j_integral_quadrature(int k, int l, double tau, double a, double tol) {
  if (k < 0 || l < 1) throw std::invalid_argument("j_integral requires k >= 0 and l >= 1");
  if (!(tau > 0.0) || !(a > 0.0)) throw std::invalid_argument("j_integral requires tau, a > 0");
  auto f = [k, l, tau](double r) {
    return std::pow(r, l - 1) / std::pow(1.0 + tau * r * r, k);
  };
  return adaptive_simpson(f, 0.0, a, tol);
}

double i_integral(int k, int l, double t, double eps) {
  if (k < 1 || l < 1) throw std::invalid_argument("i_integral requires k, l >= 1");
  if (!(t > 0.0) || !(t < 1.0)) throw std::invalid_argument("i_integral requires t in (0, 1)");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("i_integral requires eps in (0, 1)");
  return 2.0 * std::pow(t, -k) * j_integral(k, l, 1.0 / t - 1.0, std::sqrt(1.0 - eps));
}

double i_integral_quadrature(int k, int l, double t, double eps, double tol) {
  if (k < 1 || l < 1) throw std::invalid_argument("i_integral requires k, l >= 1");
  if (!(t > 0.0) || !(t < 1.0)) throw std::invalid_argument("i_integral requires t in (0, 1)");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("i_integral requires eps in (0, 1)");
  // Substituting x = 1 - y^2 removes the endpoint singularity of odd l.
  auto f = [k, l, t](double y) {
    return 2.0 * std::pow(y, l - 1) / std::pow(t + (1.0 - t) * y * y, k);
  };
  return adaptive_simpson(f, 0.0, std::sqrt(1.0 - eps), tol);
}

double c_coefficient(int k, int l, double eps) {
  if (!(2 * k > l) || l < 1) throw std::invalid_argument("c_coefficient requires 2k > l >= 1");
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("c_coefficient requires eps in (0, 1)");
  }
  // Three-point fit of t^{k - l/2} I / (1 + l t / 2) against {1, sqrt(t), t}.
  Eigen::Matrix3d design;
  Eigen::Vector3d values;
  double t = 1e-8;
  for (int row = 0; row < 3; ++row) {
    const double g = std::pow(t, k - 0.5 * l) * i_integral(k, l, t, eps) / (1.0 + 0.5 * l * t);
    design(row, 0) = 1.0;
    design(row, 1) = std::sqrt(t);
    design(row, 2) = t;
    values[row] = g;
    t *= 0.25;
  }
  return design.fullPivLu().solve(values)[0];
}

namespace {

int cubic_packed_size(int m) { return m * (m + 1) * (m + 2) / 6; }

}  // namespace

SymmetricCubic::SymmetricCubic(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("SymmetricCubic requires m >= 1");
  packed_.assign(static_cast<std::size_t>(cubic_packed_size(m)), 0.0);
}

namespace {

int cubic_index(int i, int j, int k, int m) {
  if (i < 0 || j < 0 || k < 0 || i >= m || j >= m || k >= m) {
    throw std::out_of_range("cubic index outside [0, m)");
  }
  int a = i, b = j, c = k;
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  // Sorted triples a <= b <= c enumerate as a tetrahedral stack: all triples
  // with first index < a, then pairs (b, c) inside the slice.
  const int before_a = (m * (m + 1) * (m + 2) - (m - a) * (m - a + 1) * (m - a + 2)) / 6;
  const int ma = m - a;
  const int before_b = (ma * (ma + 1) - (m - b) * (m - b + 1)) / 2;
  return before_a + before_b + (c - b);
}

}  // namespace

double SymmetricCubic::at(int i, int j, int k) const {
  return packed_[static_cast<std::size_t>(cubic_index(i, j, k, m_))];
}

void SymmetricCubic::set(int i, int j, int k, double value) {
  packed_[static_cast<std::size_t>(cubic_index(i, j, k, m_))] = value;
}

double SymmetricCubic::eval(const Eigen::VectorXd& xi) const {
  if (xi.size() != m_) throw std::invalid_argument("cubic form argument has wrong dimension");
  double total = 0.0;
  for (int a = 0; a < m_; ++a) {
    for (int b = a; b < m_; ++b) {
      for (int c = b; c < m_; ++c) {
        const double coef = at(a, b, c);
        if (coef == 0.0) continue;
        int mult = 6;
        if (a == b && b == c) {
          mult = 1;
        } else if (a == b || b == c) {
          mult = 3;
        }
        total += mult * coef * xi[a] * xi[b] * xi[c];
      }
    }
  }
  return total;
}

Eigen::VectorXd SymmetricCubic::trace() const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(m_);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) t[i] += at(i, j, j);
  }
  return t;
}

double SymmetricCubic::norm2() const {
  double total = 0.0;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      for (int k = 0; k < m_; ++k) {
        const double c = at(i, j, k);
        total += c * c;
      }
    }
  }
  return total;
}

double sphere_measure(int d) {
  if (d < 0) throw std::invalid_argument("sphere_measure requires d >= 0");
  return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

namespace {

double sextic_lhs_quadrature(const SymmetricCubic& cubic) {
  const int m = cubic.m();
  if (m == 1) {
    Eigen::VectorXd xi(1);
    xi[0] = 1.0;
    const double p = cubic.eval(xi);
    return 2.0 * p * p;  // S^0 = {+1, -1}, P odd
  }
  if (m == 2) {
    const int count = 512;
    double total = 0.0;
    Eigen::VectorXd xi(2);
    for (int i = 0; i < count; ++i) {
      const double phi = 2.0 * M_PI * i / count;
      xi[0] = std::cos(phi);
      xi[1] = std::sin(phi);
      const double p = cubic.eval(xi);
      total += p * p;
    }
    return total * (2.0 * M_PI / count);
  }
  if (m == 3) {
    // Product rule: Gauss-Legendre in cos(theta), uniform in phi; exact for
    // the degree-6 integrand after the phi average.
    auto [cn, cw] = gauss_legendre(32, -1.0, 1.0);
    const int pcount = 64;
    double total = 0.0;
    Eigen::VectorXd xi(3);
    for (int i = 0; i < cn.size(); ++i) {
      const double c = cn[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      double ring = 0.0;
      for (int j = 0; j < pcount; ++j) {
        const double phi = 2.0 * M_PI * j / pcount;
        xi[0] = c;
        xi[1] = s * std::cos(phi);
        xi[2] = s * std::sin(phi);
        const double p = cubic.eval(xi);
        ring += p * p;
      }
      total += cw[i] * ring * (2.0 * M_PI / pcount);
    }
    return total;
  }
  throw std::invalid_argument("sphere quadrature of the sextic covers m <= 3 only");
}

}  // namespace

SexticResult sextic_identity_residual(const SymmetricCubic& cubic, SexticMethod method,
                                      std::uint64_t seed, long samples) {
  const int m = cubic.m();
  SexticResult result;
  const double area = sphere_measure(m - 1);
  result.rhs = 9.0 * area / (m * (m + 2.0) * (m + 4.0)) *
               ((2.0 / 3.0) * cubic.norm2() + cubic.trace().squaredNorm());

  SexticMethod chosen = method;
  if (chosen == SexticMethod::automatic) {
    chosen = m <= 3 ? SexticMethod::quadrature : SexticMethod::monte_carlo;
  }
  if (chosen == SexticMethod::quadrature) {
    result.lhs = sextic_lhs_quadrature(cubic);
    result.std_error = 0.0;
  } else {
    if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");
    Sampler sampler(seed);
    double mean = 0.0, msq = 0.0;
    for (long i = 0; i < samples; ++i) {
      const Eigen::VectorXd xi = sampler.unit_vector(m);
      const double p = cubic.eval(xi);
      const double value = p * p;
      const double delta = value - mean;
      mean += delta / (i + 1);
      msq += delta * (value - mean);
    }
    const double variance = msq / (samples - 1);
    result.lhs = area * mean;
    result.std_error = area * std::sqrt(variance / samples);
  }
  result.residual = result.lhs - result.rhs;
  return result;
}

double alpha_coefficient(const FundamentalData& data) {
  const double m = static_cast<double>(data.m());
  const double u2 = sym2_norm2(data.u_tensor, data.inverse_metric);
  const double ah2 = sym2_norm2(data.a_hat_traceless, data.inverse_metric);
  const double hn2 = data.h_normal.squaredNorm();
  const double hh2 = data.h_hat.squaredNorm();
  return ((3.0 * m + 2.0) / (3.0 * m + 3.0)) * u2 + ah2 -
         ((m - 2.0) / (2.0 * m)) * ((m * m / ((m + 2.0) * (m + 1.0))) * hn2 + hh2);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw std::invalid_argument("log_spaced requires 0 < lo < hi and count >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
  return out;
}

namespace {

int next_pow2(double x) {
  int p = 4;
  while (p < x && p < (1 << 24)) p *= 2;
  return p;
}

// Compensated accumulator; the scan streams millions of terms per sample.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;

  void add(double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

std::vector<ScanSample> degeneration_scan(const ImmersionChart& chart, const Eigen::VectorXd& u,
                                          const std::vector<double>& t_samples,
                                          const ScanOptions& options) {
  const int m = chart.m();
  for (double t : t_samples) {
    if (!(t > 0.0) || !(t < 1.0)) {
      throw std::invalid_argument("degeneration scan requires t in (0, 1)");
    }
  }
  const SpherePoint p(chart.map(u));
  const AmbientVector jp = apply_complex_structure(p.vec());
  const double half_m = 0.5 * m;

  // Per-axis cap keeps the total node count bounded for m = 3.
  int cap = options.max_resolution;
  if (m >= 3) cap = std::min(cap, 256);

  const std::size_t count = t_samples.size();
  std::vector<ScanSample> samples(count);
  std::vector<int> start_res(count);
  std::vector<double> previous(count, 0.0);
  std::vector<bool> has_previous(count, false);
  int first_rung = cap;
  for (std::size_t s = 0; s < count; ++s) {
    samples[s].t = t_samples[s];
    // The weight concentrates at scale sqrt(t) around the antipode; the rung
    // ladder starts fine enough to see it.
    int r = std::max(options.base_resolution, next_pow2(8.0 / std::sqrt(t_samples[s])));
    r = std::min(r, cap);
    start_res[s] = r;
    first_rung = std::min(first_rung, r);
  }

  for (int rung = first_rung; rung <= cap; rung *= 2) {
    std::vector<std::size_t> pending;
    for (std::size_t s = 0; s < count; ++s) {
      if (!samples[s].converged && start_res[s] <= rung) pending.push_back(s);
    }
    if (pending.empty()) continue;

    const QuadratureGrid grid = build_grid(chart, rung);
    const long nodes = grid.node_count();
    std::vector<Kahan> acc(pending.size());
    for (long k = 0; k < nodes; ++k) {
      const Eigen::VectorXd uk = grid.node(k);
      const Jet jet = evaluate_jet(chart, uk);
      Eigen::MatrixXd g(m, m);
      for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
          g(i, j) = jet.d1(i).dot(jet.d1(j));
          g(j, i) = g(i, j);
        }
      }
      const double darea = grid.weight(k) * std::sqrt(g.determinant());
      const double px = p.vec().dot(jet.value);
      const double jpx = jp.dot(jet.value);
      for (std::size_t pi = 0; pi < pending.size(); ++pi) {
        const double t = samples[pending[pi]].t;
        const double r = 1.0 - t;  // b = -(1 - t) p
        const double w = (1.0 - r * r) / ((1.0 - r * px) * (1.0 - r * px) + r * r * jpx * jpx);
        double wpow;
        if (m == 2) {
          wpow = w;
        } else if (m == 1) {
          wpow = std::sqrt(w);
        } else if (m == 3) {
          wpow = w * std::sqrt(w);
        } else {
          wpow = std::pow(w, half_m);
        }
        acc[pi].add(darea * wpow);
      }
    }

    for (std::size_t pi = 0; pi < pending.size(); ++pi) {
      const std::size_t s = pending[pi];
      const double value = acc[pi].sum;
      samples[s].value = value;
      samples[s].resolution = rung;
      if (has_previous[s] &&
          std::abs(value - previous[s]) <= options.rel_tol * std::abs(value)) {
        samples[s].converged = true;
      }
      previous[s] = value;
      has_previous[s] = true;
    }
  }
  return samples;
}

ExpansionFit fit_expansion(int m, const std::vector<ScanSample>& samples) {
  if (samples.size() < 3) throw std::invalid_argument("expansion fit needs at least 3 samples");
  const int cols = m == 2 ? 3 : 2;
  const long rows = static_cast<long>(samples.size());
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd values(rows);
  for (long r = 0; r < rows; ++r) {
    const double t = samples[static_cast<std::size_t>(r)].t;
    design(r, 0) = 1.0;
    if (m == 2) {
      design(r, 1) = t * (-std::log(t));
      design(r, 2) = t;
    } else {
      design(r, 1) = t;
    }
    values[r] = samples[static_cast<std::size_t>(r)].value;
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(values);
  ExpansionFit fit;
  fit.m = m;
  fit.c0 = coef[0];
  fit.c1 = coef[1];
  fit.c2 = cols == 3 ? coef[2] : 0.0;
  fit.residual = std::sqrt((design * coef - values).squaredNorm() / rows);
  return fit;
}

}  // namespace crlab
