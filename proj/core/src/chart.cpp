#include "crlab/chart.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace crlab {

int sym_index(int i, int j, int m) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= m) throw std::out_of_range("sym_index outside [0, m)");
  // Row-major packed upper triangle: row i starts after i*m - i*(i-1)/2 slots.
  return i * m - i * (i - 1) / 2 + (j - i);
}

ImmersionChart::ImmersionChart(int m, int n, std::vector<AxisDomain> domain, MapFn map, JetFn jets)
    : m_(m), n_(n), domain_(std::move(domain)), map_(std::move(map)), jets_(std::move(jets)) {
  if (m_ < 1 || m_ > n_) {
    throw std::invalid_argument("chart requires 1 <= m <= n");
  }
  if (static_cast<int>(domain_.size()) != m_) {
    throw std::invalid_argument("chart domain must list one axis per parameter");
  }
  for (const AxisDomain& axis : domain_) {
    if (!(axis.hi > axis.lo)) {
      throw std::invalid_argument("chart axis must have hi > lo");
    }
  }
  if (!map_) {
    throw std::invalid_argument("chart requires a map");
  }
}

void ImmersionChart::validate_in_domain(const Eigen::VectorXd& u) const {
  if (u.size() != m_) {
    throw std::invalid_argument("parameter point has wrong dimension");
  }
  for (int i = 0; i < m_; ++i) {
    const AxisDomain& axis = domain_[static_cast<std::size_t>(i)];
    if (axis.periodic) continue;
    const double slack = 0.05 * axis.length();
    if (u[i] < axis.lo - slack || u[i] > axis.hi + slack) {
      throw std::domain_error("parameter " + std::to_string(u[i]) + " outside axis [" +
                              std::to_string(axis.lo) + ", " + std::to_string(axis.hi) + "]");
    }
  }
}

AmbientVector ImmersionChart::map(const Eigen::VectorXd& u) const {
  validate_in_domain(u);
  return map_(u);
}

namespace {

Jet finite_difference_jet(const ImmersionChart& chart, const Eigen::VectorXd& u) {
  const int m = chart.m();
  const double h1 = chart.fd_step_first();
  const double h2 = chart.fd_step_second();

  Jet jet;
  jet.value = chart.map_unchecked(u);
  jet.first.resize(static_cast<std::size_t>(m));
  jet.second.resize(static_cast<std::size_t>(m * (m + 1) / 2));

  Eigen::VectorXd shifted = u;
  for (int i = 0; i < m; ++i) {
    shifted[i] = u[i] + h1;
    const AmbientVector plus = chart.map_unchecked(shifted);
    shifted[i] = u[i] - h1;
    const AmbientVector minus = chart.map_unchecked(shifted);
    shifted[i] = u[i];
    jet.first[static_cast<std::size_t>(i)] = (plus - minus) / (2.0 * h1);
  }

  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      AmbientVector d2;
      if (i == j) {
        shifted[i] = u[i] + h2;
        const AmbientVector plus = chart.map_unchecked(shifted);
        shifted[i] = u[i] - h2;
        const AmbientVector minus = chart.map_unchecked(shifted);
        shifted[i] = u[i];
        d2 = (plus - 2.0 * jet.value + minus) / (h2 * h2);
      } else {
        shifted[i] = u[i] + h2;
        shifted[j] = u[j] + h2;
        const AmbientVector pp = chart.map_unchecked(shifted);
        shifted[j] = u[j] - h2;
        const AmbientVector pm = chart.map_unchecked(shifted);
        shifted[i] = u[i] - h2;
        const AmbientVector mm = chart.map_unchecked(shifted);
        shifted[j] = u[j] + h2;
        const AmbientVector mp = chart.map_unchecked(shifted);
        shifted[i] = u[i];
        shifted[j] = u[j];
        d2 = (pp - pm - mp + mm) / (4.0 * h2 * h2);
      }
      jet.second[static_cast<std::size_t>(sym_index(i, j, m))] = std::move(d2);
    }
  }
  return jet;
}

}  // namespace

Jet evaluate_jet(const ImmersionChart& chart, const Eigen::VectorXd& u) {
  chart.validate_in_domain(u);
  Jet jet = chart.has_analytic_jets() ? chart.analytic_jet(u) : finite_difference_jet(chart, u);
  const double drift = std::abs(jet.value.norm() - 1.0);
  if (drift > 1e-10) {
    throw std::runtime_error("chart image off the sphere by " + std::to_string(drift));
  }
  return jet;
}

}  // namespace crlab
