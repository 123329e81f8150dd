#pragma once

#include <functional>
#include <vector>

#include "crlab/ambient.hpp"

namespace crlab {

// One parameter axis. Periodic axes identify lo with hi and accept any real
// coordinate; non-periodic axes admit a small guard band beyond [lo, hi] so
// finite-difference stencils near the ends stay legal.
struct AxisDomain {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;

  double length() const { return hi - lo; }
};

// Packed storage index of the symmetric pair (i, j), 0 <= i, j < m.
int sym_index(int i, int j, int m);

// Value and derivatives of a chart map at one parameter point. Second
// derivatives are stored packed, entry (i, j) at sym_index(i, j, m).
struct Jet {
  AmbientVector value;
  std::vector<AmbientVector> first;
  std::vector<AmbientVector> second;

  int m() const { return static_cast<int>(first.size()); }
  const AmbientVector& d1(int i) const { return first[static_cast<std::size_t>(i)]; }
  const AmbientVector& d2(int i, int j) const {
    return second[static_cast<std::size_t>(sym_index(i, j, m()))];
  }
};

// Parameterized map from an m-dimensional box into S^{2n+1} (1 <= m <= n).
// Analytic jets are optional; central finite differences on the raw map are
// the fallback. Charts are immutable after construction.
class ImmersionChart {
 public:
  using MapFn = std::function<AmbientVector(const Eigen::VectorXd&)>;
  using JetFn = std::function<Jet(const Eigen::VectorXd&)>;

  ImmersionChart(int m, int n, std::vector<AxisDomain> domain, MapFn map, JetFn jets = nullptr);

  int m() const { return m_; }
  int n() const { return n_; }
  int ambient_dim() const { return 2 * n_ + 2; }
  const std::vector<AxisDomain>& domain() const { return domain_; }
  bool has_analytic_jets() const { return static_cast<bool>(jets_); }

  // Steps for the finite-difference jet fallback.
  double fd_step_first() const { return fd_step_first_; }
  double fd_step_second() const { return fd_step_second_; }

  // Throws std::domain_error when a non-periodic coordinate leaves its guard
  // band (5% of the axis length beyond each end). Periodic axes accept all u.
  void validate_in_domain(const Eigen::VectorXd& u) const;

  // Map value with the domain guard applied.
  AmbientVector map(const Eigen::VectorXd& u) const;

  // Raw evaluation without the guard; finite differencing goes through this.
  AmbientVector map_unchecked(const Eigen::VectorXd& u) const { return map_(u); }

  // Pre: has_analytic_jets().
  Jet analytic_jet(const Eigen::VectorXd& u) const { return jets_(u); }

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<AxisDomain> domain_;
  MapFn map_;
  JetFn jets_;
  double fd_step_first_ = 1e-5;
  double fd_step_second_ = 1e-4;
};

// Point plus first and second derivatives at u. Uses analytic jets when the
// chart carries them, otherwise central differences (step 1e-5 for first,
// 1e-4 for second derivatives). Verifies | |phi(u)| - 1 | <= 1e-10.
Jet evaluate_jet(const ImmersionChart& chart, const Eigen::VectorXd& u);

}  // namespace crlab
