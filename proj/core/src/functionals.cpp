#include "crlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "crlab/rng.hpp"

namespace crlab {

EnergyReport energies(const ImmersionChart& chart, const QuadratureGrid& grid, int genus) {
  const int m = chart.m();
  const long count = grid.node_count();
  std::vector<double> vol_terms(static_cast<std::size_t>(count));
  std::vector<double> wcr_terms(static_cast<std::size_t>(count));
  std::vector<double> wcl_terms(static_cast<std::size_t>(count));
  std::vector<double> ucr_terms(static_cast<std::size_t>(count));
  std::vector<double> bcr_terms(static_cast<std::size_t>(count));

  for (long k = 0; k < count; ++k) {
    const FundamentalData data = fundamental_data(chart, grid.node(k));
    const double da = grid.weight(k) * data.sqrt_det_metric;
    const double hn2 = data.h_normal.squaredNorm();
    const double hh2 = data.h_hat.squaredNorm();
    const double h2 = data.mean_curv.squaredNorm();
    const double u2 = sym2_norm2(data.u_tensor, data.inverse_metric);
    const double ah2 = sym2_norm2(data.a_hat_traceless, data.inverse_metric);
    const std::size_t idx = static_cast<std::size_t>(k);
    vol_terms[idx] = da;
    wcr_terms[idx] = (1.0 + hn2 / 8.0 + hh2 / 4.0) * da;
    wcl_terms[idx] = (1.0 + h2 / 4.0) * da;
    ucr_terms[idx] = std::pow(u2, 0.5 * m) / m * da;
    bcr_terms[idx] = std::pow(ah2, 0.5 * m) / m * da;
  }

  EnergyReport report;
  report.genus = genus;
  report.volume = pairwise_sum(vol_terms);
  report.u_cr = pairwise_sum(ucr_terms);
  report.b_cr = pairwise_sum(bcr_terms);
  if (m == 2) {
    report.w_cr = pairwise_sum(wcr_terms);
    report.w_classical = pairwise_sum(wcl_terms);
    report.gauss_bonnet_residual =
        report.w_cr - report.u_cr - report.b_cr - 4.0 * M_PI * (1.0 - genus);
  } else {
    report.w_cr = std::numeric_limits<double>::quiet_NaN();
    report.w_classical = std::numeric_limits<double>::quiet_NaN();
    report.gauss_bonnet_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

namespace {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

// Maximizes the objective with the standard reflect/expand/contract/shrink
// simplex; terminates on simplex diameter or the evaluation budget.
NelderMeadResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& objective,
                                 const Eigen::VectorXd& start, double step, int max_evaluations,
                                 double diameter_tol) {
  const int dim = static_cast<int>(start.size());
  const int points = dim + 1;
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(points));
  std::vector<double> value(static_cast<std::size_t>(points));
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return -objective(x);  // minimize the negation
  };
  simplex[0] = start;
  value[0] = eval(start);
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd x = start;
    x[i] += step;
    simplex[static_cast<std::size_t>(i + 1)] = x;
    value[static_cast<std::size_t>(i + 1)] = eval(x);
  }

  std::vector<int> order(static_cast<std::size_t>(points));
  while (evals < max_evaluations) {
    for (int i = 0; i < points; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return value[static_cast<std::size_t>(a)] < value[static_cast<std::size_t>(b)]; });
    const int best = order[0];
    const int worst = order[static_cast<std::size_t>(points - 1)];
    const int second_worst = order[static_cast<std::size_t>(points - 2)];

    double diameter = 0.0;
    for (int i = 1; i < points; ++i) {
      diameter = std::max(diameter, (simplex[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] -
                                     simplex[static_cast<std::size_t>(best)])
                                        .norm());
    }
    if (diameter < diameter_tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < points; ++i) {
      if (i == worst) continue;
      centroid += simplex[static_cast<std::size_t>(i)];
    }
    centroid /= dim;

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[static_cast<std::size_t>(worst)]);
    const double fr = eval(reflected);
    if (fr < value[static_cast<std::size_t>(best)]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[static_cast<std::size_t>(worst)]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[static_cast<std::size_t>(worst)] = expanded;
        value[static_cast<std::size_t>(worst)] = fe;
      } else {
        simplex[static_cast<std::size_t>(worst)] = reflected;
        value[static_cast<std::size_t>(worst)] = fr;
      }
    } else if (fr < value[static_cast<std::size_t>(second_worst)]) {
      simplex[static_cast<std::size_t>(worst)] = reflected;
      value[static_cast<std::size_t>(worst)] = fr;
    } else {
      const Eigen::VectorXd contracted =
          centroid + 0.5 * (simplex[static_cast<std::size_t>(worst)] - centroid);
      const double fc = eval(contracted);
      if (fc < value[static_cast<std::size_t>(worst)]) {
        simplex[static_cast<std::size_t>(worst)] = contracted;
        value[static_cast<std::size_t>(worst)] = fc;
      } else {
        for (int i = 0; i < points; ++i) {
          if (i == best) continue;
          simplex[static_cast<std::size_t>(i)] =
              simplex[static_cast<std::size_t>(best)] +
              0.5 * (simplex[static_cast<std::size_t>(i)] - simplex[static_cast<std::size_t>(best)]);
          value[static_cast<std::size_t>(i)] = eval(simplex[static_cast<std::size_t>(i)]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i < points; ++i) {
    if (value[static_cast<std::size_t>(i)] < value[static_cast<std::size_t>(best)]) best = i;
  }
  return NelderMeadResult{simplex[static_cast<std::size_t>(best)], -value[static_cast<std::size_t>(best)],
                          evals};
}

}  // namespace

CrVolumeResult cr_volume(const ImmersionChart& chart, const QuadratureGrid& grid,
                         const OptimizerConfig& config) {
  const int dim = chart.ambient_dim();
  const int base_res = *std::max_element(grid.resolution.begin(), grid.resolution.end());
  const int cap = chart.m() >= 3 ? std::min(config.objective_max_resolution, 96)
                                 : config.objective_max_resolution;

  // Ladder of volume tables at doubled resolutions, built on demand; the
  // passed grid is the base rung.
  const VolumeTable base_table = build_volume_table(chart, grid);
  std::map<int, VolumeTable> refined;
  auto table_at = [&](int res) -> const VolumeTable& {
    if (res <= base_res) return base_table;
    auto it = refined.find(res);
    if (it == refined.end()) {
      it = refined.emplace(res, build_volume_table(chart, build_grid(chart, res))).first;
    }
    return it->second;
  };

  auto objective = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd b = x;
    const double norm = std::min(b.norm(), config.ball_clamp);
    if (b.norm() > config.ball_clamp) b *= config.ball_clamp / b.norm();
    if (norm <= config.certify_radius) {
      return weighted_volume(table_at(base_res), MoebiusParam(b));
    }
    // The weight concentrates on a scale sqrt(1 - |b|); start the ladder at a
    // resolution that can see the peak and certify by one agreeing doubling.
    const double t = std::max(1.0 - norm, 1e-12);
    const double needed = 8.0 / std::sqrt(t);
    int res = base_res;
    while (res < needed && 2 * res <= cap) res *= 2;
    double prev = weighted_volume(table_at(res), MoebiusParam(b));
    while (2 * res <= cap) {
      res *= 2;
      const double value = weighted_volume(table_at(res), MoebiusParam(b));
      if (std::abs(value - prev) <= config.objective_rel_tol * std::abs(value)) return value;
      prev = value;
    }
    return -std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(dim));
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd plus = Eigen::VectorXd::Zero(dim);
    plus[i] = config.axis_step;
    starts.push_back(plus);
    starts.push_back(-plus);
  }
  Sampler sampler(config.seed);
  for (int i = 0; i < config.random_starts; ++i) {
    starts.push_back(sampler.ball_point(dim, config.random_radius));
  }

  CrVolumeResult result;
  result.argmax = Eigen::VectorXd::Zero(dim);
  result.starts = static_cast<int>(starts.size());
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(dim);
  for (const Eigen::VectorXd& start : starts) {
    const NelderMeadResult local = nelder_mead_max(objective, start, 0.15,
                                                   config.max_evaluations, config.diameter_tol);
    result.evaluations += local.evaluations;
    if (local.value > best) {
      best = local.value;
      best_x = local.x;
    }
  }

  const double origin_value =
      weighted_volume(table_at(base_res), MoebiusParam(Eigen::VectorXd::Zero(dim)));
  if (origin_value >= best - 1e-6) {
    // Flat ridge through b = 0: report the canonical maximizer.
    result.value = origin_value;
    result.argmax = Eigen::VectorXd::Zero(dim);
    result.attained = true;
    return result;
  }

  double norm = best_x.norm();
  if (norm > config.ball_clamp) {
    best_x *= config.ball_clamp / norm;
    norm = config.ball_clamp;
  }
  result.value = best;
  result.argmax = best_x;
  result.attained = norm < config.ball_clamp - 1e-6;
  return result;
}

BalanceResult balance_point(const ImmersionChart& chart, const QuadratureGrid& grid, double tol,
                            int max_iterations) {
  const VolumeTable table = build_volume_table(chart, grid);
  const int dim = chart.ambient_dim();
  const long count = table.points.rows();
  const double total = table.total();

  auto center = [&](const MoebiusParam& b) {
    AmbientVector sum = AmbientVector::Zero(dim);
    for (long k = 0; k < count; ++k) {
      const SpherePoint z(AmbientVector(table.points.row(k).transpose()));
      sum += table.darea[k] * apply_psi_b(b, z).vec();
    }
    return AmbientVector(sum / total);
  };

  BalanceResult result;
  result.b = AmbientVector::Zero(dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  double best = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iterations; ++iter) {
    const AmbientVector residual = center(MoebiusParam(b));
    const double res_norm = residual.norm();
    if (res_norm < best) {
      best = res_norm;
      result.b = b;
      result.iterations = iter;
    }
    if (res_norm <= tol) {
      result.converged = true;
      break;
    }
    b -= 0.5 * residual;
    const double norm = b.norm();
    if (norm > 0.99) b *= 0.99 / norm;
  }
  result.residual = best;
  return result;
}

double lambda1_flat_torus(const Eigen::Vector2d& v1, const Eigen::Vector2d& v2) {
  Eigen::Matrix2d basis;
  basis.col(0) = v1;
  basis.col(1) = v2;
  const double det = basis.determinant();
  const double scale = std::max(v1.norm(), v2.norm());
  if (std::abs(det) <= 1e-12 * scale * scale) {
    throw std::invalid_argument("torus basis vectors are linearly dependent");
  }
  // Dual basis columns: <d_i, v_j> = delta_ij.
  const Eigen::Matrix2d dual = basis.transpose().inverse();
  Eigen::Vector2d d1 = dual.col(0);
  Eigen::Vector2d d2 = dual.col(1);
  // Lagrange-Gauss reduction finds the shortest dual vector.
  for (int iter = 0; iter < 64; ++iter) {
    if (d2.squaredNorm() < d1.squaredNorm()) std::swap(d1, d2);
    const double mu = std::round(d1.dot(d2) / d1.squaredNorm());
    if (mu == 0.0) break;
    d2 -= mu * d1;
  }
  const double shortest2 = std::min(d1.squaredNorm(), d2.squaredNorm());
  return 4.0 * M_PI * M_PI * shortest2;
}

double dilated_volume(const VolumeTable& table, double lambda, const AmbientVector& q) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilation requires lambda > 0");
  if (std::abs(q.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("dilation direction must be a unit vector");
  }
  const Eigen::ArrayXd qx = (table.points * q).array();
  const Eigen::ArrayXd omega =
      2.0 * lambda / ((1.0 + lambda * lambda) - (1.0 - lambda * lambda) * qx);
  Eigen::ArrayXd opow;
  switch (table.m) {
    case 1: opow = omega; break;
    case 2: opow = omega.square(); break;
    case 3: opow = omega.cube(); break;
    default: opow = omega.pow(table.m); break;
  }
  return (table.darea.array() * opow).sum();
}

DilationScanResult dilation_scan(const VolumeTable& table, const AmbientVector& q,
                                 double lambda_min, double lambda_max, int count) {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || count < 2) {
    throw std::invalid_argument("dilation scan requires 0 < lambda_min < lambda_max, count >= 2");
  }
  DilationScanResult result;
  result.max_value = -std::numeric_limits<double>::infinity();
  const double ratio = std::log(lambda_max / lambda_min) / (count - 1);
  for (int sign = 0; sign < 2; ++sign) {
    const AmbientVector dir = sign == 0 ? q : AmbientVector(-q);
    for (int i = 0; i < count; ++i) {
      const double lambda = lambda_min * std::exp(ratio * i);
      const double value = dilated_volume(table, lambda, dir);
      if (value > result.max_value) {
        result.max_value = value;
        result.argmax_lambda = lambda;
        result.argmax_sign = sign == 0 ? +1 : -1;
      }
    }
  }
  return result;
}

}  // namespace crlab
