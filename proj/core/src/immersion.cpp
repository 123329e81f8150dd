#include "crlab/immersion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crlab {

namespace {

AmbientVector project_span(const std::vector<AmbientVector>& span,
                           const Eigen::MatrixXd& inverse_gram, const AmbientVector& v) {
  const int m = static_cast<int>(span.size());
  AmbientVector out = AmbientVector::Zero(v.size());
  for (int i = 0; i < m; ++i) {
    double c = 0.0;
    for (int j = 0; j < m; ++j) {
      c += inverse_gram(i, j) * span[static_cast<std::size_t>(j)].dot(v);
    }
    out += c * span[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace

FundamentalData fundamental_data(const ImmersionChart& chart, const Eigen::VectorXd& u,
                                 double horiz_tol) {
  const Jet jet = evaluate_jet(chart, u);
  const int m = jet.m();
  const int dim = static_cast<int>(jet.value.size());

  FundamentalData data;
  data.u = u;
  data.point = SpherePoint(jet.value);
  data.reeb = contact_at(data.point).reeb;
  data.frame = jet.first;

  for (const AmbientVector& f : data.frame) {
    const double theta = data.reeb.dot(f);
    if (std::abs(theta) > horiz_tol) {
      throw std::runtime_error("chart is not horizontal at the point, theta residual " +
                               std::to_string(std::abs(theta)));
    }
  }

  data.metric.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      data.metric(i, j) = data.frame[static_cast<std::size_t>(i)].dot(
          data.frame[static_cast<std::size_t>(j)]);
      data.metric(j, i) = data.metric(i, j);
    }
  }
  const double det = data.metric.determinant();
  const double scale = std::max(1.0, data.metric.diagonal().maxCoeff());
  if (!(det > 1e-14 * std::pow(scale, m))) {
    throw std::runtime_error("degenerate induced metric, det " + std::to_string(det));
  }
  data.inverse_metric = data.metric.inverse();
  data.sqrt_det_metric = std::sqrt(det);

  // J-rotated frame spans the J-tangent summand of the normal space; its Gram
  // matrix equals the metric.
  std::vector<AmbientVector> jframe;
  jframe.reserve(static_cast<std::size_t>(m));
  for (const AmbientVector& f : data.frame) jframe.push_back(apply_complex_structure(f));

  const int packed = m * (m + 1) / 2;
  data.second_fund.resize(static_cast<std::size_t>(packed));
  data.a_normal.resize(static_cast<std::size_t>(packed));
  data.a_hat.resize(static_cast<std::size_t>(packed));
  data.a_reeb.resize(packed);
  data.u_tensor.resize(static_cast<std::size_t>(packed));
  data.a_hat_traceless.resize(static_cast<std::size_t>(packed));

  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const int idx = sym_index(i, j, m);
      // Raw second derivative minus the sphere-radial part (-g_ij p after
      // differentiating <d_i phi, p> = 0) minus the Sigma-tangential part.
      AmbientVector a = jet.d2(i, j) + data.metric(i, j) * data.point.vec();
      a -= project_span(data.frame, data.inverse_metric, a);
      data.second_fund[static_cast<std::size_t>(idx)] = a;
    }
  }

  data.mean_curv = AmbientVector::Zero(dim);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      data.mean_curv += data.inverse_metric(i, j) *
                        data.second_fund[static_cast<std::size_t>(sym_index(i, j, m))];
    }
  }

  auto split = [&](const AmbientVector& v, AmbientVector& norm_part, AmbientVector& hat_part,
                   double& reeb_part) {
    norm_part = project_span(jframe, data.inverse_metric, v);
    reeb_part = data.reeb.dot(v);
    hat_part = v - norm_part - reeb_part * data.reeb;
  };

  split(data.mean_curv, data.h_normal, data.h_hat, data.h_reeb);
  for (int idx = 0; idx < packed; ++idx) {
    double reeb_part = 0.0;
    split(data.second_fund[static_cast<std::size_t>(idx)],
          data.a_normal[static_cast<std::size_t>(idx)], data.a_hat[static_cast<std::size_t>(idx)],
          reeb_part);
    data.a_reeb[idx] = reeb_part;
  }

  data.sigma.assign(static_cast<std::size_t>(m * m * m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const AmbientVector& a = data.second_fund[static_cast<std::size_t>(sym_index(i, j, m))];
      for (int k = 0; k < m; ++k) {
        data.sigma[static_cast<std::size_t>((i * m + j) * m + k)] =
            a.dot(jframe[static_cast<std::size_t>(k)]);
      }
    }
  }
  data.beta.resize(m);
  for (int k = 0; k < m; ++k) {
    double bk = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        bk += data.inverse_metric(i, j) * data.sigma_at(i, j, k);
      }
    }
    data.beta[k] = bk;
  }

  // U = A^N - E^N/(m+2), E^N(X,Y) = g(X,Y) H^N + beta(X) J(Y) + beta(Y) J(X);
  // Ahat_0 = Ahat - (1/m) H^Nhat g. Both are trace free.
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const int idx = sym_index(i, j, m);
      const AmbientVector e = data.metric(i, j) * data.h_normal +
                              data.beta[i] * jframe[static_cast<std::size_t>(j)] +
                              data.beta[j] * jframe[static_cast<std::size_t>(i)];
      data.u_tensor[static_cast<std::size_t>(idx)] =
          data.a_normal[static_cast<std::size_t>(idx)] - e / (m + 2.0);
      data.a_hat_traceless[static_cast<std::size_t>(idx)] =
          data.a_hat[static_cast<std::size_t>(idx)] - (data.metric(i, j) / m) * data.h_hat;
    }
  }
  return data;
}

double sym2_norm2(const std::vector<AmbientVector>& packed_tensor,
                  const Eigen::MatrixXd& inverse_metric) {
  const int m = static_cast<int>(inverse_metric.rows());
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          total += inverse_metric(i, k) * inverse_metric(j, l) *
                   packed_tensor[static_cast<std::size_t>(sym_index(i, j, m))].dot(
                       packed_tensor[static_cast<std::size_t>(sym_index(k, l, m))]);
        }
      }
    }
  }
  return total;
}

AmbientVector normal_j_projection(const FundamentalData& data, const AmbientVector& v) {
  std::vector<AmbientVector> jframe;
  jframe.reserve(data.frame.size());
  for (const AmbientVector& f : data.frame) jframe.push_back(apply_complex_structure(f));
  return project_span(jframe, data.inverse_metric, v);
}

AmbientVector tangent_projection(const FundamentalData& data, const AmbientVector& v) {
  return project_span(data.frame, data.inverse_metric, v);
}

double horizontality_residual(const ImmersionChart& chart, const QuadratureGrid& grid) {
  double worst = 0.0;
  const long count = grid.node_count();
  for (long k = 0; k < count; ++k) {
    const Jet jet = evaluate_jet(chart, grid.node(k));
    const ContactData contact = contact_at(SpherePoint(jet.value));
    for (int i = 0; i < jet.m(); ++i) {
      worst = std::max(worst, std::abs(contact.theta(jet.d1(i))));
    }
  }
  return worst;
}

namespace {

// Christoffel symbols Gamma^l_ij, exact in the chart jets: the metric and its
// first derivatives come from first and second derivatives of the map.
struct Christoffel {
  Eigen::MatrixXd metric;
  Eigen::MatrixXd inverse_metric;
  std::vector<double> gamma;  // (l * m + i) * m + j

  double at(int l, int i, int j) const {
    const int m = static_cast<int>(metric.rows());
    return gamma[static_cast<std::size_t>((l * m + i) * m + j)];
  }
};

Christoffel christoffel(const ImmersionChart& chart, const Eigen::VectorXd& u) {
  const Jet jet = evaluate_jet(chart, u);
  const int m = jet.m();
  Christoffel out;
  out.metric.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) out.metric(i, j) = jet.d1(i).dot(jet.d1(j));
  }
  out.inverse_metric = out.metric.inverse();
  // dg(k; i, j) = d_k g_ij = <phi_ik, phi_j> + <phi_i, phi_jk>.
  auto dg = [&](int k, int i, int j) {
    return jet.d2(i, k).dot(jet.d1(j)) + jet.d1(i).dot(jet.d2(j, k));
  };
  out.gamma.assign(static_cast<std::size_t>(m * m * m), 0.0);
  for (int l = 0; l < m; ++l) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double sum = 0.0;
        for (int k = 0; k < m; ++k) {
          sum += 0.5 * out.inverse_metric(l, k) * (dg(i, j, k) + dg(j, i, k) - dg(k, i, j));
        }
        out.gamma[static_cast<std::size_t>((l * m + i) * m + j)] = sum;
      }
    }
  }
  return out;
}

}  // namespace

double scalar_curvature(const ImmersionChart& chart, const Eigen::VectorXd& u, double step) {
  const int m = chart.m();
  const Christoffel center = christoffel(chart, u);

  // 5-point stencil of Gamma per axis: f' = (-f2 + 8 f1 - 8 fm1 + fm2)/(12 h).
  std::vector<std::vector<double>> dgamma(static_cast<std::size_t>(m));
  Eigen::VectorXd shifted = u;
  for (int a = 0; a < m; ++a) {
    shifted[a] = u[a] + 2.0 * step;
    const Christoffel f2 = christoffel(chart, shifted);
    shifted[a] = u[a] + step;
    const Christoffel f1 = christoffel(chart, shifted);
    shifted[a] = u[a] - step;
    const Christoffel fm1 = christoffel(chart, shifted);
    shifted[a] = u[a] - 2.0 * step;
    const Christoffel fm2 = christoffel(chart, shifted);
    shifted[a] = u[a];
    std::vector<double> d(static_cast<std::size_t>(m * m * m));
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      d[idx] = (-f2.gamma[idx] + 8.0 * f1.gamma[idx] - 8.0 * fm1.gamma[idx] + fm2.gamma[idx]) /
               (12.0 * step);
    }
    dgamma[static_cast<std::size_t>(a)] = std::move(d);
  }
  auto dG = [&](int a, int l, int i, int j) {
    return dgamma[static_cast<std::size_t>(a)][static_cast<std::size_t>((l * m + i) * m + j)];
  };

  // Ric_jk = d_i Gamma^i_jk - d_j Gamma^i_ik + Gamma^i_ip Gamma^p_jk
  //        - Gamma^i_jp Gamma^p_ik; R = g^{jk} Ric_jk.
  double r = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      double ric = 0.0;
      for (int i = 0; i < m; ++i) {
        ric += dG(i, i, j, k) - dG(j, i, i, k);
        for (int p = 0; p < m; ++p) {
          ric += center.at(i, i, p) * center.at(p, j, k) - center.at(i, j, p) * center.at(p, i, k);
        }
      }
      r += center.inverse_metric(j, k) * ric;
    }
  }
  return r;
}

double scalar_curvature_residual(const ImmersionChart& chart, const Eigen::VectorXd& u) {
  const double r = scalar_curvature(chart, u);
  const FundamentalData data = fundamental_data(chart, u);
  const double m = static_cast<double>(data.m());
  const double h2 = data.mean_curv.squaredNorm();
  const double u2 = sym2_norm2(data.u_tensor, data.inverse_metric);
  const double ah2 = sym2_norm2(data.a_hat_traceless, data.inverse_metric);
  const double hn2 = data.h_normal.squaredNorm();
  const double predicted = m * (m - 1.0) + ((m - 1.0) / m) * h2 - u2 - ah2 -
                           (2.0 * (m - 1.0) / (m * (m + 2.0))) * hn2;
  return r - predicted;
}

double div_j_h_normal(const ImmersionChart& chart, const Eigen::VectorXd& u, double step) {
  const int m = chart.m();
  const FundamentalData center = fundamental_data(chart, u);

  // Flux coordinates G_i = sqrt(det g) g^{ij} <J(H^N), phi_j> at a shifted point.
  auto flux = [&](const Eigen::VectorXd& v, int i) {
    const FundamentalData data = fundamental_data(chart, v);
    const AmbientVector field = apply_complex_structure(data.h_normal);
    double gi = 0.0;
    for (int j = 0; j < m; ++j) {
      gi += data.inverse_metric(i, j) * field.dot(data.frame[static_cast<std::size_t>(j)]);
    }
    return data.sqrt_det_metric * gi;
  };

  double total = 0.0;
  Eigen::VectorXd shifted = u;
  for (int i = 0; i < m; ++i) {
    shifted[i] = u[i] + step;
    const double plus = flux(shifted, i);
    shifted[i] = u[i] - step;
    const double minus = flux(shifted, i);
    shifted[i] = u[i];
    total += (plus - minus) / (2.0 * step);
  }
  return total / center.sqrt_det_metric;
}

}  // namespace crlab
