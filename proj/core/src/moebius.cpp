#include "crlab/moebius.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "crlab/immersion.hpp"
#include "crlab/quadrature.hpp"
#include "crlab/rng.hpp"

namespace crlab {

namespace {

constexpr double kBallGuard = 1e-9;

Eigen::VectorXcd to_complex(const AmbientVector& v) {
  const Eigen::Index h = v.size() / 2;
  Eigen::VectorXcd z(h);
  for (Eigen::Index j = 0; j < h; ++j) z[j] = std::complex<double>(v[j], v[h + j]);
  return z;
}

AmbientVector to_real(const Eigen::VectorXcd& z) {
  const Eigen::Index h = z.size();
  AmbientVector v(2 * h);
  for (Eigen::Index j = 0; j < h; ++j) {
    v[j] = z[j].real();
    v[h + j] = z[j].imag();
  }
  return v;
}

// Real matrix of the complex-linear map M on (x, y) coordinates.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& m) {
  const Eigen::Index h = m.rows();
  Eigen::MatrixXd r(2 * h, 2 * h);
  r.topLeftCorner(h, h) = m.real();
  r.topRightCorner(h, h) = -m.imag();
  r.bottomLeftCorner(h, h) = m.imag();
  r.bottomRightCorner(h, h) = m.real();
  return r;
}

// Tightens an almost-unitary complex matrix to working precision.
Eigen::MatrixXcd polish_unitary(const Eigen::MatrixXcd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const std::complex<double> d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

MoebiusParam::MoebiusParam(AmbientVector b) : n_(ambient_n(b)) {
  const double norm = b.norm();
  if (norm > 1.0 - kBallGuard) {
    throw std::domain_error("Moebius parameter norm " + std::to_string(norm) +
                            " leaves the open unit ball");
  }
  b_ = std::move(b);
}

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXd mat) {
  const Eigen::Index size = mat.rows();
  if (mat.cols() != size || size < 4 || size % 2 != 0) {
    throw std::invalid_argument("unitary matrix must be square of size 2n+2");
  }
  n_ = static_cast<int>(size / 2 - 1);
  const double ortho = (mat.transpose() * mat - Eigen::MatrixXd::Identity(size, size))
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > 1e-12) {
    throw std::invalid_argument("matrix is not orthogonal, defect " + std::to_string(ortho));
  }
  const Eigen::Index h = size / 2;
  // J in block form maps (x, y) to (y, -x); commutation forces the
  // [[P, -Q], [Q, P]] shape of a complex-linear map.
  Eigen::MatrixXd jm(size, size);
  jm.setZero();
  jm.topRightCorner(h, h) = Eigen::MatrixXd::Identity(h, h);
  jm.bottomLeftCorner(h, h) = -Eigen::MatrixXd::Identity(h, h);
  const double comm = (mat * jm - jm * mat).cwiseAbs().maxCoeff();
  if (comm > 1e-12) {
    throw std::invalid_argument("matrix does not commute with J, defect " + std::to_string(comm));
  }
  mat_ = std::move(mat);
}

UnitaryMatrix identity_unitary(int n) {
  return UnitaryMatrix(Eigen::MatrixXd::Identity(2 * n + 2, 2 * n + 2));
}

UnitaryMatrix random_unitary(int n, std::uint64_t seed) {
  Sampler sampler(seed);
  const int h = n + 1;
  Eigen::MatrixXcd a(h, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < h; ++c) a(r, c) = std::complex<double>(sampler.normal(), sampler.normal());
  }
  return UnitaryMatrix(realify(polish_unitary(a)));
}

SpherePoint apply_psi_b(const MoebiusParam& b, const SpherePoint& z) {
  if (b.b().size() == 0 || b.norm() == 0.0) return z;
  if (b.b().size() != z.vec().size()) {
    throw std::invalid_argument("Moebius parameter and point dimensions differ");
  }
  const double s = std::sqrt(1.0 - b.b().squaredNorm());
  const std::complex<double> w = cdot(b.b(), z.vec());
  const std::complex<double> d = 1.0 + w;
  AmbientVector out = cscale(s / d, z.vec() + b.b()) +
                      cscale((b.b().squaredNorm() + w) / (d * (1.0 + s)), b.b());
  out /= out.norm();
  return SpherePoint(out);
}

double weight(const MoebiusParam& b, const SpherePoint& z) {
  if (b.b().size() == 0) return 1.0;
  const std::complex<double> w = cdot(b.b(), z.vec());
  const double denom = (1.0 + w.real()) * (1.0 + w.real()) + w.imag() * w.imag();
  return (1.0 - b.b().squaredNorm()) / denom;
}

AmbientVector grad_log_weight(const MoebiusParam& b, const SpherePoint& z) {
  if (b.b().size() == 0) return AmbientVector::Zero(z.vec().size());
  const std::complex<double> w = cdot(b.b(), z.vec());
  const double denom = (1.0 + w.real()) * (1.0 + w.real()) + w.imag() * w.imag();
  const AmbientVector jb = apply_complex_structure(b.b());
  return (-2.0 / denom) * ((1.0 + w.real()) * b.b() - w.imag() * jb);
}

AmbientVector s_field(const MoebiusParam& b, const SpherePoint& p) {
  const AmbientVector grad_h = horizontal_project(p, grad_log_weight(b, p));
  return -0.5 * apply_complex_structure(grad_h);
}

AmbientVector psi_differential(const MoebiusParam& b, const SpherePoint& z,
                               const AmbientVector& v) {
  if (b.b().size() == 0 || b.norm() == 0.0) return v;
  const double s = std::sqrt(1.0 - b.b().squaredNorm());
  const std::complex<double> w = cdot(b.b(), z.vec());
  const std::complex<double> d = 1.0 + w;
  const std::complex<double> zeta = cdot(b.b(), v);
  return cscale(s / d, v) - cscale(s * zeta / (d * d), z.vec() + b.b()) +
         cscale(s * s * zeta / ((1.0 + s) * d * d), b.b());
}

AmbientVector psi_second_differential(const MoebiusParam& b, const SpherePoint& z,
                                      const AmbientVector& v, const AmbientVector& u) {
  if (b.b().size() == 0 || b.norm() == 0.0) return AmbientVector::Zero(z.vec().size());
  const double s = std::sqrt(1.0 - b.b().squaredNorm());
  const std::complex<double> w = cdot(b.b(), z.vec());
  const std::complex<double> d = 1.0 + w;
  const std::complex<double> zv = cdot(b.b(), v);
  const std::complex<double> zu = cdot(b.b(), u);
  const std::complex<double> d2 = d * d;
  const std::complex<double> d3 = d2 * d;
  return -cscale(s * zu / d2, v) - cscale(s * zv / d2, u) +
         cscale(2.0 * s * zv * zu / d3, z.vec() + b.b()) -
         cscale(2.0 * s * s * zv * zu / ((1.0 + s) * d3), b.b());
}

AmbientVector psi_differential_fd(const MoebiusParam& b, const SpherePoint& z,
                                  const AmbientVector& v, double step) {
  auto curve_point = [&](double h) {
    AmbientVector q = z.vec() + h * v;
    q /= q.norm();
    return SpherePoint(std::move(q));
  };
  const AmbientVector plus = apply_psi_b(b, curve_point(step)).vec();
  const AmbientVector minus = apply_psi_b(b, curve_point(-step)).vec();
  AmbientVector d = (plus - minus) / (2.0 * step);
  const AmbientVector image = apply_psi_b(b, z).vec();
  return d - image.dot(d) * image;
}

ImmersionChart compose(const ImmersionChart& chart, const MoebiusParam& b) {
  if (b.b().size() == 0 || b.norm() == 0.0) return chart;
  if (b.b().size() != chart.ambient_dim()) {
    throw std::invalid_argument("Moebius parameter dimension does not match the chart");
  }
  auto base = std::make_shared<const ImmersionChart>(chart);
  const MoebiusParam param = b;
  ImmersionChart::MapFn map = [base, param](const Eigen::VectorXd& u) {
    return apply_psi_b(param, SpherePoint(base->map_unchecked(u))).vec();
  };
  ImmersionChart::JetFn jets = [base, param](const Eigen::VectorXd& u) {
    const Jet inner = evaluate_jet(*base, u);
    const SpherePoint z(inner.value);
    const int m = inner.m();
    Jet out;
    out.value = apply_psi_b(param, z).vec();
    out.first.resize(static_cast<std::size_t>(m));
    out.second.resize(static_cast<std::size_t>(m * (m + 1) / 2));
    for (int i = 0; i < m; ++i) {
      out.first[static_cast<std::size_t>(i)] = psi_differential(param, z, inner.d1(i));
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        out.second[static_cast<std::size_t>(sym_index(i, j, m))] =
            psi_second_differential(param, z, inner.d1(i), inner.d1(j)) +
            psi_differential(param, z, inner.d2(i, j));
      }
    }
    return out;
  };
  return ImmersionChart(chart.m(), chart.n(), chart.domain(), std::move(map), std::move(jets));
}

ImmersionChart compose(const ImmersionChart& chart, const UnitaryMatrix& a) {
  if (a.mat().rows() != chart.ambient_dim()) {
    throw std::invalid_argument("unitary dimension does not match the chart");
  }
  if (a.mat().isIdentity(1e-15)) return chart;
  auto base = std::make_shared<const ImmersionChart>(chart);
  const Eigen::MatrixXd mat = a.mat();
  ImmersionChart::MapFn map = [base, mat](const Eigen::VectorXd& u) -> AmbientVector {
    return mat * base->map_unchecked(u);
  };
  ImmersionChart::JetFn jets = [base, mat](const Eigen::VectorXd& u) {
    const Jet inner = evaluate_jet(*base, u);
    Jet out;
    out.value = mat * inner.value;
    out.first.reserve(inner.first.size());
    out.second.reserve(inner.second.size());
    for (const AmbientVector& d : inner.first) out.first.push_back(mat * d);
    for (const AmbientVector& d : inner.second) out.second.push_back(mat * d);
    return out;
  };
  return ImmersionChart(chart.m(), chart.n(), chart.domain(), std::move(map), std::move(jets));
}

double pullback_conformal_residual(const MoebiusParam& b, const ImmersionChart& chart,
                                   const QuadratureGrid& grid) {
  const double step = 1e-6;
  const int m = chart.m();
  double worst = 0.0;
  const long count = grid.node_count();
  for (long k = 0; k < count; ++k) {
    const Eigen::VectorXd u = grid.node(k);
    const Jet jet = evaluate_jet(chart, u);
    const SpherePoint p(jet.value);
    const double w = weight(b, p);

    std::vector<AmbientVector> pushed(static_cast<std::size_t>(m));
    Eigen::VectorXd shifted = u;
    for (int i = 0; i < m; ++i) {
      shifted[i] = u[i] + step;
      const AmbientVector plus = apply_psi_b(b, SpherePoint(chart.map_unchecked(shifted))).vec();
      shifted[i] = u[i] - step;
      const AmbientVector minus = apply_psi_b(b, SpherePoint(chart.map_unchecked(shifted))).vec();
      shifted[i] = u[i];
      pushed[static_cast<std::size_t>(i)] = (plus - minus) / (2.0 * step);
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double gij = jet.d1(i).dot(jet.d1(j));
        const double pij = pushed[static_cast<std::size_t>(i)].dot(pushed[static_cast<std::size_t>(j)]);
        worst = std::max(worst, std::abs(pij - w * gij));
      }
    }
  }
  return worst;
}

AmbientVector mean_curvature_transform_rhs(const MoebiusParam& b, const FundamentalData& data) {
  const double w = weight(b, data.point);
  const AmbientVector s = s_field(b, data.point);
  const AmbientVector s_tan = tangent_projection(data, s);
  const AmbientVector js = apply_complex_structure(s);
  const AmbientVector js_perp = js - tangent_projection(data, js);
  const double m = static_cast<double>(data.m());
  return (data.mean_curv - 2.0 * apply_complex_structure(s_tan) - m * js_perp) / w;
}

AmbientVector second_fund_transform_rhs(const MoebiusParam& b, const FundamentalData& data,
                                        int i, int j) {
  const AmbientVector s = s_field(b, data.point);
  const AmbientVector js = apply_complex_structure(s);
  const AmbientVector js_perp = js - tangent_projection(data, js);
  const int m = data.m();
  const AmbientVector& di = data.frame[static_cast<std::size_t>(i)];
  const AmbientVector& dj = data.frame[static_cast<std::size_t>(j)];
  return data.second_fund[static_cast<std::size_t>(sym_index(i, j, m))] -
         s.dot(dj) * apply_complex_structure(di) - s.dot(di) * apply_complex_structure(dj) -
         data.metric(i, j) * js_perp;
}

double div_transform_rhs(const MoebiusParam& b, const ImmersionChart& chart,
                         const Eigen::VectorXd& u) {
  const FundamentalData data = fundamental_data(chart, u);
  const SpherePoint& p = data.point;
  const double w = weight(b, p);
  const AmbientVector s = s_field(b, p);
  const double m = static_cast<double>(data.m());

  const double div0 = div_j_h_normal(chart, u);
  const double term1 =
      (div0 + 2.0 * m * s.dot(data.h_normal) + (m + 2.0) * s.dot(data.h_hat)) / w;

  // grad of W^{-1}: ambient closed form, then sphere and surface projections.
  const AmbientVector jb =
      b.b().size() == 0 ? AmbientVector::Zero(p.vec().size()) : apply_complex_structure(b.b());
  AmbientVector grad_winv;
  if (b.b().size() == 0) {
    grad_winv = AmbientVector::Zero(p.vec().size());
  } else {
    const double bx = b.b().dot(p.vec());
    const double jbx = jb.dot(p.vec());
    grad_winv = (2.0 * (1.0 + bx) * b.b() + 2.0 * jbx * jb) / (1.0 - b.b().squaredNorm());
  }
  const AmbientVector grad_sphere = grad_winv - p.vec().dot(grad_winv) * p.vec();
  AmbientVector grad_surface = AmbientVector::Zero(p.vec().size());
  for (int i = 0; i < data.m(); ++i) {
    for (int j = 0; j < data.m(); ++j) {
      grad_surface += data.inverse_metric(i, j) * grad_winv.dot(data.frame[static_cast<std::size_t>(i)]) *
                      data.frame[static_cast<std::size_t>(j)];
    }
  }
  const double term2 =
      -(m * (m + 2.0) / 4.0) * w * grad_surface.dot(apply_complex_structure(grad_sphere));

  double term3 = 0.0;
  if (b.b().size() != 0) {
    term3 = -(m * (m + 2.0) / (1.0 - b.b().squaredNorm())) * jb.dot(p.vec());
  }
  return term1 + term2 + term3;
}

namespace {

// Complex-orthonormal completion: returns a unitary of C^{n+1} whose leading
// columns are the given complex-orthonormal vectors.
Eigen::MatrixXcd complete_unitary(const std::vector<Eigen::VectorXcd>& leading) {
  const Eigen::Index h = leading.front().size();
  Eigen::MatrixXcd q(h, h);
  Eigen::Index col = 0;
  for (const Eigen::VectorXcd& v : leading) q.col(col++) = v;
  for (Eigen::Index cand = 0; cand < h && col < h; ++cand) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(h);
    v[cand] = 1.0;
    for (Eigen::Index c = 0; c < col; ++c) v -= q.col(c).dot(v) * q.col(c);
    const double norm = v.norm();
    if (norm > 1e-6) q.col(col++) = v / norm;
  }
  if (col != h) throw std::runtime_error("failed to complete a unitary basis");
  return polish_unitary(q);
}

// Unitary sending p to e_1 (hence T(p) to e_{n+2}) and the orthonormalized
// tangent frame onto the coordinate lines e_2, .., e_{m+1}.
UnitaryMatrix alignment_unitary(const SpherePoint& p, const std::vector<AmbientVector>& frame) {
  std::vector<Eigen::VectorXcd> leading;
  leading.push_back(to_complex(p.vec()));
  std::vector<AmbientVector> ortho;
  for (const AmbientVector& f : frame) {
    AmbientVector v = f;
    for (const AmbientVector& o : ortho) v -= o.dot(v) * o;
    v /= v.norm();
    ortho.push_back(v);
    leading.push_back(to_complex(v));
  }
  const Eigen::MatrixXcd q = complete_unitary(leading);
  return UnitaryMatrix(realify(q.adjoint()));
}

// Unitary correction after Psi_b: fixes the base point p and restores the
// horizontal differential to sqrt(W) times the identity.
UnitaryMatrix defrot_unitary(const MoebiusParam& b, const SpherePoint& p) {
  if (b.b().size() == 0 || b.norm() == 0.0) return identity_unitary(p.dim_n());
  const Eigen::Index h = p.vec().size() / 2;
  std::vector<Eigen::VectorXcd> source;
  source.push_back(to_complex(p.vec()));
  const Eigen::MatrixXcd frame = complete_unitary(source);

  const double inv_root_w = 1.0 / std::sqrt(weight(b, p));
  Eigen::MatrixXcd moved(h, h);
  moved.col(0) = to_complex(apply_psi_b(b, p).vec());
  for (Eigen::Index c = 1; c < h; ++c) {
    const AmbientVector e = to_real(frame.col(c));
    moved.col(c) = to_complex(inv_root_w * psi_differential(b, p, e));
  }
  const Eigen::MatrixXcd v = polish_unitary(frame * polish_unitary(moved).adjoint());
  return UnitaryMatrix(realify(v));
}

}  // namespace

std::pair<std::vector<AutStage>, NormalizationReport> normalize_at_point(
    const ImmersionChart& chart, const Eigen::VectorXd& u) {
  const int n = chart.n();
  const int dim = chart.ambient_dim();
  const double m = static_cast<double>(chart.m());
  const MoebiusParam zero(AmbientVector::Zero(dim));

  std::vector<AutStage> stages;
  NormalizationReport report;

  auto record = [&](const ImmersionChart& current) {
    const FundamentalData data = fundamental_data(current, u);
    report.h_hat_norm.push_back(data.h_hat.norm());
    report.h_norm.push_back(data.mean_curv.norm());
    report.div_j_h_n.push_back(std::abs(div_j_h_normal(current, u)));
  };

  // Alignment: p to e_1, T(p) to e_{n+2}, tangent frame onto coordinate lines.
  FundamentalData data = fundamental_data(chart, u);
  const UnitaryMatrix align = alignment_unitary(data.point, data.frame);
  ImmersionChart current = compose(chart, align);
  stages.push_back(AutStage{align, zero});
  record(current);

  const SpherePoint base(current.map(u));

  // Stage 1 removes H^Nhat(p).
  data = fundamental_data(current, u);
  AmbientVector hhat = data.h_hat;
  double nu2 = hhat.squaredNorm();
  if (nu2 > 1e-26) {
    const double alpha = -nu2 / (m * m + nu2);
    const double beta = -m / (m * m + nu2);
    const MoebiusParam b1(alpha * base.vec() + beta * hhat);
    const UnitaryMatrix v1 = defrot_unitary(b1, base);
    current = compose(compose(current, b1), v1);
    stages.push_back(AutStage{v1, b1});
  } else {
    stages.push_back(AutStage{identity_unitary(n), zero});
  }
  record(current);

  // Stage 2 removes H(p); b along span{X(p), H} keeps H^Nhat(p) dead because
  // H now lies in J(T Sigma) and S_b(p) stays tangent-plus-normal consistent.
  data = fundamental_data(current, u);
  AmbientVector hvec = data.mean_curv;
  double eta2 = hvec.squaredNorm();
  if (eta2 > 1e-26) {
    const double denom = (m + 2.0) * (m + 2.0) + eta2;
    const double alpha = -eta2 / denom;
    const double beta = -(m + 2.0) / denom;
    const MoebiusParam b2(alpha * base.vec() + beta * hvec);
    const UnitaryMatrix v2 = defrot_unitary(b2, base);
    current = compose(compose(current, b2), v2);
    stages.push_back(AutStage{v2, b2});
  } else {
    stages.push_back(AutStage{identity_unitary(n), zero});
  }
  record(current);

  // Stage 3 removes div J(H^N)(p); b in span{X(p), T(p)} gives S_b(p) = 0 so
  // the curvatures stay zero while the divergence shifts.
  const double gamma = div_j_h_normal(current, u);
  if (std::abs(gamma) > 1e-13) {
    const double denom = gamma * gamma + m * m * (m + 2.0) * (m + 2.0);
    const double b1c = -gamma * gamma / denom;
    const double bt = m * (m + 2.0) * gamma / denom;
    const ContactData contact = contact_at(base);
    const MoebiusParam b3(b1c * base.vec() + bt * contact.reeb);
    const UnitaryMatrix v3 = defrot_unitary(b3, base);
    current = compose(compose(current, b3), v3);
    stages.push_back(AutStage{v3, b3});
  } else {
    stages.push_back(AutStage{identity_unitary(n), zero});
  }
  record(current);

  return {std::move(stages), std::move(report)};
}

ImmersionChart apply_stages(const ImmersionChart& chart, const std::vector<AutStage>& stages) {
  ImmersionChart current = chart;
  for (const AutStage& stage : stages) {
    current = compose(compose(current, stage.moebius), stage.unitary);
  }
  return current;
}

}  // namespace crlab
