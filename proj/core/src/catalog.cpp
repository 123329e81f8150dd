#include "crlab/catalog.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

#include "crlab/moebius.hpp"

namespace crlab {

namespace {

// Jet of the recursive spherical parameterization of S^k in R^{k+1}:
// phi_1(a) = (cos a, sin a), phi_k(a, rest) = (cos a, sin a * phi_{k-1}(rest)).
struct SmallJet {
  Eigen::VectorXd value;
  std::vector<Eigen::VectorXd> first;
  std::vector<Eigen::VectorXd> second;
};

SmallJet sphere_param_jet(const Eigen::VectorXd& angles, int offset, int k) {
  SmallJet jet;
  if (k == 1) {
    const double c = std::cos(angles[offset]);
    const double s = std::sin(angles[offset]);
    jet.value = Eigen::Vector2d(c, s);
    jet.first = {Eigen::Vector2d(-s, c)};
    jet.second = {Eigen::Vector2d(-c, -s)};
    return jet;
  }
  const SmallJet inner = sphere_param_jet(angles, offset + 1, k - 1);
  const double c = std::cos(angles[offset]);
  const double s = std::sin(angles[offset]);
  const int dim = k + 1;

  auto lift = [dim](double head, const Eigen::VectorXd& tail) {
    Eigen::VectorXd v(dim);
    v[0] = head;
    v.tail(dim - 1) = tail;
    return v;
  };

  jet.value = lift(c, s * inner.value);
  jet.first.resize(static_cast<std::size_t>(k));
  jet.first[0] = lift(-s, c * inner.value);
  for (int i = 1; i < k; ++i) {
    jet.first[static_cast<std::size_t>(i)] =
        lift(0.0, s * inner.first[static_cast<std::size_t>(i - 1)]);
  }
  jet.second.resize(static_cast<std::size_t>(k * (k + 1) / 2));
  jet.second[static_cast<std::size_t>(sym_index(0, 0, k))] = -jet.value;
  for (int i = 1; i < k; ++i) {
    jet.second[static_cast<std::size_t>(sym_index(0, i, k))] =
        lift(0.0, c * inner.first[static_cast<std::size_t>(i - 1)]);
  }
  for (int i = 1; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      jet.second[static_cast<std::size_t>(sym_index(i, j, k))] =
          lift(0.0, s * inner.second[static_cast<std::size_t>(sym_index(i - 1, j - 1, k - 1))]);
    }
  }
  return jet;
}

Eigen::VectorXd sphere_param_value(const Eigen::VectorXd& angles, int k) {
  Eigen::VectorXd w(2);
  w << std::cos(angles[k - 1]), std::sin(angles[k - 1]);
  for (int i = k - 2; i >= 0; --i) {
    Eigen::VectorXd lifted(w.size() + 1);
    lifted[0] = std::cos(angles[i]);
    lifted.tail(w.size()) = std::sin(angles[i]) * w;
    w = std::move(lifted);
  }
  return w;
}

// Totally geodesic S^m inside the real slice {y = 0}: horizontal because the
// Reeb field along the real slice is purely imaginary.
ImmersionChart geodesic_sphere(int m, int n) {
  const int dim = 2 * n + 2;
  std::vector<AxisDomain> domain;
  for (int i = 0; i < m - 1; ++i) domain.push_back(AxisDomain{0.0, M_PI, false});
  domain.push_back(AxisDomain{0.0, 2.0 * M_PI, true});

  auto embed = [dim](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    out.head(v.size()) = v;
    return out;
  };
  ImmersionChart::MapFn map = [m, dim, embed](const Eigen::VectorXd& u) {
    return embed(sphere_param_value(u, m));
  };
  ImmersionChart::JetFn jets = [m, dim, embed](const Eigen::VectorXd& u) {
    const SmallJet small = sphere_param_jet(u, 0, m);
    Jet jet;
    jet.value = embed(small.value);
    jet.first.reserve(small.first.size());
    jet.second.reserve(small.second.size());
    for (const Eigen::VectorXd& d : small.first) jet.first.push_back(embed(d));
    for (const Eigen::VectorXd& d : small.second) jet.second.push_back(embed(d));
    return jet;
  };
  return ImmersionChart(m, n, std::move(domain), std::move(map), std::move(jets));
}

// Flat minimal Legendrian torus in S^5: z_j = exp(2 pi i theta_j)/sqrt(3) with
// theta_1 = u, theta_2 = s, theta_3 = -(s + u) on lattice coordinates (s, u).
ImmersionChart hexagonal_torus() {
  const double root3 = std::sqrt(3.0);
  // Angle derivatives d theta_j / d(s, u).
  static const double dtheta[3][2] = {{0.0, 1.0}, {1.0, 0.0}, {-1.0, -1.0}};

  auto angles_at = [](const Eigen::VectorXd& u) {
    Eigen::Vector3d theta;
    theta << u[1], u[0], -(u[0] + u[1]);
    return theta;
  };
  ImmersionChart::MapFn map = [root3, angles_at](const Eigen::VectorXd& u) {
    const Eigen::Vector3d theta = 2.0 * M_PI * angles_at(u);
    Eigen::VectorXd out(6);
    for (int j = 0; j < 3; ++j) {
      out[j] = std::cos(theta[j]) / root3;
      out[3 + j] = std::sin(theta[j]) / root3;
    }
    return out;
  };
  ImmersionChart::JetFn jets = [root3, angles_at](const Eigen::VectorXd& u) {
    const Eigen::Vector3d theta = 2.0 * M_PI * angles_at(u);
    Jet jet;
    jet.value.resize(6);
    jet.first.assign(2, Eigen::VectorXd::Zero(6));
    jet.second.assign(3, Eigen::VectorXd::Zero(6));
    for (int j = 0; j < 3; ++j) {
      const double c = std::cos(theta[j]) / root3;
      const double s = std::sin(theta[j]) / root3;
      jet.value[j] = c;
      jet.value[3 + j] = s;
      for (int a = 0; a < 2; ++a) {
        const double da = 2.0 * M_PI * dtheta[j][a];
        jet.first[static_cast<std::size_t>(a)][j] = -s * da;
        jet.first[static_cast<std::size_t>(a)][3 + j] = c * da;
        for (int b = a; b < 2; ++b) {
          const double db = 2.0 * M_PI * dtheta[j][b];
          jet.second[static_cast<std::size_t>(sym_index(a, b, 2))][j] = -c * da * db;
          jet.second[static_cast<std::size_t>(sym_index(a, b, 2))][3 + j] = -s * da * db;
        }
      }
    }
    return jet;
  };
  std::vector<AxisDomain> domain{AxisDomain{0.0, 1.0, true}, AxisDomain{0.0, 1.0, true}};
  return ImmersionChart(2, 2, std::move(domain), std::move(map), std::move(jets));
}

// Reparameterization (s, u) -> (s + amp sin(2 pi k u)/(2 pi k), u) composed
// with the base chart, jets by the chain rule.
ImmersionChart reparam_shear(const ImmersionChart& base, double amplitude, int mode) {
  auto shared = std::make_shared<const ImmersionChart>(base);
  const double amp = amplitude;
  const double freq = 2.0 * M_PI * mode;

  auto warp = [amp, freq](const Eigen::VectorXd& u) {
    Eigen::VectorXd r = u;
    r[0] += amp * std::sin(freq * u[1]) / freq;
    return r;
  };
  ImmersionChart::MapFn map = [shared, warp](const Eigen::VectorXd& u) {
    return shared->map_unchecked(warp(u));
  };
  ImmersionChart::JetFn jets = [shared, warp, amp, freq](const Eigen::VectorXd& u) {
    const Jet inner = evaluate_jet(*shared, warp(u));
    // dr = [[1, amp cos(freq u1)], [0, 1]], d2r0/du1^2 = -amp freq sin(freq u1).
    const double shear = amp * std::cos(freq * u[1]);
    const double curl = -amp * freq * std::sin(freq * u[1]);
    Jet jet;
    jet.value = inner.value;
    jet.first.resize(2);
    jet.first[0] = inner.d1(0);
    jet.first[1] = inner.d1(0) * shear + inner.d1(1);
    jet.second.resize(3);
    jet.second[static_cast<std::size_t>(sym_index(0, 0, 2))] = inner.d2(0, 0);
    jet.second[static_cast<std::size_t>(sym_index(0, 1, 2))] =
        inner.d2(0, 0) * shear + inner.d2(0, 1);
    jet.second[static_cast<std::size_t>(sym_index(1, 1, 2))] =
        inner.d2(0, 0) * shear * shear + 2.0 * inner.d2(0, 1) * shear + inner.d2(1, 1) +
        inner.d1(0) * curl;
    return jet;
  };
  return ImmersionChart(base.m(), base.n(), base.domain(), std::move(map), std::move(jets));
}

AmbientVector perturbation_direction() {
  AmbientVector dir(6);
  dir << 1.0, -1.0, 2.0, 0.0, 1.0, 1.0;
  return dir / dir.norm();
}

}  // namespace

ImmersionChart make_chart(const std::string& name, const ChartParams& params) {
  if (name == "geodesic_sphere" || name == "horizontal_circle") {
    const int m = name == "horizontal_circle" ? 1 : params.m;
    const int n = params.n;
    if (m < 1 || m > n) throw std::invalid_argument("geodesic sphere requires 1 <= m <= n");
    return geodesic_sphere(m, n);
  }
  if (name == "whitney_sphere") {
    const int m = params.m, n = params.n;
    if (m < 1 || m > n) throw std::invalid_argument("whitney sphere requires 1 <= m <= n");
    ImmersionChart base = geodesic_sphere(m, n);
    if (params.b.size() == 0) return base;
    if (params.b.size() != 2 * n + 2) {
      throw std::invalid_argument("whitney sphere Moebius parameter must live in R^{2n+2}");
    }
    return compose(base, MoebiusParam(params.b));
  }
  if (name == "hexagonal_torus") {
    return hexagonal_torus();
  }
  if (name == "perturbed_torus") {
    if (params.amplitude < 0.0 || params.amplitude > 0.8) {
      throw std::invalid_argument("perturbed torus amplitude must lie in [0, 0.8]");
    }
    if (params.mode < 1) throw std::invalid_argument("perturbed torus mode must be >= 1");
    ImmersionChart base = hexagonal_torus();
    if (params.amplitude == 0.0) return base;
    ImmersionChart warped = reparam_shear(base, params.amplitude, params.mode);
    return compose(warped, MoebiusParam(params.amplitude * perturbation_direction()));
  }
  throw std::invalid_argument("unknown chart name: " + name);
}

std::vector<CatalogEntry> catalog_entries() {
  std::vector<CatalogEntry> entries;
  const double pi = M_PI;

  {
    CatalogEntry e;
    e.name = "geodesic_sphere";
    e.description = "totally geodesic S^2 in S^5";
    e.params.m = 2;
    e.params.n = 2;
    e.resolution = 48;
    e.genus = 0;
    e.expected = {{"volume", 4.0 * pi, 1e-8},
                  {"w_cr", 4.0 * pi, 1e-8},
                  {"u_cr", 0.0, 1e-10},
                  {"b_cr", 0.0, 1e-10}};
    entries.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.name = "whitney_sphere";
    e.description = "Moebius image of the geodesic S^2, parameter 0.4 e_4";
    e.params.m = 2;
    e.params.n = 2;
    e.params.b = Eigen::VectorXd::Zero(6);
    e.params.b[3] = 0.4;
    e.resolution = 64;
    e.genus = 0;
    const double beta = 0.4;
    const double area = 4.0 * pi * (1.0 - beta * beta) * std::atan(beta) / beta;
    e.expected = {{"volume", area, 1e-6},
                  {"w_cr", 4.0 * pi, 1e-5},
                  {"u_cr", 0.0, 1e-8},
                  {"b_cr", 0.0, 1e-8}};
    entries.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.name = "hexagonal_torus";
    e.description = "flat minimal Legendrian torus in S^5";
    e.params.m = 2;
    e.params.n = 2;
    e.resolution = 48;
    e.genus = 1;
    const double volume = 4.0 * std::sqrt(3.0) * pi * pi / 3.0;
    e.expected = {{"volume", volume, 1e-8},
                  {"w_cr", volume, 1e-6},
                  {"u_cr", volume, 1e-6},
                  {"b_cr", 0.0, 1e-10}};
    entries.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.name = "horizontal_circle";
    e.description = "great circle in the x1 x2 plane of S^5";
    e.params.m = 1;
    e.params.n = 2;
    e.resolution = 64;
    e.expected = {{"volume", 2.0 * pi, 1e-10}, {"u_cr", 0.0, 1e-10}};
    entries.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.name = "perturbed_torus";
    e.description = "sheared and Moebius-pushed hexagonal torus";
    e.params.m = 2;
    e.params.n = 2;
    e.params.amplitude = 0.15;
    e.params.mode = 2;
    e.resolution = 48;
    e.genus = 1;
    entries.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.name = "geodesic_sphere";
    e.description = "totally geodesic Legendrian S^3 in S^7";
    e.params.m = 3;
    e.params.n = 3;
    e.resolution = 24;
    e.expected = {{"volume", 2.0 * pi * pi, 1e-6}, {"u_cr", 0.0, 1e-8}};
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace crlab
