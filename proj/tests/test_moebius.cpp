#include "crlab/catalog.hpp"
#include "crlab/immersion.hpp"
#include "crlab/moebius.hpp"
#include "crlab/quadrature.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

namespace {

using crlab::AmbientVector;
using crlab::MoebiusParam;
using crlab::SpherePoint;

AmbientVector unit_axis(int dim, int k) {
  AmbientVector v = AmbientVector::Zero(dim);
  v[k] = 1.0;
  return v;
}

SpherePoint random_point(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  AmbientVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  return SpherePoint(v / v.norm());
}

AmbientVector random_ball(std::mt19937_64& rng, int dim, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, radius);
  AmbientVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  return unif(rng) * v / v.norm();
}

// Ambient extension of log W_b, smooth in z, for gradient finite differences.
double log_weight_formula(const AmbientVector& b, const AmbientVector& z) {
  const std::complex<double> w = crlab::cdot(b, z);
  const std::complex<double> d = 1.0 + w;
  return std::log(1.0 - b.squaredNorm()) - std::log(std::norm(d));
}

Eigen::VectorXd point2(double a, double b) {
  Eigen::VectorXd u(2);
  u << a, b;
  return u;
}

}  // namespace

TEST_CASE("Moebius parameters live in the open unit ball") {
  CHECK_NOTHROW(MoebiusParam{0.999 * unit_axis(6, 0)});
  CHECK_THROWS_AS(MoebiusParam{unit_axis(6, 0)}, std::domain_error);
  CHECK_THROWS_AS(MoebiusParam{1.2 * unit_axis(6, 2)}, std::domain_error);
  CHECK(MoebiusParam{0.5 * unit_axis(6, 1)}.norm() == doctest::Approx(0.5));
  CHECK(MoebiusParam{0.5 * unit_axis(6, 1)}.dim_n() == 2);
}

TEST_CASE("weight takes its closed values on the parameter axis") {
  const MoebiusParam b{0.5 * unit_axis(6, 0)};
  CHECK(crlab::weight(b, SpherePoint{unit_axis(6, 0)}) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(crlab::weight(b, SpherePoint{-unit_axis(6, 0)}) == doctest::Approx(3.0).epsilon(1e-14));
  // Orthogonal to b and to Jb: |1 + w|^2 = 1, weight = 1 - |b|^2.
  CHECK(crlab::weight(b, SpherePoint{unit_axis(6, 1)}) == doctest::Approx(0.75).epsilon(1e-14));

  const MoebiusParam zero{AmbientVector::Zero(6)};
  std::mt19937_64 rng(21);
  CHECK(crlab::weight(zero, random_point(rng, 6)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("the zero parameter acts as the identity") {
  const MoebiusParam zero{AmbientVector::Zero(6)};
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 4; ++rep) {
    const SpherePoint z = random_point(rng, 6);
    CHECK((crlab::apply_psi_b(zero, z).vec() - z.vec()).norm() <= 1e-15);
  }
}

TEST_CASE("the sphere automorphism fixes its axis point and inverts by -b") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 6; ++rep) {
    const AmbientVector bvec = random_ball(rng, 6, 0.8);
    const MoebiusParam b{bvec};
    const MoebiusParam back{AmbientVector(-bvec)};

    const SpherePoint axis{bvec / bvec.norm()};
    CHECK((crlab::apply_psi_b(b, axis).vec() - axis.vec()).norm() <= 1e-13);

    const SpherePoint z = random_point(rng, 6);
    const SpherePoint image = crlab::apply_psi_b(b, z);
    CHECK(image.vec().norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK((crlab::apply_psi_b(back, image).vec() - z.vec()).norm() <= 1e-12);

    // The conformal factors of a map and its inverse cancel.
    CHECK(crlab::weight(b, z) * crlab::weight(back, image) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("the closed-form differential matches finite differences") {
  std::mt19937_64 rng(24);
  for (int rep = 0; rep < 5; ++rep) {
    const MoebiusParam b{random_ball(rng, 6, 0.7)};
    const SpherePoint z = random_point(rng, 6);
    AmbientVector v(6);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 6; ++i) v[i] = gauss(rng);
    v = v - v.dot(z.vec()) * z.vec();  // tangent to the sphere at z

    const AmbientVector closed = crlab::psi_differential(b, z, v);
    const AmbientVector numeric = crlab::psi_differential_fd(b, z, v);
    CHECK((closed - numeric).norm() <= 1e-7 * std::max(1.0, closed.norm()));
  }
}

TEST_CASE("the weight gradient matches finite differences of the formula") {
  std::mt19937_64 rng(25);
  const AmbientVector bvec = random_ball(rng, 6, 0.7);
  const MoebiusParam b{bvec};
  const SpherePoint z = random_point(rng, 6);

  const AmbientVector grad = crlab::grad_log_weight(b, z);
  const double step = 1e-6;
  for (int i = 0; i < 6; ++i) {
    const AmbientVector e = unit_axis(6, i);
    const double fd = (log_weight_formula(bvec, z.vec() + step * e) -
                       log_weight_formula(bvec, z.vec() - step * e)) /
                      (2.0 * step);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
  }

  // S_b is horizontal at every point.
  const AmbientVector s = crlab::s_field(b, z);
  const crlab::ContactData contact = crlab::contact_at(z);
  CHECK(std::abs(s.dot(z.vec())) <= 1e-12);
  CHECK(std::abs(contact.theta(s)) <= 1e-12);
}

TEST_CASE("unitaries are orthogonal, complex linear and reproducible") {
  const crlab::UnitaryMatrix id = crlab::identity_unitary(2);
  CHECK(id.mat().isIdentity(1e-15));

  const crlab::UnitaryMatrix a = crlab::random_unitary(2, 777);
  const Eigen::MatrixXd& mat = a.mat();
  CHECK((mat.transpose() * mat - Eigen::MatrixXd::Identity(6, 6)).norm() <= 1e-12);

  // Commutes with J, i.e. the matrix is the realification of a complex unitary.
  std::mt19937_64 rng(26);
  std::normal_distribution<double> gauss(0.0, 1.0);
  AmbientVector v(6);
  for (int i = 0; i < 6; ++i) v[i] = gauss(rng);
  const AmbientVector a_jv = mat * crlab::apply_complex_structure(v);
  const AmbientVector j_av = crlab::apply_complex_structure(mat * v);
  CHECK((a_jv - j_av).norm() <= 1e-12);

  CHECK((crlab::random_unitary(2, 777).mat() - mat).norm() == 0.0);
  CHECK((crlab::random_unitary(2, 778).mat() - mat).norm() > 1e-3);

  CHECK_THROWS_AS(crlab::UnitaryMatrix{2.0 * Eigen::MatrixXd::Identity(6, 6)},
                  std::invalid_argument);
}

TEST_CASE("composing with a unitary is an isometry of every invariant") {
  const crlab::ImmersionChart hex = crlab::make_chart("hexagonal_torus");
  const crlab::UnitaryMatrix a = crlab::random_unitary(2, 4242);
  const crlab::ImmersionChart moved = crlab::compose(hex, a);

  const Eigen::VectorXd u = point2(0.71, 0.33);
  const crlab::FundamentalData before = crlab::fundamental_data(hex, u);
  const crlab::FundamentalData after = crlab::fundamental_data(moved, u);
  CHECK((before.metric - after.metric).norm() <= 1e-12);
  CHECK(after.mean_curv.norm() <= 1e-10);

  const crlab::QuadratureGrid grid = crlab::build_grid(hex, 16);
  CHECK(crlab::volume(moved, grid) == doctest::Approx(crlab::volume(hex, grid)).epsilon(1e-13));
}

TEST_CASE("composing with a Moebius map is conformal with factor W_b") {
  const crlab::ImmersionChart sphere = crlab::make_chart("geodesic_sphere");
  AmbientVector bvec = AmbientVector::Zero(6);
  bvec[2] = 0.35;
  bvec[4] = -0.25;
  const MoebiusParam b{bvec};
  const crlab::QuadratureGrid grid = crlab::build_grid(sphere, 12);
  CHECK(crlab::pullback_conformal_residual(b, sphere, grid) <= 1e-8);

  // Metric of the composed chart equals W_b times the original pointwise.
  const Eigen::VectorXd u = point2(1.0, 0.8);
  const crlab::FundamentalData before = crlab::fundamental_data(sphere, u);
  const crlab::FundamentalData after = crlab::fundamental_data(crlab::compose(sphere, b), u);
  const double w = crlab::weight(b, before.point);
  CHECK((after.metric - w * before.metric).norm() <= 1e-10 * w);
}

TEST_CASE("mean curvature transformation law") {
  std::mt19937_64 rng(27);
  const crlab::ImmersionChart hex = crlab::make_chart("hexagonal_torus");
  for (int rep = 0; rep < 5; ++rep) {
    const MoebiusParam b{random_ball(rng, 6, 0.6)};
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    const Eigen::VectorXd u = point2(unif(rng), unif(rng));

    const crlab::FundamentalData data = crlab::fundamental_data(hex, u);
    const crlab::FundamentalData moved = crlab::fundamental_data(crlab::compose(hex, b), u);
    const AmbientVector rhs = crlab::mean_curvature_transform_rhs(b, data);
    const AmbientVector pushed = crlab::psi_differential(b, data.point, rhs);
    CHECK((pushed - moved.mean_curv).norm() <= 1e-9 * std::max(1.0, moved.mean_curv.norm()));
  }
}

TEST_CASE("second fundamental form transformation law") {
  std::mt19937_64 rng(28);
  crlab::ChartParams params;
  params.b = Eigen::VectorXd::Zero(6);
  params.b[3] = 0.4;
  const crlab::ImmersionChart chart = crlab::make_chart("whitney_sphere", params);
  const MoebiusParam b{random_ball(rng, 6, 0.5)};
  const Eigen::VectorXd u = point2(1.3, 2.1);

  const crlab::FundamentalData data = crlab::fundamental_data(chart, u);
  const crlab::FundamentalData moved = crlab::fundamental_data(crlab::compose(chart, b), u);
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      const AmbientVector rhs = crlab::second_fund_transform_rhs(b, data, i, j);
      const AmbientVector pushed = crlab::psi_differential(b, data.point, rhs);
      const AmbientVector direct = moved.second_fund[static_cast<std::size_t>(
          crlab::sym_index(i, j, 2))];
      CHECK((pushed - direct).norm() <= 1e-8 * std::max(1.0, direct.norm()));
    }
  }
}

TEST_CASE("divergence transformation law") {
  std::mt19937_64 rng(29);
  crlab::ChartParams params;
  params.b = Eigen::VectorXd::Zero(6);
  params.b[0] = 0.3;
  const crlab::ImmersionChart chart = crlab::make_chart("whitney_sphere", params);
  const MoebiusParam b{random_ball(rng, 6, 0.5)};
  const Eigen::VectorXd u = point2(0.9, 1.6);

  const double rhs = crlab::div_transform_rhs(b, chart, u);
  const double direct = crlab::div_j_h_normal(crlab::compose(chart, b), u);
  CHECK(rhs == doctest::Approx(direct).epsilon(1e-5));
}

TEST_CASE("pointwise normalization kills curvatures stage by stage") {
  crlab::ChartParams params;
  params.b = Eigen::VectorXd::Zero(6);
  params.b[3] = 0.4;
  const crlab::ImmersionChart chart = crlab::make_chart("whitney_sphere", params);
  const Eigen::VectorXd u = point2(1.1, 0.9);

  const auto [stages, report] = crlab::normalize_at_point(chart, u);
  REQUIRE(stages.size() == 4);
  REQUIRE(report.h_norm.size() == 4);

  CHECK(report.h_hat_norm.back() <= 1e-8);
  CHECK(report.h_norm.back() <= 1e-8);
  CHECK(report.div_j_h_n.back() <= 1e-6);

  // The normalized chart sits at e_1 with the stated magnitudes actually dead.
  const crlab::ImmersionChart normalized = crlab::apply_stages(chart, stages);
  AmbientVector e1 = AmbientVector::Zero(6);
  e1[0] = 1.0;
  CHECK((normalized.map(u) - e1).norm() <= 1e-9);
  const crlab::FundamentalData final_data = crlab::fundamental_data(normalized, u);
  CHECK(final_data.mean_curv.norm() <= 1e-8);
}

TEST_CASE("normalization is idle on an already normalized chart") {
  const crlab::ImmersionChart hex = crlab::make_chart("hexagonal_torus");
  const auto [stages, report] = crlab::normalize_at_point(hex, point2(0.3, 0.4));
  REQUIRE(stages.size() == 4);
  for (std::size_t k = 1; k < stages.size(); ++k) {
    CHECK(stages[k].moebius.norm() <= 1e-10);
  }
  CHECK(report.h_norm.back() <= 1e-10);
}
