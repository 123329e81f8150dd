#include "crlab/catalog.hpp"
#include "crlab/functionals.hpp"
#include "crlab/moebius.hpp"
#include "crlab/quadrature.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

namespace {

using crlab::AmbientVector;
using crlab::MoebiusParam;

AmbientVector axis(int dim, int k, double scale) {
  AmbientVector v = AmbientVector::Zero(dim);
  v[k] = scale;
  return v;
}

crlab::ImmersionChart whitney(double beta, int k) {
  crlab::ChartParams params;
  params.b = axis(6, k, beta);
  return crlab::make_chart("whitney_sphere", params);
}

}  // namespace

TEST_CASE("energies of the geodesic sphere") {
  const crlab::ImmersionChart chart = crlab::make_chart("geodesic_sphere");
  const crlab::EnergyReport report = crlab::energies(chart, crlab::build_grid(chart, 48), 0);
  CHECK(report.volume == doctest::Approx(4.0 * M_PI).epsilon(1e-10));
  CHECK(report.w_cr == doctest::Approx(4.0 * M_PI).epsilon(1e-10));
  CHECK(report.w_classical == doctest::Approx(4.0 * M_PI).epsilon(1e-10));
  CHECK(std::abs(report.u_cr) <= 1e-10);
  CHECK(std::abs(report.b_cr) <= 1e-10);
  CHECK(std::abs(report.gauss_bonnet_residual) <= 1e-9);
}

TEST_CASE("energies of the hexagonal torus") {
  const crlab::ImmersionChart chart = crlab::make_chart("hexagonal_torus");
  const crlab::EnergyReport report = crlab::energies(chart, crlab::build_grid(chart, 32), 1);
  const double volume = 4.0 * std::sqrt(3.0) * M_PI * M_PI / 3.0;
  CHECK(report.volume == doctest::Approx(volume).epsilon(1e-12));
  // Minimal with |H| = 0 and |U|^2 = 2: w_cr = volume and u_cr = volume.
  CHECK(report.w_cr == doctest::Approx(volume).epsilon(1e-12));
  CHECK(report.u_cr == doctest::Approx(volume).epsilon(1e-10));
  CHECK(std::abs(report.b_cr) <= 1e-12);
  // Genus one: the Euler term vanishes, so the residual is w_cr - u_cr.
  CHECK(std::abs(report.gauss_bonnet_residual) <= 1e-10);
}

TEST_CASE("energies of the pushed sphere keep the conformal invariants") {
  const crlab::ImmersionChart chart = whitney(0.4, 3);
  const crlab::EnergyReport report = crlab::energies(chart, crlab::build_grid(chart, 64), 0);
  const double area = 4.0 * M_PI * 0.84 * std::atan(0.4) / 0.4;
  CHECK(report.volume == doctest::Approx(area).epsilon(1e-8));
  CHECK(report.w_cr == doctest::Approx(4.0 * M_PI).epsilon(1e-7));
  CHECK(std::abs(report.u_cr) <= 1e-8);
  CHECK(std::abs(report.b_cr) <= 1e-8);
  CHECK(std::abs(report.gauss_bonnet_residual) <= 1e-6);
  CHECK(report.w_classical >= report.w_cr);
  CHECK(report.w_cr >= report.volume);
}

TEST_CASE("energies in higher dimension expose only the conformal terms") {
  crlab::ChartParams params;
  params.m = 3;
  params.n = 3;
  const crlab::ImmersionChart chart = crlab::make_chart("geodesic_sphere", params);
  const crlab::EnergyReport report = crlab::energies(chart, crlab::build_grid(chart, 20), 0);
  CHECK(report.volume == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-8));
  CHECK(std::abs(report.u_cr) <= 1e-9);
  CHECK(std::isnan(report.w_cr));
  CHECK(std::isnan(report.gauss_bonnet_residual));
}

TEST_CASE("curvature energies are invariant under sphere automorphisms") {
  const crlab::ImmersionChart hex = crlab::make_chart("hexagonal_torus");
  const crlab::EnergyReport base = crlab::energies(hex, crlab::build_grid(hex, 48), 1);

  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 2; ++rep) {
    AmbientVector b(6);
    for (int i = 0; i < 6; ++i) b[i] = gauss(rng);
    b *= 0.55 / b.norm();
    const crlab::ImmersionChart moved =
        crlab::compose(crlab::compose(hex, MoebiusParam(b)), crlab::random_unitary(2, 500 + rep));
    const crlab::EnergyReport report = crlab::energies(moved, crlab::build_grid(moved, 48), 1);
    CHECK(report.w_cr == doctest::Approx(base.w_cr).epsilon(1e-7));
    CHECK(report.u_cr == doctest::Approx(base.u_cr).epsilon(1e-7));
    CHECK(std::abs(report.b_cr - base.b_cr) <= 1e-7);
    // The raw volume is not invariant; the weight redistributes it.
    CHECK(report.volume < base.volume);
  }
}

TEST_CASE("cr volume of the geodesic sphere is its area, attained at b = 0") {
  const crlab::ImmersionChart chart = crlab::make_chart("geodesic_sphere");
  const crlab::QuadratureGrid grid = crlab::build_grid(chart, 24);
  const crlab::CrVolumeResult result = crlab::cr_volume(chart, grid);
  CHECK(result.value == doctest::Approx(4.0 * M_PI).epsilon(1e-6));
  CHECK(result.argmax.norm() <= 1e-3);
  CHECK(result.attained);
  CHECK(result.starts >= 9);
  CHECK(result.evaluations > 0);

  const crlab::CrVolumeResult again = crlab::cr_volume(chart, grid);
  CHECK(again.value == result.value);
  CHECK((again.argmax - result.argmax).norm() == 0.0);
}

TEST_CASE("cr volume undoes a Moebius push") {
  const crlab::ImmersionChart chart = whitney(0.4, 3);
  const crlab::QuadratureGrid grid = crlab::build_grid(chart, 48);
  const crlab::CrVolumeResult result = crlab::cr_volume(chart, grid);
  CHECK(std::abs(result.value - 4.0 * M_PI) <= 1e-3);
  CHECK(result.attained);
}

TEST_CASE("balance point satisfies its defining equation") {
  const crlab::ImmersionChart chart = whitney(0.4, 3);
  const crlab::QuadratureGrid grid = crlab::build_grid(chart, 32);
  const crlab::BalanceResult result = crlab::balance_point(chart, grid);
  REQUIRE(result.converged);
  CHECK(result.residual <= 1e-8);

  // Independent recomputation of the center of mass at the reported parameter.
  const crlab::VolumeTable table = crlab::build_volume_table(chart, grid);
  AmbientVector sum = AmbientVector::Zero(6);
  const MoebiusParam b{result.b};
  for (long k = 0; k < table.points.rows(); ++k) {
    const crlab::SpherePoint z{AmbientVector(table.points.row(k).transpose())};
    sum += table.darea[k] * crlab::apply_psi_b(b, z).vec();
  }
  CHECK((sum / table.total()).norm() <= 1e-8);
}

TEST_CASE("balance point of a symmetric chart is zero") {
  const crlab::ImmersionChart chart = crlab::make_chart("geodesic_sphere");
  const crlab::BalanceResult result = crlab::balance_point(chart, crlab::build_grid(chart, 24));
  CHECK(result.converged);
  CHECK(result.b.norm() <= 1e-8);
}

TEST_CASE("first torus eigenvalue from the dual lattice") {
  // Square torus of side 2 pi: lambda_1 = 1.
  CHECK(crlab::lambda1_flat_torus(Eigen::Vector2d(2.0 * M_PI, 0.0),
                                  Eigen::Vector2d(0.0, 2.0 * M_PI)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // Hexagonal lattice scaled so the flat torus has lambda_1 = 2.
  const double ell = 2.0 * M_PI * std::sqrt(2.0 / 3.0);
  const Eigen::Vector2d v1(ell, 0.0);
  const Eigen::Vector2d v2(ell / 2.0, ell * std::sqrt(3.0) / 2.0);
  const double lambda1 = crlab::lambda1_flat_torus(v1, v2);
  CHECK(std::abs(lambda1 - 2.0) <= 1e-10);

  // Basis independence and reduction of a skew basis.
  CHECK(crlab::lambda1_flat_torus(v1, v1 + v2) == doctest::Approx(lambda1).epsilon(1e-12));
  CHECK(crlab::lambda1_flat_torus(v1 + 2 * v2, v2) == doctest::Approx(lambda1).epsilon(1e-12));

  const double area = std::abs(v1[0] * v2[1] - v1[1] * v2[0]);
  CHECK(0.5 * lambda1 * area ==
        doctest::Approx(4.0 * std::sqrt(3.0) * M_PI * M_PI / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)crlab::lambda1_flat_torus(v1, 2.0 * v1), std::invalid_argument);
}

TEST_CASE("dilated volume: identity at lambda = 1 and inversion symmetry") {
  const crlab::ImmersionChart chart = whitney(0.4, 3);
  const crlab::VolumeTable table = crlab::build_volume_table(chart, crlab::build_grid(chart, 32));
  const AmbientVector q = axis(6, 3, 1.0);

  CHECK(crlab::dilated_volume(table, 1.0, q) == doctest::Approx(table.total()).epsilon(1e-13));
  for (double lambda : {0.4, 0.7, 1.9}) {
    CHECK(crlab::dilated_volume(table, lambda, q) ==
          doctest::Approx(crlab::dilated_volume(table, 1.0 / lambda, AmbientVector(-q)))
              .epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)crlab::dilated_volume(table, -1.0, q), std::invalid_argument);
  CHECK_THROWS_AS((void)crlab::dilated_volume(table, 1.0, AmbientVector(2.0 * q)),
                  std::invalid_argument);
}

TEST_CASE("dilation scan finds the volume excess of the pushed sphere") {
  const crlab::ImmersionChart chart = whitney(0.4, 3);
  const crlab::VolumeTable table = crlab::build_volume_table(chart, crlab::build_grid(chart, 48));
  const crlab::DilationScanResult scan = crlab::dilation_scan(table, axis(6, 3, 1.0));
  CHECK(scan.max_value >= 4.0 * M_PI + 1e-3);
  CHECK(scan.argmax_lambda > 0.0);
  // The scan covers both signs; the maximizing family member is off lambda = 1.
  CHECK(std::abs(scan.argmax_lambda - 1.0) > 1e-3);
}
