#pragma once

#include <string>
#include <vector>

#include "crlab/ambient.hpp"
#include "crlab/chart.hpp"

namespace crlab {

// Construction parameters shared by the named charts. Unused fields are
// ignored by charts that do not consume them.
struct ChartParams {
  int m = 2;
  int n = 2;
  AmbientVector b;          // Moebius decoration; empty or zero means none
  double amplitude = 0.0;   // perturbed torus
  int mode = 1;             // perturbed torus reparameterization frequency
};

// Named horizontal charts:
//   geodesic_sphere    totally geodesic S^m in the real slice, 1 <= m <= n;
//                      spherical coordinates, last axis periodic
//   whitney_sphere     Psi_b composed with the geodesic sphere, analytic jets
//   hexagonal_torus    minimal Legendrian torus in S^5, lattice coordinates
//                      on [0,1)^2, both axes periodic
//   horizontal_circle  great circle in the x_1 x_2 plane, m = 1
//   perturbed_torus    hexagonal torus reparameterized and pushed by a small
//                      Moebius map; amplitude 0 returns the hexagonal torus
ImmersionChart make_chart(const std::string& name, const ChartParams& params = {});

// One pinned reference value with its comparison tolerance.
struct ExpectedValue {
  std::string quantity;  // "volume", "w_cr", "u_cr", "b_cr"
  double value = 0.0;
  double tol = 0.0;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  ChartParams params;
  int resolution = 48;  // per-axis default adequate for the expected values
  int genus = 0;
  std::vector<ExpectedValue> expected;
};

// Every named chart with canonical parameters and its reference invariants.
std::vector<CatalogEntry> catalog_entries();

}  // namespace crlab
