#pragma once

#include <complex>

#include <Eigen/Dense>

namespace crlab {

// Points and tangent vectors of R^{2n+2}, coordinate order (x_1..x_{n+1}, y_1..y_{n+1}).
// The complex identification is z_j = x_j + i y_j; all vector arithmetic stays real.
using AmbientVector = Eigen::VectorXd;

// Recovers n for a vector living in R^{2n+2}. Throws std::invalid_argument when the
// size is odd or smaller than 4 (n >= 1 is required).
int ambient_n(const AmbientVector& v);

// The ambient complex structure acting by (x, y) -> (y, -x), i.e. J(d/dx_j) = -d/dy_j.
// Orthogonal, J∘J = -id; equals multiplication by -i on z = x + iy.
AmbientVector apply_complex_structure(const AmbientVector& v);

// Hermitian pairing conj(u).v emulated on the real coordinates:
// cdot(u, v) = <u, v> + i <u, Jv>.
std::complex<double> cdot(const AmbientVector& u, const AmbientVector& v);

// Componentwise complex scaling a * z of z = x + iy:
// cscale(a, (x, y)) = (Re(a) x - Im(a) y, Re(a) y + Im(a) x).
AmbientVector cscale(std::complex<double> a, const AmbientVector& v);

// A point of S^{2n+1}. Construction enforces | |v| - 1 | <= 1e-12.
class SpherePoint {
 public:
  SpherePoint() = default;
  explicit SpherePoint(AmbientVector v);

  const AmbientVector& vec() const { return vec_; }
  int dim_n() const { return n_; }

 private:
  AmbientVector vec_;
  int n_ = 0;
};

// Contact data of S^{2n+1} at a point: the Reeb vector T(p) = -J(p) and the
// contact form theta_p(v) = <v, T(p)>. theta(reeb) = 1 and <reeb, p> = 0.
struct ContactData {
  AmbientVector reeb;

  double theta(const AmbientVector& v) const { return reeb.dot(v); }
};

ContactData contact_at(const SpherePoint& p);

// v minus its components along p and along T(p). The result lies in the
// horizontal distribution H_p = ker theta_p intersected with T_p S^{2n+1}:
// theta(result) = 0 and <result, p> = 0. Idempotent and self adjoint.
AmbientVector horizontal_project(const SpherePoint& p, const AmbientVector& v);

}  // namespace crlab
