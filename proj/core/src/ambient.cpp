#include "crlab/ambient.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crlab {

int ambient_n(const AmbientVector& v) {
  const Eigen::Index size = v.size();
  if (size < 4 || size % 2 != 0) {
    throw std::invalid_argument("ambient vector must live in R^{2n+2} with n >= 1, got size " +
                                std::to_string(size));
  }
  return static_cast<int>(size / 2 - 1);
}

AmbientVector apply_complex_structure(const AmbientVector& v) {
  ambient_n(v);
  const Eigen::Index h = v.size() / 2;
  AmbientVector out(v.size());
  out.head(h) = v.tail(h);
  out.tail(h) = -v.head(h);
  return out;
}

std::complex<double> cdot(const AmbientVector& u, const AmbientVector& v) {
  ambient_n(u);
  if (u.size() != v.size()) {
    throw std::invalid_argument("cdot arguments must share a dimension");
  }
  const Eigen::Index h = u.size() / 2;
  const double re = u.dot(v);
  // <u, Jv> with Jv = (v_y, -v_x).
  const double im = u.head(h).dot(v.tail(h)) - u.tail(h).dot(v.head(h));
  return {re, im};
}

AmbientVector cscale(std::complex<double> a, const AmbientVector& v) {
  ambient_n(v);
  const Eigen::Index h = v.size() / 2;
  AmbientVector out(v.size());
  out.head(h) = a.real() * v.head(h) - a.imag() * v.tail(h);
  out.tail(h) = a.real() * v.tail(h) + a.imag() * v.head(h);
  return out;
}

SpherePoint::SpherePoint(AmbientVector v) : n_(ambient_n(v)) {
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("sphere point norm deviates from 1 by " +
                                std::to_string(std::abs(norm - 1.0)));
  }
  vec_ = std::move(v);
}

ContactData contact_at(const SpherePoint& p) {
  // T(p) = -J(p); with p = e_1 this is e_{n+2}.
  return ContactData{-apply_complex_structure(p.vec())};
}

AmbientVector horizontal_project(const SpherePoint& p, const AmbientVector& v) {
  if (v.size() != p.vec().size()) {
    throw std::invalid_argument("horizontal_project arguments must share a dimension");
  }
  const ContactData contact = contact_at(p);
  return v - p.vec().dot(v) * p.vec() - contact.theta(v) * contact.reeb;
}

}  // namespace crlab
