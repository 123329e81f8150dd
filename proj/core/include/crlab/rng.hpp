#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace crlab {

// Deterministic sampling on top of mt19937_64. Gaussians use Box-Muller
// directly so streams are identical across standard libraries
// (std::normal_distribution is implementation defined).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  // Uniform direction on S^{dim-1}.
  Eigen::VectorXd unit_vector(int dim) {
    Eigen::VectorXd v = normal_vector(dim);
    double norm = v.norm();
    while (norm < 1e-12) {
      v = normal_vector(dim);
      norm = v.norm();
    }
    return v / norm;
  }

  // Uniform point of the closed ball of the given radius.
  Eigen::VectorXd ball_point(int dim, double radius) {
    Eigen::VectorXd dir = unit_vector(dim);
    double r = radius * std::pow(uniform(), 1.0 / dim);
    return r * dir;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace crlab
