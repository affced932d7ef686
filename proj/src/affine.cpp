#include "aniso/affine.hpp"

#include <cmath>
#include <stdexcept>

namespace aniso {

void AffineModel::validate() const {
  if (!(lambda1 > 0.0))
    throw std::invalid_argument("affine model: lambda1 must be > 0");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("affine model: lambda must be in (0, 1]");
  if (std::abs(vstar.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("affine model: vstar must be a unit vector");
}

Eigen::Matrix2d AffineModel::P() const {
  const double c = std::cos(basis_angle), s = std::sin(basis_angle);
  Eigen::Matrix2d p;
  p << c, -s, s, c;
  return p;
}

Eigen::Matrix2d AffineModel::Lambda() const {
  Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
  d(0, 0) = lambda1;
  d(1, 1) = lambda2();
  return d;
}

Eigen::Matrix2d AffineModel::A() const {
  const Eigen::Matrix2d p = P();
  return p * Lambda() * p.transpose();
}

Eigen::Vector2d AffineModel::vstarstar() const {
  return {-vstar.y(), vstar.x()};
}

double AffineModel::theta_o() const {
  const Eigen::Vector2d w = P().transpose() * vstar;
  double theta = std::atan2(w.y(), w.x());
  if (theta <= -M_PI / 2.0) theta += M_PI;
  if (theta > M_PI / 2.0) theta -= M_PI;
  return theta;
}

Eigen::Matrix2d AffineModel::P_canonical() const {
  const Eigen::Matrix2d p = P();
  const Eigen::Vector2d w = p.transpose() * vstar;
  const double theta = std::atan2(w.y(), w.x());
  // Flipping both eigenvectors keeps A and keeps P a proper rotation.
  if (theta <= -M_PI / 2.0 || theta > M_PI / 2.0) return -p;
  return p;
}

Eigen::Vector2d AffineModel::omega_star() const {
  return P_canonical().transpose() * vstar;
}

AffineModel AffineModel::from_estimate(double lambda1, double lambda,
                                       double theta,
                                       const Eigen::Vector2d& vstar) {
  AffineModel m;
  m.lambda1 = lambda1;
  m.lambda = lambda;
  m.vstar = vstar;
  const Eigen::Vector2d vss{-vstar.y(), vstar.x()};
  const Eigen::Vector2d v1 =
      std::cos(theta) * vstar - std::sin(theta) * vss;
  m.basis_angle = std::atan2(v1.y(), v1.x());
  return m;
}

}  // namespace aniso
