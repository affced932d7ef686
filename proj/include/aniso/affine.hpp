#pragma once

#include <Eigen/Dense>

namespace aniso {

// Deformation A = P Lambda P^t of the isotropic field: eigenvalues
// lambda1 >= lambda2 = lambda * lambda1 > 0, eigenbasis P = rotation by
// basis_angle, and a fixed reference direction vstar whose angle in the
// eigenbasis is theta_o in (-pi/2, pi/2].
struct AffineModel {
  double lambda1 = 1.0;
  double lambda = 1.0;  // eigenvalue ratio in (0, 1]
  double basis_angle = 0.0;
  Eigen::Vector2d vstar{1.0, 0.0};

  void validate() const;

  double lambda2() const { return lambda * lambda1; }
  Eigen::Matrix2d P() const;       // columns are the eigenvectors v1, v2
  Eigen::Matrix2d Lambda() const;  // diag(lambda1, lambda2)
  Eigen::Matrix2d A() const;

  Eigen::Vector2d vstarstar() const;  // vstar rotated by +pi/2

  // Canonical reduction: theta_o in (-pi/2, pi/2] and the matching
  // eigenbasis sign (P or -P, both proper rotations for the same A).
  double theta_o() const;
  Eigen::Matrix2d P_canonical() const;
  Eigen::Vector2d omega_star() const;  // P_canonical^t vstar

  // Model with eigenbasis reconstructed from an estimated angle:
  // v1 = cos(theta) vstar - sin(theta) vstarstar, v2 the rotation of v1.
  static AffineModel from_estimate(double lambda1, double lambda, double theta,
                                   const Eigen::Vector2d& vstar);
};

}  // namespace aniso
