#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>

namespace aniso {

enum class CovFamily { SquaredExponential };

CovFamily cov_family_from_string(const std::string& name);
std::string to_string(CovFamily family);

// Known covariance r_z of the underlying isotropic field Z, together
// with its derivatives up to second order, the spectral density f_z and
// the second spectral moment mu = -d^2 r_z / dt_i^2 (0).
//
// The squared exponential family r_z(t) = variance * exp(-|t|^2/(2 rho^2))
// satisfies all the standing assumptions (C^4, integrable envelope,
// f_z(0) > 0, finite second spectral moment) in closed form.
struct IsotropicCovariance {
  CovFamily family = CovFamily::SquaredExponential;
  double variance = 1.0;      // r_z(0) > 0
  double length_scale = 1.0;  // rho > 0

  void validate() const;

  // Partial derivative of r_z at t. `order` lists differentiation axes
  // (0 or 1); at most two entries are supported.
  double evaluate(const Eigen::Vector2d& t, std::span<const int> order = {}) const;
  double operator()(const Eigen::Vector2d& t) const { return evaluate(t); }

  Eigen::Vector2d gradient(const Eigen::Vector2d& t) const;
  Eigen::Matrix2d hessian(const Eigen::Vector2d& t) const;

  double second_spectral_moment() const;  // mu
  double spectral_density(const Eigen::Vector2d& w) const;

  // Envelope Psi(t) = max over |m|<=2 of |d^m r_z(t)|.
  double psi(const Eigen::Vector2d& t) const;
  // Radius beyond which psi < eps along every direction.
  double psi_radius(double eps) const;
};

}  // namespace aniso
