#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "aniso/affine.hpp"
#include "aniso/covariance.hpp"

namespace aniso {

struct ChaosIndex {
  int k1 = 0, k2 = 0, k3 = 0;
  int order() const { return k1 + k2 + k3; }
  auto operator<=>(const ChaosIndex&) const = default;
};

struct CoefficientTriple {
  double f1star = 0.0;
  double f2star = 0.0;
  double one = 0.0;
};

// Level factor a(k3, u) = H_{k3}(u/sqrt(rz0)) phi(u/sqrt(rz0)) / (k3! sqrt(rz0)).
double a_level(int k3, double u, double rz0);

// Closed forms of the gradient-part coefficients a_f(k1, k2) for the
// sign-folded direction functional fstar (both components) and for the
// constant functional 1.  Indices of mixed parity give exact zeros; the
// fstar pair falls back to the quadrature route when the reference
// direction is axis-degenerate in the eigenbasis.
Eigen::Vector2d a_fstar_pair(int k1, int k2, const AffineModel& model, double mu);
double a_one(int k1, int k2, const AffineModel& model, double mu);

// Independent quadrature route for a_f(k1, k2): exact radial moments in
// polar coordinates and adaptive Gauss-Legendre panels in the angle.
// `nodes` is the initial angular panel count (>= 32).
double a_generic_quadrature(const std::function<double(const Eigen::Vector2d&)>& f,
                            int k1, int k2, const AffineModel& model, double mu,
                            int nodes = 64);

struct CoefficientTable {
  int max_order = 0;
  double level = 0.0;
  AffineModel model;
  double mu = 0.0;
  double rz0 = 0.0;
  std::map<ChaosIndex, CoefficientTriple> entries;
  // Gradient parts a_f(k1, k2) and level factors a(k3, u) kept separately
  // so the variance stack can recombine them per function.
  Eigen::MatrixXd grad_f1, grad_f2, grad_one;  // (Q+1) x (Q+1)
  std::vector<double> level_factors;           // size Q+1

  const CoefficientTriple& at(const ChaosIndex& k) const;
  // component 0/1 = fstar coordinates, 2 = the constant functional.
  double gradient_part(int component, int k1, int k2) const;
  double level_part(int k3) const { return level_factors[k3]; }

  void write_csv(std::ostream& os) const;
};

CoefficientTable build_table(const AffineModel& model,
                             const IsotropicCovariance& cov, double u, int Q);

}  // namespace aniso
