#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "aniso/chaoscoeff.hpp"

namespace aniso {

// Generalized Mehler cross-moment E[H_k(X) H_m(Y)] for correlated standard
// Gaussian triples, by enumeration of 3x3 contingency tables with row sums
// k and column sums m.  Exactly zero across unequal chaos orders.
double mehler_moment(const ChaosIndex& k, const ChaosIndex& m,
                     const Eigen::Matrix3d& rho);

// Cross-covariance Gamma^Y(v) of the standardized vector (gradient, value)
// between 0 and v.  Gamma^Y(0) = I_3; entries decay with Psi(Av).
Eigen::Matrix3d gamma_Y(const IsotropicCovariance& cov, const AffineModel& model,
                        const Eigen::Vector2d& v);

// Spatial integrals R(k, m) = int E[H_k(Y(0)) H_m(Y(v))] dv, evaluated by
// panelized tensor Gauss-Legendre quadrature over the square where the
// covariance envelope exceeds 1e-12, with Richardson step-halving.  The
// quadrature is organized as cached monomial integrals in the eigenbasis
// so one pass serves every index pair up to the requested order.
class SpatialIntegrals {
 public:
  SpatialIntegrals(const IsotropicCovariance& cov, const AffineModel& model,
                   int max_order, double tol = 1e-8);

  double r_km(const ChaosIndex& k, const ChaosIndex& m) const;
  int max_order() const { return max_order_; }

 private:
  int max_order_;
  std::map<std::pair<ChaosIndex, ChaosIndex>, double> r_table_;
};

// One-off convenience wrapper around SpatialIntegrals.
double r_km(const ChaosIndex& k, const ChaosIndex& m,
            const IsotropicCovariance& cov, const AffineModel& model);

struct SigmaResult {
  double value = 0.0;
  std::vector<double> per_q;  // V_q(u), q = 1..Q
  double tail_estimate = 0.0;
};

// Truncated chaos series Sigma_{f,g}(u) from gradient-part coefficient
// tables (rows a_f(k1,k2)) and the level factors.
SigmaResult sigma_fg(double u, const Eigen::MatrixXd& coeffs_f,
                     const Eigen::MatrixXd& coeffs_g,
                     const std::vector<double>& level_factors, double rz0,
                     const SpatialIntegrals& spatial, int Q);

struct CovarianceStack {
  double level = 0.0;
  int truncation = 0;
  AffineModel model;
  Eigen::Matrix3d sigma_triple;      // Sigma_{(f1*, f2*, 1)}(u)
  Eigen::Matrix2d sigma_star;        // B Sigma B^t, canonical coordinates
  Eigen::Matrix2d sigma_star_basis;  // Q Sigma* Q^t, (vstar, vstarstar)
  std::optional<Eigen::Matrix2d> sigma_param;  // C Sigma^(*) C^t, lambda < 1
  Eigen::Matrix<double, 2, 3> b_matrix;
  Eigen::Matrix2d c_matrix;  // valid when sigma_param is set
  Eigen::Matrix2d q_basis;   // rows vstar^t, vstarstar^t
  Eigen::Matrix2d r_factor;          // sigma_star = R Gamma R^t
  Eigen::Vector2d gamma_eigenvalues;
  std::optional<Eigen::Matrix2d> d_matrix;  // (C^-1)^t Q R Gamma^{-1/2} R^t
  double tail_estimate = 0.0;
  std::vector<Eigen::Matrix3d> per_q_triple;  // V_q matrices, q = 1..Q
  bool isotropic_degenerate = false;          // lambda == 1

  void write_csv(std::ostream& os) const;
};

CovarianceStack build_stack(double u, const IsotropicCovariance& cov,
                            const AffineModel& model, int Q);
CovarianceStack build_stack(double u, const IsotropicCovariance& cov,
                            const AffineModel& model, int Q,
                            const SpatialIntegrals& spatial);

// det(Sigma*) minus the q=2 partial determinant; the series lower bound
// makes this nonnegative up to quadrature tolerance.
double det_lower_bound_check(double u, const IsotropicCovariance& cov,
                             const AffineModel& model, int Q);

// W statistic of the nondegeneracy argument; lies in (0, 1/4].
double w_statistic(double lambda);

}  // namespace aniso
