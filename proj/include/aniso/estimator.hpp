#pragma once

#include <Eigen/Dense>
#include <optional>

#include "aniso/covariance.hpp"
#include "aniso/levelcurve.hpp"
#include "aniso/varstack.hpp"

namespace aniso {

enum class EstimateCase { Interior, AxisYzeroXlarge, Isotropic };

struct ConfidenceRegion {
  double alpha = 0.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  double theta_lo = 0.0, theta_hi = 0.0;
  Eigen::Matrix2d d_matrix;     // whitening factor of the ellipse
  double chi2_threshold = 0.0;  // chi^2_2 quantile at level 1 - alpha
};

struct EstimateResult {
  double lambda_hat = 1.0;
  std::optional<double> theta_hat;  // unset in the isotropic case
  EstimateCase kind = EstimateCase::Isotropic;
  double x_n = 0.0, y_n = 0.0;
  int n = 0;
  std::optional<ConfidenceRegion> ci;
};

// Inversion of the observed ratio coordinates (x_n, y_n); requires
// x_n > 0 and x_n^2 + y_n^2 < 1.  Bisection on the residual of the
// defining equation in lambda, which is strictly sign-changing on the
// admissible bracket.
EstimateResult estimate(double x_n, double y_n, double tol = 1e-12);

// Full route from a sampled field; empty optional is the typed
// "no crossing" outcome for levels outside the sampled range.
std::optional<EstimateResult> estimate_from_field(const GridField& field,
                                                  double u,
                                                  const Eigen::Vector2d& vstar);

// tau_hat = 2 J_1 sqrt(rz0/mu) exp(u^2 / (2 rz0)).
double estimate_tau(double j_one, double u, const IsotropicCovariance& cov);

// Phi(u, lambda) = p_{Z(0)}(u) E|Lambda~(lambda) G| for standard G; the
// expectation reduces to sqrt(mu) sqrt(2/pi) I(lambda) because P^t grad Z
// is again standard isotropic.  lambda1_hat = J_1 / Phi.
double phi_rice(double u, double lambda, const IsotropicCovariance& cov);
double estimate_lambda1(double j_one, double u, double lambda_hat,
                        const IsotropicCovariance& cov);

// Attaches the asymptotic confidence ellipse and marginal intervals from
// a stack built at the estimated parameters.  Interior case only.
void confidence_region(EstimateResult& est, const CovarianceStack& stack,
                       int n, double alpha);

// Density of the limit variable U in 2n(1 - lambda_hat) -> sqrt(U) under
// isotropy, from the (vstar, vstarstar)-basis matrix Sigma^(**)(u).
double limit_density_fU(double t, const Eigen::Matrix2d& sigma_star_star);

// Distribution function of sqrt(U), by quadrature of f_U.
class SqrtULaw {
 public:
  explicit SqrtULaw(const Eigen::Matrix2d& sigma_star_star);
  double cdf(double x) const;  // P(sqrt(U) <= x)

 private:
  std::vector<double> grid_, cum_;
};

namespace detail {
// Monotone pieces of the root equation, exposed for property tests.
double solver_f1(double lambda, double x_n, double y_n);
double solver_f2(double lambda, double x_n, double y_n);
double solver_residual(double lambda, double x_n, double y_n);  // eq. in lambda
}  // namespace detail

}  // namespace aniso
