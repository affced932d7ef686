#include "aniso/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "aniso/quadrature.hpp"
#include "aniso/specialfn.hpp"

namespace aniso {

namespace detail {

double solver_f1(double lambda, double x_n, double y_n) {
  (void)y_n;
  const double gi = elliptic_I(lambda) / lambda;
  return x_n * x_n * gi * gi;
}

double solver_f2(double lambda, double x_n, double y_n) {
  const double I2 = std::pow(elliptic_I(lambda), 2);
  return (x_n * x_n * I2 - 1.0) / ((x_n * x_n + y_n * y_n) * I2 - 1.0);
}

// Polynomial residual of the defining equation; on (0, lambda0) it has
// the opposite sign of f1 - f2, is negative left of the root and
// positive right of it.
double solver_residual(double lambda, double x_n, double y_n) {
  const double I2 = std::pow(elliptic_I(lambda), 2);
  const double x2 = x_n * x_n;
  return x2 * I2 * I2 * (x2 + y_n * y_n) - x2 * I2 * (lambda * lambda + 1.0) +
         lambda * lambda;
}

}  // namespace detail

EstimateResult estimate(double x_n, double y_n, double tol) {
  if (!(x_n > 0.0) || !(x_n * x_n + y_n * y_n < 1.0))
    throw std::invalid_argument("estimate: observed ratio outside admissible disk");
  EstimateResult out;
  out.x_n = x_n;
  out.y_n = y_n;

  const double two_over_pi = 2.0 / M_PI;
  if (std::abs(y_n) < 1e-12 && std::abs(x_n - two_over_pi) < 1e-12) {
    out.kind = EstimateCase::Isotropic;
    out.lambda_hat = 1.0;
    return out;
  }
  if (y_n == 0.0 && x_n > two_over_pi) {
    out.kind = EstimateCase::AxisYzeroXlarge;
    out.lambda_hat = elliptic_I_inverse(1.0 / x_n);
    out.theta_hat = 0.0;
    return out;
  }

  // lambda0: root of (x^2+y^2) I^2(lambda) = 1 when it exists, else 1.
  const double r2 = x_n * x_n + y_n * y_n;
  double lambda0 = 1.0;
  if (r2 * (M_PI / 2.0) * (M_PI / 2.0) >= 1.0)
    lambda0 = elliptic_I_inverse(1.0 / std::sqrt(r2));

  double lo = 1e-14, hi = lambda0;
  // residual < 0 left of the root, > 0 at lambda0 (or at 1)
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::solver_residual(mid, x_n, y_n) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < tol) break;
  }
  const double lambda = 0.5 * (lo + hi);
  out.kind = EstimateCase::Interior;
  out.lambda_hat = lambda;
  const double I = elliptic_I(lambda);
  double arg = (1.0 - x_n * x_n * I * I) / (1.0 - lambda * lambda);
  if (arg < -1e-10)
    throw std::runtime_error("estimate: arcsin argument below admissible range");
  arg = std::min(std::max(arg, 0.0), 1.0);
  const double theta = std::asin(std::sqrt(arg));
  out.theta_hat = (y_n > 0.0) ? -theta : theta;
  return out;
}

std::optional<EstimateResult> estimate_from_field(const GridField& field,
                                                  double u,
                                                  const Eigen::Vector2d& vstar) {
  const std::optional<FunctionalTriple> t = functional_triple(field, u, vstar);
  if (!t) return std::nullopt;
  EstimateResult est = estimate(t->x_n, t->y_n);
  est.n = t->n;
  return est;
}

double estimate_tau(double j_one, double u, const IsotropicCovariance& cov) {
  if (!(j_one > 0.0))
    throw std::invalid_argument("estimate_tau: j_one must be > 0");
  const double rz0 = cov.variance;
  const double mu = cov.second_spectral_moment();
  return 2.0 * j_one * std::sqrt(rz0 / mu) * std::exp(u * u / (2.0 * rz0));
}

double phi_rice(double u, double lambda, const IsotropicCovariance& cov) {
  const double rz0 = cov.variance;
  const double mu = cov.second_spectral_moment();
  const double p_z = std_normal_pdf(u / std::sqrt(rz0)) / std::sqrt(rz0);
  return p_z * std::sqrt(mu) * std::sqrt(2.0 / M_PI) * elliptic_I(lambda);
}

double estimate_lambda1(double j_one, double u, double lambda_hat,
                        const IsotropicCovariance& cov) {
  if (!(j_one > 0.0))
    throw std::invalid_argument("estimate_lambda1: j_one must be > 0");
  return j_one / phi_rice(u, lambda_hat, cov);
}

void confidence_region(EstimateResult& est, const CovarianceStack& stack,
                       int n, double alpha) {
  if (est.kind != EstimateCase::Interior)
    throw std::invalid_argument("confidence_region: interior case required");
  if (!stack.sigma_param || !stack.d_matrix)
    throw std::invalid_argument("confidence_region: stack is degenerate");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("confidence_region: alpha must be in (0, 1]");
  ConfidenceRegion ci;
  ci.alpha = alpha;
  ci.d_matrix = *stack.d_matrix;
  ci.chi2_threshold = -2.0 * std::log(alpha);  // chi^2_2 upper quantile
  const double two_n = 2.0 * n;
  const Eigen::Matrix2d& sp = *stack.sigma_param;
  const double z = std_normal_quantile(1.0 - alpha / 2.0);
  const double half_l = z * std::sqrt(std::max(sp(0, 0), 0.0)) / two_n;
  const double half_t = z * std::sqrt(std::max(sp(1, 1), 0.0)) / two_n;
  const double theta = est.theta_hat.value();
  ci.lambda_lo = std::max(est.lambda_hat - half_l, 0.0);
  ci.lambda_hi = std::min(est.lambda_hat + half_l, 1.0);
  if (std::abs(std::abs(theta) - M_PI / 2.0) < 1e-9) {
    // At the angular boundary only the lambda marginal is asymptotically
    // justified; the theta interval degenerates to the whole domain.
    ci.theta_lo = -M_PI / 2.0;
    ci.theta_hi = M_PI / 2.0;
  } else {
    ci.theta_lo = std::max(theta - half_t, -M_PI / 2.0);
    ci.theta_hi = std::min(theta + half_t, M_PI / 2.0);
  }
  est.ci = ci;
}

double limit_density_fU(double t, const Eigen::Matrix2d& sigma_star_star) {
  if (t <= 0.0) return 0.0;
  const double factor = (M_PI / 2.0) * (M_PI / 2.0);
  const double s11 = 4.0 * factor * sigma_star_star(0, 0);
  const double s22 = factor * sigma_star_star(1, 1);
  const double s12 = 2.0 * factor * sigma_star_star(0, 1);
  if (!(s11 > 0.0) || !(s11 * s22 - s12 * s12 > 0.0))
    throw std::invalid_argument("limit_density_fU: matrix must be positive definite");
  const double a = s12 / s11;
  const double s22t = (s11 * s22 - s12 * s12) / s11;
  // 2048-node periodic trapezoid of the angular integral.  The angular
  // form carries the normalizing factor 1/(sigma11 sigma~22); without it
  // the total mass would be sigma11 sigma~22 instead of one.
  const int m = 2048;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double th = 2.0 * M_PI * i / m;
    const double c = std::cos(th), s = std::sin(th);
    const double e1 = (c - a * s) * (c - a * s) / (2.0 * s11 * (1.0 + a * a));
    const double e2 = s * s * (1.0 + a * a) / (2.0 * s22t);
    sum += std::exp(-t * (e1 + e2));
  }
  return sum * (2.0 * M_PI / m) /
         (4.0 * M_PI * std::sqrt(s11) * std::sqrt(s22t));
}

SqrtULaw::SqrtULaw(const Eigen::Matrix2d& sigma_star_star) {
  const double factor = (M_PI / 2.0) * (M_PI / 2.0);
  const double s11 = 4.0 * factor * sigma_star_star(0, 0);
  const double s22 = factor * sigma_star_star(1, 1);
  const double scale = std::max(s11, s22);
  // U is a quadratic form with eigenvalue scale `scale`; cover well past
  // the bulk and accumulate the density on a dense grid.
  const double t_max = 60.0 * scale;
  const int m = 8192;
  grid_.resize(m + 1);
  cum_.resize(m + 1);
  double acc = 0.0;
  double prev = 0.0;
  grid_[0] = 0.0;
  cum_[0] = 0.0;
  for (int i = 1; i <= m; ++i) {
    const double t = t_max * i / m;
    const double f = limit_density_fU(t, sigma_star_star);
    acc += 0.5 * (prev + f) * (t_max / m);
    grid_[i] = t;
    cum_[i] = acc;
    prev = f;
  }
}

double SqrtULaw::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double t = x * x;  // P(sqrt(U) <= x) = P(U <= x^2)
  if (t >= grid_.back()) return 1.0;
  const double step = grid_[1];
  const std::size_t idx = static_cast<std::size_t>(t / step);
  const double frac = (t - grid_[idx]) / step;
  const double v = cum_[idx] + frac * (cum_[idx + 1] - cum_[idx]);
  return std::min(v, 1.0);
}

}  // namespace aniso
