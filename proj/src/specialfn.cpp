#include "aniso/specialfn.hpp"

#include <cmath>
#include <stdexcept>

#include "aniso/quadrature.hpp"

namespace aniso {

double hermite(int k, double x) {
  if (k < 0) throw std::invalid_argument("hermite: order must be >= 0");
  if (k > 64) throw std::invalid_argument("hermite: order > 64 unsupported");
  if (k == 0) return 1.0;
  double hm = 1.0, h = x;
  for (int j = 1; j < k; ++j) {
    const double hn = x * h - j * hm;
    hm = h;
    h = hn;
  }
  return h;
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal quantile: p must be in (0, 1)");
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std_normal_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

double elliptic_I(double lambda, bool want_derivative) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("elliptic_I: lambda must be in [0, 1]");
  if (!want_derivative) {
    return integrate(
        [lambda](double th) {
          const double c = std::cos(th), s = std::sin(th);
          return std::sqrt(c * c + lambda * lambda * s * s);
        },
        0.0, M_PI / 2.0, 1e-13);
  }
  // I'(lambda) = lambda int_0^1 u^2 / (sqrt(1-(1-lambda^2)u^2) sqrt(1-u^2)) du;
  // u = sin(t) removes the endpoint singularity.
  if (lambda == 0.0) return 0.0;
  const double one_m = 1.0 - lambda * lambda;
  return lambda * integrate(
                      [one_m](double t) {
                        const double s = std::sin(t);
                        return s * s / std::sqrt(1.0 - one_m * s * s);
                      },
                      0.0, M_PI / 2.0, 1e-13);
}

double elliptic_I_inverse(double y) {
  if (!(y >= 1.0 - 1e-12 && y <= M_PI / 2.0 + 1e-12))
    throw std::invalid_argument("elliptic_I_inverse: value outside [1, pi/2]");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (elliptic_I(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double elliptic_g_inverse(double y) {
  if (!(y >= M_PI / 2.0 - 1e-12))
    throw std::invalid_argument("elliptic_g_inverse: value below pi/2");
  double lo = 1e-300, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (elliptic_I(mid) / mid > y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

FPoint f_map(double lambda, double theta_o) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("f_map: lambda must be in (0, 1]");
  if (!(theta_o > -M_PI / 2.0 - 1e-12 && theta_o <= M_PI / 2.0 + 1e-12))
    throw std::invalid_argument("f_map: theta_o must be in (-pi/2, pi/2]");
  const double I = elliptic_I(lambda);
  const double c = std::cos(theta_o), s = std::sin(theta_o);
  const double S = std::sqrt(c * c + lambda * lambda * s * s);
  FPoint out;
  out.x = S / I;
  out.y = s * c * (lambda * lambda - 1.0) / (I * S);
  return out;
}

Eigen::Matrix2d f_map_derivatives(double lambda, double theta_o) {
  const double I = elliptic_I(lambda);
  const double Ip = elliptic_I(lambda, true);
  const double c = std::cos(theta_o), s = std::sin(theta_o);
  const double S2 = c * c + lambda * lambda * s * s;
  const double S = std::sqrt(S2);
  Eigen::Matrix2d d;
  d(0, 0) = (lambda * s * s * I - S2 * Ip) / (I * I * S);
  d(0, 1) = (lambda * lambda - 1.0) * s * c / (I * S);
  d(1, 0) = s * c *
            ((lambda * I - (lambda * lambda - 1.0) * Ip) * S2 + lambda * I) /
            (I * I * S2 * S);
  d(1, 1) = (lambda * lambda - 1.0) * (c * c * c * c - lambda * lambda * s * s * s * s) /
            (I * S2 * S);
  return d;
}

JacobianF jacobian_F(double lambda, double theta_o) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("jacobian_F: lambda must be in (0, 1]");
  JacobianF out;
  if (lambda == 1.0) {
    out.value = 0.0;
    out.degenerate = true;
    return out;
  }
  const double I = elliptic_I(lambda);
  const double c = std::cos(theta_o), s = std::sin(theta_o);
  const double S2 = c * c + lambda * lambda * s * s;
  const double one_m = 1.0 - lambda * lambda;
  // Bracket of the closed form: both integrands are positive on (0, 1).
  const double b1 = integrate(
      [one_m](double t) {
        const double u = std::sin(t);
        // sqrt(1-u^2)/sqrt(1-(1-l^2)u^2) du with du = cos t dt
        const double cu = std::cos(t);
        return cu * cu / std::sqrt(1.0 - one_m * u * u);
      },
      0.0, M_PI / 2.0, 1e-13);
  const double b2 = integrate(
      [one_m](double t) {
        const double u = std::sin(t);
        return u * u / std::sqrt(1.0 - one_m * u * u);
      },
      0.0, M_PI / 2.0, 1e-13);
  out.value = lambda * one_m / (I * I * I * S2) * (s * s * b1 + c * c * b2);
  return out;
}

double half_moment_Fp(int p, double a) {
  if (p < 0) throw std::invalid_argument("half_moment_Fp: p must be >= 0");
  if (p > 32) throw std::invalid_argument("half_moment_Fp: p > 32 unsupported");
  const double a2 = a * a;
  double s = 0.0;
  double fac = 1.0;  // 2^k p!/(p-k)! built up along k
  for (int k = 0; k <= p; ++k) {
    s += fac * std::pow(a2, p - k);
    fac *= 2.0 * (p - k);
  }
  return std_normal_pdf(a) * s;
}

double gaussian_product_moment_Gq(int q, double x) {
  if (q < 0) throw std::invalid_argument("Gq: q must be >= 0");
  if (q > 32) throw std::invalid_argument("Gq: q > 32 unsupported");
  const double lg = log_gamma(2.0 * q + 1.0) - q * std::log(2.0) - log_gamma(q + 1.0);
  return std::exp(lg - (q + 0.5) * std::log1p(x * x)) / std::sqrt(2.0 * M_PI);
}

double gauss_hypergeometric(double a, double b, double c, double z) {
  if (!(std::abs(z) < 1.0))
    throw std::invalid_argument("hypergeometric: |z| must be < 1");
  if (!(b > 0.0 && c > b))
    throw std::invalid_argument("hypergeometric: need 0 < b < c");
  if (!(a > 0.0))
    throw std::invalid_argument("hypergeometric: need a > 0");
  // term_0 = Gamma(c-b) Gamma(b) / Gamma(c); ratio recurrence afterwards.
  double term = std::exp(log_gamma(c - b) + log_gamma(b) - log_gamma(c));
  double sum = term;
  for (long n = 0; n < 100000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  throw std::runtime_error("hypergeometric: series did not converge");
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("log_gamma: argument must be > 0");
  return std::lgamma(x);
}

double beta_fn(double x, double y) {
  if (!(x > 0.0 && y > 0.0))
    throw std::invalid_argument("beta: arguments must be > 0");
  return std::exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y));
}

}  // namespace aniso
