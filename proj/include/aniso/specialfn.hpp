#pragma once

#include <Eigen/Dense>

namespace aniso {

inline constexpr double kTwoOverPi = 0.63661977236758134308;

// Probabilists' Hermite polynomial H_k(x) by three-term recurrence.
// k is limited to 64, the range over which the recurrence is exercised
// and tested here.
double hermite(int k, double x);

double std_normal_pdf(double x);
double std_normal_cdf(double x);
double std_normal_quantile(double p);

// Elliptic integral I(lambda) = int_0^{pi/2} sqrt(cos^2 + lambda^2 sin^2),
// strictly increasing with I(0) = 1 and I(1) = pi/2.  With
// want_derivative the substituted form of I' is integrated instead.
double elliptic_I(double lambda, bool want_derivative = false);

// Inverse of I on [1, pi/2] and of g(lambda) = I(lambda)/lambda, which
// decreases from +inf to pi/2 on (0, 1].
double elliptic_I_inverse(double y);
double elliptic_g_inverse(double y);

// Image of the expectation ratio map F = (F1, F2) in the basis
// (vstar, vstarstar); lies in {x > 0, x^2 + y^2 < 1}.
struct FPoint {
  double x = 0.0;
  double y = 0.0;
};

FPoint f_map(double lambda, double theta_o);

// Jacobian matrix DF = [dF1/dlambda dF1/dtheta; dF2/dlambda dF2/dtheta].
Eigen::Matrix2d f_map_derivatives(double lambda, double theta_o);

struct JacobianF {
  double value = 0.0;
  bool degenerate = false;  // set when lambda == 1, where J_F vanishes
};

// Determinant of DF in its closed bracketed form; nonzero for lambda < 1.
JacobianF jacobian_F(double lambda, double theta_o);

// F_p(a) = int_a^inf z^{2p+1} phi(z) dz.
double half_moment_Fp(int p, double a);

// G_q(x) = int y^{2q} phi(y) phi(x y) dy.
double gaussian_product_moment_Gq(int q, double x);

// Integral-normalized Gauss hypergeometric:
//   F(a; b; c; z) = int_0^1 u^{b-1} (1-u)^{c-b-1} (1-u z)^{-a} du
// evaluated as the series Gamma(c-b)/Gamma(a) sum_n G(a+n)G(b+n)/(G(c+n) n!) z^n.
double gauss_hypergeometric(double a, double b, double c, double z);

double log_gamma(double x);
double beta_fn(double x, double y);

}  // namespace aniso
