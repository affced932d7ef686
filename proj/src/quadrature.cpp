#include "aniso/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace aniso {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

GaussRule gauss_hermite_probabilists(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  // Physicists' rule (weight e^{-x^2}) by Newton iteration, then rescale
  // x -> sqrt(2) x, w -> w / sqrt(pi).
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p0 = std::pow(M_PI, -0.25), p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = z * std::sqrt(2.0 / (j + 1.0)) * p1 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p2;
      }
      pp = std::sqrt(2.0 * n) * p1;
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.nodes[i] = z;  // store positive roots descending in |z|
    rule.nodes[n - 1 - i] = -z;
    double w = 2.0 / (pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] *= std::sqrt(2.0);
    rule.weights[i] /= std::sqrt(M_PI);
  }
  return rule;
}

namespace {

const GaussRule& gl15() {
  static const GaussRule rule = gauss_legendre(15);
  return rule;
}

double panel_gl15(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& r = gl15();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 15; ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
  return s * h;
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double whole, double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double left = panel_gl15(f, a, m);
  const double right = panel_gl15(f, m, b);
  const double delta = left + right - whole;
  // Floor the acceptance threshold at roundoff scale so smooth panels
  // terminate even when the requested tolerance has been split far down.
  const double floor = 4e-16 * (std::abs(left) + std::abs(right));
  if (std::abs(delta) <= std::max(tol, floor) || depth >= max_depth)
    return left + right;
  return adapt(f, a, m, left, 0.5 * tol, depth + 1, max_depth) +
         adapt(f, m, b, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
  if (a == b) return 0.0;
  const double whole = panel_gl15(f, a, b);
  return adapt(f, a, b, whole, tol, 0, max_depth);
}

double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int panels, int n) {
  const GaussRule rule = gauss_legendre(n);
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int i = 0; i < n; ++i)
      s += rule.weights[i] * f(c + 0.5 * h * rule.nodes[i]);
  }
  return s * 0.5 * h;
}

}  // namespace aniso
