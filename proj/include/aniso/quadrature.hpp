#pragma once

#include <functional>
#include <vector>

namespace aniso {

// Nodes and weights for an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Probabilists' Gauss-Hermite rule: integrates f(x) phi(x) dx over R
// exactly for polynomials of degree <= 2n-1.
GaussRule gauss_hermite_probabilists(int n);

// Adaptive Gauss-Legendre integration of f on [a, b] to absolute
// tolerance tol.  Panels are bisected until the 15-point estimate of a
// panel agrees with the sum over its halves.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, int max_depth = 48);

// Fixed composite rule: `panels` equal panels with an n-point rule each.
double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int panels, int n);

}  // namespace aniso
