#include "aniso/chaoscoeff.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "aniso/quadrature.hpp"
#include "aniso/specialfn.hpp"

namespace aniso {

namespace {

double lfact(int n) { return log_gamma(n + 1.0); }

struct Neumaier {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Even-even branch factor A(l1, l2, w1, w2, m, ell, mu): triple sum in
// log space with sign tracking.  Vanishes identically when w1 = 0.
double coeff_A(double l1, double l2, double w1, double w2, int m, int ell,
               double mu) {
  if (w1 == 0.0) return 0.0;
  const double xr = (l2 * w2) / (l1 * w1);
  const double base = (l1 * w1) / std::hypot(l1 * w1, l2 * w2);
  const double labsx = std::abs(xr) > 0.0 ? std::log(std::abs(xr)) : 0.0;
  const double labsb = std::log(std::abs(base));
  const double sgnb = base < 0.0 ? -1.0 : 1.0;
  Neumaier acc;
  for (int p = 0; p <= m; ++p) {
    for (int k = 0; k <= p; ++k) {
      if (xr == 0.0 && p != k) continue;
      for (int n = 0; n <= ell; ++n) {
        const int q = n + p - k;
        const double lt = (p - m) * std::log(2.0) - lfact(2 * p) - lfact(m - p)
                        + k * std::log(2.0) + lfact(p) - lfact(p - k)
                        + 2.0 * (p - k) * labsx
                        + (n - ell) * std::log(2.0) - lfact(2 * n) - lfact(ell - n)
                        + (2 * q + 1) * labsb
                        + lfact(2 * q) - q * std::log(2.0) - lfact(q);
        double sgn = ((m - p) % 2 ? -1.0 : 1.0) * ((ell - n) % 2 ? -1.0 : 1.0) * sgnb;
        acc.add(sgn * std::exp(lt));
      }
    }
  }
  return std::sqrt(2.0 * mu / M_PI) * l1 * acc.value();
}

// Odd-odd branch factor B(l1, l2, w1, w2, m, ell, mu); vanishes when w2 = 0.
double coeff_B(double l1, double l2, double w1, double w2, int m, int ell,
               double mu) {
  if (w2 == 0.0) return 0.0;
  const double xr = (l1 * w1) / (l2 * w2);
  const double base = (l2 * w2) / std::hypot(l1 * w1, l2 * w2);
  const double labsx = std::abs(xr) > 0.0 ? std::log(std::abs(xr)) : 0.0;
  const double labsb = std::log(std::abs(base));
  const double sgnb = base < 0.0 ? -1.0 : 1.0;
  Neumaier acc;
  for (int p = 0; p <= ell; ++p) {
    for (int k = 0; k <= p; ++k) {
      if (xr == 0.0 && p != k) continue;
      for (int n = 0; n <= m; ++n) {
        const int q = p - k + n + 1;
        const double lt = (p - ell) * std::log(2.0) - lfact(2 * p + 1) - lfact(ell - p)
                        + k * std::log(2.0) + lfact(p) - lfact(p - k)
                        + 2.0 * (p - k) * labsx
                        + (n - m) * std::log(2.0) - lfact(2 * n + 1) - lfact(m - n)
                        + (2 * q + 1) * labsb
                        + lfact(2 * q) - q * std::log(2.0) - lfact(q);
        double sgn = ((ell - p) % 2 ? -1.0 : 1.0) * ((m - n) % 2 ? -1.0 : 1.0) * sgnb;
        acc.add(sgn * std::exp(lt));
      }
    }
  }
  return std::sqrt(2.0 * mu / M_PI) * l1 * acc.value();
}

// Inner series of the a_1 coefficients: geometric in t = 1 - lambda^2.
double a_one_series(int p, int q, double t) {
  double term = 1.0 / beta_fn(p + q + 1.0, 0.5);
  Neumaier acc;
  acc.add(term);
  for (long n = 0; n < 100000; ++n) {
    term *= (2.0 * q + 2.0 * n + 1.0) * (p + q + n + 1.5) /
            (2.0 * (n + 1.0) * (p + q + n + 1.0)) * t;
    acc.add(term);
    if (std::abs(term) < 1e-16 * std::abs(acc.value())) return acc.value();
  }
  throw std::runtime_error("a_one: inner series did not converge");
}

}  // namespace

double a_level(int k3, double u, double rz0) {
  if (!(rz0 > 0.0)) throw std::invalid_argument("a_level: rz0 must be > 0");
  if (k3 < 0 || k3 > 64)
    throw std::invalid_argument("a_level: k3 out of supported range");
  const double s = std::sqrt(rz0);
  const double z = u / s;
  return std::exp(-lfact(k3)) * hermite(k3, z) * std_normal_pdf(z) / s;
}

Eigen::Vector2d a_fstar_pair(int k1, int k2, const AffineModel& model, double mu) {
  if (k1 < 0 || k2 < 0) throw std::invalid_argument("a_fstar: negative index");
  if ((k1 + k2) % 2 != 0) return Eigen::Vector2d::Zero();
  const Eigen::Vector2d w = model.omega_star();
  const double l1 = model.lambda1, l2 = model.lambda2();
  // Degenerate reference direction in the eigenbasis: the closed forms
  // divide by the vanishing component; use the quadrature route instead.
  if (std::min(std::abs(w.x()), std::abs(w.y())) < 1e-8) {
    const Eigen::Vector2d vs = model.vstar;
    auto fold = [&vs](const Eigen::Vector2d& th) {
      return th.dot(vs) >= 0.0 ? 1.0 : -1.0;
    };
    Eigen::Vector2d out;
    out[0] = a_generic_quadrature(
        [&](const Eigen::Vector2d& th) { return th.x() * fold(th); }, k1, k2,
        model, mu);
    out[1] = a_generic_quadrature(
        [&](const Eigen::Vector2d& th) { return th.y() * fold(th); }, k1, k2,
        model, mu);
    return out;
  }
  Eigen::Vector2d col;
  if (k1 % 2 == 0) {
    const int m = k1 / 2, ell = k2 / 2;
    col[0] = coeff_A(l1, l2, w.x(), w.y(), m, ell, mu);
    col[1] = coeff_A(l2, l1, w.y(), w.x(), ell, m, mu);
  } else {
    const int m = (k1 - 1) / 2, ell = (k2 - 1) / 2;
    col[0] = coeff_B(l1, l2, w.x(), w.y(), m, ell, mu);
    col[1] = coeff_B(l2, l1, w.y(), w.x(), ell, m, mu);
  }
  return model.P_canonical() * col;
}

double a_one(int k1, int k2, const AffineModel& model, double mu) {
  if (k1 < 0 || k2 < 0) throw std::invalid_argument("a_one: negative index");
  if (k1 % 2 != 0 || k2 % 2 != 0) return 0.0;
  const int m = k1 / 2, ell = k2 / 2;
  const double l2 = model.lambda2();
  const double lam = model.lambda;
  const double t = 1.0 - lam * lam;
  Neumaier acc;
  for (int p = 0; p <= ell; ++p) {
    for (int q = 0; q <= m; ++q) {
      const double lb = lfact(ell) - lfact(p) - lfact(ell - p)
                      + lfact(m) - lfact(q) - lfact(m - q);
      const double mag = std::exp(lb + (2.0 * q + 1.0) * std::log(lam)) * l2;
      const double sgn = ((p + q) % 2 ? -1.0 : 1.0);
      acc.add(sgn * mag * a_one_series(p, q, t));
    }
  }
  const double pre = std::sqrt(2.0 * M_PI * mu) *
                     ((m + ell) % 2 ? -1.0 : 1.0) *
                     std::exp(-(m + ell) * std::log(2.0) - lfact(m) - lfact(ell));
  return pre * acc.value();
}

double a_generic_quadrature(const std::function<double(const Eigen::Vector2d&)>& f,
                            int k1, int k2, const AffineModel& model, double mu,
                            int nodes) {
  if (nodes < 32)
    throw std::invalid_argument("a_generic_quadrature: nodes must be >= 32");
  if (k1 < 0 || k2 < 0 || k1 > 30 || k2 > 30)
    throw std::invalid_argument("a_generic_quadrature: index out of range");
  // Monomial coefficients of H_k.
  auto hermite_coeffs = [](int k) {
    std::vector<double> prev{1.0}, cur{0.0, 1.0};
    if (k == 0) return prev;
    for (int j = 1; j < k; ++j) {
      std::vector<double> next(j + 2, 0.0);
      for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
      for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= j * prev[i];
      prev = std::move(cur);
      cur = std::move(next);
    }
    return cur;
  };
  const std::vector<double> h1 = hermite_coeffs(k1);
  const std::vector<double> h2 = hermite_coeffs(k2);
  // Half-line Gaussian moments M_p = int_0^inf r^p e^{-r^2/2} dr.
  std::vector<double> mom(k1 + k2 + 3);
  for (int p = 0; p < static_cast<int>(mom.size()); ++p)
    mom[p] = std::exp((p - 1) * 0.5 * std::log(2.0) + log_gamma((p + 1) * 0.5));
  const double l1 = model.lambda1, l2 = model.lambda2();
  const Eigen::Matrix2d P = model.P_canonical();
  auto integrand = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    const double sc = std::hypot(l1 * c, l2 * s);
    const Eigen::Vector2d nu = P * Eigen::Vector2d(l1 * c / sc, l2 * s / sc);
    // radial part: sum_{j1,j2} h1[j1] h2[j2] c^j1 s^j2 M_{j1+j2+2}
    double rad = 0.0;
    double cp = 1.0;
    for (int j1 = 0; j1 < static_cast<int>(h1.size()); ++j1) {
      if (h1[j1] != 0.0) {
        double sp = 1.0;
        for (int j2 = 0; j2 < static_cast<int>(h2.size()); ++j2) {
          if (h2[j2] != 0.0) rad += h1[j1] * h2[j2] * cp * sp * mom[j1 + j2 + 2];
          sp *= s;
        }
      }
      cp *= c;
    }
    return f(nu) * sc * rad;
  };
  double total = 0.0;
  const double width = 2.0 * M_PI / nodes;
  for (int p = 0; p < nodes; ++p)
    total += integrate(integrand, p * width, (p + 1) * width, 1e-12 / nodes);
  return std::sqrt(mu) * std::exp(-lfact(k1) - lfact(k2)) * total / (2.0 * M_PI);
}

const CoefficientTriple& CoefficientTable::at(const ChaosIndex& k) const {
  auto it = entries.find(k);
  if (it == entries.end())
    throw std::out_of_range("coefficient table: index beyond truncation");
  return it->second;
}

double CoefficientTable::gradient_part(int component, int k1, int k2) const {
  switch (component) {
    case 0: return grad_f1(k1, k2);
    case 1: return grad_f2(k1, k2);
    case 2: return grad_one(k1, k2);
  }
  throw std::invalid_argument("gradient_part: component must be 0, 1 or 2");
}

void CoefficientTable::write_csv(std::ostream& os) const {
  os << "# schema=1\n";
  os << "k1,k2,k3,a_f1,a_f2,a_one\n";
  os.precision(17);
  for (const auto& [k, v] : entries)
    os << k.k1 << ',' << k.k2 << ',' << k.k3 << ',' << v.f1star << ','
       << v.f2star << ',' << v.one << '\n';
}

CoefficientTable build_table(const AffineModel& model,
                             const IsotropicCovariance& cov, double u, int Q) {
  if (Q < 0 || Q > 12)
    throw std::invalid_argument("build_table: Q must be in [0, 12]");
  model.validate();
  cov.validate();
  CoefficientTable table;
  table.max_order = Q;
  table.level = u;
  table.model = model;
  table.mu = cov.second_spectral_moment();
  table.rz0 = cov.variance;
  // Gradient-part tables once per (k1, k2), then combined with the level
  // factor across k3.
  table.grad_f1 = Eigen::MatrixXd::Zero(Q + 1, Q + 1);
  table.grad_f2 = Eigen::MatrixXd::Zero(Q + 1, Q + 1);
  table.grad_one = Eigen::MatrixXd::Zero(Q + 1, Q + 1);
  table.level_factors.resize(Q + 1);
  for (int k3 = 0; k3 <= Q; ++k3)
    table.level_factors[k3] = a_level(k3, u, table.rz0);
  for (int k1 = 0; k1 <= Q; ++k1)
    for (int k2 = 0; k1 + k2 <= Q; ++k2) {
      const Eigen::Vector2d fs = a_fstar_pair(k1, k2, model, table.mu);
      table.grad_f1(k1, k2) = fs.x();
      table.grad_f2(k1, k2) = fs.y();
      table.grad_one(k1, k2) = a_one(k1, k2, model, table.mu);
    }
  for (int k1 = 0; k1 <= Q; ++k1)
    for (int k2 = 0; k1 + k2 <= Q; ++k2)
      for (int k3 = 0; k1 + k2 + k3 <= Q; ++k3) {
        const double al = table.level_factors[k3];
        table.entries[{k1, k2, k3}] =
            CoefficientTriple{table.grad_f1(k1, k2) * al,
                              table.grad_f2(k1, k2) * al,
                              table.grad_one(k1, k2) * al};
      }
  return table;
}

}  // namespace aniso
