#include "aniso/varstack.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>

#include "aniso/quadrature.hpp"
#include "aniso/specialfn.hpp"

namespace aniso {

namespace {

double factorial(int n) {
  static const std::array<double, 25> table = [] {
    std::array<double, 25> t{};
    t[0] = 1.0;
    for (int i = 1; i < 25; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n >= static_cast<int>(table.size()))
    throw std::invalid_argument("factorial: out of range");
  return table[n];
}

}  // namespace

double mehler_moment(const ChaosIndex& k, const ChaosIndex& m,
                     const Eigen::Matrix3d& rho) {
  if (k.order() != m.order()) return 0.0;
  if (k.order() > 24)
    throw std::invalid_argument("mehler_moment: order > 24 unsupported");
  const double kfmf = factorial(k.k1) * factorial(k.k2) * factorial(k.k3) *
                      factorial(m.k1) * factorial(m.k2) * factorial(m.k3);
  double sum = 0.0;
  // d ranges over 3x3 contingency tables with row sums k and column sums m.
  for (int d11 = 0; d11 <= std::min(k.k1, m.k1); ++d11)
    for (int d12 = 0; d12 <= std::min(k.k1 - d11, m.k2); ++d12) {
      const int d13 = k.k1 - d11 - d12;
      if (d13 > m.k3) continue;
      for (int d21 = 0; d21 <= std::min(k.k2, m.k1 - d11); ++d21)
        for (int d22 = 0; d22 <= std::min(k.k2 - d21, m.k2 - d12); ++d22) {
          const int d23 = k.k2 - d21 - d22;
          if (d23 > m.k3 - d13) continue;
          const int d31 = m.k1 - d11 - d21;
          const int d32 = m.k2 - d12 - d22;
          const int d33 = m.k3 - d13 - d23;
          if (d31 < 0 || d32 < 0 || d33 < 0) continue;
          if (d31 + d32 + d33 != k.k3) continue;
          const int d[9] = {d11, d12, d13, d21, d22, d23, d31, d32, d33};
          double term = kfmf;
          for (int e = 0; e < 9; ++e) {
            const int i = e / 3, j = e % 3;
            term *= std::pow(rho(i, j), d[e]) / factorial(d[e]);
          }
          sum += term;
        }
    }
  return sum;
}

Eigen::Matrix3d gamma_Y(const IsotropicCovariance& cov, const AffineModel& model,
                        const Eigen::Vector2d& v) {
  const double mu = cov.second_spectral_moment();
  const double rz0 = cov.variance;
  const Eigen::Matrix2d P = model.P();
  const Eigen::Vector2d av = model.A() * v;
  const Eigen::Matrix2d hess = cov.hessian(av);
  const Eigen::Vector2d grad = cov.gradient(av);
  Eigen::Matrix3d g;
  g.topLeftCorner<2, 2>() = -(P.transpose() * hess * P) / mu;
  const Eigen::Vector2d coup = (P.transpose() * grad) / std::sqrt(mu * rz0);
  // E[Y_i(0) Y_3(v)] = -coup_i while E[Y_3(0) Y_j(v)] = +coup_j; the two
  // blocks carry opposite signs because grad r_z is odd.
  g(0, 2) = -coup.x();
  g(1, 2) = -coup.y();
  g(2, 0) = coup.x();
  g(2, 1) = coup.y();
  g(2, 2) = cov.evaluate(av) / rz0;
  return g;
}

namespace {

// Parity in the eigenbasis coordinates (w1, w2) of each Gamma^Y entry;
// follows from the radial structure of an isotropic covariance.
constexpr int kParity1[9] = {0, 1, 1, 1, 0, 0, 1, 0, 0};
constexpr int kParity2[9] = {0, 1, 0, 1, 0, 1, 0, 1, 0};

using DMat = std::array<int, 9>;

ChaosIndex row_sums(const DMat& d) {
  return {d[0] + d[1] + d[2], d[3] + d[4] + d[5], d[6] + d[7] + d[8]};
}
ChaosIndex col_sums(const DMat& d) {
  return {d[0] + d[3] + d[6], d[1] + d[4] + d[7], d[2] + d[5] + d[8]};
}

void enumerate_dmats(int max_sum, std::vector<DMat>& out) {
  DMat d{};
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == 9) {
      int p1 = 0, p2 = 0;
      for (int e = 0; e < 9; ++e) {
        p1 += d[e] * kParity1[e];
        p2 += d[e] * kParity2[e];
      }
      if (max_sum - left >= 1 && p1 % 2 == 0 && p2 % 2 == 0) out.push_back(d);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      d[pos] = v;
      rec(pos + 1, left - v);
    }
    d[pos] = 0;
  };
  rec(0, max_sum);
}

double combination_weight(const DMat& d) {
  const ChaosIndex k = row_sums(d), m = col_sums(d);
  double c = factorial(k.k1) * factorial(k.k2) * factorial(k.k3) *
             factorial(m.k1) * factorial(m.k2) * factorial(m.k3);
  for (int e = 0; e < 9; ++e) c /= factorial(d[e]);
  return c;
}

struct MonomialTable {
  std::vector<DMat> dmats;
  std::vector<double> values;
};

// Quadrant quadrature of all monomials prod Gamma~_{ij}(w)^{d_ij} at the
// given panel refinement level.
void integrate_monomials(const IsotropicCovariance& cov, const AffineModel& model,
                         MonomialTable& table, int refine) {
  const double rho = cov.length_scale;
  const double r12 = cov.psi_radius(1e-12);
  const double w1 = r12 / model.lambda1;
  const double w2 = r12 / model.lambda2();
  // refine = 0 is one halving step coarser than the target panel size
  // rho/(2 lambda1); each refinement halves the panels again.
  const double base_panel = rho / model.lambda1;
  const int panels1 = static_cast<int>(std::ceil(w1 / base_panel)) << refine;
  const int panels2 = static_cast<int>(std::ceil(w2 / base_panel)) << refine;
  const int gl_n = 6;
  const GaussRule rule = gauss_legendre(gl_n);
  const Eigen::Matrix2d P = model.P();

  int maxpow = 0;
  for (const DMat& d : table.dmats)
    for (int e = 0; e < 9; ++e) maxpow = std::max(maxpow, d[e]);

  std::vector<double> acc(table.dmats.size(), 0.0);
  std::vector<double> comp(table.dmats.size(), 0.0);
  std::vector<double> pow_table(9 * (maxpow + 1));
  const double h1 = w1 / panels1, h2 = w2 / panels2;
  for (int p1 = 0; p1 < panels1; ++p1) {
    for (int i1 = 0; i1 < gl_n; ++i1) {
      const double x1 = (p1 + 0.5) * h1 + 0.5 * h1 * rule.nodes[i1];
      const double wgt1 = 0.5 * h1 * rule.weights[i1];
      for (int p2 = 0; p2 < panels2; ++p2) {
        for (int i2 = 0; i2 < gl_n; ++i2) {
          const double x2 = (p2 + 0.5) * h2 + 0.5 * h2 * rule.nodes[i2];
          const double wgt = wgt1 * 0.5 * h2 * rule.weights[i2];
          const Eigen::Matrix3d g = gamma_Y(cov, model, P * Eigen::Vector2d(x1, x2));
          for (int e = 0; e < 9; ++e) {
            double* row = &pow_table[e * (maxpow + 1)];
            row[0] = 1.0;
            const double v = g(e / 3, e % 3);
            for (int p = 1; p <= maxpow; ++p) row[p] = row[p - 1] * v;
          }
          for (std::size_t di = 0; di < table.dmats.size(); ++di) {
            const DMat& d = table.dmats[di];
            double prod = wgt;
            for (int e = 0; e < 9; ++e)
              prod *= pow_table[e * (maxpow + 1) + d[e]];
            // Neumaier-compensated accumulation in fixed node order.
            const double t = acc[di] + prod;
            if (std::abs(acc[di]) >= std::abs(prod))
              comp[di] += (acc[di] - t) + prod;
            else
              comp[di] += (prod - t) + acc[di];
            acc[di] = t;
          }
        }
      }
    }
  }
  table.values.resize(table.dmats.size());
  for (std::size_t di = 0; di < table.dmats.size(); ++di)
    table.values[di] = 4.0 * (acc[di] + comp[di]);  // quadrant symmetry
}

std::map<std::pair<ChaosIndex, ChaosIndex>, double> combine_r(
    const MonomialTable& table) {
  std::map<std::pair<ChaosIndex, ChaosIndex>, double> r;
  for (std::size_t di = 0; di < table.dmats.size(); ++di) {
    const DMat& d = table.dmats[di];
    r[{row_sums(d), col_sums(d)}] += combination_weight(d) * table.values[di];
  }
  return r;
}

}  // namespace

SpatialIntegrals::SpatialIntegrals(const IsotropicCovariance& cov,
                                   const AffineModel& model, int max_order,
                                   double tol)
    : max_order_(max_order) {
  if (max_order < 1 || max_order > 12)
    throw std::invalid_argument("SpatialIntegrals: order must be in [1, 12]");
  cov.validate();
  model.validate();
  MonomialTable table;
  enumerate_dmats(max_order, table.dmats);
  integrate_monomials(cov, model, table, 0);
  r_table_ = combine_r(table);
  // Step-halving: the first accepted level is already at the target panel
  // size; further halvings only when the comparison exceeds tolerance.
  for (int refine = 1; refine <= 4; ++refine) {
    integrate_monomials(cov, model, table, refine);
    auto r_fine = combine_r(table);
    double diff = 0.0, scale = 1.0;
    for (const auto& [key, val] : r_fine) {
      diff = std::max(diff, std::abs(val - r_table_[key]));
      scale = std::max(scale, std::abs(val));
    }
    r_table_ = std::move(r_fine);
    if (diff <= tol * std::max(1.0, scale)) break;
  }
}

double SpatialIntegrals::r_km(const ChaosIndex& k, const ChaosIndex& m) const {
  if (k.order() != m.order()) return 0.0;  // exact zero across orders
  if (k.order() > max_order_)
    throw std::invalid_argument("r_km: order beyond precomputed range");
  auto it = r_table_.find({k, m});
  return it == r_table_.end() ? 0.0 : it->second;
}

double r_km(const ChaosIndex& k, const ChaosIndex& m,
            const IsotropicCovariance& cov, const AffineModel& model) {
  if (k.order() != m.order()) return 0.0;
  SpatialIntegrals spatial(cov, model, std::max(1, k.order()));
  return spatial.r_km(k, m);
}

SigmaResult sigma_fg(double u, const Eigen::MatrixXd& coeffs_f,
                     const Eigen::MatrixXd& coeffs_g,
                     const std::vector<double>& level_factors, double rz0,
                     const SpatialIntegrals& spatial, int Q) {
  if (Q > spatial.max_order())
    throw std::invalid_argument("sigma_fg: Q beyond spatial table");
  SigmaResult out;
  out.per_q.assign(Q, 0.0);
  auto coeff = [&](const Eigen::MatrixXd& c, const ChaosIndex& k) {
    if (k.k1 >= c.rows() || k.k2 >= c.cols()) return 0.0;
    return c(k.k1, k.k2) * level_factors[k.k3];
  };
  for (int q = 1; q <= Q; ++q) {
    std::vector<std::pair<ChaosIndex, double>> cf, cg;
    for (int k1 = 0; k1 <= q; ++k1)
      for (int k2 = 0; k1 + k2 <= q; ++k2) {
        const ChaosIndex k{k1, k2, q - k1 - k2};
        const double vf = coeff(coeffs_f, k);
        const double vg = coeff(coeffs_g, k);
        if (vf != 0.0) cf.push_back({k, vf});
        if (vg != 0.0) cg.push_back({k, vg});
      }
    double vq = 0.0;
    for (const auto& [k, vf] : cf)
      for (const auto& [m, vg] : cg) vq += vf * vg * spatial.r_km(k, m);
    out.per_q[q - 1] = vq;
    out.value += vq;
  }
  // Geometric tail shape rho^{q-2} (q+1)^2 L(u)^q with the constant
  // calibrated at the last computed orders; conservative diagnostic only.
  const double L = 2.0 * u * u / rz0 + 1.0;
  const double rho_g = 0.9 / L;
  double c_cal = 0.0;
  for (int q = std::max(1, Q - 1); q <= Q; ++q) {
    const double bound = std::pow(rho_g, q - 2) * (q + 1.0) * (q + 1.0) *
                         std::pow(L, q);
    if (bound > 0.0)
      c_cal = std::max(c_cal, std::abs(out.per_q[q - 1]) / bound);
  }
  double tail = 0.0;
  for (int q = Q + 1; q <= Q + 400; ++q)
    tail += c_cal * std::pow(rho_g, q - 2) * (q + 1.0) * (q + 1.0) *
            std::pow(L, q);
  out.tail_estimate = tail;
  return out;
}

void CovarianceStack::write_csv(std::ostream& os) const {
  os << "# schema=1\n";
  os.precision(17);
  os << "matrix,i,j,value\n";
  auto dump = [&os](const char* name, const Eigen::MatrixXd& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        os << name << ',' << i << ',' << j << ',' << m(i, j) << '\n';
  };
  dump("sigma_triple", sigma_triple);
  dump("sigma_star", sigma_star);
  dump("sigma_star_basis", sigma_star_basis);
  if (sigma_param) dump("sigma_param", *sigma_param);
  dump("b_matrix", b_matrix);
  if (sigma_param) dump("c_matrix", c_matrix);
  dump("q_basis", q_basis);
  if (d_matrix) dump("d_matrix", *d_matrix);
  for (std::size_t q = 0; q < per_q_triple.size(); ++q) {
    const std::string name = "V_" + std::to_string(q + 1);
    dump(name.c_str(), per_q_triple[q]);
  }
  os << "tail_estimate,0,0," << tail_estimate << '\n';
}

CovarianceStack build_stack(double u, const IsotropicCovariance& cov,
                            const AffineModel& model, int Q) {
  SpatialIntegrals spatial(cov, model, Q);
  return build_stack(u, cov, model, Q, spatial);
}

CovarianceStack build_stack(double u, const IsotropicCovariance& cov,
                            const AffineModel& model, int Q,
                            const SpatialIntegrals& spatial) {
  CovarianceStack stack;
  stack.level = u;
  stack.truncation = Q;
  stack.model = model;
  const CoefficientTable table = build_table(model, cov, u, Q);
  const Eigen::MatrixXd* grads[3] = {&table.grad_f1, &table.grad_f2,
                                     &table.grad_one};
  stack.per_q_triple.assign(Q, Eigen::Matrix3d::Zero());
  double tail = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const SigmaResult r = sigma_fg(u, *grads[i], *grads[j],
                                     table.level_factors, table.rz0, spatial, Q);
      stack.sigma_triple(i, j) = r.value;
      stack.sigma_triple(j, i) = r.value;
      for (int q = 1; q <= Q; ++q) {
        stack.per_q_triple[q - 1](i, j) = r.per_q[q - 1];
        stack.per_q_triple[q - 1](j, i) = r.per_q[q - 1];
      }
      if (i == j) tail = std::max(tail, r.tail_estimate);
    }
  stack.tail_estimate = tail;

  const double a1_0 = table.grad_one(0, 0) * table.level_factors[0];
  const double af1_0 = table.grad_f1(0, 0) * table.level_factors[0];
  const double af2_0 = table.grad_f2(0, 0) * table.level_factors[0];
  stack.b_matrix << 1.0, 0.0, -af1_0 / a1_0, 0.0, 1.0, -af2_0 / a1_0;
  stack.b_matrix /= a1_0;
  stack.sigma_star = stack.b_matrix * stack.sigma_triple *
                     stack.b_matrix.transpose();
  if (!(stack.sigma_star.determinant() > 0.0))
    throw std::runtime_error("variance degenerate (increase Q or check model)");

  const Eigen::Vector2d vs = model.vstar, vss = model.vstarstar();
  stack.q_basis << vs.x(), vs.y(), vss.x(), vss.y();
  stack.sigma_star_basis =
      stack.q_basis * stack.sigma_star * stack.q_basis.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(stack.sigma_star);
  stack.r_factor = es.eigenvectors();
  stack.gamma_eigenvalues = es.eigenvalues().cwiseMax(1e-12);

  stack.isotropic_degenerate = (model.lambda == 1.0);
  if (!stack.isotropic_degenerate) {
    const double theta = model.theta_o();
    const Eigen::Matrix2d df = f_map_derivatives(model.lambda, theta);
    const JacobianF jf = jacobian_F(model.lambda, theta);
    Eigen::Matrix2d adj;
    adj << df(1, 1), -df(0, 1), -df(1, 0), df(0, 0);
    stack.c_matrix = adj / jf.value;
    stack.sigma_param =
        stack.c_matrix * stack.sigma_star_basis * stack.c_matrix.transpose();
    const Eigen::Matrix2d gamma_inv_sqrt =
        stack.r_factor *
        stack.gamma_eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
        stack.r_factor.transpose();
    // d = (C^-1)^t Q R Gamma^{-1/2} R^t; C^-1 is the forward Jacobian DF.
    stack.d_matrix = df.transpose() * stack.q_basis * gamma_inv_sqrt;
  }
  return stack;
}

double det_lower_bound_check(double u, const IsotropicCovariance& cov,
                             const AffineModel& model, int Q) {
  if (Q < 2) throw std::invalid_argument("det_lower_bound_check: need Q >= 2");
  const CovarianceStack stack = build_stack(u, cov, model, Q);
  const Eigen::Matrix2d partial2 = stack.b_matrix * stack.per_q_triple[1] *
                                   stack.b_matrix.transpose();
  return stack.sigma_star.determinant() - partial2.determinant();
}

double w_statistic(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("w_statistic: lambda must be in (0, 1]");
  const double t = 1.0 - lambda * lambda;
  double v = 0.5;  // V_0
  double num = 0.0, den = 0.0;
  for (long n = 0; n < 200000; ++n) {
    num += v / (4.0 * (n + 1.0));
    den += v;
    const double next = v * (2.0 * n + 1.0) * (2.0 * n + 3.0) /
                        (4.0 * (n + 1.0) * (n + 1.0)) * t;
    if (next < 1e-18 * den) break;
    v = next;
  }
  return num / den;
}

}  // namespace aniso
