#include "aniso/isotest.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "aniso/estimator.hpp"

namespace aniso {

Eigen::Vector2d statistic_T(const FunctionalTriple& triple,
                            const Eigen::Vector2d& vstar, int n) {
  if (!(triple.j_one > 0.0))
    throw std::invalid_argument("statistic_T: empty level set");
  const Eigen::Vector2d ratio = triple.j_star / triple.j_one;
  return 2.0 * n * (ratio - (2.0 / M_PI) * vstar);
}

IsoNullStack IsoNullStack::from_stack(const CovarianceStack& stack) {
  IsoNullStack out;
  out.r_factor = stack.r_factor;
  out.gamma = stack.gamma_eigenvalues;
  if (!(out.gamma.minCoeff() > 0.0))
    throw std::runtime_error("isotropy test: null covariance not positive definite");
  return out;
}

TestResult statistic_Xi(const Eigen::Vector2d& t_vec, double tau_hat,
                        const IsoNullStack& null_stack, double alpha, int n) {
  if (!(null_stack.gamma.minCoeff() > 0.0))
    throw std::invalid_argument("statistic_Xi: degenerate factorization");
  TestResult out;
  out.t_vec = t_vec;
  out.n = n;
  out.tau_hat = tau_hat;
  out.alpha = alpha;
  out.s_vec = tau_hat *
              null_stack.gamma.cwiseSqrt().cwiseInverse().asDiagonal() *
              null_stack.r_factor.transpose() * t_vec;
  out.xi = out.s_vec.squaredNorm();
  out.p_value = std::exp(-out.xi / 2.0);  // chi^2_2 survival function
  out.reject = out.p_value < alpha;
  return out;
}

Decision decide(double xi, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("decide: alpha must be in (0, 1)");
  Decision d;
  d.gamma = -2.0 * std::log(alpha);
  d.reject = xi > d.gamma;
  return d;
}

const IsoNullStack& IsoNullCache::get(const IsotropicCovariance& cov, double u,
                                      int Q, const Eigen::Vector2d& vstar) {
  std::ostringstream key;
  key.precision(17);
  key << to_string(cov.family) << '|' << cov.variance << '|' << cov.length_scale
      << '|' << u << '|' << Q << '|' << vstar.x() << '|' << vstar.y();
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key.str());
  if (it == entries_.end()) {
    AffineModel unit;  // lambda1 = lambda = 1, eigenbasis irrelevant
    unit.vstar = vstar;
    const CovarianceStack stack = build_stack(u, cov, unit, Q);
    auto owned = std::make_unique<IsoNullStack>(IsoNullStack::from_stack(stack));
    it = entries_.emplace(key.str(), std::move(owned)).first;
  }
  return *it->second;
}

std::optional<TestResult> isotropy_test(const GridField& field, double u,
                                        const Eigen::Vector2d& vstar,
                                        const IsotropicCovariance& cov,
                                        double alpha, int Q,
                                        IsoNullCache* cache) {
  const std::optional<FunctionalTriple> triple = functional_triple(field, u, vstar);
  if (!triple) return std::nullopt;
  IsoNullCache local;
  IsoNullCache& store = cache ? *cache : local;
  const IsoNullStack& null_stack = store.get(cov, u, Q, vstar);
  const Eigen::Vector2d t = statistic_T(*triple, vstar, field.half_width);
  const double tau = estimate_tau(triple->j_one, u, cov);
  return statistic_Xi(t, tau, null_stack, alpha, field.half_width);
}

}  // namespace aniso
