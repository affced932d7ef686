#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "aniso/levelcurve.hpp"
#include "aniso/varstack.hpp"

namespace aniso {

struct TestResult {
  Eigen::Vector2d t_vec{0.0, 0.0};
  Eigen::Vector2d s_vec{0.0, 0.0};
  double xi = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  double tau_hat = 0.0;
  int n = 0;
};

struct Decision {
  bool reject = false;
  double gamma = 0.0;  // rejection threshold, the chi^2_2 upper quantile
};

// T = 2n (J_fstar / J_1 - (2/pi) vstar), canonical coordinates.
Eigen::Vector2d statistic_T(const FunctionalTriple& triple,
                            const Eigen::Vector2d& vstar, int n);

// Null factorization Sigma_*(u, 1, I_2) = R Gamma R^t of the unit
// isotropic stack; tau_hat^2 rescales it to the observed field.
struct IsoNullStack {
  Eigen::Matrix2d r_factor;
  Eigen::Vector2d gamma;  // eigenvalues, all > 0
  static IsoNullStack from_stack(const CovarianceStack& stack);
};

TestResult statistic_Xi(const Eigen::Vector2d& t_vec, double tau_hat,
                        const IsoNullStack& null_stack, double alpha, int n);

Decision decide(double xi, double alpha);

// Cache of factorized unit-isotropic stacks keyed by (cov, u, Q, vstar);
// concurrent readers share entries, a single writer fills misses.
class IsoNullCache {
 public:
  const IsoNullStack& get(const IsotropicCovariance& cov, double u, int Q,
                          const Eigen::Vector2d& vstar);

 private:
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<IsoNullStack>> entries_;
};

// Full test from a sampled field; empty optional on an empty level set.
std::optional<TestResult> isotropy_test(const GridField& field, double u,
                                        const Eigen::Vector2d& vstar,
                                        const IsotropicCovariance& cov,
                                        double alpha, int Q,
                                        IsoNullCache* cache = nullptr);

}  // namespace aniso
