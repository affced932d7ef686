#include <doctest.h>

#include <cmath>

#include "aniso/estimator.hpp"
#include "aniso/isotest.hpp"
#include "aniso/rng.hpp"

using namespace aniso;

TEST_CASE("statistic T is null-centered and linear") {
  FunctionalTriple triple;
  triple.n = 10;
  triple.j_one = 0.2;
  const Eigen::Vector2d vstar{1.0, 0.0};
  triple.j_star = 0.2 * (2.0 / M_PI) * vstar;
  CHECK(statistic_T(triple, vstar, 10).norm() < 1e-14);
  // x_n = 2/pi + 1/(2n), y_n = 0 maps to (1, 0)
  triple.j_star = 0.2 * (2.0 / M_PI + 1.0 / 20.0) * vstar;
  const Eigen::Vector2d t = statistic_T(triple, vstar, 10);
  CHECK(t.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(t.y()) < 1e-14);
  FunctionalTriple empty;
  CHECK_THROWS_AS(statistic_T(empty, vstar, 10), std::invalid_argument);
}

TEST_CASE("statistic Xi algebra") {
  IsoNullStack null_stack;
  null_stack.r_factor = Eigen::Matrix2d::Identity();
  null_stack.gamma = {1.0, 1.0};
  const TestResult zero =
      statistic_Xi({0.0, 0.0}, 1.0, null_stack, 0.05, 10);
  CHECK(zero.xi == 0.0);
  CHECK(zero.p_value == 1.0);
  CHECK_FALSE(zero.reject);
  const Eigen::Vector2d s{0.7, -1.2};
  const TestResult plain = statistic_Xi(s, 1.0, null_stack, 0.05, 10);
  CHECK(plain.xi == doctest::Approx(s.squaredNorm()).epsilon(1e-12));
  CHECK(plain.xi == doctest::Approx(plain.s_vec.squaredNorm()).epsilon(1e-12));
  CHECK(plain.p_value == doctest::Approx(std::exp(-plain.xi / 2.0)));
}

TEST_CASE("Xi is invariant to the sign of the unitary factor") {
  IsotropicCovariance cov;
  AffineModel unit;
  const CovarianceStack stack = build_stack(0.0, cov, unit, 4);
  IsoNullStack a = IsoNullStack::from_stack(stack);
  IsoNullStack b = a;
  b.r_factor.col(0) *= -1.0;  // another valid eigenvector choice
  const Eigen::Vector2d t{0.4, 0.9};
  const double xi_a = statistic_Xi(t, 1.3, a, 0.05, 10).xi;
  const double xi_b = statistic_Xi(t, 1.3, b, 0.05, 10).xi;
  CHECK(xi_a == doctest::Approx(xi_b).epsilon(1e-10));
}

TEST_CASE("decision rule") {
  const Decision d = decide(1.0, 0.05);
  CHECK(d.gamma == doctest::Approx(5.9915).epsilon(1e-4));
  CHECK_FALSE(d.reject);
  CHECK(decide(6.0, 0.05).reject);
  CHECK_FALSE(decide(0.0, 0.5).reject);  // xi = 0 never rejects
  CHECK_THROWS_AS(decide(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("null distribution: mean of Xi near 2 at moderate size") {
  IsotropicCovariance cov;
  AffineModel iso;
  const CirculantEmbedding embedding(cov, iso, 15, 0.25);
  IsoNullCache cache;
  double sum = 0.0;
  int m = 0;
  for (int r = 0; r < 200; ++r) {
    const GridField f = embedding.sample(replicate_seed(888, r));
    const auto res = isotropy_test(f, 0.0, {1.0, 0.0}, cov, 0.05, 4, &cache);
    if (!res) continue;
    sum += res->xi;
    ++m;
  }
  REQUIRE(m > 190);
  const double mean = sum / m;
  CHECK(mean > 1.2);
  CHECK(mean < 3.2);
}

TEST_CASE("power against a strongly anisotropic alternative") {
  IsotropicCovariance cov;
  AffineModel model{1.0, 0.5, 0.4, {1.0, 0.0}};
  const CirculantEmbedding embedding(cov, model, 20, 0.25);
  IsoNullCache cache;
  int rejections = 0, m = 0;
  for (int r = 0; r < 200; ++r) {
    const GridField f = embedding.sample(replicate_seed(999, r));
    const auto res = isotropy_test(f, 0.0, {1.0, 0.0}, cov, 0.05, 4, &cache);
    if (!res) continue;
    ++m;
    if (res->reject) ++rejections;
  }
  REQUIRE(m > 190);
  CHECK(static_cast<double>(rejections) / m >= 0.8);
}

TEST_CASE("Xi normalization trends with n") {
  IsotropicCovariance cov;
  IsoNullCache cache;
  auto mean_xi_scaled = [&](double lambda, int n) {
    AffineModel model{1.0, lambda, 0.4, {1.0, 0.0}};
    const CirculantEmbedding embedding(cov, model, n, 0.25);
    double sum = 0.0;
    int m = 0;
    for (int r = 0; r < 60; ++r) {
      const GridField f = embedding.sample(replicate_seed(1212, r));
      const auto res = isotropy_test(f, 0.0, {1.0, 0.0}, cov, 0.05, 4, &cache);
      if (!res) continue;
      sum += res->xi;
      ++m;
    }
    return sum / m / (4.0 * n * n);
  };
  // under the alternative Xi/(2n)^2 stays near a positive constant while
  // under the null it decays like 1/n^2
  const double alt10 = mean_xi_scaled(0.5, 10);
  const double alt20 = mean_xi_scaled(0.5, 20);
  CHECK(alt20 > 0.0);
  CHECK(std::abs(std::log(alt20 / alt10)) < std::log(2.5));
  const double iso10 = mean_xi_scaled(1.0, 10);
  const double iso20 = mean_xi_scaled(1.0, 20);
  CHECK(iso20 < iso10);
  CHECK(iso20 < 0.5 * alt20);
}
