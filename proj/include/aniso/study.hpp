#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aniso/affine.hpp"
#include "aniso/covariance.hpp"
#include "aniso/estimator.hpp"
#include "aniso/isotest.hpp"

namespace aniso {

struct StudyConfig {
  IsotropicCovariance cov;
  AffineModel model;
  std::vector<int> n_list;
  double h = 0.25;
  double u = 0.0;
  int chaos_order = 6;
  int replicates = 200;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  int threads = 1;
  std::string out_dir = ".";

  static StudyConfig from_file(const std::string& path);
  static StudyConfig from_string(const std::string& text);
  void validate() const;
};

// Deterministic worker pool: body(r) runs for r = 0..count-1, results are
// whatever body writes into preallocated slots, so thread count never
// changes the output.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf);

struct EstimateRow {
  int n = 0;
  int replicate = 0;
  bool no_crossing = false;
  EstimateResult result;
};

struct TestRow {
  int n = 0;
  int replicate = 0;
  bool no_crossing = false;
  TestResult result;
};

struct StudySummary {
  int n = 0;
  double bias_lambda = 0.0, rmse_lambda = 0.0;
  double bias_theta = 0.0, rmse_theta = 0.0;
  double median_abs_lambda_err = 0.0;
  double rejection_rate = 0.0;
  double ks_clt = 0.0;  // standardized 2n(lambda_hat - lambda) vs N(0,1)
  int crossings = 0;
  // mean |J_1(u, sigma) - J_1(u)| for sigma = 0.4, 0.2, 0.1
  double smooth_gap[3] = {0.0, 0.0, 0.0};
};

std::vector<EstimateRow> run_estimates(const StudyConfig& config);
std::vector<TestRow> run_tests(const StudyConfig& config);
std::vector<StudySummary> run_study(const StudyConfig& config);

std::string estimate_csv(const std::vector<EstimateRow>& rows, double u);
std::string test_csv(const std::vector<TestRow>& rows, double u, double alpha);
std::string study_csv(const std::vector<StudySummary>& rows);

// Minimal line-plot SVG: one polyline per series over shared x values.
std::string svg_line_plot(const std::vector<double>& x,
                          const std::vector<std::vector<double>>& series,
                          const std::vector<std::string>& labels,
                          const std::string& title);

}  // namespace aniso
