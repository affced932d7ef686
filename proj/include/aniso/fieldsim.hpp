#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "aniso/affine.hpp"
#include "aniso/covariance.hpp"

namespace aniso {

// Sampled affine field X(t) = Z(At) on the regular grid over [-n, n]^2.
// value(i, j) sits at t = (-n + i h, -n + j h).
struct GridField {
  int half_width = 0;  // n
  double spacing = 0.25;
  std::uint64_t seed = 0;
  Eigen::MatrixXd values;
  Eigen::MatrixXd grad_x, grad_y;  // filled by gradient_field
  int clip_warnings = 0;  // embedding eigenvalues clipped to zero

  int nodes() const { return static_cast<int>(values.rows()); }
  double coord(int i) const { return -half_width + i * spacing; }
  bool has_gradient() const { return grad_x.size() == values.size(); }

  void save(const std::string& path) const;       // 32-byte header + doubles
  static GridField load(const std::string& path);
  void write_csv(std::ostream& os) const;
};

// Central differences in the interior, one-sided at the boundary.
void gradient_field(GridField& field);

// Exact sampler for the stationary covariance r_x(tau) = r_z(A tau) by
// circulant embedding on a doubled torus; the factorized embedding is
// reusable across replicates.
class CirculantEmbedding {
 public:
  CirculantEmbedding(const IsotropicCovariance& cov, const AffineModel& model,
                     int n, double h);
  GridField sample(std::uint64_t seed) const;
  int clip_warnings() const { return clip_warnings_; }

 private:
  int n_;
  double h_;
  int grid_nodes_;
  int torus_;
  std::vector<double> sqrt_eigs_;  // sqrt(eigenvalue)/torus
  int clip_warnings_ = 0;
};

GridField sample_field(const IsotropicCovariance& cov, const AffineModel& model,
                       int n, double h, std::uint64_t seed);

}  // namespace aniso
