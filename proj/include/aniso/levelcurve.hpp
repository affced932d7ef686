#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "aniso/fieldsim.hpp"

namespace aniso {

struct CurveSegment {
  Eigen::Vector2d p0, p1;
  double length = 0.0;
  Eigen::Vector2d nu;  // unit gradient at the segment midpoint
};

struct LevelCurve {
  std::vector<CurveSegment> segments;
  double level = 0.0;
  double domain_area = 0.0;  // (2n)^2

  double total_length() const;
  bool empty() const { return segments.empty(); }
  void write_csv(std::ostream& os) const;
};

// Marching squares with linear edge interpolation; saddle cells are
// resolved by the sign of the cell-center average.  Segments whose
// midpoint gradient is numerically zero are dropped.
LevelCurve extract_level_curve(const GridField& field, double u);

// J_f^{(n)}(u) = (1/area) sum f(nu) * length, midpoint rule per segment.
double level_functional(const LevelCurve& curve,
                        const std::function<double(const Eigen::Vector2d&)>& f);
Eigen::Vector2d level_functional2(
    const LevelCurve& curve,
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f);

// Sign-folded direction functional: theta if <theta, vstar> >= 0, else -theta.
Eigen::Vector2d fstar_eval(const Eigen::Vector2d& theta,
                           const Eigen::Vector2d& vstar);

// Kernel-smoothed coarea functional J_f^{(n)}(u, sigma) as a grid Riemann
// sum with the Epanechnikov kernel.
double smoothed_functional(const GridField& field, double u, double sigma,
                           const std::function<double(const Eigen::Vector2d&)>& f);

// Observed pair (J_1, J_fstar) and the ratio coordinates in (vstar, vstarstar).
struct FunctionalTriple {
  double j_one = 0.0;
  Eigen::Vector2d j_star{0.0, 0.0};
  double x_n = 0.0;
  double y_n = 0.0;
  int n = 0;
};

// Empty optional encodes the typed "no crossing" outcome.
std::optional<FunctionalTriple> functional_triple(const GridField& field,
                                                  double u,
                                                  const Eigen::Vector2d& vstar);

}  // namespace aniso
