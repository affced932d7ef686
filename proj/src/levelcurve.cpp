#include "aniso/levelcurve.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace aniso {

namespace {

constexpr double kGradEps = 1e-10;

// Bilinear interpolation of the node gradients inside cell (i, j);
// (fx, fy) are local coordinates in [0, 1]^2.
Eigen::Vector2d cell_gradient(const GridField& field, int i, int j, double fx,
                              double fy) {
  auto g = [&](int a, int b) {
    return Eigen::Vector2d{field.grad_x(a, b), field.grad_y(a, b)};
  };
  return (1.0 - fx) * (1.0 - fy) * g(i, j) + fx * (1.0 - fy) * g(i + 1, j) +
         (1.0 - fx) * fy * g(i, j + 1) + fx * fy * g(i + 1, j + 1);
}

}  // namespace

double LevelCurve::total_length() const {
  double s = 0.0;
  for (const CurveSegment& seg : segments) s += seg.length;
  return s;
}

void LevelCurve::write_csv(std::ostream& os) const {
  os << "# schema=1\n";
  os << "x0,y0,x1,y1,len,nux,nuy\n";
  os.precision(17);
  for (const CurveSegment& s : segments)
    os << s.p0.x() << ',' << s.p0.y() << ',' << s.p1.x() << ',' << s.p1.y()
       << ',' << s.length << ',' << s.nu.x() << ',' << s.nu.y() << '\n';
}

LevelCurve extract_level_curve(const GridField& field, double u) {
  if (!field.has_gradient())
    throw std::invalid_argument("extract_level_curve: field has no gradients");
  LevelCurve curve;
  curve.level = u;
  curve.domain_area = 4.0 * static_cast<double>(field.half_width) *
                      field.half_width;
  const int n = field.nodes();
  const double h = field.spacing;
  const Eigen::MatrixXd& v = field.values;

  // Local edge coordinates of the crossing on the edge from corner a to b.
  auto frac = [u](double va, double vb) { return (u - va) / (vb - va); };

  for (int i = 0; i + 1 < n; ++i) {
    const double x0 = field.coord(i);
    for (int j = 0; j + 1 < n; ++j) {
      const double y0 = field.coord(j);
      const double v00 = v(i, j), v10 = v(i + 1, j);
      const double v01 = v(i, j + 1), v11 = v(i + 1, j + 1);
      const int mask = (v00 > u ? 1 : 0) | (v10 > u ? 2 : 0) |
                       (v01 > u ? 4 : 0) | (v11 > u ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      // Crossing points in cell-local coordinates, one per cut edge:
      // bottom (v00-v10), top (v01-v11), left (v00-v01), right (v10-v11).
      Eigen::Vector2d bottom{frac(v00, v10), 0.0};
      Eigen::Vector2d top{frac(v01, v11), 1.0};
      Eigen::Vector2d left{0.0, frac(v00, v01)};
      Eigen::Vector2d right{1.0, frac(v10, v11)};

      std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> local;
      switch (mask) {
        case 1: case 14: local = {{bottom, left}}; break;
        case 2: case 13: local = {{bottom, right}}; break;
        case 4: case 11: local = {{left, top}}; break;
        case 8: case 7:  local = {{top, right}}; break;
        case 3: case 12: local = {{left, right}}; break;
        case 5: case 10: local = {{bottom, top}}; break;
        case 6: case 9: {
          // Saddle: the cell-center average decides which diagonal pair of
          // corners the above-region connects through the middle.
          const bool center_above = (v00 + v10 + v01 + v11) / 4.0 > u;
          if (center_above == (mask == 6))
            local = {{bottom, left}, {top, right}};
          else
            local = {{bottom, right}, {left, top}};
          break;
        }
      }

      for (const auto& [a, b] : local) {
        CurveSegment seg;
        seg.p0 = {x0 + h * a.x(), y0 + h * a.y()};
        seg.p1 = {x0 + h * b.x(), y0 + h * b.y()};
        seg.length = (seg.p1 - seg.p0).norm();
        if (!(seg.length > 0.0)) continue;
        const Eigen::Vector2d mid = 0.5 * (a + b);
        const Eigen::Vector2d grad = cell_gradient(field, i, j, mid.x(), mid.y());
        const double norm = grad.norm();
        if (norm < kGradEps) continue;
        seg.nu = grad / norm;
        curve.segments.push_back(seg);
      }
    }
  }
  return curve;
}

double level_functional(const LevelCurve& curve,
                        const std::function<double(const Eigen::Vector2d&)>& f) {
  double s = 0.0;
  for (const CurveSegment& seg : curve.segments) s += f(seg.nu) * seg.length;
  return s / curve.domain_area;
}

Eigen::Vector2d level_functional2(
    const LevelCurve& curve,
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) {
  Eigen::Vector2d s{0.0, 0.0};
  for (const CurveSegment& seg : curve.segments) s += f(seg.nu) * seg.length;
  return s / curve.domain_area;
}

Eigen::Vector2d fstar_eval(const Eigen::Vector2d& theta,
                           const Eigen::Vector2d& vstar) {
  if (std::abs(theta.norm() - 1.0) > 1e-9 || std::abs(vstar.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("fstar_eval: arguments must be unit vectors");
  return theta.dot(vstar) >= 0.0 ? theta : Eigen::Vector2d(-theta);
}

double smoothed_functional(const GridField& field, double u, double sigma,
                           const std::function<double(const Eigen::Vector2d&)>& f) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("smoothed_functional: sigma must be > 0");
  if (!field.has_gradient())
    throw std::invalid_argument("smoothed_functional: field has no gradients");
  const int n = field.nodes();
  const double h = field.spacing;
  const double area = 4.0 * static_cast<double>(field.half_width) *
                      field.half_width;
  // Riemann sum with trapezoid boundary weights so the node cells tile
  // [-n, n]^2 exactly.
  auto axis_weight = [n](int k) { return (k == 0 || k == n - 1) ? 0.5 : 1.0; };
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double z = (u - field.values(i, j)) / sigma;
      if (std::abs(z) >= 1.0) continue;
      const double kern = 0.75 * (1.0 - z * z) / sigma;  // Epanechnikov
      const Eigen::Vector2d grad{field.grad_x(i, j), field.grad_y(i, j)};
      const double norm = grad.norm();
      if (norm < kGradEps) continue;
      s += f(grad / norm) * kern * norm * h * h * axis_weight(i) * axis_weight(j);
    }
  return s / area;
}

std::optional<FunctionalTriple> functional_triple(const GridField& field,
                                                  double u,
                                                  const Eigen::Vector2d& vstar) {
  const LevelCurve curve = extract_level_curve(field, u);
  if (curve.empty()) return std::nullopt;
  FunctionalTriple t;
  t.n = field.half_width;
  t.j_one = level_functional(curve, [](const Eigen::Vector2d&) { return 1.0; });
  if (!(t.j_one > 0.0)) return std::nullopt;
  t.j_star = level_functional2(
      curve, [&vstar](const Eigen::Vector2d& nu) { return fstar_eval(nu, vstar); });
  const Eigen::Vector2d ratio = t.j_star / t.j_one;
  const Eigen::Vector2d vss{-vstar.y(), vstar.x()};
  t.x_n = ratio.dot(vstar);
  t.y_n = ratio.dot(vss);
  return t;
}

}  // namespace aniso
