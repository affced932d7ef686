#include "aniso/fieldsim.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "aniso/fft.hpp"
#include "aniso/rng.hpp"

namespace aniso {

namespace {

constexpr char kMagic[4] = {'G', 'R', 'F', '2'};

#pragma pack(push, 1)
struct FileHeader {
  char magic[4];
  std::uint32_t half_width;
  double spacing;
  std::uint32_t rows;
  std::uint32_t cols;
  std::uint64_t seed;
};
#pragma pack(pop)
static_assert(sizeof(FileHeader) == 32, "field file header must be 32 bytes");

}  // namespace

void GridField::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open field file for writing: " + path);
  FileHeader hdr{};
  std::memcpy(hdr.magic, kMagic, 4);
  hdr.half_width = static_cast<std::uint32_t>(half_width);
  hdr.spacing = spacing;
  hdr.rows = static_cast<std::uint32_t>(values.rows());
  hdr.cols = static_cast<std::uint32_t>(values.cols());
  hdr.seed = seed;
  os.write(reinterpret_cast<const char*>(&hdr), sizeof(hdr));
  for (int i = 0; i < values.rows(); ++i)
    for (int j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!os) throw std::runtime_error("field file write failed: " + path);
}

GridField GridField::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open field file: " + path);
  FileHeader hdr{};
  is.read(reinterpret_cast<char*>(&hdr), sizeof(hdr));
  if (!is || std::memcmp(hdr.magic, kMagic, 4) != 0)
    throw std::runtime_error("not a GRF2 field file: " + path);
  GridField f;
  f.half_width = static_cast<int>(hdr.half_width);
  f.spacing = hdr.spacing;
  f.seed = hdr.seed;
  f.values.resize(hdr.rows, hdr.cols);
  for (std::uint32_t i = 0; i < hdr.rows; ++i)
    for (std::uint32_t j = 0; j < hdr.cols; ++j) {
      double v;
      is.read(reinterpret_cast<char*>(&v), sizeof(v));
      f.values(i, j) = v;
    }
  if (!is) throw std::runtime_error("field file truncated: " + path);
  gradient_field(f);
  return f;
}

void GridField::write_csv(std::ostream& os) const {
  os << "# schema=1\n";
  os << "x,y,value\n";
  os.precision(17);
  for (int i = 0; i < values.rows(); ++i)
    for (int j = 0; j < values.cols(); ++j)
      os << coord(i) << ',' << coord(j) << ',' << values(i, j) << '\n';
}

void gradient_field(GridField& field) {
  const int n = field.nodes();
  const double h = field.spacing;
  field.grad_x.resize(n, n);
  field.grad_y.resize(n, n);
  const Eigen::MatrixXd& v = field.values;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0)
        field.grad_x(i, j) = (v(1, j) - v(0, j)) / h;
      else if (i == n - 1)
        field.grad_x(i, j) = (v(n - 1, j) - v(n - 2, j)) / h;
      else
        field.grad_x(i, j) = (v(i + 1, j) - v(i - 1, j)) / (2.0 * h);
      if (j == 0)
        field.grad_y(i, j) = (v(i, 1) - v(i, 0)) / h;
      else if (j == n - 1)
        field.grad_y(i, j) = (v(i, n - 1) - v(i, n - 2)) / h;
      else
        field.grad_y(i, j) = (v(i, j + 1) - v(i, j - 1)) / (2.0 * h);
    }
}

CirculantEmbedding::CirculantEmbedding(const IsotropicCovariance& cov,
                                       const AffineModel& model, int n,
                                       double h)
    : n_(n), h_(h) {
  cov.validate();
  model.validate();
  const double ratio = 2.0 * n / h;
  const int m = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - m) > 1e-9 || m % 2 != 0 || m < 8)
    throw std::invalid_argument(
        "sample_field: 2n/h must be an even integer >= 8");
  if (h > cov.length_scale / (3.0 * model.lambda1))
    throw std::invalid_argument(
        "sample_field: h too coarse for the correlation length (need h <= "
        "rho/(3 lambda1))");
  grid_nodes_ = m + 1;
  torus_ = next_pow2(2 * grid_nodes_);
  const Eigen::Matrix2d a = model.A();
  std::vector<std::complex<double>> c(
      static_cast<std::size_t>(torus_) * torus_);
  for (int i = 0; i < torus_; ++i) {
    const int wi = i <= torus_ / 2 ? i : i - torus_;
    for (int j = 0; j < torus_; ++j) {
      const int wj = j <= torus_ / 2 ? j : j - torus_;
      const Eigen::Vector2d tau{wi * h, wj * h};
      c[static_cast<std::size_t>(i) * torus_ + j] = cov(a * tau);
    }
  }
  fft2(c, torus_);
  double max_eig = 0.0;
  for (const auto& z : c) max_eig = std::max(max_eig, z.real());
  const double tol = 1e-8 * max_eig;
  sqrt_eigs_.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    double eig = c[k].real();
    if (eig < -tol)
      throw std::runtime_error("embedding failed: enlarge domain");
    if (eig < 0.0) {
      eig = 0.0;
      ++clip_warnings_;
    }
    sqrt_eigs_[k] = std::sqrt(eig) / torus_;
  }
}

GridField CirculantEmbedding::sample(std::uint64_t seed) const {
  GaussianStream gauss(seed);
  std::vector<std::complex<double>> noise(sqrt_eigs_.size());
  for (std::size_t k = 0; k < noise.size(); ++k) {
    const double re = gauss.next();
    const double im = gauss.next();
    noise[k] = sqrt_eigs_[k] * std::complex<double>(re, im);
  }
  fft2(noise, torus_);
  GridField field;
  field.half_width = n_;
  field.spacing = h_;
  field.seed = seed;
  field.clip_warnings = clip_warnings_;
  field.values.resize(grid_nodes_, grid_nodes_);
  for (int i = 0; i < grid_nodes_; ++i)
    for (int j = 0; j < grid_nodes_; ++j)
      field.values(i, j) = noise[static_cast<std::size_t>(i) * torus_ + j].real();
  gradient_field(field);
  return field;
}

GridField sample_field(const IsotropicCovariance& cov, const AffineModel& model,
                       int n, double h, std::uint64_t seed) {
  CirculantEmbedding embedding(cov, model, n, h);
  return embedding.sample(seed);
}

}  // namespace aniso
