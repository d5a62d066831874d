#include "evostab/spatial.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace evostab {

bool SpatialC::is_real() const { return c.imag().isZero(0.0); }

namespace {

SpatialC from_core(CMatrix core, double sigma_min, std::string provenance) {
  SpatialC out;
  out.c_inv = core.partialPivLu().solve(CMatrix::Identity(core.rows(), core.cols()));
  out.c = std::move(core);
  out.sigma_min = sigma_min;
  out.c_inv_norm = 1.0 / sigma_min;
  out.provenance = std::move(provenance);
  return out;
}

}  // namespace

SpatialC dirichlet_1d(int n) {
  if (n < 1) throw std::invalid_argument("dirichlet_1d: need at least one grid point");
  const double h = 1.0 / (n + 1);
  // Forward differences of the zero-extended node values: (n+1) x n.
  RMatrix d = RMatrix::Zero(n + 1, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 1.0 / h;
    d(i + 1, i) = -1.0 / h;
  }
  Eigen::JacobiSVD<RMatrix> svd(d, Eigen::ComputeThinV);
  // Square core Sigma V^T: same C*C, same singular values as the full gradient.
  RMatrix core = svd.singularValues().asDiagonal() * svd.matrixV().transpose();
  double smin = svd.singularValues()(n - 1);
  return from_core(core.cast<Complex>(), smin,
                   "dirichlet_1d(" + std::to_string(n) + ")");
}

SpatialC reduce_user_matrix(const CMatrix& c_any, std::string provenance) {
  if (c_any.rows() < c_any.cols()) {
    throw std::invalid_argument("spatial: matrix must have at least as many rows as columns");
  }
  Eigen::JacobiSVD<CMatrix> svd(c_any, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double smax = sv(0);
  double smin = sv(sv.size() - 1);
  if (!(smin > kSingularTol * smax) || smax == 0.0) {
    throw std::invalid_argument("spatial: matrix is rank deficient, no invertible core");
  }
  CMatrix core = sv.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
  return from_core(std::move(core), smin, std::move(provenance));
}

CMatrix read_complex_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("spatial: cannot open " + path);
  auto parse_entry = [&](std::string cell) -> Complex {
    // Accepted forms: "a", "bi", "a+bi", "a-bi" (also with j).
    cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
    if (cell.empty()) throw std::invalid_argument("spatial: empty CSV cell in " + path);
    for (auto& ch : cell) {
      if (ch == 'j') ch = 'i';
    }
    if (cell.back() != 'i') return Complex(std::stod(cell), 0.0);
    cell.pop_back();
    if (cell.empty() || cell == "+") return Complex(0.0, 1.0);
    if (cell == "-") return Complex(0.0, -1.0);
    // Split at the last +/- that is not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = cell.size(); i-- > 1;) {
      if ((cell[i] == '+' || cell[i] == '-') && cell[i - 1] != 'e' && cell[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    if (split == std::string::npos) return Complex(0.0, std::stod(cell));
    double re = std::stod(cell.substr(0, split));
    std::string imtxt = cell.substr(split);
    double im = (imtxt == "+") ? 1.0 : (imtxt == "-") ? -1.0 : std::stod(imtxt);
    return Complex(re, im);
  };

  std::vector<std::vector<Complex>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Complex> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_entry(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("spatial: ragged CSV rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("spatial: empty CSV " + path);
  CMatrix m(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

CVector BlockA::apply_inverse(const CVector& fg) const {
  if (fg.size() != 2 * half) throw std::invalid_argument("block A: dimension mismatch");
  CVector out(2 * half);
  out.head(half) = -(c_inv_ * fg.tail(half));
  out.tail(half) = c_adj_inv_ * fg.head(half);
  return out;
}

BlockA block_a(const SpatialC& c) {
  BlockA out;
  Eigen::Index n = c.n();
  out.half = n;
  out.a = CMatrix::Zero(2 * n, 2 * n);
  out.a.topRightCorner(n, n) = c.adjoint();
  out.a.bottomLeftCorner(n, n) = -c.c;
  out.a_inv_norm = c.c_inv_norm;
  out.c_inv_ = c.c_inv;
  out.c_adj_inv_ = c.c_inv.adjoint();
  return out;
}

}  // namespace evostab
