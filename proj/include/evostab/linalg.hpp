#ifndef EVOSTAB_LINALG_HPP
#define EVOSTAB_LINALG_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace evostab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Relative threshold below which a matrix counts as rank deficient:
/// sigma_min <= kSingularTol * sigma_max.
inline constexpr double kSingularTol = 1e-12;

class SingularMatrixError : public std::runtime_error {
public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// Smallest eigenvalue of the Hermitian part (S + S*)/2.
/// Satisfies Re<Sx|x> >= herm_min_eig(S) |x|^2 for every x.
double herm_min_eig(const CMatrix& s);

/// Same, together with a minimizing unit eigenvector.
std::pair<double, CVector> herm_min_eigpair(const CMatrix& s);

/// Operator (spectral) norm: largest singular value.
double op_norm(const CMatrix& s);

/// Smallest singular value; 0 iff rank deficient within tolerance.
double smallest_sv(const CMatrix& s);

/// Solves S x = b by LU with partial pivoting. Throws SingularMatrixError
/// when S is singular within tolerance (pivot ratio or residual check).
CVector solve(const CMatrix& s, const CVector& b);

CMatrix cidentity(Eigen::Index n);

}  // namespace evostab

#endif
