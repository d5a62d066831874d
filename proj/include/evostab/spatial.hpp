#ifndef EVOSTAB_SPATIAL_HPP
#define EVOSTAB_SPATIAL_HPP

#include <string>

#include "evostab/linalg.hpp"

namespace evostab {

/// Boundedly invertible spatial operator C (the reduced discrete gradient).
/// A rectangular full-column-rank input is reduced to its square invertible
/// core via the singular decomposition; C*C, the singular values and hence
/// the Poincare constant ||C^{-1}|| are preserved by the reduction.
struct SpatialC {
  CMatrix c;          // n x n, invertible
  CMatrix c_inv;      // precomputed inverse
  double sigma_min = 0.0;
  double c_inv_norm = 0.0;  // = 1 / sigma_min
  std::string provenance;

  Eigen::Index n() const { return c.rows(); }
  CMatrix adjoint() const { return c.adjoint(); }
  bool is_real() const;
};

/// Discrete gradient with vanishing boundary values on (0,1), n interior
/// nodes, h = 1/(n+1), reduced to square form. C*C is the 3-point Dirichlet
/// Laplacian tridiag(-1, 2, -1)/h^2 and sigma_min = (2/h) sin(pi/(2(n+1))).
SpatialC dirichlet_1d(int n);

/// Range-reduces a user matrix (m x n, m >= n, full column rank within
/// tolerance). Throws when rank deficient.
SpatialC reduce_user_matrix(const CMatrix& c_any, std::string provenance = "user matrix");

/// Loads a complex matrix from CSV with entries like "1.5", "2i", "1+2i";
/// dimensions inferred.
CMatrix read_complex_matrix_csv(const std::string& path);

/// Skew block operator of the first-order formulation.
struct BlockA {
  CMatrix a;  // 2n x 2n = [[0, C*], [-C, 0]]
  double a_inv_norm = 0.0;  // = ||C^{-1}||, by the closed block inverse
  Eigen::Index half = 0;

  /// A^{-1}(f, g) = (-C^{-1} g, C^{-*} f), applied via the block form.
  CVector apply_inverse(const CVector& fg) const;

private:
  friend BlockA block_a(const SpatialC& c);
  CMatrix c_inv_, c_adj_inv_;
};

BlockA block_a(const SpatialC& c);

}  // namespace evostab

#endif
