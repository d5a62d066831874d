#ifndef EVOSTAB_REFORMULATION_HPP
#define EVOSTAB_REFORMULATION_HPP

#include <utility>

#include "evostab/law.hpp"
#include "evostab/spatial.hpp"
#include "evostab/trajectory.hpp"

namespace evostab {

/// First-order reformulation of the second-order problem in the unknowns
/// v = d/dt u + d*u and q = C u. The block material law
///
///   M_d(w) = [[M(w), 0], [0, 1]]
///          + d w [[-M0(w), (d M0(w) - M1(w)) C^{-1}], [0, 1]]
///
/// splits as M_d = Mtilde_d + w N_d with Mtilde_d carrying only the
/// M0-dependence and N_d only the M1-dependence, so the reformulated system
/// is itself a first-order law with parts (Mtilde_d, N_d).
struct FirstOrderSystem {
  LawExpr md;         // full block law, 2n x 2n
  LawExpr md_tilde;   // M0-only part
  LawExpr nd;         // M1-only part (zero law when M1 is absent)
  SecondOrderLaw first_order_law;  // {m0 = md_tilde, m1 = nd, r = base.r}
  BlockA a;
  double d = 0.0;
  SecondOrderLaw base;
  SpatialC c;

  /// Sharp row-block bound sqrt(1 + d^2 ||C^{-1}||^2) * sup||M1|| on Re z >= -rho,
  /// tighter than the generic composed bound for N_d.
  double nd_sup_bound(double rho) const;
  double nd_ball_bound(double delta) const;

  /// Full frequency symbol z M_d(1/z) of the reformulated problem (A added by
  /// callers).
  CMatrix eval_symbol(Complex z, bool* limit_used = nullptr) const {
    return first_order_law.eval_symbol(z, limit_used);
  }
};

/// Builds the d-parameterized block law compositionally. d = 0 degenerates to
/// diag(M(w), 1) and is allowed for identity checks.
FirstOrderSystem build_md(const SecondOrderLaw& law, const SpatialC& c, double d);

/// The (Mtilde_d, N_d) split alone. Throws when the law has no M1 part.
std::pair<LawExpr, LawExpr> split_md(const SecondOrderLaw& law, const SpatialC& c, double d);

/// Recovers the second-order unknowns from first-order trajectories:
/// u = C^{-1} q and du/dt = v - d u. Grids must match; C must be real.
std::pair<Trajectory, Trajectory> recover_u(const Trajectory& v, const Trajectory& q,
                                            const SpatialC& c, double d);

}  // namespace evostab

#endif
