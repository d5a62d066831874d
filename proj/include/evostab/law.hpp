#ifndef EVOSTAB_LAW_HPP
#define EVOSTAB_LAW_HPP

#include <memory>
#include <vector>

#include "evostab/kernel.hpp"
#include "evostab/linalg.hpp"

namespace evostab {

/// Analytic operator-valued material-law symbol M(w), evaluated throughout in
/// the frequency variable z (the law argument is w = 1/z, so a law value "at
/// frequency z" is M(1/z)). Expression tree:
///
///   Const(P)            : P
///   AffineInW(P, Q)     : P + w Q, i.e. P + Q/z at frequency z
///   ConvResolvent(k)    : (1 - K(z))^{-1}, K the kernel's Laplace transform
///   DelayFactor(h, L)   : L(z) e^{-h z}
///   Scale(s, L), Sum(L1..Lm), Product(L1, L2)
///
/// Values are immutable after construction; evaluation is pure. Every node
/// carries the largest half-plane Re z > -alpha_dom on which it is analytic
/// and evaluable; ConvResolvent requires |k|_{1,-alpha} < 1 at the kernel's
/// declared alpha (checked at construction).
class LawExpr {
public:
  enum class Kind { Const, AffineInW, ConvResolvent, DelayFactor, Scale, Sum, Product };

  static LawExpr constant(CMatrix p);
  static LawExpr constant(Complex p);  // 1x1
  static LawExpr affine_in_w(CMatrix p, CMatrix q);
  /// dim = 0 takes the kernel's own dimension; a scalar kernel with dim = n
  /// acts componentwise, (1 - K(z))^{-1} I_n.
  static LawExpr conv_resolvent(Kernel k, Eigen::Index dim = 0);
  static LawExpr delay_factor(double h, LawExpr inner);
  static LawExpr scale(double s, LawExpr inner);
  static LawExpr sum(std::vector<LawExpr> parts);
  static LawExpr product(LawExpr a, LawExpr b);
  /// Zero law of the given (square) dimension.
  static LawExpr zero(Eigen::Index n);

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  Kind kind() const;
  /// Largest a with the law analytic and evaluable on Re z > -a.
  double alpha_dom() const;
  bool is_zero() const;

  /// Value at frequency z. z = 0 evaluates the analytic limit where it exists
  /// (sets *limit_used); otherwise throws std::domain_error. Re z <= -alpha_dom
  /// or a non-invertible (1 - K(z)) also throw.
  CMatrix eval(Complex z, bool* limit_used = nullptr) const;

  /// Certified upper bound for sup ||M(1/z)|| over the half-plane Re z >= -rho,
  /// composed per family in closed form. Requires rho < alpha_dom. AffineInW
  /// with Q != 0 is genuinely unbounded there and yields +infinity.
  double sup_bound(double rho) const;

  /// Certified upper bound over the punctured ball B[0, delta] \ {0}.
  /// Requires delta < alpha_dom.
  double ball_bound(double delta) const;

private:
  struct Node;
  explicit LawExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Second-order material law M(w) = M0(w) + w M1(w) with exclusion-ball
/// radius r of the w-domain; in the frequency variable the constraint
/// w outside B[-r, r] is exactly Re z > -1/(2r).
struct SecondOrderLaw {
  LawExpr m0;
  LawExpr m1;
  double r = 0.0;

  SecondOrderLaw(LawExpr m0_, LawExpr m1_, double r_);

  Eigen::Index dim() const { return m0.rows(); }
  /// Largest a with both parts analytic and evaluable on Re z > -a.
  double analytic_alpha() const;
  /// analytic_alpha() intersected with the w-exclusion constraint
  /// Re z > -1/(2r); certificates must stay inside this half-plane.
  double domain_alpha() const;

  /// Frequency symbol z M(1/z) = z M0(1/z) + M1(1/z). z = 0 returns the
  /// analytic limit M1(0-limit) when it exists (flagged via limit_used).
  CMatrix eval_symbol(Complex z, bool* limit_used = nullptr) const;
};

struct BallSup {
  double analytic_bound = 0.0;  // certified: delta * bound(M0) + ball bound(M1)
  double grid_value = 0.0;      // diagnostic grid maximum
  Complex grid_argmax = 0.0;
};

/// sup of ||z M(1/z)|| over B[0, delta] \ {0}: closed-form certificate plus a
/// refined grid maximum for diagnostics. delta = 0 returns zeros.
BallSup sup_symbol_on_ball(const SecondOrderLaw& law, double delta, int grid_per_unit = 64);

}  // namespace evostab

#endif
