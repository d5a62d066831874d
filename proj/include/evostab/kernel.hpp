#ifndef EVOSTAB_KERNEL_HPP
#define EVOSTAB_KERNEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "evostab/linalg.hpp"

namespace evostab {

/// One mode of an exponential-sum kernel: coef * exp(-rate * t), rate > 0.
struct ExpTerm {
  double coef = 0.0;
  double rate = 1.0;
};

struct AdmissibilityReport {
  bool weakly_measurable = false;   // t -> <k(t)x|y> measurable
  bool norm_measurable = false;     // t -> ||k(t)|| measurable
  bool weighted_l1_below_one = false;
  bool selfadjoint = false;
  bool commuting = false;
  double weighted_l1 = 0.0;         // |k|_{1,-alpha} at the declared alpha
  double alpha = 0.0;
  bool weighted_l1_conservative = false;  // value is an upper bound, not exact
  double commutator_norm = 0.0;           // recorded check, exact 0 for diagonal
  std::string notes;

  bool all_pass() const {
    return weakly_measurable && norm_measurable && weighted_l1_below_one && selfadjoint &&
           commuting;
  }
};

/// Certified bound paired with a success flag; `value` is meaningful only
/// when `certified` is true.
struct CertifiedBound {
  double value = 0.0;
  bool certified = false;
  std::string note;
};

/// Memory kernel k(t) for the convolution term (1 - k*). Three families:
/// scalar exponential sums, diagonal (operator-valued) exponential sums,
/// and sampled tables (validation only).
class Kernel {
public:
  enum class Family { ExpSum, DiagExpSum, Sampled };

  static Kernel exp_sum(std::vector<ExpTerm> terms, double alpha);
  static Kernel diag_exp_sum(std::vector<std::vector<ExpTerm>> channels, double alpha);
  /// Sampled table (t_i, k(t_i)), t strictly increasing from 0, with a declared
  /// exponential tail rate used to close the quadrature beyond the last node.
  static Kernel sampled(std::vector<double> t, std::vector<double> k, double tail_rate,
                        double alpha);
  /// Reads a two-column CSV "t,k" with header.
  static Kernel sampled_from_csv(const std::string& path, double tail_rate, double alpha);

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  /// Spatial dimension of k(t): 1 for scalar families, #channels for diagonal.
  int dim() const;
  bool is_zero() const;
  /// Smallest decay rate min_j beta_j (ExpSum families) or the declared tail rate.
  double min_rate() const;
  const std::vector<ExpTerm>& terms() const;
  const std::vector<std::vector<ExpTerm>>& channels() const { return channels_; }

  /// K(z) = integral_0^inf e^{-zt} k(t) dt, the one-sided Laplace transform,
  /// exact for exponential sums. Requires Re z > -min_rate().
  Complex laplace(Complex z) const;
  /// Operator-valued version (diagonal matrix for DiagExpSum, 1x1 otherwise).
  CMatrix laplace_matrix(Complex z) const;

  /// |k|_{1,-a} = integral_0^inf e^{at} ||k(t)|| dt. Exact closed form for
  /// nonnegative scalar exponential sums; term-wise |.| upper bound for mixed
  /// signs and quadrature + tail bound for diagonal families (both flagged
  /// conservative). Throws std::domain_error when a >= min_rate().
  double weighted_l1_norm(double a, bool* conservative = nullptr) const;

  /// Structural admissibility checks for the memory material law.
  AdmissibilityReport admissibility_report() const;

  /// Certified g(rho) with t * Im k̂(t - i rho) <= -g(rho) for all |t| >= delta.
  /// Closed form per mode for nonnegative exponential sums; for mixed signs the
  /// term-wise bound is attempted and failure is reported, not decided.
  CertifiedBound transform_sign_margin(double delta, double rho) const;

  /// True iff k'(t) <= -alpha0 k(t) for all t >= 0 (exponential sums with
  /// nonnegative coefficients and k(0) > 0). Throws on other families.
  bool has_decay_rate(double alpha0) const;
  /// Largest alpha0 for which has_decay_rate holds (= min_j beta_j).
  double decay_rate_sup() const;

  /// Phi(t) = -(1 + t^2)/t * Im k̂(t + i alpha), evaluated in closed form;
  /// t = 0 returns the analytic limit. Requires 0 < alpha < decay_rate_sup().
  double envelope_phi(double alpha, double t) const;
  /// inf_{t>0} Phi(t) via per-mode closed-form infima; certified > 0 so that
  /// Im k̂(t + i alpha) <= -c t/(1 + t^2) for all t > 0.
  double envelope_inf(double alpha) const;

private:
  Kernel() = default;
  const std::vector<ExpTerm>& scalar_terms_checked(const char* op) const;

  Family family_ = Family::ExpSum;
  double alpha_ = 0.0;
  std::vector<ExpTerm> terms_;                  // ExpSum
  std::vector<std::vector<ExpTerm>> channels_;  // DiagExpSum
  std::vector<double> sample_t_, sample_k_;     // Sampled
  double tail_rate_ = 0.0;
};

/// g(rho) = c / (sqrt(2 pi) (alpha + rho + 1)^2) * delta^2 / (1 + delta^2):
/// the margin produced by a strongly positive definite scalar kernel with
/// sine-transform constant c.
double g_from_positivity_constant(double c, double alpha, double delta, double rho);

/// Composite-trapezoid Laplace transform of a sampled table with an analytic
/// exponential-tail correction. Independent oracle for Kernel::laplace.
Complex quadrature_laplace(const std::vector<double>& t, const std::vector<double>& k,
                           Complex z, double tail_rate);

}  // namespace evostab

#endif
