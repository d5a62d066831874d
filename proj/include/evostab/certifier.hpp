#ifndef EVOSTAB_CERTIFIER_HPP
#define EVOSTAB_CERTIFIER_HPP

#include <optional>
#include <string>
#include <vector>

#include "evostab/kernel.hpp"
#include "evostab/law.hpp"
#include "evostab/reformulation.hpp"
#include "evostab/spatial.hpp"

namespace evostab {

struct GridOptions {
  double rho_max = 2.0;       // right edge of the truncated positivity region
  double t_max_factor = 50.0; // T_max = factor * (1 + ||A||)
  int re_points = 13;
  int im_points = 49;         // per sign, log-spaced up to T_max
  int ring_points = 32;       // samples just outside the exclusion ball
};

struct GridSample {
  Complex z;
  double herm_min = 0.0;  // smallest eigenvalue of Re(z M(1/z))
  double inv_norm = 0.0;  // ||(z M(1/z) + A)^{-1}||
  bool in_ball = false;
};

struct GridEvidence {
  std::vector<GridSample> samples;
  double c_grid = 0.0;       // min herm over samples outside the ball
  double c_tail = 0.0;       // analytic tail bound
  bool tail_binding = false; // tail < grid minimum
  double sup_inv_norm = 0.0;
  Complex argmax_inv = 0.0;
};

/// Core outcome of the two frequency-domain conditions: the ball bound
/// K = sup_{B[0,delta]\{0}} ||z M(1/z)|| < ||A^{-1}||^{-1} and the positivity
/// Re z M(1/z) >= c > 0 on {Re z > -rho0} \ B[0,delta]. The positivity
/// constant combines the supplied analytic tail with the grid minimum over
/// the truncated region; the proof-grade resolvent bounds 1/c (outside the
/// ball) and ||A^{-1}||/(1 - K ||A^{-1}||) (inside) are recorded.
struct Prop31Result {
  bool ok = false;
  std::string failure;  // names the violated condition
  double delta = 0.0;
  double rho0 = 0.0;
  double c = 0.0;
  double k_bound = 0.0;      // certified (closed-form) ball bound
  double k_grid = 0.0;       // diagnostic grid value on the ball
  double a_norm = 0.0;
  double a_inv_norm = 0.0;
  double inv_bound_outside = 0.0;  // 1/c
  double inv_bound_inside = 0.0;   // ||A^{-1}||/(1 - K ||A^{-1}||)
  double resolvent_bound = 0.0;    // max of the two
  GridEvidence evidence;
};

Prop31Result check_prop31(const SecondOrderLaw& symbol_law, const CMatrix& a,
                          double a_inv_norm, double delta, double rho0, double c_tail,
                          std::optional<double> k_override, const GridOptions& opts);

/// Positivity constants of the memory material law (1 - K(z))^{-1}: the
/// largest rho0 (bisection, 40 iterations, then 0.9 safety) with
///   (-rho0 (1 + |k|) + sqrt(2 pi) inf_{[-rho0, rho0]} g) / (1 + |k|)^2 > 0,
/// and c = min of the two closed-form region bounds at that rho0.
struct IntegroPositivity {
  double rho0 = 0.0;
  double c = 0.0;
  double norm_k = 0.0;            // |k|_{1,-alpha}
  double g_at_rho0 = 0.0;
  double bound_near_axis = 0.0;   // |Re z| <= rho0 expression
  double bound_right = 0.0;       // Re z > rho0 expression
};

IntegroPositivity memory_positivity_constants(const Kernel& kernel, double alpha, double delta);

/// K(d) = ||M0|| + (d ||M0|| + ||M1|| ||C^{-1}||)^2, the positivity erosion of
/// the d-reformulation.
double reformulation_kd(double d, double m0_sup, double m1_sup, double c_inv_norm);

/// G(d) = d * sup over Re z >= -rho of the off-diagonal reformulation block
/// [[-M0, (d M0 - M1) C^{-1}], [0, 1]], composed from the family sup bounds.
double reformulation_gd(const SecondOrderLaw& law, const SpatialC& c, double d, double rho);

enum class PositivityMode { Global, Integro };

struct DSearch {
  double d0 = 0.0;
  double rho1 = 0.0;
  std::string binding;       // which constraint capped rho1
  double kd_at_d0 = 0.0;
  double gd_at_d0 = 0.0;     // integro mode
  double ball_budget = 0.0;  // integro mode: certified ball-bound budget
};

/// Largest d on a log-scaled bisection with d K(d) < 0.9 c (and, in integro
/// mode, max{delta ||M0|| + sup_ball ||M1||, delta} + G(d) < ||A^{-1}||^{-1}),
/// then rho1 = 0.9 min(0.75 d, rho0, 1/(2r), alpha_dom). rho0 may be +inf in
/// global mode. Throws when no admissible d exists.
DSearch choose_reformulation_parameter(const SecondOrderLaw& law, const SpatialC& c,
                                       PositivityMode mode, double delta, double rho0,
                                       double c_premise, double a_inv_norm);

/// Grid validation of the stability characterization: sup of ||(z M(1/z) + A)^{-1}|| over the
/// truncated half-plane Re z >= -rho1. A singular sample refutes the
/// certificate and is reported as a counterexample.
struct ResolventScan {
  double sup = 0.0;
  Complex argmax = 0.0;
  bool singular_found = false;
  Complex counterexample = 0.0;
  std::size_t samples = 0;
};

ResolventScan resolvent_grid_sup(const SecondOrderLaw& symbol_law, const CMatrix& a,
                                 double rho1, const GridOptions& opts);

/// Heuristic growth-bound estimate: bisection on the line sup of the
/// resolvent norm crossing a fixed threshold. Grid evidence, not a proof.
struct GrowthEstimate {
  double value = 0.0;
  double threshold = 0.0;
  bool heuristic = true;
};

GrowthEstimate estimate_growth_bound(const SecondOrderLaw& symbol_law, const CMatrix& a,
                                     const GridOptions& opts);

/// Additive-perturbation margin: with resolvent constant C and ||N|| sup
/// bound n_sup, the perturbed problem keeps the rate when n_sup C < 1 and its
/// resolvent is bounded by C / (1 - n_sup C).
struct PerturbationMargin {
  bool ok = false;
  double bound = 0.0;   // C / (1 - n_sup C) when ok
  double n_sup = 0.0;
  double slack = 0.0;   // 1 - n_sup C (negative when violated: by how much)
};

PerturbationMargin perturbation_margin(double c_const, double n_sup);
PerturbationMargin perturbation_margin(double c_const, const LawExpr& n, double rho);

/// Delay-gain threshold: kappa_0 = 0.9 (1 - |k|_{1,-rho1}) e^{-h rho1}
/// / (C sqrt(1 + d^2 ||C^{-1}||^2)). Throws when |k|_{1,-rho1} >= 1.
double delay_gain_threshold(const Kernel& kernel, const SpatialC& c, double h, double d,
                            double rho1, double c_const);

/// Full stability certificate for a scenario-level law.
struct StabilityCertificate {
  bool certified = false;
  std::string failure_reason;
  double delta = 0.0;
  double rho0 = 0.0;
  double c = 0.0;
  double k_bound = 0.0;
  double d0 = 0.0;
  double rho1 = 0.0;
  double r = 0.0;
  double a_inv_norm = 0.0;
  double resolvent_bound = 0.0;
  double c_const = 0.0;            // constant for the perturbation argument
  double kappa0 = 0.0;             // delay threshold (0 when no kernel path)
  double kappa = 0.0;
  double nd_sup = 0.0;             // applied perturbation sup bound
  double perturbed_bound = 0.0;    // resolvent bound of the perturbed problem
  std::string rho1_binding;
  bool tail_binding = false;
  GridEvidence evidence;
};

struct CertifyRequest {
  SecondOrderLaw law;  // full second-order law; M1 holds the delay part if any
  SpatialC c;
  PositivityMode mode = PositivityMode::Global;
  double delta = 0.0;                 // ignored in global mode
  std::optional<Kernel> kernel;       // integro path
  double kappa = 0.0;                 // delay gain (law.m1 already scaled by it)
  double h = 0.0;                     // delay
  GridOptions grid;
};

struct CertifyOutcome {
  StabilityCertificate cert;
  std::optional<FirstOrderSystem> system;
  std::optional<IntegroPositivity> positivity;
  std::vector<std::string> log;
};

/// End-to-end certification: positivity constants per family, d-search,
/// reformulation, the two frequency-domain conditions with grid evidence, and
/// the delay perturbation margin when a delay is present.
CertifyOutcome certify(const CertifyRequest& req);

}  // namespace evostab

#endif
