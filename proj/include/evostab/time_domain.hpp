#ifndef EVOSTAB_TIME_DOMAIN_HPP
#define EVOSTAB_TIME_DOMAIN_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "evostab/kernel.hpp"
#include "evostab/law.hpp"
#include "evostab/spatial.hpp"
#include "evostab/trajectory.hpp"

namespace evostab {

/// Second-order initial value problem on the discrete grid, at rest for t < 0:
///
///   u'' + m1 u' + C*C u - (k * C*C u) + kappa u'(t - h) = f(t) shape
///
/// Memory is realized exactly for exponential-sum kernels by auxiliary states
/// m_j' = -beta_j m_j + k_j (C*C u), so that (k * C*C u)(t) = sum_j m_j(t);
/// the delay reads u' from the computed history (method of steps, dt | h).
struct SecondOrderProblem {
  SpatialC c;
  double m1 = 0.0;
  std::optional<Kernel> memory;  // scalar exponential sum
  double kappa = 0.0;
  double h = 0.0;
  std::function<double(double)> source_profile;  // compactly supported
  double source_end = 0.0;                       // end of the support
  RVector source_shape;
};

/// Smooth compactly supported time profile: amplitude * sin^2 on [t0, t1].
std::function<double(double)> bump_profile(double t0, double t1, double amplitude);

struct SimulationResult {
  Trajectory u;
  Trajectory du;
  std::vector<double> energy;  // E(t) = |u'|^2 + |C u|^2 on the same grid
  Trajectory memory_sum;       // sum_j m_j, empty without memory
  double source_end = 0.0;
  double delay_h = 0.0;
  double transient_end = 0.0;  // source_end + 2h + 5 dt

  double dt() const { return u.dt; }
};

/// Implicit trapezoidal step for the linear (stiff, skew) part, explicit
/// reads for delay and source. Reports a step-solve failure if the factored
/// system degrades (residual check).
SimulationResult simulate(const SecondOrderProblem& problem, double T, double dt);

/// Max relative energy drift on t >= from_time (reference: first sample there).
double max_energy_drift(const SimulationResult& res, double from_time);

struct FrequencySolve {
  Trajectory values;        // real part of the reconstructed signal
  double max_imag = 0.0;    // imaginary residue after undamping, diagnostic
  double wrap_factor = 0.0; // periodization control e^{-rho T / 2}
};

/// Solves (d/dt M(d/dt^{-1}) + A) u = f via the weighted Fourier transform:
/// damp by e^{-rho t}, FFT, per-frequency solve of (z M(1/z) + A) U = F at
/// z = i 2 pi xi + rho, inverse FFT, undamp. The sample count must be a power
/// of two and f must vanish on the last half of [0, T]. rhs_premultiplier,
/// when given, multiplies F frequency-wise before the solve.
///
/// Undamping multiplies the damped-domain noise floor (aliasing + roundoff)
/// by e^{rho t}, so values are reliable on [0, T/2]; the wrap-around there is
/// bounded by the reported e^{-rho T/2} factor and grows toward t = T.
FrequencySolve solve_frequency(const SecondOrderLaw& first_order_law, const CMatrix& a,
                               const Trajectory& f, double rho,
                               const LawExpr* rhs_premultiplier = nullptr);

/// Splits a block trajectory into its top/bottom halves (v, q).
std::pair<Trajectory, Trajectory> split_blocks(const Trajectory& vq);

struct FitResult {
  double rate = 0.0;      // fitted nu: windowed norms ~ e^{-nu t}
  double residual = 0.0;  // rms residual of the log-linear fit
  int windows = 0;
  std::vector<double> window_centers;
  std::vector<double> window_norms;
};

/// Least-squares slope of the log of windowed L2 norms of a pointwise-norm
/// series, ignoring t < skip_before.
FitResult fit_decay_rate_series(const std::vector<double>& pointwise_norm, double dt,
                                double window, double skip_before);

/// Decay rate of a trajectory (pointwise Euclidean norm, then windowed fit).
FitResult fit_decay_rate(const Trajectory& y, double window, double skip_before);

/// Decay rate of a simulation: fits sqrt(E(t)) past the transient window.
FitResult fit_decay_rate(const SimulationResult& res, double window = 2.0);

struct PointwiseBoundCheck {
  double nu = 0.0;
  double du_weighted_norm = 0.0;  // |u'| in the -nu weighted space
  double sup_weighted_u = 0.0;    // sup_t |u(t)| e^{nu t} past the transient
  double bound_with_factor = 0.0; // du_weighted_norm / sqrt(2 nu)
  bool holds_with_factor = false;
  bool holds_without_factor = false;
};

/// Checks |u(t)| <= |u'|_{-nu} e^{-nu t} / sqrt(2 nu) on the simulated window
/// (Cauchy-Schwarz carries the 1/sqrt(2 nu); both variants are reported).
PointwiseBoundCheck check_pointwise_bound(const SimulationResult& res, double nu);

/// In-place radix-2 FFT, size a power of two. inverse divides by N.
void fft_radix2(std::vector<Complex>& a, bool inverse);

}  // namespace evostab

#endif
