#ifndef EVOSTAB_TRAJECTORY_HPP
#define EVOSTAB_TRAJECTORY_HPP

#include <string>
#include <vector>

#include "evostab/linalg.hpp"

namespace evostab {

/// Uniformly sampled vector-valued signal on [0, T], step dt.
struct Trajectory {
  double dt = 0.0;
  std::vector<RVector> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
  double duration() const { return values.empty() ? 0.0 : time(values.size() - 1); }
  Eigen::Index state_dim() const { return values.empty() ? 0 : values.front().size(); }

  static Trajectory scalar(double dt, const std::vector<double>& samples);
};

/// Discrete weighted L2 norm (sum_i |f(t_i)|^2 e^{-2 rho t_i} dt)^(1/2).
double weighted_norm(const Trajectory& f, double rho);

enum class IntegrationSense {
  Causal,     // F(t) = integral_{-inf}^t f, the rho > 0 branch
  Anticausal  // F(t) = -integral_t^{inf} f, the rho < 0 branch
};

/// Cumulative trapezoid antiderivative of a compactly supported sample.
Trajectory causal_antiderivative(const Trajectory& f, IntegrationSense sense);

/// Writes "t,v0,v1,..." rows with a header.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& value_prefix = "v");

}  // namespace evostab

#endif
