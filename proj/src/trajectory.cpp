#include "evostab/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace evostab {

Trajectory Trajectory::scalar(double dt, const std::vector<double>& samples) {
  Trajectory t;
  t.dt = dt;
  t.values.reserve(samples.size());
  for (double s : samples) {
    RVector v(1);
    v(0) = s;
    t.values.push_back(std::move(v));
  }
  return t;
}

double weighted_norm(const Trajectory& f, double rho) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    acc += f.values[i].squaredNorm() * std::exp(-2.0 * rho * f.time(i));
  }
  return std::sqrt(acc * f.dt);
}

Trajectory causal_antiderivative(const Trajectory& f, IntegrationSense sense) {
  Trajectory out;
  out.dt = f.dt;
  out.values.resize(f.size());
  if (f.values.empty()) return out;
  Eigen::Index dim = f.state_dim();
  if (sense == IntegrationSense::Causal) {
    RVector acc = RVector::Zero(dim);
    out.values[0] = acc;
    for (std::size_t i = 1; i < f.size(); ++i) {
      acc += 0.5 * f.dt * (f.values[i - 1] + f.values[i]);
      out.values[i] = acc;
    }
  } else {
    RVector acc = RVector::Zero(dim);
    out.values[f.size() - 1] = -acc;
    for (std::size_t i = f.size() - 1; i-- > 0;) {
      acc += 0.5 * f.dt * (f.values[i] + f.values[i + 1]);
      out.values[i] = -acc;
    }
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& value_prefix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (Eigen::Index j = 0; j < traj.state_dim(); ++j) out << "," << value_prefix << j;
  out << "\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << traj.time(i);
    for (Eigen::Index j = 0; j < traj.state_dim(); ++j) out << "," << traj.values[i](j);
    out << "\n";
  }
}

}  // namespace evostab
