#include "evostab/time_domain.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "evostab/parallel.hpp"

namespace evostab {

std::function<double(double)> bump_profile(double t0, double t1, double amplitude) {
  if (!(t1 > t0)) throw std::invalid_argument("bump_profile: need t1 > t0");
  return [t0, t1, amplitude](double t) {
    if (t <= t0 || t >= t1) return 0.0;
    double s = std::sin(std::numbers::pi * (t - t0) / (t1 - t0));
    return amplitude * s * s;
  };
}

SimulationResult simulate(const SecondOrderProblem& problem, double T, double dt) {
  if (!(dt > 0.0) || !(T > dt)) throw std::invalid_argument("simulate: bad time grid");
  if (!problem.c.is_real()) {
    throw std::invalid_argument("simulate: time stepping requires a real spatial operator");
  }
  const Eigen::Index n = problem.c.n();
  if (problem.source_shape.size() != n) {
    throw std::invalid_argument("simulate: source shape dimension mismatch");
  }

  std::vector<ExpTerm> modes;
  if (problem.memory) {
    if (problem.memory->family() != Kernel::Family::ExpSum) {
      throw std::invalid_argument("simulate: memory must be a scalar exponential-sum kernel");
    }
    modes = problem.memory->terms();
  }
  const int J = static_cast<int>(modes.size());

  std::size_t delay_steps = 0;
  if (problem.kappa != 0.0) {
    if (!(problem.h > 0.0)) throw std::invalid_argument("simulate: delay h must be > 0");
    double ratio = problem.h / dt;
    delay_steps = static_cast<std::size_t>(std::llround(ratio));
    if (delay_steps < 1 || std::abs(delay_steps * dt - problem.h) > 1e-9 * std::max(1.0, problem.h)) {
      throw std::invalid_argument("simulate: dt must divide the delay h exactly");
    }
  }

  const RMatrix c_real = problem.c.c.real();
  const RMatrix stiffness = c_real.transpose() * c_real;  // C*C

  // State y = [u; w; m_1; ...; m_J].
  const Eigen::Index dim = n * (2 + J);
  RMatrix l = RMatrix::Zero(dim, dim);
  l.block(0, n, n, n).setIdentity();                    // u' = w
  l.block(n, 0, n, n) = -stiffness;                     // w' = -C*C u ...
  l.block(n, n, n, n).diagonal().setConstant(-problem.m1);
  for (int j = 0; j < J; ++j) {
    Eigen::Index row = n * (2 + j);
    l.block(n, row, n, n).setIdentity();                // ... + sum_j m_j
    l.block(row, 0, n, n) = modes[j].coef * stiffness;  // m_j' = k_j C*C u ...
    l.block(row, row, n, n).diagonal().setConstant(-modes[j].rate);
  }

  const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
  RMatrix m_minus = RMatrix::Identity(dim, dim) - 0.5 * dt * l;
  RMatrix m_plus = RMatrix::Identity(dim, dim) + 0.5 * dt * l;
  Eigen::PartialPivLU<RMatrix> lu(m_minus);

  SimulationResult res;
  res.u.dt = res.du.dt = res.memory_sum.dt = dt;
  res.u.values.reserve(steps + 1);
  res.du.values.reserve(steps + 1);
  res.energy.reserve(steps + 1);
  res.source_end = problem.source_end;
  res.delay_h = problem.kappa != 0.0 ? problem.h : 0.0;
  res.transient_end = problem.source_end + 2.0 * res.delay_h + 5.0 * dt;

  RVector y = RVector::Zero(dim);
  auto record = [&](const RVector& state) {
    RVector u = state.head(n);
    RVector w = state.segment(n, n);
    res.u.values.push_back(u);
    res.du.values.push_back(w);
    res.energy.push_back(w.squaredNorm() + (c_real * u).squaredNorm());
    if (J > 0) {
      RVector ms = RVector::Zero(n);
      for (int j = 0; j < J; ++j) ms += state.segment(n * (2 + j), n);
      res.memory_sum.values.push_back(std::move(ms));
    }
  };

  auto load = [&](std::size_t step) {
    RVector b = RVector::Zero(dim);
    double t = step * dt;
    double g = problem.source_profile ? problem.source_profile(t) : 0.0;
    if (g != 0.0) b.segment(n, n) = g * problem.source_shape;
    if (problem.kappa != 0.0 && step >= delay_steps) {
      b.segment(n, n) -= problem.kappa * res.du.values[step - delay_steps];
    }
    return b;
  };

  record(y);
  RVector b_now = load(0);
  for (std::size_t step = 0; step < steps; ++step) {
    RVector b_next = load(step + 1);  // delay index step+1-m <= step, already recorded
    RVector rhs = m_plus * y + 0.5 * dt * (b_now + b_next);
    y = lu.solve(rhs);
    if (step % 997 == 0) {
      double scale = rhs.norm() + 1.0;
      double resid = (m_minus * y - rhs).norm();
      if (!(resid <= 1e-8 * scale) || !y.allFinite()) {
        throw std::runtime_error("simulate: implicit step solve degraded at t = " +
                                 std::to_string((step + 1) * dt));
      }
    }
    record(y);
    b_now = std::move(b_next);
  }
  return res;
}

double max_energy_drift(const SimulationResult& res, double from_time) {
  double dt = res.dt();
  std::size_t start = static_cast<std::size_t>(std::ceil(from_time / dt));
  if (start >= res.energy.size()) throw std::invalid_argument("max_energy_drift: window empty");
  double ref = res.energy[start];
  if (ref == 0.0) return 0.0;
  double drift = 0.0;
  for (std::size_t i = start; i < res.energy.size(); ++i) {
    drift = std::max(drift, std::abs(res.energy[i] - ref) / ref);
  }
  return drift;
}

void fft_radix2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft: size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    Complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w = 1.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        Complex even = a[i + k];
        Complex odd = a[i + k + len / 2] * w;
        a[i + k] = even + odd;
        a[i + k + len / 2] = even - odd;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& v : a) v /= static_cast<double>(n);
  }
}

FrequencySolve solve_frequency(const SecondOrderLaw& first_order_law, const CMatrix& a,
                               const Trajectory& f, double rho,
                               const LawExpr* rhs_premultiplier) {
  const std::size_t n = f.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("solve_frequency: sample count must be a power of two");
  }
  if (!(rho > 0.0)) {
    throw std::invalid_argument("solve_frequency: causal branch needs rho > 0");
  }
  const Eigen::Index dim = f.state_dim();
  if (a.rows() != dim || a.cols() != dim || first_order_law.dim() != dim) {
    throw std::invalid_argument("solve_frequency: dimension mismatch");
  }
  const double dt = f.dt;
  const double period = n * dt;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (f.values[i].cwiseAbs().maxCoeff() != 0.0) {
      throw std::invalid_argument(
          "solve_frequency: source must vanish on the last half of the window");
    }
  }

  // Damp and transform each component.
  std::vector<std::vector<Complex>> spectra(dim, std::vector<Complex>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double damp = std::exp(-rho * f.time(i));
    for (Eigen::Index c = 0; c < dim; ++c) spectra[c][i] = damp * f.values[i](c);
  }
  for (Eigen::Index c = 0; c < dim; ++c) fft_radix2(spectra[c], false);

  // The scenarios carry real laws; then U(conj z) = conj U(z) and only half
  // the spectrum needs solving. Detect by a probe evaluation.
  bool real_symmetric = false;
  {
    Complex probe(rho, 0.73613);
    CMatrix t1 = first_order_law.eval_symbol(probe) + a;
    CMatrix t2 = first_order_law.eval_symbol(std::conj(probe)) + a;
    real_symmetric = (t2 - t1.conjugate()).cwiseAbs().maxCoeff() <=
                     1e-12 * (t1.cwiseAbs().maxCoeff() + 1.0);
  }

  std::vector<CVector> solved(n);
  std::size_t top = real_symmetric ? n / 2 : n - 1;
  std::string failure;
  std::mutex fail_guard;
  parallel_for(top + 1, [&](std::size_t k) {
    double freq = (k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - n) *
                  2.0 * std::numbers::pi / period;
    Complex z(rho, freq);
    try {
      CVector rhs(dim);
      for (Eigen::Index c = 0; c < dim; ++c) rhs(c) = spectra[c][k];
      if (rhs_premultiplier) rhs = rhs_premultiplier->eval(z) * rhs;
      solved[k] = solve(first_order_law.eval_symbol(z) + a, rhs);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(fail_guard);
      if (failure.empty()) {
        failure = "solve_frequency: near-singular sample at z = (" + std::to_string(z.real()) +
                  ", " + std::to_string(z.imag()) + "): " + e.what();
      }
    }
  });
  if (!failure.empty()) throw std::runtime_error(failure);
  if (real_symmetric) {
    for (std::size_t k = n / 2 + 1; k < n; ++k) solved[k] = solved[n - k].conjugate();
  }

  for (Eigen::Index c = 0; c < dim; ++c) {
    for (std::size_t k = 0; k < n; ++k) spectra[c][k] = solved[k](c);
    fft_radix2(spectra[c], true);
  }

  FrequencySolve out;
  out.wrap_factor = std::exp(-rho * period / 2.0);
  out.values.dt = dt;
  out.values.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double undamp = std::exp(rho * f.time(i));
    RVector v(dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      v(c) = spectra[c][i].real() * undamp;
      out.max_imag = std::max(out.max_imag, std::abs(spectra[c][i].imag()) * undamp);
    }
    out.values.values[i] = std::move(v);
  }
  return out;
}

std::pair<Trajectory, Trajectory> split_blocks(const Trajectory& vq) {
  Eigen::Index dim = vq.state_dim();
  if (dim % 2 != 0) throw std::invalid_argument("split_blocks: odd state dimension");
  Eigen::Index half = dim / 2;
  Trajectory v, q;
  v.dt = q.dt = vq.dt;
  v.values.reserve(vq.size());
  q.values.reserve(vq.size());
  for (const auto& y : vq.values) {
    v.values.push_back(y.head(half));
    q.values.push_back(y.tail(half));
  }
  return {v, q};
}

FitResult fit_decay_rate_series(const std::vector<double>& pointwise_norm, double dt,
                                double window, double skip_before) {
  if (!(window > dt)) throw std::invalid_argument("fit: window must exceed dt");
  std::size_t start = static_cast<std::size_t>(std::ceil(skip_before / dt));
  std::size_t per_window = static_cast<std::size_t>(std::llround(window / dt));
  std::vector<double> tc, logn;
  for (std::size_t w0 = start; w0 + per_window <= pointwise_norm.size(); w0 += per_window) {
    double acc = 0.0;
    for (std::size_t i = w0; i < w0 + per_window; ++i) {
      acc += pointwise_norm[i] * pointwise_norm[i] * dt;
    }
    double norm = std::sqrt(acc);
    if (!(norm > 1e-150)) break;  // signal underflowed, stop fitting
    tc.push_back((w0 + 0.5 * per_window) * dt);
    logn.push_back(std::log(norm));
  }
  if (tc.size() < 3) {
    throw std::invalid_argument("fit: fewer than 3 usable windows past the transient");
  }
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < tc.size(); ++i) {
    mt += tc[i];
    my += logn[i];
  }
  mt /= tc.size();
  my /= tc.size();
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < tc.size(); ++i) {
    stt += (tc[i] - mt) * (tc[i] - mt);
    sty += (tc[i] - mt) * (logn[i] - my);
  }
  double slope = sty / stt;
  FitResult fit;
  fit.rate = -slope;
  fit.windows = static_cast<int>(tc.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < tc.size(); ++i) {
    double pred = my + slope * (tc[i] - mt);
    ss += (logn[i] - pred) * (logn[i] - pred);
  }
  fit.residual = std::sqrt(ss / tc.size());
  fit.window_centers = std::move(tc);
  fit.window_norms.reserve(logn.size());
  for (double v : logn) fit.window_norms.push_back(std::exp(v));
  return fit;
}

FitResult fit_decay_rate(const Trajectory& y, double window, double skip_before) {
  std::vector<double> norms(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) norms[i] = y.values[i].norm();
  return fit_decay_rate_series(norms, y.dt, window, skip_before);
}

FitResult fit_decay_rate(const SimulationResult& res, double window) {
  std::vector<double> norms(res.energy.size());
  for (std::size_t i = 0; i < norms.size(); ++i) norms[i] = std::sqrt(res.energy[i]);
  return fit_decay_rate_series(norms, res.dt(), window, res.transient_end);
}

PointwiseBoundCheck check_pointwise_bound(const SimulationResult& res, double nu) {
  PointwiseBoundCheck out;
  out.nu = nu;
  if (!(nu > 0.0)) return out;
  out.du_weighted_norm = weighted_norm(res.du, -nu);
  std::size_t start = static_cast<std::size_t>(std::ceil(res.transient_end / res.dt()));
  for (std::size_t i = start; i < res.u.size(); ++i) {
    out.sup_weighted_u =
        std::max(out.sup_weighted_u, res.u.values[i].norm() * std::exp(nu * res.u.time(i)));
  }
  out.bound_with_factor = out.du_weighted_norm / std::sqrt(2.0 * nu);
  double tol = 1.0 + 1e-9;
  out.holds_with_factor = out.sup_weighted_u <= out.bound_with_factor * tol;
  out.holds_without_factor = out.sup_weighted_u <= out.du_weighted_norm * tol;
  return out;
}

}  // namespace evostab
