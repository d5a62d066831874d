#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "evostab/reformulation.hpp"
#include "evostab/time_domain.hpp"

using namespace evostab;

namespace {

Trajectory indicator01(double dt, double T) {
  std::vector<double> v;
  for (double t = 0.0; t <= T + 1e-12; t += dt) v.push_back(t <= 1.0 ? 1.0 : 0.0);
  return Trajectory::scalar(dt, v);
}

SecondOrderProblem damped_wave_problem(int n, double m1) {
  SecondOrderProblem p;
  p.c = dirichlet_1d(n);
  p.m1 = m1;
  p.source_profile = bump_profile(0.0, 1.0, 1.0);
  p.source_end = 1.0;
  RVector shape(n);
  double h = 1.0 / (n + 1);
  for (int i = 0; i < n; ++i) shape(i) = std::sin(std::numbers::pi * (i + 1) * h);
  p.source_shape = shape;
  return p;
}

}  // namespace

TEST_CASE("weighted norms against closed-form integrals") {
  Trajectory chi = indicator01(1e-3, 3.0);
  CHECK(weighted_norm(chi, 0.0) == doctest::Approx(1.0).epsilon(2e-3));

  std::vector<double> decay;
  for (double t = 0.0; t <= 30.0; t += 1e-3) decay.push_back(std::exp(-t));
  Trajectory e = Trajectory::scalar(1e-3, decay);
  CHECK(weighted_norm(e, -0.5) == doctest::Approx(1.0).epsilon(1e-3));

  Trajectory zero = Trajectory::scalar(1e-3, std::vector<double>(100, 0.0));
  CHECK(weighted_norm(zero, 0.3) == 0.0);
}

TEST_CASE("causal and anticausal antiderivatives of the indicator") {
  const double dt = 1e-3;
  Trajectory chi = indicator01(dt, 3.0);
  Trajectory causal = causal_antiderivative(chi, IntegrationSense::Causal);
  Trajectory anti = causal_antiderivative(chi, IntegrationSense::Anticausal);
  double causal_err = 0.0, anti_err = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    double t = chi.time(i);
    double expect_causal = t <= 1.0 ? t : 1.0;
    double expect_anti = t <= 1.0 ? -(1.0 - t) : 0.0;
    causal_err = std::max(causal_err, std::abs(causal.values[i](0) - expect_causal));
    anti_err = std::max(anti_err, std::abs(anti.values[i](0) - expect_anti));
  }
  CHECK(causal_err <= dt);
  CHECK(anti_err <= dt);

  Trajectory zero = Trajectory::scalar(dt, std::vector<double>(50, 0.0));
  CHECK(weighted_norm(causal_antiderivative(zero, IntegrationSense::Causal), 0.0) == 0.0);
}

TEST_CASE("radix-2 FFT round trip and size guard") {
  std::mt19937 rng(3);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<Complex> a(256), orig;
  for (auto& v : a) v = Complex(dist(rng), dist(rng));
  orig = a;
  fft_radix2(a, false);
  fft_radix2(a, true);
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - orig[i]));
  CHECK(err < 1e-12);
  std::vector<Complex> bad(100);
  CHECK_THROWS_AS(fft_radix2(bad, false), std::invalid_argument);
}

TEST_CASE("decay-rate fit on synthetic signals") {
  const double dt = 1e-3;
  std::vector<double> s;
  for (double t = 0.0; t <= 30.0; t += dt) {
    s.push_back(std::exp(-0.3 * t) * (1.0 + 0.1 * std::sin(5.0 * t)));
  }
  FitResult fit = fit_decay_rate_series(s, dt, 2.0, 0.0);
  CHECK(fit.rate == doctest::Approx(0.3).epsilon(0.0334));
  CHECK(std::abs(fit.rate - 0.3) < 0.01);

  std::vector<double> flat(30000, 2.5);
  FitResult fit0 = fit_decay_rate_series(flat, dt, 2.0, 0.0);
  CHECK(std::abs(fit0.rate) < 0.01);
}

TEST_CASE("damped wave decays at the modal rate") {
  SimulationResult res = simulate(damped_wave_problem(7, 0.2), 50.0, 1e-3);
  FitResult fit = fit_decay_rate(res);
  CHECK(fit.rate == doctest::Approx(0.1).epsilon(0.1));
  CHECK(std::abs(fit.rate - 0.1) < 0.01);

  PointwiseBoundCheck pb = check_pointwise_bound(res, fit.rate);
  CHECK(pb.holds_with_factor);
}

TEST_CASE("undamped wave conserves energy after the source shuts off") {
  SimulationResult res = simulate(damped_wave_problem(7, 0.0), 20.0, 1e-3);
  CHECK(max_energy_drift(res, 1.5) <= 1e-6);
}

TEST_CASE("memory states reproduce direct convolution quadrature") {
  SecondOrderProblem p = damped_wave_problem(5, 0.0);
  p.memory = Kernel::exp_sum({{0.5, 1.0}}, 0.25);
  const double dt = 1e-3;
  SimulationResult res = simulate(p, 10.0, dt);
  RMatrix stiff = (p.c.adjoint() * p.c.c).real();
  for (std::size_t idx : {2000u, 5000u, 9000u}) {
    RVector direct = RVector::Zero(5);
    for (std::size_t s = 0; s <= idx; ++s) {
      double w = (s == 0 || s == idx) ? 0.5 : 1.0;
      double kv = 0.5 * std::exp(-(res.u.time(idx) - res.u.time(s)));
      direct += w * dt * kv * (stiff * res.u.values[s]);
    }
    double rel = (res.memory_sum.values[idx] - direct).norm() / direct.norm();
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("zero delay gain reduces exactly to the memory-only run") {
  SecondOrderProblem p = damped_wave_problem(5, 0.0);
  p.memory = Kernel::exp_sum({{0.5, 1.0}}, 0.25);
  SimulationResult base = simulate(p, 8.0, 1e-3);
  p.kappa = 0.0;
  p.h = 1.0;
  SimulationResult with_delay_cfg = simulate(p, 8.0, 1e-3);
  for (std::size_t i = 0; i < base.u.size(); ++i) {
    CHECK((base.u.values[i] - with_delay_cfg.u.values[i]).norm() == 0.0);
  }
}

TEST_CASE("delay needs dt dividing h") {
  SecondOrderProblem p = damped_wave_problem(3, 0.0);
  p.kappa = 0.1;
  p.h = 1.0;
  CHECK_NOTHROW(simulate(p, 4.0, 1e-3));
  p.h = 1.0005;
  CHECK_THROWS_AS(simulate(p, 4.0, 1e-3), std::invalid_argument);
}

TEST_CASE("frequency solver resolves the scalar ODE in closed form") {
  SecondOrderLaw law(LawExpr::constant(Complex(1.0)), LawExpr::zero(1), 0.4);
  CMatrix a(1, 1);
  a(0, 0) = 1.0;
  const int n = 1 << 14;
  const double T = 40.0, dt = T / n;
  Trajectory f;
  f.dt = dt;
  for (int i = 0; i < n; ++i) {
    RVector v(1);
    double t = i * dt;
    // Mean-value sampling at the jump node t = 0.
    v(0) = i == 0 ? 0.5 : (t < 1.0 ? 1.0 : 0.0);
    f.values.push_back(v);
  }
  FrequencySolve sol = solve_frequency(law, a, f, 1.0);
  // The e^{rho t} amplification of the jump's aliasing ringing limits the
  // pointwise guarantee to the solution-carrying window.
  double linf = 0.0;
  for (int i = 0; i < n / 4; ++i) {
    double t = i * dt;
    double exact = t <= 1.0 ? 1.0 - std::exp(-t) : std::exp(-(t - 1.0)) - std::exp(-t);
    linf = std::max(linf, std::abs(sol.values.values[i](0) - exact));
  }
  CHECK(linf <= 1e-3);
  CHECK(sol.wrap_factor == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));

  Trajectory zero = f;
  for (auto& v : zero.values) v.setZero();
  FrequencySolve zsol = solve_frequency(law, a, zero, 1.0);
  for (const auto& v : zsol.values.values) CHECK(v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("frequency solver rejects sources spilling into the wrap zone") {
  SecondOrderLaw law(LawExpr::constant(Complex(1.0)), LawExpr::zero(1), 0.4);
  CMatrix a(1, 1);
  a(0, 0) = 1.0;
  Trajectory f;
  f.dt = 0.01;
  for (int i = 0; i < 256; ++i) {
    RVector v(1);
    v(0) = 1.0;
    f.values.push_back(v);
  }
  CHECK_THROWS_AS(solve_frequency(law, a, f, 1.0), std::invalid_argument);
}

TEST_CASE("two weights give the same causal solution") {
  SecondOrderLaw law(LawExpr::constant(Complex(1.0)), LawExpr::zero(1), 0.4);
  CMatrix a(1, 1);
  a(0, 0) = 1.0;
  const int n = 1 << 13;
  const double T = 40.0, dt = T / n;
  Trajectory f;
  f.dt = dt;
  auto bump = bump_profile(0.0, 1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    RVector v(1);
    v(0) = bump(i * dt);
    f.values.push_back(v);
  }
  FrequencySolve lo = solve_frequency(law, a, f, 0.5);
  FrequencySolve hi = solve_frequency(law, a, f, 1.0);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    num += std::pow(lo.values.values[i](0) - hi.values.values[i](0), 2);
    den += std::pow(hi.values.values[i](0), 2);
  }
  CHECK(std::sqrt(num / den) <= 1e-3);
}

TEST_CASE("causality: matching sources give matching solutions up to the split") {
  SecondOrderProblem p1 = damped_wave_problem(5, 0.2);
  SecondOrderProblem p2 = p1;
  auto bump1 = bump_profile(0.0, 1.0, 1.0);
  auto bump2 = bump_profile(1.5, 2.0, 3.0);
  p2.source_profile = [bump1, bump2](double t) { return bump1(t) + bump2(t); };
  p2.source_end = 2.0;
  SimulationResult r1 = simulate(p1, 3.0, 1e-3);
  SimulationResult r2 = simulate(p2, 3.0, 1e-3);
  std::size_t cut = static_cast<std::size_t>(1.5 / 1e-3);
  double diff = 0.0;
  for (std::size_t i = 0; i <= cut; ++i) {
    diff = std::max(diff, (r1.u.values[i] - r2.u.values[i]).norm());
  }
  CHECK(diff <= 1e-10);
}

TEST_CASE("frequency route is causal up to the periodization floor") {
  SecondOrderLaw law(LawExpr::constant(Complex(1.0)), LawExpr::zero(1), 0.4);
  CMatrix a(1, 1);
  a(0, 0) = 1.0;
  const int n = 1 << 12;
  const double T = 40.0, dt = T / n;
  auto bump1 = bump_profile(0.0, 1.0, 1.0);
  auto bump2 = bump_profile(2.0, 3.0, 5.0);
  Trajectory f1, f2;
  f1.dt = f2.dt = dt;
  for (int i = 0; i < n; ++i) {
    double t = i * dt;
    RVector v1(1), v2(1);
    v1(0) = bump1(t);
    v2(0) = bump1(t) + bump2(t);
    f1.values.push_back(v1);
    f2.values.push_back(v2);
  }
  FrequencySolve s1 = solve_frequency(law, a, f1, 1.0);
  FrequencySolve s2 = solve_frequency(law, a, f2, 1.0);
  double diff = 0.0;
  for (int i = 0; i < static_cast<int>(2.0 / dt); ++i) {
    diff = std::max(diff, std::abs(s1.values.values[i](0) - s2.values.values[i](0)));
  }
  CHECK(diff <= 1e-3);
}

TEST_CASE("frequency route matches the stepper for memory and delay dynamics") {
  // Cross-validates the convolution-resolvent and delay-factor symbols
  // against the auxiliary-state / method-of-steps integrator.
  const int n = 7;
  SpatialC c = dirichlet_1d(n);
  Kernel k = Kernel::exp_sum({{0.5, 1.0}}, 0.25);
  const double kappa = 0.05, h = 1.0, d = 0.02;

  const int nf = 1 << 13;
  const double T = 32.0;          // dt_s = T / (4 nf) divides h exactly
  const double dt_f = T / nf;
  const int refine = 4;
  const double dt_s = dt_f / refine;

  auto bump = bump_profile(0.0, 1.0, 1.0);
  RVector shape(n);
  double hx = 1.0 / (n + 1);
  for (int i = 0; i < n; ++i) shape(i) = std::sin(std::numbers::pi * (i + 1) * hx);

  for (bool with_delay : {false, true}) {
    LawExpr m0 = LawExpr::conv_resolvent(k, n);
    LawExpr m1 = with_delay ? LawExpr::scale(kappa, LawExpr::delay_factor(h, m0))
                            : LawExpr::zero(n);
    SecondOrderLaw law(m0, m1, 2.0);
    FirstOrderSystem sys = build_md(law, c, d);

    // Right-hand side (f, 0) premultiplied by (1 - K(z))^{-1} on the top block.
    CMatrix e0 = CMatrix::Zero(2 * n, n);
    e0.topRows(n) = CMatrix::Identity(n, n);
    LawExpr premul = LawExpr::product(
        LawExpr::constant(e0),
        LawExpr::product(m0, LawExpr::constant(CMatrix(e0.adjoint()))));

    Trajectory f;
    f.dt = dt_f;
    for (int i = 0; i < nf; ++i) {
      RVector v = RVector::Zero(2 * n);
      v.head(n) = bump(i * dt_f) * shape;
      f.values.push_back(v);
    }
    FrequencySolve sol = solve_frequency(sys.first_order_law, sys.a.a, f, 1.0, &premul);
    auto [v_traj, q_traj] = split_blocks(sol.values);
    auto [u_freq, du_freq] = recover_u(v_traj, q_traj, c, d);

    SecondOrderProblem p;
    p.c = c;
    p.memory = k;
    p.kappa = with_delay ? kappa : 0.0;
    p.h = h;
    p.source_profile = bump;
    p.source_end = 1.0;
    p.source_shape = shape;
    SimulationResult sim = simulate(p, T, dt_s);

    double num = 0.0, den = 0.0;
    for (int i = 0; i < nf / 2; ++i) {
      num += (u_freq.values[i] - sim.u.values[i * refine]).squaredNorm();
      den += sim.u.values[i * refine].squaredNorm();
    }
    CHECK(std::sqrt(num / den) <= 1e-3);
  }
}

TEST_CASE("first-order frequency solve satisfies the second-order equation") {
  const int n = 7;
  SpatialC c = dirichlet_1d(n);
  SecondOrderLaw law(LawExpr::constant(cidentity(n)),
                     LawExpr::constant(CMatrix(cidentity(n) * Complex(0.2))), 5.0);
  const double d = 0.08;
  FirstOrderSystem sys = build_md(law, c, d);

  const int nf = 1 << 13;
  const double T = 40.0, dt = T / nf;
  auto bump = bump_profile(0.0, 1.0, 1.0);
  RVector shape(n);
  double hgrid = 1.0 / (n + 1);
  for (int i = 0; i < n; ++i) shape(i) = std::sin(std::numbers::pi * (i + 1) * hgrid);
  Trajectory f;
  f.dt = dt;
  for (int i = 0; i < nf; ++i) {
    RVector v = RVector::Zero(2 * n);
    v.head(n) = bump(i * dt) * shape;
    f.values.push_back(v);
  }
  FrequencySolve sol = solve_frequency(sys.first_order_law, sys.a.a, f, 1.0);
  auto [v, q] = split_blocks(sol.values);
  auto [u, du] = recover_u(v, q, c, d);

  // recovered du matches the finite-difference derivative of u (trusted window)
  std::size_t half = u.size() / 2;
  double rel_num = 0.0, rel_den = 0.0;
  for (std::size_t i = 1; i + 1 < half; ++i) {
    RVector fd = (u.values[i + 1] - u.values[i - 1]) / (2.0 * dt);
    rel_num += (fd - du.values[i]).squaredNorm();
    rel_den += du.values[i].squaredNorm();
  }
  CHECK(std::sqrt(rel_num / rel_den) <= 1e-2);

  // second-order residual d2u + 0.2 du + C*C u - f in discrete L2
  RMatrix stiff = (c.adjoint() * c.c).real();
  double res_num = 0.0, f_den = 0.0;
  for (std::size_t i = 1; i + 1 < half; ++i) {
    RVector d2u = (u.values[i + 1] - 2.0 * u.values[i] + u.values[i - 1]) / (dt * dt);
    RVector resid = d2u + 0.2 * du.values[i] + stiff * u.values[i] - bump(i * dt) * shape;
    res_num += resid.squaredNorm() * dt;
    f_den += (bump(i * dt) * shape).squaredNorm() * dt;
  }
  CHECK(std::sqrt(res_num) <= 1e-2 * std::sqrt(f_den));
}
