#include "evostab/certifier.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "evostab/parallel.hpp"

namespace evostab {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Deterministic sample set for the truncated region
/// {re_lo <= Re z <= re_hi, |Im z| <= t_max} \ (B[0, delta] u {0}):
/// a Cartesian grid with log-spaced imaginary parts plus a ring of samples
/// just outside the exclusion ball.
std::vector<Complex> region_grid(double re_lo, double re_hi, double t_max, double delta,
                                 const GridOptions& opts) {
  std::vector<Complex> pts;
  std::vector<double> res, ims;
  int nre = std::max(2, opts.re_points);
  for (int i = 0; i < nre; ++i) {
    res.push_back(re_lo + (re_hi - re_lo) * i / (nre - 1));
  }
  ims.push_back(0.0);
  double im_min = std::max(delta > 0.0 ? 0.5 * delta : 1e-3, 1e-3);
  int nim = std::max(2, opts.im_points);
  for (int i = 0; i < nim; ++i) {
    double v = im_min * std::pow(t_max / im_min, static_cast<double>(i) / (nim - 1));
    ims.push_back(v);
    ims.push_back(-v);
  }
  for (double re : res) {
    for (double im : ims) {
      Complex z(re, im);
      if (std::abs(z) <= delta || z == 0.0) continue;
      pts.push_back(z);
    }
  }
  if (delta > 0.0) {
    double rad = 1.02 * delta;
    for (int i = 0; i < opts.ring_points; ++i) {
      double ang = 2.0 * std::numbers::pi * i / opts.ring_points;
      Complex z(rad * std::cos(ang), rad * std::sin(ang));
      if (z.real() < re_lo || z.real() > re_hi) continue;
      pts.push_back(z);
    }
    // Samples inside the exclusion ball carry the Neumann-bound evidence;
    // they never enter the positivity minimum.
    for (double frac : {0.2, 0.45, 0.7, 0.95}) {
      for (int i = 0; i < opts.ring_points / 2; ++i) {
        double ang = 2.0 * std::numbers::pi * (i + 0.25) / (opts.ring_points / 2);
        Complex z(frac * delta * std::cos(ang), frac * delta * std::sin(ang));
        if (z == 0.0) continue;
        pts.push_back(z);
      }
    }
  }
  return pts;
}

void scan_samples(const SecondOrderLaw& law, const CMatrix& a, std::vector<GridSample>& out,
                  const std::vector<Complex>& pts, double delta, bool want_herm) {
  out.resize(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    GridSample s;
    s.z = pts[i];
    s.in_ball = std::abs(pts[i]) <= delta;
    CMatrix sym = law.eval_symbol(pts[i]);
    if (want_herm) s.herm_min = herm_min_eig(sym);
    double smin = smallest_sv(sym + a);
    s.inv_norm = smin > 0.0 ? 1.0 / smin : kInf;
    out[i] = s;
  });
}

}  // namespace

Prop31Result check_prop31(const SecondOrderLaw& symbol_law, const CMatrix& a,
                          double a_inv_norm, double delta, double rho0, double c_tail,
                          std::optional<double> k_override, const GridOptions& opts) {
  if (a.rows() != a.cols() || a.rows() != symbol_law.dim()) {
    throw std::invalid_argument("check_prop31: A and law dimensions differ");
  }
  if (herm_min_eig(a) < -1e-12) {
    throw std::invalid_argument("check_prop31: A is not accretive");
  }
  if (!(a_inv_norm > 0.0) || !(smallest_sv(a) > kSingularTol * op_norm(a))) {
    throw std::invalid_argument("check_prop31: A must be continuously invertible");
  }
  // The ring evidence sits at 1.02 delta, so the ball needs a little headroom
  // inside the analyticity strip on top of the certificate-domain constraint.
  if (!(delta >= 0.0) || !(delta < symbol_law.domain_alpha()) ||
      !(1.05 * delta < symbol_law.analytic_alpha())) {
    throw std::domain_error("check_prop31: delta outside the admissible domain");
  }
  if (!(rho0 > 0.0) || !(rho0 < symbol_law.domain_alpha())) {
    throw std::domain_error("check_prop31: rho0 outside the admissible domain");
  }

  Prop31Result res;
  res.delta = delta;
  res.rho0 = rho0;
  res.a_inv_norm = a_inv_norm;
  res.a_norm = op_norm(a);

  BallSup ball = sup_symbol_on_ball(symbol_law, delta);
  res.k_bound = ball.analytic_bound;
  res.k_grid = ball.grid_value;
  if (k_override) res.k_bound = std::min(res.k_bound, *k_override);

  double t_max = opts.t_max_factor * (1.0 + res.a_norm);
  auto pts = region_grid(-rho0, opts.rho_max, t_max, delta, opts);
  scan_samples(symbol_law, a, res.evidence.samples, pts, delta, true);

  res.evidence.c_grid = kInf;
  for (const auto& s : res.evidence.samples) {
    if (!s.in_ball) res.evidence.c_grid = std::min(res.evidence.c_grid, s.herm_min);
    if (s.inv_norm > res.evidence.sup_inv_norm) {
      res.evidence.sup_inv_norm = s.inv_norm;
      res.evidence.argmax_inv = s.z;
    }
  }
  res.evidence.c_tail = c_tail;
  res.evidence.tail_binding = c_tail < res.evidence.c_grid;
  res.c = std::min(res.evidence.c_grid, c_tail);

  double ka = res.k_bound * a_inv_norm;
  if (!(ka < 1.0)) {
    res.failure = "ball bound violated: K = " + std::to_string(res.k_bound) +
                  " >= ||A^{-1}||^{-1} = " + std::to_string(1.0 / a_inv_norm);
    return res;
  }
  if (!(res.c > 0.0)) {
    res.failure = "positivity violated: c = " + std::to_string(res.c) +
                  (res.evidence.tail_binding ? " (tail bound)" : " (grid point)");
    return res;
  }
  res.inv_bound_outside = 1.0 / res.c;
  res.inv_bound_inside = delta > 0.0 ? a_inv_norm / (1.0 - ka) : a_inv_norm;
  res.resolvent_bound = std::max(res.inv_bound_outside, res.inv_bound_inside);
  res.ok = true;
  return res;
}

IntegroPositivity memory_positivity_constants(const Kernel& kernel, double alpha, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("memory positivity: delta must be > 0");
  }
  IntegroPositivity out;
  out.norm_k = kernel.weighted_l1_norm(alpha);
  if (!(out.norm_k < 1.0)) {
    throw std::domain_error("memory positivity: |k|_{1,-alpha} must be < 1");
  }
  auto g_at = [&](double rho) {
    CertifiedBound g = kernel.transform_sign_margin(delta, rho);
    if (!g.certified) {
      throw std::domain_error("memory positivity: transform sign margin " + g.note);
    }
    return g.value;
  };
  const double one_plus = 1.0 + out.norm_k;
  const double denom = one_plus * one_plus;
  // F(rho) = -rho (1 + |k|) + sqrt(2 pi) g(rho): g falls in rho, so F is
  // strictly decreasing with F(0) > 0 for certified kernels.
  auto f_at = [&](double rho) { return -rho * one_plus + kSqrt2Pi * g_at(rho); };
  if (!(f_at(0.0) > 0.0)) {
    throw std::domain_error("memory positivity: no rho0 > 0 from this method (g(0) = 0)");
  }
  double lo = 0.0, hi = alpha * (1.0 - 1e-9);
  if (f_at(hi) > 0.0) {
    lo = hi;
  } else {
    for (int i = 0; i < 40; ++i) {
      double mid = 0.5 * (lo + hi);
      (f_at(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  out.rho0 = 0.9 * lo;
  out.g_at_rho0 = g_at(out.rho0);
  out.bound_near_axis = (-out.rho0 * one_plus + kSqrt2Pi * out.g_at_rho0) / denom;
  out.bound_right = out.rho0 * (1.0 - out.norm_k) / denom;
  out.c = std::min(out.bound_near_axis, out.bound_right);
  if (!(out.rho0 > 0.0) || !(out.c > 0.0)) {
    throw std::domain_error("memory positivity: bisection produced no positive constants");
  }
  return out;
}

double reformulation_kd(double d, double m0_sup, double m1_sup, double c_inv_norm) {
  if (d < 0.0 || m0_sup < 0.0 || m1_sup < 0.0 || c_inv_norm < 0.0) {
    throw std::invalid_argument("reformulation_kd: inputs must be nonnegative");
  }
  double cross = d * m0_sup + m1_sup * c_inv_norm;
  return m0_sup + cross * cross;
}

double reformulation_gd(const SecondOrderLaw& law, const SpatialC& c, double d, double rho) {
  double m0 = law.m0.sup_bound(rho);
  double m1 = law.m1.is_zero() ? 0.0 : law.m1.sup_bound(rho);
  double cinv = op_norm(c.c_inv);
  return d * (m0 + (d * m0 + m1) * cinv + 1.0);
}

DSearch choose_reformulation_parameter(const SecondOrderLaw& law, const SpatialC& c,
                                       PositivityMode mode, double delta, double rho0,
                                       double c_premise, double a_inv_norm) {
  if (!(c_premise > 0.0)) {
    throw std::invalid_argument("d-search: positivity premise constant must be > 0");
  }
  const double alpha_dom = std::min(law.m0.alpha_dom(), law.m1.alpha_dom());
  const double half_r = 1.0 / (2.0 * law.r);
  const double rho_sup = law.domain_alpha();
  const double m0_sup = law.m0.sup_bound(rho_sup);
  const double m1_sup = law.m1.is_zero() ? 0.0 : law.m1.sup_bound(rho_sup);

  DSearch out;
  auto ok = [&](double d) {
    if (!(d * reformulation_kd(d, m0_sup, m1_sup, c.c_inv_norm) < 0.9 * c_premise)) return false;
    if (mode == PositivityMode::Integro) {
      double m1_ball = law.m1.is_zero() ? 0.0 : law.m1.ball_bound(delta);
      double budget = std::max(delta * m0_sup + m1_ball, delta) +
                      reformulation_gd(law, c, d, rho_sup);
      if (!(budget < 1.0 / a_inv_norm)) return false;
    }
    return true;
  };

  double lo = 1e-6, hi = 1.0;
  if (!ok(lo)) throw std::domain_error("d-search: no admissible d, budget exhausted");
  if (ok(hi)) {
    lo = hi;
  } else {
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < 40; ++i) {
      double mid = 0.5 * (llo + lhi);
      (ok(std::exp(mid)) ? llo : lhi) = mid;
    }
    lo = std::exp(llo);
  }
  out.d0 = lo;
  out.kd_at_d0 = reformulation_kd(lo, m0_sup, m1_sup, c.c_inv_norm);
  if (mode == PositivityMode::Integro) {
    out.gd_at_d0 = reformulation_gd(law, c, lo, rho_sup);
    double m1_ball = law.m1.is_zero() ? 0.0 : law.m1.ball_bound(delta);
    out.ball_budget = std::max(delta * m0_sup + m1_ball, delta) + out.gd_at_d0;
  }

  struct Cap {
    double value;
    const char* name;
  };
  Cap caps[] = {{0.75 * out.d0, "0.75 d0"},
                {rho0, "rho0"},
                {half_r, "1/(2r)"},
                {alpha_dom, "alpha_dom"}};
  Cap best = caps[0];
  for (const auto& cap : caps) {
    if (cap.value < best.value) best = cap;
  }
  out.rho1 = 0.9 * best.value;
  out.binding = best.name;
  if (!(out.rho1 > 0.0)) throw std::domain_error("d-search: stability rate collapsed to zero");
  return out;
}

ResolventScan resolvent_grid_sup(const SecondOrderLaw& symbol_law, const CMatrix& a,
                                 double rho1, const GridOptions& opts) {
  ResolventScan out;
  double t_max = opts.t_max_factor * (1.0 + op_norm(a));
  auto pts = region_grid(-rho1, opts.rho_max, t_max, 0.0, opts);
  std::vector<GridSample> samples;
  scan_samples(symbol_law, a, samples, pts, 0.0, false);
  out.samples = samples.size();
  for (const auto& s : samples) {
    if (!std::isfinite(s.inv_norm)) {
      out.singular_found = true;
      out.counterexample = s.z;
      continue;
    }
    if (s.inv_norm > out.sup) {
      out.sup = s.inv_norm;
      out.argmax = s.z;
    }
  }
  return out;
}

GrowthEstimate estimate_growth_bound(const SecondOrderLaw& symbol_law, const CMatrix& a,
                                     const GridOptions& opts) {
  GrowthEstimate out;
  out.threshold = 1e3;
  double t_max = opts.t_max_factor * (1.0 + op_norm(a));

  // Resolvent sup along the line Re z = rho, with local refinement around the
  // largest sample so that off-axis poles are located to grid-independent
  // accuracy.
  auto inv_at = [&](double rho, double im) {
    Complex z(rho, im);
    if (z == 0.0) z = Complex(rho, 1e-12);
    double smin = smallest_sv(symbol_law.eval_symbol(z) + a);
    return smin > 0.0 ? 1.0 / smin : kInf;
  };
  auto line_sup = [&](double rho) {
    std::vector<double> ims = {0.0};
    int nim = std::max(8, opts.im_points);
    for (int i = 0; i < nim; ++i) {
      double v = 1e-3 * std::pow(t_max / 1e-3, static_cast<double>(i) / (nim - 1));
      ims.push_back(v);
      ims.push_back(-v);
    }
    std::vector<double> vals(ims.size());
    parallel_for(ims.size(), [&](std::size_t i) { vals[i] = inv_at(rho, ims[i]); });
    double sup = 0.0, at = 0.0;
    for (std::size_t i = 0; i < ims.size(); ++i) {
      if (vals[i] > sup) {
        sup = vals[i];
        at = ims[i];
      }
    }
    double window = std::max(std::abs(at) * 0.6, 1e-3);
    for (int pass = 0; pass < 3; ++pass) {
      double best_at = at;
      for (int j = -8; j <= 8; ++j) {
        double im = at + window * j / 8.0;
        double v = inv_at(rho, im);
        if (v > sup) {
          sup = v;
          best_at = im;
        }
      }
      at = best_at;
      window /= 8.0;
    }
    return sup;
  };

  // 1/line_sup underestimates the distance to the nearest singularity, so
  // marching by half of it never steps across a pole whose imaginary part the
  // refined scan has located; stop once the threshold is crossed.
  const double lo = -symbol_law.analytic_alpha() * (1.0 - 1e-9) + 1e-12;
  double rho = 1.0;
  double ls = line_sup(rho);
  while (ls >= out.threshold && rho < 1e6) {
    rho *= 2.0;
    ls = line_sup(rho);
  }
  for (int i = 0; i < 200 && ls < out.threshold; ++i) {
    double step = 0.5 / ls;
    double next = rho - step;
    if (next < lo) {
      out.value = lo;  // bounded all the way to the domain edge
      return out;
    }
    rho = next;
    ls = line_sup(rho);
  }
  out.value = rho;
  return out;
}

PerturbationMargin perturbation_margin(double c_const, double n_sup) {
  if (!(c_const > 0.0)) throw std::invalid_argument("perturbation_margin: C must be > 0");
  PerturbationMargin out;
  out.n_sup = n_sup;
  out.slack = 1.0 - n_sup * c_const;
  if (out.slack > 0.0) {
    out.ok = true;
    out.bound = c_const / out.slack;
  }
  return out;
}

PerturbationMargin perturbation_margin(double c_const, const LawExpr& n, double rho) {
  return perturbation_margin(c_const, n.sup_bound(rho));
}

double delay_gain_threshold(const Kernel& kernel, const SpatialC& c, double h, double d,
                            double rho1, double c_const) {
  if (!(h > 0.0) || !(rho1 > 0.0) || !(c_const > 0.0) || !(d >= 0.0)) {
    throw std::invalid_argument("delay_gain_threshold: bad inputs");
  }
  double norm_k = kernel.weighted_l1_norm(rho1);
  if (!(norm_k < 1.0)) {
    throw std::domain_error("delay_gain_threshold: |k|_{1,-rho1} >= 1");
  }
  double row = std::sqrt(1.0 + d * d * c.c_inv_norm * c.c_inv_norm);
  return 0.9 * (1.0 - norm_k) * std::exp(-h * rho1) / (c_const * row);
}

CertifyOutcome certify(const CertifyRequest& req) {
  CertifyOutcome out;
  StabilityCertificate& cert = out.cert;
  cert.r = req.law.r;
  cert.kappa = req.kappa;
  const double half_r = 1.0 / (2.0 * req.law.r);

  try {
    double rho0_in = kInf;
    double c_premise = 0.0;
    double delta = 0.0;

    if (req.mode == PositivityMode::Global) {
      // Constant-coefficient path: M0 selfadjoint nonnegative, Re M1 >= c1.
      if (req.law.m0.kind() != LawExpr::Kind::Const ||
          req.law.m1.kind() != LawExpr::Kind::Const) {
        throw std::invalid_argument("global positivity mode requires constant laws");
      }
      CMatrix m0c = req.law.m0.eval(1.0);
      CMatrix m1c = req.law.m1.eval(1.0);
      if (op_norm(m0c - m0c.adjoint()) > 1e-12 * (1.0 + op_norm(m0c)) ||
          herm_min_eig(m0c) < -1e-12) {
        throw std::invalid_argument("global positivity mode requires M0 selfadjoint >= 0");
      }
      double c1 = herm_min_eig(m1c);
      c_premise = c1 - op_norm(m0c) * half_r;
      if (!(c_premise > 0.0)) {
        throw std::domain_error("positivity violated: Re M1 - ||M0||/(2r) = " +
                                std::to_string(c_premise));
      }
      out.log.push_back("global positivity constant c = " + std::to_string(c_premise));
    } else {
      if (!req.kernel) throw std::invalid_argument("integro mode requires a kernel");
      delta = req.delta;
      IntegroPositivity pos =
          memory_positivity_constants(*req.kernel, req.kernel->alpha(), delta);
      out.positivity = pos;
      rho0_in = pos.rho0;
      c_premise = pos.c;
      out.log.push_back("memory positivity: rho0 = " + std::to_string(pos.rho0) +
                        ", c = " + std::to_string(pos.c));
    }

    // The d-search and the reformulation certificate run on the base law: the
    // delay part, when present, is split off into N_d and handled as a
    // perturbation afterwards.
    const bool delay_path = req.mode == PositivityMode::Integro && req.kappa != 0.0;
    SecondOrderLaw cert_base = delay_path
        ? SecondOrderLaw(req.law.m0, LawExpr::zero(req.law.dim()), req.law.r)
        : req.law;

    DSearch ds = choose_reformulation_parameter(cert_base, req.c, req.mode, delta, rho0_in,
                                                c_premise, req.c.c_inv_norm);
    cert.d0 = ds.d0;
    cert.rho1 = ds.rho1;
    cert.rho1_binding = ds.binding;
    out.log.push_back("d0 = " + std::to_string(ds.d0) + ", rho1 = " + std::to_string(ds.rho1) +
                      " (binding: " + ds.binding + ")");

    FirstOrderSystem sys = build_md(req.law, req.c, ds.d0);
    SecondOrderLaw cert_system = delay_path
        ? SecondOrderLaw(sys.md_tilde, LawExpr::zero(2 * req.law.dim()), req.law.r)
        : sys.first_order_law;

    // Positivity region and analytic tail for the reformulated law.
    double alpha_dom = std::min(req.law.m0.alpha_dom(), req.law.m1.alpha_dom());
    double rho0_cert =
        0.95 * std::min({0.75 * ds.d0, rho0_in, half_r, alpha_dom});
    double kd = reformulation_kd(
        ds.d0, cert_base.m0.sup_bound(cert_base.domain_alpha()),
        cert_base.m1.is_zero() ? 0.0 : cert_base.m1.sup_bound(cert_base.domain_alpha()),
        req.c.c_inv_norm);
    double c_tail = std::min(c_premise - ds.d0 * kd, 0.75 * ds.d0 - rho0_cert);
    std::optional<double> k_override;
    if (req.mode == PositivityMode::Integro) k_override = ds.ball_budget;

    Prop31Result core = check_prop31(cert_system, sys.a.a, sys.a.a_inv_norm, delta, rho0_cert,
                                     c_tail, k_override, req.grid);
    cert.delta = core.delta;
    cert.rho0 = core.rho0;
    cert.c = core.c;
    cert.k_bound = core.k_bound;
    cert.a_inv_norm = core.a_inv_norm;
    cert.resolvent_bound = core.resolvent_bound;
    cert.tail_binding = core.evidence.tail_binding;
    cert.evidence = core.evidence;
    if (!core.ok) {
      cert.failure_reason = core.failure;
      out.system = std::move(sys);
      return out;
    }

    // Constant fed to the perturbation argument: certified over-estimate of the
    // true resolvent sup.
    cert.c_const = 1.1 * std::max({core.inv_bound_outside, core.inv_bound_inside,
                                   core.evidence.sup_inv_norm});

    if (delay_path) {
      cert.kappa0 = delay_gain_threshold(*req.kernel, req.c, req.h, ds.d0, ds.rho1,
                                         cert.c_const);
      double norm_k_rho1 = req.kernel->weighted_l1_norm(ds.rho1);
      cert.nd_sup = std::sqrt(1.0 + ds.d0 * ds.d0 * req.c.c_inv_norm * req.c.c_inv_norm) *
                    std::abs(req.kappa) * std::exp(req.h * ds.rho1) / (1.0 - norm_k_rho1);
      PerturbationMargin margin = perturbation_margin(cert.c_const, cert.nd_sup);
      out.log.push_back("delay threshold kappa0 = " + std::to_string(cert.kappa0) +
                        ", |kappa| = " + std::to_string(std::abs(req.kappa)));
      if (!margin.ok) {
        cert.failure_reason = "delay margin violated: ||N_d|| C = " +
                              std::to_string(cert.nd_sup * cert.c_const) +
                              " >= 1 (|kappa| >= kappa0 = " + std::to_string(cert.kappa0) + ")";
        out.system = std::move(sys);
        return out;
      }
      cert.perturbed_bound = margin.bound;
    } else if (req.mode == PositivityMode::Integro && req.kernel) {
      // Record the threshold for reference even without an applied delay.
      if (req.h > 0.0) {
        cert.kappa0 = delay_gain_threshold(*req.kernel, req.c, req.h, ds.d0, ds.rho1,
                                           cert.c_const);
      }
    }

    cert.certified = true;
    out.system = std::move(sys);
  } catch (const std::exception& e) {
    cert.certified = false;
    cert.failure_reason = e.what();
  }
  return out;
}

}  // namespace evostab
