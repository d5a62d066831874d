#include "evostab/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "evostab/scenario.hpp"

namespace evostab {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kValidateRateSlack = 0.01;
constexpr double kResolventSlack = 1e-6;

void ensure_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_report(const std::string& out_dir, const ordered_json& report,
                  const std::string& summary) {
  ensure_dir(out_dir);
  write_text(out_dir + "/report.json", report.dump(2) + "\n");
  write_text(out_dir + "/summary.txt", summary);
}

ordered_json certificate_json(const StabilityCertificate& cert) {
  ordered_json j;
  j["certified"] = cert.certified;
  if (!cert.certified) j["failure_reason"] = cert.failure_reason;
  j["delta"] = cert.delta;
  j["rho0"] = cert.rho0;
  j["c"] = cert.c;
  j["K"] = cert.k_bound;
  j["d0"] = cert.d0;
  j["rho1"] = cert.rho1;
  j["rho1_binding"] = cert.rho1_binding;
  j["r"] = cert.r;
  j["a_inv_norm"] = cert.a_inv_norm;
  j["resolvent_bound"] = cert.resolvent_bound;
  j["c_const"] = cert.c_const;
  j["tail_binding"] = cert.tail_binding;
  if (cert.kappa0 > 0.0) {
    j["kappa0"] = cert.kappa0;
    j["kappa"] = cert.kappa;
    j["nd_sup"] = cert.nd_sup;
    j["perturbed_bound"] = cert.perturbed_bound;
  }
  ordered_json ev;
  ev["samples"] = cert.evidence.samples.size();
  ev["c_grid"] = cert.evidence.c_grid;
  ev["c_tail"] = cert.evidence.c_tail;
  ev["sup_inv_norm"] = cert.evidence.sup_inv_norm;
  ev["argmax_inv"] = {cert.evidence.argmax_inv.real(), cert.evidence.argmax_inv.imag()};
  j["evidence"] = ev;
  return j;
}

std::string certificate_summary(const StabilityCertificate& cert) {
  std::ostringstream os;
  os.precision(12);
  if (cert.certified) {
    os << "CERTIFIED: exponentially stable with rate rho1 = " << cert.rho1 << "\n";
  } else {
    os << "NOT CERTIFIED: " << cert.failure_reason << "\n";
  }
  os << "  delta = " << cert.delta << ", rho0 = " << cert.rho0 << ", c = " << cert.c
     << ", K = " << cert.k_bound << "\n";
  os << "  d0 = " << cert.d0 << ", ||A^-1|| = " << cert.a_inv_norm
     << ", resolvent bound = " << cert.resolvent_bound << "\n";
  os << "  rho1 capped by " << cert.rho1_binding << "; positivity "
     << (cert.tail_binding ? "tail-bound" : "grid") << " binding\n";
  if (cert.kappa0 > 0.0) {
    os << "  delay: kappa = " << cert.kappa << ", threshold kappa0 = " << cert.kappa0
       << ", perturbed bound = " << cert.perturbed_bound << "\n";
  }
  return os.str();
}

struct ValidationRun {
  SimulationResult sim;
  FitResult fit;
  ResolventScan scan;
  bool rate_ok = false;
  bool resolvent_ok = false;
  double bound_used = 0.0;
};

ValidationRun run_validation(const Scenario& s, const CertifyOutcome& outcome) {
  ValidationRun v;
  v.sim = simulate(scenario_problem(s), s.T, s.dt);
  v.fit = fit_decay_rate(v.sim, s.fit_window);
  const auto& cert = outcome.cert;
  v.rate_ok = v.fit.rate >= cert.rho1 - kValidateRateSlack;
  v.bound_used = cert.kappa != 0.0 ? cert.perturbed_bound : cert.resolvent_bound;
  v.scan = resolvent_grid_sup(outcome.system->first_order_law, outcome.system->a.a, cert.rho1,
                              s.grid);
  v.resolvent_ok = !v.scan.singular_found && v.scan.sup <= v.bound_used * (1.0 + kResolventSlack);
  return v;
}

ordered_json validation_json(const Scenario& s, const ValidationRun& v) {
  ordered_json j;
  j["fitted_rate"] = v.fit.rate;
  j["fit_residual"] = v.fit.residual;
  j["fit_windows"] = v.fit.windows;
  j["rate_ok"] = v.rate_ok;
  ordered_json scan;
  scan["sup"] = v.scan.sup;
  scan["argmax"] = {v.scan.argmax.real(), v.scan.argmax.imag()};
  scan["bound"] = v.bound_used;
  scan["samples"] = v.scan.samples;
  scan["singular_found"] = v.scan.singular_found;
  j["resolvent_scan"] = scan;
  j["resolvent_ok"] = v.resolvent_ok;
  if (!s.nu_probes.empty()) {
    ordered_json probes;
    for (double nu : s.nu_probes) {
      probes[std::to_string(nu)] = weighted_norm(v.sim.du, -nu);
    }
    j["nu_probe_du_norms"] = probes;
  }
  if (v.fit.rate > 0.0) {
    PointwiseBoundCheck pb = check_pointwise_bound(v.sim, v.fit.rate);
    ordered_json b;
    b["nu"] = pb.nu;
    b["du_weighted_norm"] = pb.du_weighted_norm;
    b["sup_weighted_u"] = pb.sup_weighted_u;
    b["bound_with_factor"] = pb.bound_with_factor;
    b["holds_with_factor"] = pb.holds_with_factor;
    b["holds_without_factor"] = pb.holds_without_factor;
    j["pointwise_bound"] = b;
  }
  return j;
}

void write_curves(const std::string& out_dir, const SimulationResult& sim) {
  write_trajectory_csv(out_dir + "/u.csv", sim.u, "u");
  write_trajectory_csv(out_dir + "/du.csv", sim.du, "du");
  std::ofstream out(out_dir + "/energy.csv");
  out << "t,energy,state_norm\n";
  out.precision(17);
  for (std::size_t i = 0; i < sim.energy.size(); ++i) {
    out << sim.u.time(i) << "," << sim.energy[i] << "," << std::sqrt(sim.energy[i]) << "\n";
  }
}

void write_windows(const std::string& out_dir, const FitResult& fit) {
  std::ofstream out(out_dir + "/windows.csv");
  out << "t_center,window_norm\n";
  out.precision(17);
  for (std::size_t i = 0; i < fit.window_centers.size(); ++i) {
    out << fit.window_centers[i] << "," << fit.window_norms[i] << "\n";
  }
}

int guard(const std::string& out_dir, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    try {
      ensure_dir(out_dir);
      write_text(out_dir + "/summary.txt", std::string("CONFIG ERROR: ") + e.what() + "\n");
    } catch (...) {
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

ordered_json growth_json(const GrowthEstimate& g) {
  ordered_json j;
  j["value"] = g.value;
  j["threshold"] = g.threshold;
  j["heuristic"] = true;
  j["note"] = "grid evidence, not a proof";
  return j;
}

}  // namespace

int cmd_certify(const std::string& config_path, const std::string& out_dir) {
  return guard(out_dir, [&] {
    Scenario s = load_scenario(config_path);
    CertifyOutcome outcome = certify(scenario_request(s));
    ordered_json report;
    report["command"] = "certify";
    report["certificate"] = certificate_json(outcome.cert);
    if (outcome.positivity) {
      ordered_json p;
      p["rho0"] = outcome.positivity->rho0;
      p["c"] = outcome.positivity->c;
      p["norm_k"] = outcome.positivity->norm_k;
      p["g_at_rho0"] = outcome.positivity->g_at_rho0;
      p["bound_near_axis"] = outcome.positivity->bound_near_axis;
      p["bound_right"] = outcome.positivity->bound_right;
      report["memory_positivity"] = p;
    }
    if (outcome.cert.certified && s.growth_estimate && outcome.system) {
      report["growth_bound_estimate"] = growth_json(estimate_growth_bound(
          outcome.system->first_order_law, outcome.system->a.a, s.grid));
    }
    report["log"] = outcome.log;
    write_report(out_dir, report, certificate_summary(outcome.cert));
    return outcome.cert.certified ? 0 : 1;
  });
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  return guard(out_dir, [&] {
    Scenario s = load_scenario(config_path);
    SimulationResult sim = simulate(scenario_problem(s), s.T, s.dt);
    FitResult fit = fit_decay_rate(sim, s.fit_window);
    ensure_dir(out_dir);
    write_curves(out_dir, sim);
    write_windows(out_dir, fit);
    ordered_json report;
    report["command"] = "simulate";
    report["T"] = s.T;
    report["dt"] = s.dt;
    report["fitted_rate"] = fit.rate;
    report["fit_residual"] = fit.residual;
    report["fit_windows"] = fit.windows;
    std::ostringstream os;
    os.precision(12);
    os << "simulated T = " << s.T << " at dt = " << s.dt << "\n"
       << "fitted decay rate nu = " << fit.rate << " (residual " << fit.residual << ", "
       << fit.windows << " windows)\n";
    write_report(out_dir, report, os.str());
    return 0;
  });
}

int cmd_validate(const std::string& config_path, const std::string& out_dir) {
  return guard(out_dir, [&] {
    Scenario s = load_scenario(config_path);
    CertifyOutcome outcome = certify(scenario_request(s));
    ordered_json report;
    report["command"] = "validate";
    report["certificate"] = certificate_json(outcome.cert);
    if (!outcome.cert.certified) {
      report["pass"] = false;
      write_report(out_dir, report,
                   "FAIL: not certifiable\n" + certificate_summary(outcome.cert));
      return 1;
    }
    ValidationRun v = run_validation(s, outcome);
    report["validation"] = validation_json(s, v);
    bool pass = v.rate_ok && v.resolvent_ok;
    report["pass"] = pass;
    ensure_dir(out_dir);
    write_curves(out_dir, v.sim);
    write_windows(out_dir, v.fit);
    std::ostringstream os;
    os.precision(12);
    os << (pass ? "PASS" : "FAIL") << ": fitted nu = " << v.fit.rate
       << " vs certified rho1 = " << outcome.cert.rho1 << " (need nu >= rho1 - "
       << kValidateRateSlack << ")\n"
       << "resolvent grid sup = " << v.scan.sup << " vs bound " << v.bound_used << "\n"
       << certificate_summary(outcome.cert);
    write_report(out_dir, report, os.str());
    return pass ? 0 : 1;
  });
}

int cmd_kernel_check(const std::string& config_path, const std::string& out_dir) {
  return guard(out_dir, [&] {
    Scenario s = load_scenario(config_path);
    if (!s.kernel) throw ConfigError("kernel-check: scenario has no kernel");
    const Kernel& k = *s.kernel;
    AdmissibilityReport rep = k.admissibility_report();
    double delta = scenario_delta(s);
    ordered_json report;
    report["command"] = "kernel-check";
    ordered_json adm;
    adm["weakly_measurable"] = rep.weakly_measurable;
    adm["norm_measurable"] = rep.norm_measurable;
    adm["weighted_l1"] = rep.weighted_l1;
    adm["weighted_l1_below_one"] = rep.weighted_l1_below_one;
    adm["weighted_l1_conservative"] = rep.weighted_l1_conservative;
    adm["selfadjoint"] = rep.selfadjoint;
    adm["commuting"] = rep.commuting;
    adm["commutator_norm"] = rep.commutator_norm;
    adm["alpha"] = rep.alpha;
    report["admissibility"] = adm;
    CertifiedBound g = k.transform_sign_margin(delta, 0.0);
    ordered_json gj;
    gj["delta"] = delta;
    gj["certified"] = g.certified;
    gj["g_at_0"] = g.value;
    if (!g.certified) gj["note"] = g.note;
    report["transform_sign_margin"] = gj;
    bool all = rep.all_pass() && g.certified;
    if (k.family() == Kernel::Family::ExpSum) {
      double alpha0 = k.decay_rate_sup();
      ordered_json dj;
      dj["alpha0_sup"] = alpha0;
      double alpha = k.alpha();
      if (alpha < alpha0) {
        dj["envelope_inf_at_alpha"] = k.envelope_inf(alpha);
        dj["envelope_at_0"] = k.envelope_phi(alpha, 0.0);
      }
      report["decay_inequality"] = dj;
    }
    report["pass"] = all;
    std::ostringstream os;
    os.precision(12);
    os << (all ? "PASS" : "FAIL") << ": |k|_{1,-alpha} = " << rep.weighted_l1
       << (rep.weighted_l1_below_one ? " < 1" : " >= 1") << ", g(0) = " << g.value
       << (g.certified ? " certified" : (" " + g.note)) << "\n";
    write_report(out_dir, report, os.str());
    return all ? 0 : 1;
  });
}

int cmd_sweep_kappa(const std::string& config_path, const std::string& out_dir) {
  return guard(out_dir, [&] {
    Scenario s = load_scenario(config_path);
    if (s.law_kind != Scenario::LawKind::IntegroDelay) {
      throw ConfigError("sweep-kappa: requires an integro_delay scenario");
    }
    ensure_dir(out_dir);
    std::ofstream csv(out_dir + "/sweep.csv");
    csv << "kappa,certified,rho1,kappa0,nu_hat\n";
    csv.precision(12);
    ordered_json rows = ordered_json::array();
    for (double kappa : s.sweep_kappas) {
      Scenario sk = s;
      sk.kappa = kappa;
      CertifyOutcome outcome = certify(scenario_request(sk));
      SimulationResult sim = simulate(scenario_problem(sk), sk.T, sk.dt);
      FitResult fit = fit_decay_rate(sim, sk.fit_window);
      ordered_json row;
      row["kappa"] = kappa;
      row["certified"] = outcome.cert.certified;
      row["rho1"] = outcome.cert.certified ? outcome.cert.rho1 : 0.0;
      row["kappa0"] = outcome.cert.kappa0;
      row["nu_hat"] = fit.rate;
      rows.push_back(row);
      csv << kappa << "," << (outcome.cert.certified ? 1 : 0) << ","
          << (outcome.cert.certified ? outcome.cert.rho1 : 0.0) << "," << outcome.cert.kappa0
          << "," << fit.rate << "\n";
    }
    ordered_json report;
    report["command"] = "sweep-kappa";
    report["rows"] = rows;
    std::ostringstream os;
    os << "swept " << s.sweep_kappas.size() << " kappa values, rows in sweep.csv\n";
    write_report(out_dir, report, os.str());
    return 0;
  });
}

}  // namespace evostab
