#include "evostab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace evostab {

namespace {

using nlohmann::json;

Kernel parse_kernel(const json& j) {
  if (!j.contains("alpha")) throw ConfigError("kernel: missing alpha");
  double alpha = j.at("alpha").get<double>();
  if (j.contains("terms")) {
    std::vector<ExpTerm> terms;
    for (const auto& t : j.at("terms")) {
      terms.push_back({t.at("coef").get<double>(), t.at("rate").get<double>()});
    }
    return Kernel::exp_sum(std::move(terms), alpha);
  }
  if (j.contains("channels")) {
    std::vector<std::vector<ExpTerm>> channels;
    for (const auto& ch : j.at("channels")) {
      std::vector<ExpTerm> terms;
      for (const auto& t : ch) {
        terms.push_back({t.at("coef").get<double>(), t.at("rate").get<double>()});
      }
      channels.push_back(std::move(terms));
    }
    return Kernel::diag_exp_sum(std::move(channels), alpha);
  }
  if (j.contains("table")) {
    return Kernel::sampled_from_csv(j.at("table").get<std::string>(),
                                    j.at("tail_rate").get<double>(), alpha);
  }
  throw ConfigError("kernel: expected terms, channels or table");
}

}  // namespace

Scenario load_scenario(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config " + config_path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  Scenario s;
  try {
    const auto& sp = j.at("spatial");
    std::string sp_type = sp.at("type").get<std::string>();
    if (sp_type == "dirichlet_1d") {
      int n = sp.at("n").get<int>();
      if (n < 1) throw ConfigError("spatial: n must be >= 1");
      s.spatial = dirichlet_1d(n);
    } else if (sp_type == "matrix_csv") {
      s.spatial = reduce_user_matrix(read_complex_matrix_csv(sp.at("path").get<std::string>()),
                                     sp.at("path").get<std::string>());
    } else {
      throw ConfigError("spatial: unknown type " + sp_type);
    }

    const auto& law = j.at("law");
    std::string law_type = law.at("type").get<std::string>();
    if (law_type == "damped_wave") {
      s.law_kind = Scenario::LawKind::DampedWave;
      s.m1 = law.at("m1").get<double>();
      if (s.m1 < 0.0) throw ConfigError("law: damped wave needs m1 >= 0");
      // m1 = 0 stays loadable (simulation works); certification then refuses it.
      s.r = law.value("r", s.m1 > 0.0 ? 1.0 / s.m1 : 1.0);
    } else if (law_type == "integro" || law_type == "integro_delay") {
      s.law_kind = law_type == "integro" ? Scenario::LawKind::Integro
                                         : Scenario::LawKind::IntegroDelay;
      s.kernel = parse_kernel(law.at("kernel"));
      if (s.kernel->dim() != 1 && s.kernel->dim() != s.spatial.n()) {
        throw ConfigError("law: kernel channels must be scalar or match the grid dimension");
      }
      s.r = law.value("r", 1.0 / (2.0 * s.kernel->alpha()));
      if (s.law_kind == Scenario::LawKind::IntegroDelay) {
        s.kappa = law.at("kappa").get<double>();
        s.h = law.at("h").get<double>();
        if (!(s.h > 0.0)) throw ConfigError("law: delay h must be > 0");
      }
    } else {
      throw ConfigError("law: unknown type " + law_type);
    }
    if (!(s.r > 0.0)) throw ConfigError("law: exclusion radius r must be > 0");

    if (j.contains("source")) {
      const auto& src = j.at("source");
      std::string src_type = src.value("type", "bump");
      if (src_type == "bump") {
        s.t0 = src.value("t0", 0.0);
        s.t1 = src.value("t1", 1.0);
        s.amplitude = src.value("amplitude", 1.0);
        if (!(s.t1 > s.t0)) throw ConfigError("source: need t1 > t0");
      } else if (src_type == "file") {
        s.source_file = src.at("path").get<std::string>();
      } else {
        throw ConfigError("source: unknown type " + src_type);
      }
    }

    if (j.contains("analysis")) {
      const auto& an = j.at("analysis");
      if (an.contains("delta")) s.delta_override = an.at("delta").get<double>();
      s.T = an.value("T", s.T);
      s.dt = an.value("dt", s.dt);
      s.fit_window = an.value("fit_window", s.fit_window);
      s.growth_estimate = an.value("growth_estimate", s.growth_estimate);
      if (an.contains("nu_probes")) {
        s.nu_probes = an.at("nu_probes").get<std::vector<double>>();
      }
      if (an.contains("grid")) {
        const auto& g = an.at("grid");
        s.grid.rho_max = g.value("rho_max", s.grid.rho_max);
        s.grid.t_max_factor = g.value("t_max_factor", s.grid.t_max_factor);
        s.grid.re_points = g.value("re_points", s.grid.re_points);
        s.grid.im_points = g.value("im_points", s.grid.im_points);
        s.grid.ring_points = g.value("ring_points", s.grid.ring_points);
      }
    }
    if (j.contains("sweep")) {
      s.sweep_kappas = j.at("sweep").value("kappas", std::vector<double>{});
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // Cross-field checks.
  if (!(s.dt > 0.0) || !(s.T > s.dt)) throw ConfigError("analysis: bad time grid");
  if (s.kappa != 0.0) {
    double ratio = s.h / s.dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 || ratio < 1.0) {
      throw ConfigError("analysis: dt must divide the delay h exactly");
    }
  }
  if (s.kernel && s.delta_override && !(*s.delta_override < s.kernel->alpha())) {
    throw ConfigError("analysis: delta must be smaller than the kernel weight alpha");
  }
  if (!s.source_file && !(s.T > 2.0 * s.t1)) {
    throw ConfigError("analysis: T must exceed twice the source support end");
  }
  return s;
}

SecondOrderLaw scenario_law(const Scenario& s) {
  Eigen::Index n = s.spatial.n();
  switch (s.law_kind) {
    case Scenario::LawKind::DampedWave:
      return SecondOrderLaw(LawExpr::constant(CMatrix::Identity(n, n)),
                            LawExpr::constant(CMatrix(CMatrix::Identity(n, n) * Complex(s.m1))),
                            s.r);
    case Scenario::LawKind::Integro: {
      // Scalar kernels act componentwise: (1 - K(z))^{-1} I_n.
      LawExpr m0 = LawExpr::conv_resolvent(*s.kernel, n);
      return SecondOrderLaw(m0, LawExpr::zero(n), s.r);
    }
    case Scenario::LawKind::IntegroDelay: {
      LawExpr m0 = LawExpr::conv_resolvent(*s.kernel, n);
      LawExpr m1 = LawExpr::scale(s.kappa, LawExpr::delay_factor(s.h, m0));
      return SecondOrderLaw(m0, m1, s.r);
    }
  }
  throw std::logic_error("scenario_law: unreachable");
}

double scenario_delta(const Scenario& s) {
  if (s.law_kind == Scenario::LawKind::DampedWave) return 0.0;
  if (s.delta_override) return *s.delta_override;
  double alpha = s.kernel->alpha();
  double m0_sup = 1.0 / (1.0 - s.kernel->weighted_l1_norm(alpha));
  return std::min(alpha / 2.0, 0.9 * s.spatial.sigma_min / m0_sup);
}

SecondOrderProblem scenario_problem(const Scenario& s) {
  SecondOrderProblem p;
  p.c = s.spatial;
  p.m1 = s.law_kind == Scenario::LawKind::DampedWave ? s.m1 : 0.0;
  if (s.law_kind != Scenario::LawKind::DampedWave) {
    if (s.kernel->family() != Kernel::Family::ExpSum) {
      throw std::invalid_argument(
          "scenario: time stepping supports scalar exponential-sum kernels only");
    }
    p.memory = s.kernel;
  }
  p.kappa = s.kappa;
  p.h = s.h;

  Eigen::Index n = s.spatial.n();
  RVector shape(n);
  if (s.spatial.provenance.rfind("dirichlet_1d", 0) == 0) {
    double hgrid = 1.0 / (n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      shape(i) = std::sin(std::numbers::pi * (i + 1) * hgrid);
    }
  } else {
    shape.setOnes();
    shape /= shape.norm();
  }
  p.source_shape = shape;

  if (s.source_file) {
    std::ifstream in(*s.source_file);
    if (!in) throw ConfigError("cannot open source file " + *s.source_file);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> ts, gs;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double t, g;
      if (!(row >> t >> g)) throw ConfigError("bad source row: " + line);
      ts.push_back(t);
      gs.push_back(g);
    }
    if (ts.size() < 2) throw ConfigError("source file needs at least two samples");
    p.source_end = ts.back();
    p.source_profile = [ts, gs](double t) {
      if (t <= ts.front() || t >= ts.back()) return 0.0;
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      std::size_t i = static_cast<std::size_t>(it - ts.begin());
      double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
      return (1.0 - w) * gs[i - 1] + w * gs[i];
    };
  } else {
    p.source_profile = bump_profile(s.t0, s.t1, s.amplitude);
    p.source_end = s.t1;
  }
  return p;
}

CertifyRequest scenario_request(const Scenario& s) {
  CertifyRequest req{scenario_law(s), s.spatial,
                     s.law_kind == Scenario::LawKind::DampedWave ? PositivityMode::Global
                                                                 : PositivityMode::Integro,
                     scenario_delta(s), s.kernel, s.kappa, s.h, s.grid};
  return req;
}

}  // namespace evostab
