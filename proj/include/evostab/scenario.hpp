#ifndef EVOSTAB_SCENARIO_HPP
#define EVOSTAB_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "evostab/certifier.hpp"
#include "evostab/kernel.hpp"
#include "evostab/law.hpp"
#include "evostab/spatial.hpp"
#include "evostab/time_domain.hpp"

namespace evostab {

/// Config-file problem. Errors in the file map to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Scenario {
  enum class LawKind { DampedWave, Integro, IntegroDelay };

  SpatialC spatial;
  LawKind law_kind = LawKind::DampedWave;
  double m1 = 0.0;               // damped wave damping
  std::optional<Kernel> kernel;  // integro families
  double kappa = 0.0;
  double h = 0.0;
  double r = 0.0;  // exclusion radius (defaulted per family)

  // Source: amplitude * sin^2 bump on [t0, t1] against the first-mode shape,
  // or a sampled profile from CSV.
  double t0 = 0.0, t1 = 1.0, amplitude = 1.0;
  std::optional<std::string> source_file;

  // Analysis parameters (all defaulted).
  std::optional<double> delta_override;
  double T = 60.0;
  double dt = 1e-3;
  double fit_window = 2.0;
  std::vector<double> nu_probes;
  bool growth_estimate = true;
  GridOptions grid;

  std::vector<double> sweep_kappas;
};

Scenario load_scenario(const std::string& config_path);

/// (M0, M1, r) of the scenario; M1 carries kappa and the delay factor.
SecondOrderLaw scenario_law(const Scenario& s);

/// Exclusion-ball default delta = min(alpha_dom/2, 0.9 ||A^{-1}||^{-1} / sup||M0||),
/// or the configured override. 0 for the damped wave (global positivity).
double scenario_delta(const Scenario& s);

SecondOrderProblem scenario_problem(const Scenario& s);

CertifyRequest scenario_request(const Scenario& s);

}  // namespace evostab

#endif
