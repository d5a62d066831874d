#include <string>

#include <CLI11.hpp>

#include "evostab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "evostab - frequency-domain exponential-stability certificates for second-order\n"
      "evolutionary equations (damped waves, memory kernels, delay feedback), validated\n"
      "by time-domain simulation.\n\n"
      "Parallelism is capped by the EVOSTAB_THREADS environment variable.\n"
      "CSV outputs: u.csv/du.csv carry 't,<prefix>0,...' per grid node; energy.csv\n"
      "carries 't,energy,state_norm'; sweep.csv carries\n"
      "'kappa,certified,rho1,kappa0,nu_hat'."};
  app.require_subcommand(1);

  std::string config, out = "evostab-out";
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON scenario file")->required();
    cmd->add_option("--out", out, "output directory (default evostab-out)");
  };

  auto* certify = app.add_subcommand(
      "certify", "Produce a stability certificate (exit 0 certified, 1 not, 2 config error)");
  add_common(certify);
  auto* simulate = app.add_subcommand(
      "simulate", "Time-step the scenario and fit the decay rate; writes trajectory CSVs");
  add_common(simulate);
  auto* validate = app.add_subcommand(
      "validate", "Certify, simulate, and check the fitted rate against the certificate");
  add_common(validate);
  auto* kernel_check = app.add_subcommand(
      "kernel-check", "Check the memory kernel's structural admissibility and margins");
  add_common(kernel_check);
  auto* sweep = app.add_subcommand(
      "sweep-kappa", "Certify + simulate across the configured delay-gain list; writes sweep.csv");
  add_common(sweep);

  CLI11_PARSE(app, argc, argv);

  if (certify->parsed()) return evostab::cmd_certify(config, out);
  if (simulate->parsed()) return evostab::cmd_simulate(config, out);
  if (validate->parsed()) return evostab::cmd_validate(config, out);
  if (kernel_check->parsed()) return evostab::cmd_kernel_check(config, out);
  if (sweep->parsed()) return evostab::cmd_sweep_kappa(config, out);
  return 2;
}
