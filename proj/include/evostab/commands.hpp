#ifndef EVOSTAB_COMMANDS_HPP
#define EVOSTAB_COMMANDS_HPP

#include <string>

namespace evostab {

/// Exit codes shared by all commands: 0 success / certified,
/// 1 analysis-negative (not certified, validation failed), 2 usage or config
/// error. Reports are written as JSON plus a human-readable summary; curves
/// as CSV. Output is deterministic for identical configs.
int cmd_certify(const std::string& config_path, const std::string& out_dir);
int cmd_simulate(const std::string& config_path, const std::string& out_dir);
int cmd_validate(const std::string& config_path, const std::string& out_dir);
int cmd_kernel_check(const std::string& config_path, const std::string& out_dir);
int cmd_sweep_kappa(const std::string& config_path, const std::string& out_dir);

}  // namespace evostab

#endif
