#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mechlink/device.hpp"
#include "mechlink/gaussian.hpp"
#include "mechlink/table.hpp"

namespace mechlink {

struct SweepSpec {
  std::string axis;
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  bool log_scale = false;

  std::vector<double> values() const;
};

struct EprBlock {
  double r = 1.0;
  bool r_opt = false;
};

struct TeleportBlock {
  double eta = 1.0;
  double r = 1.0;
  bool r_opt = false;
  double input_x = 0.0;
  double input_p = 0.0;
};

struct TransferBlock {
  double mu_S = 0.05;
  double mu_R = 0.22;
  double kappa_tau = 4000.0;
  bool flat_pulses = false;
  bool pulse_table = false;
};

struct OptimizeBlock {
  std::string target = "pulse_params";  // or "r_opt"
  double kappa_tau = 4000.0;
};

struct OracleBlock {
  std::vector<int> sides;               // 0 = red, 1 = blue
  std::vector<double> g0beta_over_kappa;
  double G_tau = 1.0;
  double kappa_dt = 0.02;
  double k_bound_factor_red = 2.5;   // bound = factor * (g0beta/kappa)^2
  double k_bound_factor_blue = 16.0;
};

struct RunConfig {
  DeviceParams device;
  ThermalEnvironment environment = ThermalEnvironment::from_occupation(0.0);
  std::string protocol;
  std::optional<SweepSpec> sweep;
  std::string config_hash;
  int threads = 1;

  EprBlock epr;
  TeleportBlock teleport;
  TransferBlock transfer;
  OptimizeBlock optimize;
  OracleBlock oracle;
};

// Parses the JSON text, applies defaults, validates, and checks that the
// single protocol block matches `expected_protocol`.
RunConfig parse_run_config(const std::string& json_text,
                           const std::string& expected_protocol);

ResultTable run_epr(const RunConfig& config);
ResultTable run_teleport(const RunConfig& config);
ResultTable run_transfer(const RunConfig& config);
ResultTable run_optimize(const RunConfig& config);

struct OracleRun {
  ResultTable table;
  bool within_bounds = true;
};
OracleRun run_oracle(const RunConfig& config);

// Schema, defaults, units and exit codes, for the `describe` subcommand.
std::string describe_text();

}  // namespace mechlink
