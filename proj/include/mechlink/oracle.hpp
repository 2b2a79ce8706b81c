#pragma once

#include <optional>
#include <vector>

#include "mechlink/device.hpp"
#include "mechlink/envelope.hpp"
#include "mechlink/gaussian.hpp"
#include "mechlink/sideband.hpp"
#include "mechlink/transfer.hpp"

namespace mechlink {

// Drive for a time-binned run: which sideband the pump sits on, and the
// amplitude profile scaling g0*beta (Flat means constant full drive).
struct DriveProgram {
  Sideband side = Sideband::Red;
  PulseShape amplitude;
};

// Full two-mode (cavity + mechanics) dynamics with the input field cut into
// independent vacuum bins; no adiabatic elimination anywhere.
struct OracleConfig {
  DeviceParams params;
  DriveProgram drive;
  double tau = 0.0;
  int n_steps = 0;
  double n_T = 0.0;  // mechanical resonator and bath occupation
  std::optional<TemporalEnvelope> envelope_in;   // default: matched to the sideband
  std::optional<TemporalEnvelope> envelope_out;
  int trajectory_samples = 0;  // extra covariance snapshots to record

  void validate() const;  // kappa*dt < 0.05 among others
};

// Step count giving kappa*dt at the requested value (default 0.02).
int recommended_steps(const DeviceParams& p, double tau, double kappa_dt = 0.02);

struct MomentTrajectory {
  std::vector<double> times;
  // 8x8 covariance of (cavity, mechanics, filtered input, filtered output).
  std::vector<Mat> frame_cov;

  // Quanta ledger over the run, for conservation checks.
  double emitted_quanta = 0.0;        // summed over all output bins
  double filtered_quanta = 0.0;       // held by the filtered output mode alone
  double cavity_quanta_final = 0.0;
  double mech_quanta_initial = 0.0;
  double mech_quanta_final = 0.0;
};

struct OracleChannelResult {
  // (filtered input mode, mechanics) -> (filtered output mode, mechanics).
  GaussianChannel channel;
  // Commutator defect with every untracked port credited (initial cavity,
  // field outside the filter mode, mechanical bath). Discretization-level.
  double commutator_defect = 0.0;
  // Commutator weight escaping the two retained modes; physical leakage of
  // order (g0*beta/kappa)^2, not an integration error.
  double mode_truncation_weight = 0.0;
  MomentTrajectory trajectory;
};

OracleChannelResult simulate_channel(const OracleConfig& config);

struct AdiabaticResidual {
  double tau = 0.0;
  double k_residual = 0.0;  // max |K_oracle - K_closed|
  double n_residual = 0.0;  // max |N_oracle - N_closed|
  double commutator_defect = 0.0;
};

// Compares the binned channel against the eliminated-cavity closed form on a
// grid of pulse durations.
std::vector<AdiabaticResidual> verify_adiabatic(const DeviceParams& p, Sideband side,
                                                const std::vector<double>& taus,
                                                double n_T, double kappa_dt = 0.02);

struct TransferOracleResult {
  TransferWeights weights;
  GaussianState receiver_state;
  double cavity_quanta_final = 0.0;  // both cavities, end of run
};

// Cascades two red-detuned shaped drives bin-by-bin (sender output feeds the
// receiver with zero delay) and extracts the transfer weights directly.
TransferOracleResult simulate_transfer(const OracleConfig& sender,
                                       const OracleConfig& receiver,
                                       const GaussianState& input);

}  // namespace mechlink
