#pragma once

#include <string>
#include <vector>

namespace mechlink {

// Optomechanical device in the linearized regime. All rates are angular
// (rad/s) amplitude rates; beta is the dimensionless intracavity drive
// amplitude set by the classical pump.
struct DeviceParams {
  double g0 = 0.0;       // single-photon coupling, rad/s
  double beta = 0.0;     // intracavity amplitude, dimensionless
  double kappa = 0.0;    // cavity amplitude decay, rad/s
  double gamma = 0.0;    // mechanical amplitude decay, rad/s
  double omega_m = 0.0;  // mechanical frequency, rad/s
  double omega_c = 0.0;  // cavity frequency, rad/s (bookkeeping only)

  double coupling() const { return g0 * beta; }

  // Throws std::invalid_argument when the linearized weak-coupling model
  // does not apply (kappa <= 0, g0*beta >= kappa, negative rates).
  void validate() const;

  // Non-fatal diagnostics, e.g. marginal sideband resolution.
  std::vector<std::string> warnings() const;
};

// Effective mechanics-field rate after eliminating the cavity:
// G = (g0*beta)^2 / kappa.
double cooperativity_rate(const DeviceParams& p);

}  // namespace mechlink
