#pragma once

#include "mechlink/device.hpp"
#include "mechlink/gaussian.hpp"

namespace mechlink {

// One teleportation run: an entangling blue pulse of area r on the receiver
// resonator, a 50/50 swap pulse on the sender resonator holding the coherent
// input, dual quadrature readout, and feed-forward with efficiency eta.
struct TeleportConfig {
  DeviceParams sender;
  DeviceParams receiver;
  double r = 0.0;
  double eta = 1.0;
  double n_T = 0.0;       // resonators and baths share one occupation
  double input_x = 0.0;   // coherent input means, quadrature units
  double input_p = 0.0;

  void validate() const;
};

struct TeleportCoefficients {
  double R = 0.0;        // e^r - eta*sqrt(e^{2r}-1)
  double R_prime = 0.0;  // sqrt(e^{2r}-1) - eta*e^r
  double C_b = 0.0;      // entangling-pulse bath admixture
  double bath_x = 0.0;   // bath variance added to the X channel
  double bath_p = 0.0;   // same for P; carries the extra readout term
};

// Swap-pulse duration with e^{-G tau} = 1/sqrt(2).
double beam_splitter_time(double G);

// R and R' only; cancellation-free for eta near 1 and large r.
TeleportCoefficients teleport_coefficients(double r, double eta);
// All fields, including the bath terms set by the two devices.
TeleportCoefficients teleport_coefficients(const TeleportConfig& config);

// Q-function variances (sigma_x, sigma_p) of the teleported mode.
struct TeleportVariances {
  double sigma_x = 0.0;
  double sigma_p = 0.0;
};
TeleportVariances teleport_variances(const TeleportConfig& config);

// Closed-form output state: means eta * input, covariance from the
// coefficient budget above.
GaussianState teleported_state(const TeleportConfig& config);

// Overlap fidelity with the input coherent state.
double teleport_fidelity(const TeleportConfig& config);

// Independent path: composes the blue channel, the swap beam splitter and
// the measurement/feed-forward map as explicit Gaussian channels. Used to
// cross-check teleported_state.
GaussianState teleport_pipeline_state(const TeleportConfig& config);

// Reads a mechanical mode onto light via a swap pulse of area r''. Channel
// from (optical vacuum port, mechanical mode) to the measured mode; as
// r'' grows the mechanical quadratures transfer with unit weight.
GaussianChannel mechanical_readout_channel(double r_double_prime);

struct ROptimum {
  double r = 0.0;
  double objective = 0.0;
  bool entangled = false;
  bool unbounded = false;  // gamma/G = 0: no interior optimum exists
};

// Minimizes the closed-form EPR variance over r in [1e-4, 30].
ROptimum optimize_r_epr(double n_T, double gamma_over_G);
// Maximizes teleport_fidelity over r; other config fields held fixed.
ROptimum optimize_r_fidelity(const TeleportConfig& base);

}  // namespace mechlink
