#pragma once

#include "mechlink/device.hpp"
#include "mechlink/envelope.hpp"
#include "mechlink/gaussian.hpp"

namespace mechlink {

enum class Sideband { Red, Blue };

// Two-mode channel (optical temporal mode, mechanical mode) produced by a
// resonant sideband drive of duration tau after eliminating the cavity.
// Red swaps light and mechanics, blue two-mode squeezes them. The optical
// ports use different temporal envelopes for input and output.
struct SidebandChannel {
  GaussianChannel channel;     // quadrature order (X_A, P_A, X_M, P_M)
  TemporalEnvelope input_envelope;
  TemporalEnvelope output_envelope;
  Sideband side;
  double r = 0.0;              // pulse area G*tau
  double bath_coeff = 0.0;     // C, mechanical-bath admixture amplitude
};

// n_T is the mechanical-bath occupation folded into the added noise.
SidebandChannel red_channel(const DeviceParams& p, double tau, double n_T);
SidebandChannel blue_channel(const DeviceParams& p, double tau, double n_T);

// 2(n_T+1)(e^r - sqrt(e^{2r}-1))^2 + (gamma/G)(e^{2r}-1)(2n_T+1),
// evaluated without overflow or cancellation for any r >= 0.
double epr_variance_closed_form(double r, double n_T, double gamma_over_G);

// Commutator defect of the channel once the bath admixture is credited:
// max |K Omega K^T + Omega_bath - Omega|. Zero at gamma = 0, O(gamma/G)
// otherwise (the eliminated dynamics drop terms of that order).
double sideband_commutator_defect(const SidebandChannel& sc);

// Rebuilds the channel, applies it to vacuum (x) thermal(n_T), and compares
// the resulting moments against the scalar closed forms; returns the largest
// absolute residual between the two code paths.
double channel_vs_state_consistency(const DeviceParams& p, double tau,
                                    Sideband side, double n_T);

}  // namespace mechlink
