#pragma once

#include <vector>

#include "mechlink/device.hpp"
#include "mechlink/gaussian.hpp"

namespace mechlink {

enum class PulseRole { Sender, Receiver, Flat };

// Drive amplitude profile in units of the full drive: Sender ramps up as
// sqrt(1 - e^{-mu G t}), Receiver ramps down as e^{-mu G t}, Flat is 1.
struct PulseShape {
  PulseRole role = PulseRole::Flat;
  double mu = 0.0;
  double G = 0.0;    // full-drive rate, rad/s
  double tau = 0.0;  // window, s

  static PulseShape sender(double mu, double G, double tau) {
    return {PulseRole::Sender, mu, G, tau};
  }
  static PulseShape receiver(double mu, double G, double tau) {
    return {PulseRole::Receiver, mu, G, tau};
  }
  static PulseShape flat(double G, double tau) { return {PulseRole::Flat, 0.0, G, tau}; }
};

double pulse_value(const PulseShape& shape, double t);

// gamma*t + G*integral of S^2, the amplitude decay exponent of the sender
// mode under the ramp-up drive. Closed form, no quadrature.
double sender_decay_exponent(double mu_S, double G, double gamma, double t);

struct TransferWeights {
  double w_ta = 0.0;  // initial sender weight captured by the emitted field
  double w_d = 0.0;   // destruction of the sender state
  double w_tm = 0.0;  // sender-to-receiver transfer amplitude

  double w_ta_sq() const { return w_ta * w_ta; }
  double w_d_sq() const { return w_d * w_d; }
  double w_tm_sq() const { return w_tm * w_tm; }
};

TransferWeights transfer_weights(const DeviceParams& p, double mu_S, double mu_R,
                                 double tau);
// Same functionals for arbitrary shape pairs (e.g. flat drives).
TransferWeights transfer_weights(const DeviceParams& p, const PulseShape& sender,
                                 const PulseShape& receiver, double tau);

// Squared coefficients of every port entering the receiver mode at time tau.
// For gamma = 0 the first three sum to 1.
struct TransferBudget {
  double w_tm_sq = 0.0;    // sender initial state
  double e_r_sq = 0.0;     // receiver initial state survival
  double w_opt = 0.0;      // optical vacuum entering the sender
  double w_sender_bath = 0.0;
  double w_receiver_bath = 0.0;

  double total() const {
    return w_tm_sq + e_r_sq + w_opt + w_sender_bath + w_receiver_bath;
  }
};

TransferBudget transfer_noise_budget(const DeviceParams& p, double mu_S, double mu_R,
                                     double tau);

// Receiver mode after the protocol: means w_tm * input means, covariance
// w_tm^2 * input cov + noise from the budget ports.
GaussianState transfer_output_covariance(const DeviceParams& p, double mu_S,
                                         double mu_R, double tau, double n_T,
                                         const GaussianState& input);
GaussianState transfer_output_covariance(const DeviceParams& p, double mu_S,
                                         double mu_R, double tau, double n_T);

struct PulseOptimum {
  double mu_S = 0.0;
  double mu_R = 0.0;
  double w_tm_sq = 0.0;
  long evaluations = 0;
  bool plateau = false;  // objective saturated: doubling tau moves it < 1e-6
};

// Maximizes w_tm^2 over (mu_S, mu_R) in [1e-4, 10]^2: 41x41 log grid, then
// simplex refinement. Deterministic.
PulseOptimum optimize_pulse_params(const DeviceParams& p, double tau);

struct TransferSweepRow {
  double x = 0.0;
  double w_ta_sq = 0.0;
  double w_d_sq = 0.0;
  double w_tm_sq = 0.0;
};

std::vector<TransferSweepRow> transfer_sweep_tau(const DeviceParams& p, double mu_S,
                                                 double mu_R,
                                                 const std::vector<double>& taus);
std::vector<TransferSweepRow> transfer_sweep_gamma(const DeviceParams& p, double mu_S,
                                                   double mu_R, double tau,
                                                   const std::vector<double>& gammas);

}  // namespace mechlink
