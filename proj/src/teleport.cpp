#include "mechlink/teleport.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mechlink/optim.hpp"
#include "mechlink/sideband.hpp"

namespace mechlink {

void TeleportConfig::validate() const {
  sender.validate();
  receiver.validate();
  if (r < 0.0) throw std::invalid_argument("TeleportConfig: negative r");
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("TeleportConfig: eta outside [0,1]");
  if (n_T < 0.0) throw std::invalid_argument("TeleportConfig: negative occupation");
}

double beam_splitter_time(double G) {
  if (G <= 0.0) throw std::invalid_argument("beam_splitter_time: G must be positive");
  return std::log(2.0) / (2.0 * G);
}

TeleportCoefficients teleport_coefficients(double r, double eta) {
  if (r < 0.0) throw std::invalid_argument("teleport_coefficients: negative r");
  TeleportCoefficients c;
  double x = std::exp(-2.0 * r);                      // e^{-2r}
  double root = std::sqrt(-std::expm1(-2.0 * r));     // sqrt(1 - e^{-2r})
  // R = e^r (1 - eta sqrt(1-x)); the bracket is evaluated as
  // (1-eta) + eta x/(1+sqrt(1-x)) to avoid cancellation at eta -> 1.
  c.R = std::exp(r) * ((1.0 - eta) + eta * x / (1.0 + root));
  c.R_prime = std::exp(r) * ((1.0 - eta) - x / (1.0 + root));
  return c;
}

TeleportCoefficients teleport_coefficients(const TeleportConfig& config) {
  config.validate();
  TeleportCoefficients c = teleport_coefficients(config.r, config.eta);
  double G_recv = cooperativity_rate(config.receiver);
  double G_send = cooperativity_rate(config.sender);
  double gog_recv = G_recv > 0.0 ? config.receiver.gamma / G_recv : 0.0;
  double gog_send = G_send > 0.0 ? config.sender.gamma / G_send : 0.0;
  c.C_b = std::sqrt(gog_recv * std::expm1(2.0 * config.r));
  c.bath_x = c.C_b * c.C_b * (config.n_T + 0.5);
  c.bath_p = c.bath_x + 2.0 * config.eta * config.eta * gog_send * (config.n_T + 0.5);
  return c;
}

TeleportVariances teleport_variances(const TeleportConfig& config) {
  TeleportCoefficients c = teleport_coefficients(config);
  double eta = config.eta;
  double base = 0.5 * (1.0 + eta * eta) + 0.5 * c.R_prime * c.R_prime +
                c.R * c.R * (config.n_T + 0.5);
  return TeleportVariances{base + c.bath_x, base + c.bath_p};
}

GaussianState teleported_state(const TeleportConfig& config) {
  TeleportVariances v = teleport_variances(config);
  GaussianState s;
  s.means = Vec::Zero(2);
  s.means(0) = config.eta * config.input_x;
  s.means(1) = config.eta * config.input_p;
  s.cov = Mat::Zero(2, 2);
  s.cov(0, 0) = v.sigma_x - 0.5;
  s.cov(1, 1) = v.sigma_p - 0.5;
  return s;
}

double teleport_fidelity(const TeleportConfig& config) {
  TeleportVariances v = teleport_variances(config);
  double miss = 1.0 - config.eta;
  double arg = miss * miss *
               (config.input_x * config.input_x / (2.0 * v.sigma_x) +
                config.input_p * config.input_p / (2.0 * v.sigma_p));
  return std::exp(-arg) / std::sqrt(v.sigma_x * v.sigma_p);
}

GaussianState teleport_pipeline_state(const TeleportConfig& config) {
  config.validate();
  double G_recv = cooperativity_rate(config.receiver);
  double G_send = cooperativity_rate(config.sender);
  if (G_recv <= 0.0 || G_send <= 0.0)
    throw std::invalid_argument("teleport_pipeline_state: both devices need nonzero drive");

  // Register: mode 0 travelling light, mode 1 receiver mechanics,
  // mode 2 sender mechanics holding the coherent input.
  GaussianState reg = tensor(tensor(vacuum_state(1), thermal_state(config.n_T)),
                             coherent_state({config.input_x / std::sqrt(2.0),
                                             config.input_p / std::sqrt(2.0)}));

  SidebandChannel entangle = blue_channel(config.receiver, config.r / G_recv, config.n_T);
  reg = apply_channel(reg, embed_channel(entangle.channel, 3, {0, 1}));

  SidebandChannel swap =
      red_channel(config.sender, beam_splitter_time(G_send), config.n_T);
  reg = apply_channel(reg, embed_channel(swap.channel, 3, {0, 2}));

  // Ideal readout of both swap outputs and feed-forward onto the receiver:
  // X_out = -X_recv + eta*sqrt(2)*X_sendmech', P_out = -P_recv + eta*sqrt(2)*X_light'.
  GaussianChannel ff;
  ff.K = Mat::Zero(2, 6);
  ff.K(0, 2) = -1.0;
  ff.K(0, 4) = config.eta * std::sqrt(2.0);
  ff.K(1, 3) = -1.0;
  ff.K(1, 0) = config.eta * std::sqrt(2.0);
  ff.N = Mat::Zero(2, 2);
  return apply_channel(reg, ff);
}

GaussianChannel mechanical_readout_channel(double r_double_prime) {
  if (r_double_prime < 0.0)
    throw std::invalid_argument("mechanical_readout_channel: negative pulse area");
  double c = std::exp(-r_double_prime);
  double s = std::sqrt(-std::expm1(-2.0 * r_double_prime));
  GaussianChannel ch;
  ch.K = Mat::Zero(2, 4);
  ch.K(0, 0) = -c;
  ch.K(0, 3) = s;
  ch.K(1, 1) = -c;
  ch.K(1, 2) = -s;
  ch.N = Mat::Zero(2, 2);
  return ch;
}

namespace {

constexpr double kRLow = 1e-4;
constexpr double kRHigh = 30.0;

ROptimum minimize_over_r(const std::function<double(double)>& objective) {
  ROptimum out;
  out.r = golden_section(objective, kRLow, kRHigh, 1e-4);
  out.objective = objective(out.r);
  return out;
}

}  // namespace

ROptimum optimize_r_epr(double n_T, double gamma_over_G) {
  if (gamma_over_G < 0.0) throw std::invalid_argument("optimize_r_epr: negative gamma/G");
  if (gamma_over_G == 0.0) {
    ROptimum out;
    out.r = std::numeric_limits<double>::quiet_NaN();
    out.objective = std::numeric_limits<double>::quiet_NaN();
    out.unbounded = true;
    return out;
  }
  ROptimum out = minimize_over_r(
      [&](double r) { return epr_variance_closed_form(r, n_T, gamma_over_G); });
  out.entangled = out.objective < 2.0;
  return out;
}

ROptimum optimize_r_fidelity(const TeleportConfig& base) {
  base.validate();
  double G_recv = cooperativity_rate(base.receiver);
  double gog = G_recv > 0.0 ? base.receiver.gamma / G_recv : 0.0;
  if (gog == 0.0) {
    ROptimum out;
    out.r = std::numeric_limits<double>::quiet_NaN();
    out.objective = std::numeric_limits<double>::quiet_NaN();
    out.unbounded = true;
    return out;
  }
  TeleportConfig probe = base;
  ROptimum out = minimize_over_r([&probe](double r) mutable {
    probe.r = r;
    return -teleport_fidelity(probe);
  });
  out.objective = -out.objective;
  probe.r = out.r;
  double G = cooperativity_rate(probe.receiver);
  out.entangled =
      epr_variance_closed_form(out.r, probe.n_T, probe.receiver.gamma / G) < 2.0;
  return out;
}

}  // namespace mechlink
