#include "mechlink/sideband.hpp"

#include <cmath>
#include <stdexcept>

namespace mechlink {

void DeviceParams::validate() const {
  if (kappa <= 0.0) throw std::invalid_argument("DeviceParams: kappa must be positive");
  if (g0 < 0.0 || beta < 0.0) throw std::invalid_argument("DeviceParams: negative coupling");
  if (gamma < 0.0) throw std::invalid_argument("DeviceParams: negative mechanical decay");
  if (omega_m < 0.0 || omega_c < 0.0) throw std::invalid_argument("DeviceParams: negative frequency");
  if (coupling() >= kappa)
    throw std::invalid_argument(
        "DeviceParams: g0*beta must stay below kappa; the eliminated-cavity model breaks down");
}

std::vector<std::string> DeviceParams::warnings() const {
  std::vector<std::string> out;
  if (omega_m > 0.0 && kappa > 0.5 * omega_m)
    out.push_back("kappa above omega_m/2: sideband resolution is marginal");
  return out;
}

double cooperativity_rate(const DeviceParams& p) {
  if (p.kappa <= 0.0) throw std::invalid_argument("cooperativity_rate: kappa must be positive");
  double gb = p.coupling();
  return gb * gb / p.kappa;
}

std::vector<std::string> sideband_warnings(const DeviceParams& p, double tau) {
  std::vector<std::string> out = p.warnings();
  if (p.kappa * tau < 10.0)
    out.push_back("kappa*tau below 10: cavity transients are not negligible over this pulse");
  return out;
}

namespace {

// 1 - e^{-2r} without cancellation.
double one_minus_exp2r(double r) { return -std::expm1(-2.0 * r); }

}  // namespace

SidebandChannel red_channel(const DeviceParams& p, double tau, double n_T) {
  p.validate();
  if (tau < 0.0 || n_T < 0.0) throw std::invalid_argument("red_channel: bad tau or n_T");
  double G = cooperativity_rate(p);
  double r = G * tau;
  double c = std::exp(-r);
  double s = std::sqrt(one_minus_exp2r(r));
  double gamma_over_G = G > 0.0 ? p.gamma / G : 0.0;
  double C_sq = gamma_over_G * one_minus_exp2r(r);

  GaussianChannel ch;
  ch.K = Mat::Zero(4, 4);
  ch.K << -c, 0.0, 0.0, s,
          0.0, -c, -s, 0.0,
          0.0, -s, c, 0.0,
          s, 0.0, 0.0, c;
  ch.N = Mat::Zero(4, 4);
  ch.N(2, 2) = C_sq * (n_T + 0.5);
  ch.N(3, 3) = C_sq * (n_T + 0.5);

  double env_rate = G > 0.0 ? G : 0.0;
  double env_tau = tau > 0.0 ? tau : 1.0;  // tau = 0: nothing converts; envelope window arbitrary
  return SidebandChannel{std::move(ch), TemporalEnvelope::grow_q(env_rate, env_tau),
                         TemporalEnvelope::decay_p(env_rate, env_tau), Sideband::Red, r,
                         std::sqrt(C_sq)};
}

SidebandChannel blue_channel(const DeviceParams& p, double tau, double n_T) {
  p.validate();
  if (tau < 0.0 || n_T < 0.0) throw std::invalid_argument("blue_channel: bad tau or n_T");
  double G = cooperativity_rate(p);
  double r = G * tau;
  if (2.0 * r > 700.0) throw std::invalid_argument("blue_channel: pulse area too large to represent");
  double s = std::exp(r);
  double q = s * std::sqrt(one_minus_exp2r(r));
  double gamma_over_G = G > 0.0 ? p.gamma / G : 0.0;
  double C_sq = gamma_over_G * std::expm1(2.0 * r);

  GaussianChannel ch;
  ch.K = Mat::Zero(4, 4);
  ch.K << -s, 0.0, 0.0, -q,
          0.0, -s, -q, 0.0,
          0.0, q, s, 0.0,
          q, 0.0, 0.0, s;
  ch.N = Mat::Zero(4, 4);
  ch.N(2, 2) = C_sq * (n_T + 0.5);
  ch.N(3, 3) = C_sq * (n_T + 0.5);

  double env_rate = G > 0.0 ? G : 0.0;
  double env_tau = tau > 0.0 ? tau : 1.0;
  return SidebandChannel{std::move(ch), TemporalEnvelope::decay_p(env_rate, env_tau),
                         TemporalEnvelope::grow_q(env_rate, env_tau), Sideband::Blue, r,
                         std::sqrt(C_sq)};
}

double epr_variance_closed_form(double r, double n_T, double gamma_over_G) {
  if (r < 0.0 || n_T < 0.0 || gamma_over_G < 0.0)
    throw std::invalid_argument("epr_variance_closed_form: arguments must be nonnegative");
  // e^r - sqrt(e^{2r}-1) rewritten as a reciprocal to survive large r.
  double b = std::exp(-r) / (1.0 + std::sqrt(one_minus_exp2r(r)));
  double value = 2.0 * (n_T + 1.0) * b * b;
  if (gamma_over_G > 0.0) value += gamma_over_G * std::expm1(2.0 * r) * (2.0 * n_T + 1.0);
  return value;
}

double sideband_commutator_defect(const SidebandChannel& sc) {
  Mat omega = symplectic_form(2);
  Mat omega_bath = Mat::Zero(4, 4);
  double c_sq = sc.bath_coeff * sc.bath_coeff;
  omega_bath(2, 3) = c_sq;
  omega_bath(3, 2) = -c_sq;
  return (sc.channel.K * omega * sc.channel.K.transpose() + omega_bath - omega)
      .cwiseAbs()
      .maxCoeff();
}

double channel_vs_state_consistency(const DeviceParams& p, double tau, Sideband side,
                                    double n_T) {
  double G = cooperativity_rate(p);
  double r = G * tau;
  double gamma_over_G = G > 0.0 ? p.gamma / G : 0.0;
  GaussianState in = tensor(vacuum_state(1), thermal_state(n_T));
  double res = 0.0;
  if (side == Sideband::Red) {
    SidebandChannel sc = red_channel(p, tau, n_T);
    GaussianState out = apply_channel(in, sc.channel);
    double c = std::exp(-r);
    double s = std::sqrt(one_minus_exp2r(r));
    double C_sq = gamma_over_G * one_minus_exp2r(r);
    res = std::max(res, std::abs(sc.channel.K(2, 2) - c));
    res = std::max(res, std::abs(sc.channel.K(2, 1) + s));
    res = std::max(res, std::abs(sc.channel.K(3, 0) - s));
    res = std::max(res, std::abs(sc.channel.K(0, 0) + c));
    res = std::max(res, std::abs(sc.channel.K(0, 3) - s));
    double mech_var = c * c * (n_T + 0.5) + 0.5 * s * s + C_sq * (n_T + 0.5);
    res = std::max(res, std::abs(out.cov(2, 2) - mech_var));
    res = std::max(res, std::abs(out.cov(3, 3) - mech_var));
  } else {
    SidebandChannel sc = blue_channel(p, tau, n_T);
    GaussianState out = apply_channel(in, sc.channel);
    res = std::max(res, std::abs(epr_variance(out, 0, 1) -
                                 epr_variance_closed_form(r, n_T, gamma_over_G)));
    double s = std::exp(r);
    double q = s * std::sqrt(one_minus_exp2r(r));
    double opt_var = 0.5 * s * s + q * q * (n_T + 0.5);
    res = std::max(res, std::abs(out.cov(0, 0) - opt_var));
    res = std::max(res, std::abs(out.cov(1, 1) - opt_var));
  }
  return res;
}

}  // namespace mechlink
