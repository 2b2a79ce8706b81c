#include "mechlink/transfer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mechlink/optim.hpp"
#include "mechlink/quadrature.hpp"

namespace mechlink {

double pulse_value(const PulseShape& shape, double t) {
  if (t < 0.0 || t > shape.tau) throw std::out_of_range("pulse_value: t outside [0, tau]");
  switch (shape.role) {
    case PulseRole::Sender:
      return std::sqrt(-std::expm1(-shape.mu * shape.G * t));
    case PulseRole::Receiver:
      return std::exp(-shape.mu * shape.G * t);
    case PulseRole::Flat:
      return 1.0;
  }
  return 0.0;
}

double sender_decay_exponent(double mu_S, double G, double gamma, double t) {
  if (t < 0.0) throw std::invalid_argument("sender_decay_exponent: negative t");
  // integral of S^2 = t + (e^{-mu G t} - 1)/(mu G)
  double gt = G * t;
  double ramp = mu_S > 0.0 ? std::expm1(-mu_S * gt) / mu_S : -gt;
  return gamma * t + gt + ramp;
}

namespace {

// Everything below works in the dimensionless time u = G t with the damping
// ratio gog = gamma / G. A pulse pair enters only through the instantaneous
// amplitudes and the cumulative squared areas IS, IR, all closed forms.
struct PairKernels {
  PulseShape send;
  PulseShape recv;
  double u_max = 0.0;
  double gog = 0.0;

  double S(double u) const { return pulse_value(send, u); }
  double R(double u) const { return pulse_value(recv, u); }
  double IS(double u) const {
    if (send.role == PulseRole::Flat) return u;
    return u + std::expm1(-send.mu * u) / send.mu;
  }
  double IR(double u) const {
    if (recv.role == PulseRole::Flat) return u;
    return -std::expm1(-2.0 * recv.mu * u) / (2.0 * recv.mu);
  }
  // E_R(tau)/E_R(u): receiver decay accumulated over [u, u_max]; <= 1.
  double receiver_ladder(double u) const {
    return std::exp(-gog * (u_max - u) - (IR(u_max) - IR(u)));
  }
};

PairKernels make_kernels(const DeviceParams& p, const PulseShape& sender,
                         const PulseShape& receiver, double tau) {
  p.validate();
  if (tau < 0.0) throw std::invalid_argument("transfer: negative tau");
  double G = cooperativity_rate(p);
  if (G <= 0.0) throw std::invalid_argument("transfer: drive is off (G = 0)");
  PairKernels k;
  // Shapes are evaluated in u-units: G inside the shape is set to 1.
  k.send = sender;
  k.send.G = 1.0;
  k.send.tau = G * tau;
  k.recv = receiver;
  k.recv.G = 1.0;
  k.recv.tau = G * tau;
  k.u_max = G * tau;
  k.gog = p.gamma / G;
  return k;
}

double wtm_amplitude(const PairKernels& k) {
  if (k.u_max == 0.0) return 0.0;
  double irm = k.IR(k.u_max);
  return 2.0 * integrate(
                   [&](double u) {
                     double e = -k.gog * k.u_max - (irm - k.IR(u)) - k.IS(u);
                     return k.R(u) * k.S(u) * std::exp(e);
                   },
                   0.0, k.u_max, 1e-11);
}

double wta_squared(const PairKernels& k) {
  if (k.u_max == 0.0) return 0.0;
  return 2.0 * integrate(
                   [&](double u) {
                     double s = k.S(u);
                     return s * s * std::exp(-2.0 * (k.gog * u + k.IS(u)));
                   },
                   0.0, k.u_max, 1e-11);
}

double wd_squared(const PairKernels& k) {
  return -std::expm1(-2.0 * (k.gog * k.u_max + k.IS(k.u_max)));
}

// Field emitted by the sender after u, rescattered into the receiver.
double link_kernel(const PairKernels& k, double u) {
  double irm = k.IR(k.u_max);
  double isu = k.IS(u);
  return integrate(
      [&](double v) {
        double e = -k.gog * (k.u_max - v) - (irm - k.IR(v)) - (k.IS(v) - isu);
        return k.R(v) * k.S(v) * std::exp(e);
      },
      u, k.u_max, 1e-10);
}

TransferWeights weights_from_kernels(const PairKernels& k) {
  TransferWeights w;
  w.w_ta = std::sqrt(std::max(0.0, wta_squared(k)));
  w.w_d = std::sqrt(std::max(0.0, wd_squared(k)));
  w.w_tm = wtm_amplitude(k);
  return w;
}

}  // namespace

TransferWeights transfer_weights(const DeviceParams& p, const PulseShape& sender,
                                 const PulseShape& receiver, double tau) {
  return weights_from_kernels(make_kernels(p, sender, receiver, tau));
}

TransferWeights transfer_weights(const DeviceParams& p, double mu_S, double mu_R,
                                 double tau) {
  double G = cooperativity_rate(p);
  return transfer_weights(p, PulseShape::sender(mu_S, G, tau),
                          PulseShape::receiver(mu_R, G, tau), tau);
}

TransferBudget transfer_noise_budget(const DeviceParams& p, double mu_S, double mu_R,
                                     double tau) {
  double G = cooperativity_rate(p);
  PairKernels k = make_kernels(p, PulseShape::sender(mu_S, G, tau),
                               PulseShape::receiver(mu_R, G, tau), tau);
  TransferBudget b;
  double w_tm = wtm_amplitude(k);
  b.w_tm_sq = w_tm * w_tm;
  double e_r = k.receiver_ladder(0.0);
  b.e_r_sq = e_r * e_r;
  if (k.u_max > 0.0) {
    b.w_opt = 2.0 * integrate(
                        [&](double u) {
                          double c = 2.0 * k.S(u) * link_kernel(k, u) -
                                     k.R(u) * k.receiver_ladder(u);
                          return c * c;
                        },
                        0.0, k.u_max, 1e-9);
    if (k.gog > 0.0) {
      b.w_sender_bath = 8.0 * k.gog *
                        integrate(
                            [&](double u) {
                              double g = link_kernel(k, u);
                              return g * g;
                            },
                            0.0, k.u_max, 1e-9);
      b.w_receiver_bath = 2.0 * k.gog *
                          integrate(
                              [&](double u) {
                                double l = k.receiver_ladder(u);
                                return l * l;
                              },
                              0.0, k.u_max, 1e-10);
    }
  }
  return b;
}

GaussianState transfer_output_covariance(const DeviceParams& p, double mu_S,
                                         double mu_R, double tau, double n_T,
                                         const GaussianState& input) {
  if (input.modes() != 1)
    throw std::invalid_argument("transfer_output_covariance: single-mode input expected");
  if (n_T < 0.0) throw std::invalid_argument("transfer_output_covariance: negative n_T");
  TransferBudget b = transfer_noise_budget(p, mu_S, mu_R, tau);
  double w_tm = std::sqrt(b.w_tm_sq);
  double noise = b.e_r_sq * (n_T + 0.5) + 0.5 * b.w_opt +
                 (b.w_sender_bath + b.w_receiver_bath) * (n_T + 0.5);
  GaussianState out;
  out.means = w_tm * input.means;
  out.cov = b.w_tm_sq * input.cov + noise * Mat::Identity(2, 2);
  return out;
}

GaussianState transfer_output_covariance(const DeviceParams& p, double mu_S,
                                         double mu_R, double tau, double n_T) {
  return transfer_output_covariance(p, mu_S, mu_R, tau, n_T, vacuum_state(1));
}

PulseOptimum optimize_pulse_params(const DeviceParams& p, double tau) {
  double G = cooperativity_rate(p);
  long evals = 0;
  auto objective_at = [&](double tau_probe) {
    return [&p, &evals, G, tau_probe](const std::array<double, 2>& mu) {
      ++evals;
      if (mu[0] <= 0.0 || mu[1] <= 0.0) return std::numeric_limits<double>::infinity();
      double w;
      try {
        PairKernels k =
            make_kernels(p, PulseShape::sender(mu[0], G, tau_probe),
                         PulseShape::receiver(mu[1], G, tau_probe), tau_probe);
        w = wtm_amplitude(k);
      } catch (const std::runtime_error&) {
        return std::numeric_limits<double>::infinity();  // unusable probe point
      }
      double v = -w * w;
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      return v;
    };
  };
  Optim2Result best =
      grid_refine_2d(objective_at(tau), {1e-4, 1e-4}, {10.0, 10.0}, 41, 41, 1e-4);
  PulseOptimum out;
  out.mu_S = best.x[0];
  out.mu_R = best.x[1];
  out.w_tm_sq = -best.value;
  Optim2Result doubled =
      grid_refine_2d(objective_at(2.0 * tau), {1e-4, 1e-4}, {10.0, 10.0}, 41, 41, 1e-4);
  out.plateau = std::abs(-doubled.value - out.w_tm_sq) < 1e-6;
  out.evaluations = evals;
  return out;
}

std::vector<TransferSweepRow> transfer_sweep_tau(const DeviceParams& p, double mu_S,
                                                 double mu_R,
                                                 const std::vector<double>& taus) {
  std::vector<TransferSweepRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    TransferWeights w = transfer_weights(p, mu_S, mu_R, tau);
    rows.push_back({tau, w.w_ta_sq(), w.w_d_sq(), w.w_tm_sq()});
  }
  return rows;
}

std::vector<TransferSweepRow> transfer_sweep_gamma(const DeviceParams& p, double mu_S,
                                                   double mu_R, double tau,
                                                   const std::vector<double>& gammas) {
  std::vector<TransferSweepRow> rows;
  rows.reserve(gammas.size());
  for (double gamma : gammas) {
    DeviceParams q = p;
    q.gamma = gamma;
    TransferWeights w = transfer_weights(q, mu_S, mu_R, tau);
    rows.push_back({gamma, w.w_ta_sq(), w.w_d_sq(), w.w_tm_sq()});
  }
  return rows;
}

}  // namespace mechlink
