#include "mechlink/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace mechlink {

double thermal_occupation(double omega, double temperature) {
  if (omega <= 0.0) throw std::invalid_argument("thermal_occupation: omega must be positive");
  if (temperature < 0.0) throw std::invalid_argument("thermal_occupation: negative temperature");
  if (temperature == 0.0) return 0.0;
  double x = hbar_si * omega / (k_boltzmann_si * temperature);
  return 1.0 / std::expm1(x);
}

ThermalEnvironment ThermalEnvironment::from_occupation(double n) {
  if (n < 0.0) throw std::invalid_argument("ThermalEnvironment: negative occupation");
  ThermalEnvironment env;
  env.n_T = n;
  env.source = Source::Occupation;
  return env;
}

ThermalEnvironment ThermalEnvironment::from_temperature(double omega, double temperature) {
  ThermalEnvironment env;
  env.temperature = temperature;
  env.n_T = thermal_occupation(omega, temperature);
  env.source = Source::Temperature;
  return env;
}

GaussianState vacuum_state(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("vacuum_state: need at least one mode");
  GaussianState s;
  s.means = Vec::Zero(2 * n_modes);
  s.cov = 0.5 * Mat::Identity(2 * n_modes, 2 * n_modes);
  return s;
}

GaussianState thermal_state(double n_T) {
  if (n_T < 0.0) throw std::invalid_argument("thermal_state: negative occupation");
  GaussianState s = vacuum_state(1);
  s.cov = (n_T + 0.5) * Mat::Identity(2, 2);
  return s;
}

GaussianState coherent_state(std::complex<double> alpha) {
  GaussianState s = vacuum_state(1);
  s.means(0) = std::sqrt(2.0) * alpha.real();
  s.means(1) = std::sqrt(2.0) * alpha.imag();
  return s;
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  GaussianState s;
  auto na = a.means.size();
  auto nb = b.means.size();
  s.means = Vec::Zero(na + nb);
  s.means.head(na) = a.means;
  s.means.tail(nb) = b.means;
  s.cov = Mat::Zero(na + nb, na + nb);
  s.cov.topLeftCorner(na, na) = a.cov;
  s.cov.bottomRightCorner(nb, nb) = b.cov;
  return s;
}

void GaussianChannel::validate() const {
  if (N.rows() != K.rows() || N.cols() != K.rows())
    throw std::invalid_argument("GaussianChannel: N must be square with K's row count");
  if (K.rows() % 2 != 0 || K.cols() % 2 != 0)
    throw std::invalid_argument("GaussianChannel: dimensions must be even");
  if ((N - N.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("GaussianChannel: N not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (N + N.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("GaussianChannel: N not positive semidefinite");
}

GaussianChannel identity_channel(int n_modes) {
  GaussianChannel c;
  c.K = Mat::Identity(2 * n_modes, 2 * n_modes);
  c.N = Mat::Zero(2 * n_modes, 2 * n_modes);
  return c;
}

GaussianChannel tensor(const GaussianChannel& a, const GaussianChannel& b) {
  GaussianChannel c;
  auto ra = a.K.rows(), ca = a.K.cols();
  auto rb = b.K.rows(), cb = b.K.cols();
  c.K = Mat::Zero(ra + rb, ca + cb);
  c.K.topLeftCorner(ra, ca) = a.K;
  c.K.bottomRightCorner(rb, cb) = b.K;
  c.N = Mat::Zero(ra + rb, ra + rb);
  c.N.topLeftCorner(ra, ra) = a.N;
  c.N.bottomRightCorner(rb, rb) = b.N;
  return c;
}

GaussianChannel embed_channel(const GaussianChannel& inner, int n_modes,
                              const std::vector<int>& slots) {
  if (inner.K.rows() != inner.K.cols())
    throw std::invalid_argument("embed_channel: inner channel must preserve mode count");
  if (2 * static_cast<int>(slots.size()) != inner.K.cols())
    throw std::invalid_argument("embed_channel: slot count does not match inner channel");
  // P picks the inner modes out of the register: inner = P * register.
  Mat P = Mat::Zero(inner.K.cols(), 2 * n_modes);
  for (size_t i = 0; i < slots.size(); ++i) {
    int m = slots[i];
    if (m < 0 || m >= n_modes) throw std::invalid_argument("embed_channel: slot out of range");
    P(2 * i, 2 * m) = 1.0;
    P(2 * i + 1, 2 * m + 1) = 1.0;
  }
  GaussianChannel c;
  c.K = Mat::Identity(2 * n_modes, 2 * n_modes) + P.transpose() * (inner.K - Mat::Identity(inner.K.rows(), inner.K.cols())) * P;
  c.N = P.transpose() * inner.N * P;
  return c;
}

GaussianChannel compose(const GaussianChannel& second, const GaussianChannel& first) {
  if (second.K.cols() != first.K.rows())
    throw std::invalid_argument("compose: dimension mismatch");
  GaussianChannel c;
  c.K = second.K * first.K;
  c.N = second.K * first.N * second.K.transpose() + second.N;
  c.N = 0.5 * (c.N + c.N.transpose()).eval();
  return c;
}

GaussianState apply_channel(const GaussianState& state, const GaussianChannel& channel) {
  channel.validate();
  if (channel.K.cols() != state.means.size())
    throw std::invalid_argument("apply_channel: dimension mismatch");
  GaussianState out;
  out.means = channel.K * state.means;
  out.cov = channel.K * state.cov * channel.K.transpose() + channel.N;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

Mat symplectic_form(int n_modes) {
  Mat omega = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

double symplectic_defect(const Mat& K) {
  if (K.rows() % 2 != 0 || K.cols() % 2 != 0)
    throw std::invalid_argument("symplectic_defect: dimensions must be even");
  Mat omega_in = symplectic_form(static_cast<int>(K.cols()) / 2);
  Mat omega_out = symplectic_form(static_cast<int>(K.rows()) / 2);
  return (K * omega_in * K.transpose() - omega_out).cwiseAbs().maxCoeff();
}

double epr_variance(const GaussianState& state, int mode_i, int mode_j) {
  int n = state.modes();
  if (mode_i < 0 || mode_j < 0 || mode_i >= n || mode_j >= n || mode_i == mode_j)
    throw std::invalid_argument("epr_variance: bad mode indices");
  int xi = 2 * mode_i, pi = 2 * mode_i + 1;
  int xj = 2 * mode_j, pj = 2 * mode_j + 1;
  const Mat& c = state.cov;
  double v1 = c(xi, xi) + c(pj, pj) + 2.0 * c(xi, pj);
  double v2 = c(pi, pi) + c(xj, xj) + 2.0 * c(pi, xj);
  return v1 + v2;
}

double coherent_fidelity(const GaussianState& out_state, std::complex<double> alpha_target) {
  if (out_state.modes() != 1)
    throw std::invalid_argument("coherent_fidelity: expects a single-mode state");
  Mat sigma_q = out_state.cov + 0.5 * Mat::Identity(2, 2);
  double det = sigma_q(0, 0) * sigma_q(1, 1) - sigma_q(0, 1) * sigma_q(1, 0);
  if (det <= 0.0 || sigma_q(0, 0) <= 0.0)
    throw std::invalid_argument("coherent_fidelity: Q-function covariance not positive");
  Eigen::Vector2d delta;
  delta(0) = out_state.means(0) - std::sqrt(2.0) * alpha_target.real();
  delta(1) = out_state.means(1) - std::sqrt(2.0) * alpha_target.imag();
  double quad = delta(0) * (sigma_q(1, 1) * delta(0) - sigma_q(0, 1) * delta(1)) +
                delta(1) * (sigma_q(0, 0) * delta(1) - sigma_q(1, 0) * delta(0));
  return std::exp(-0.5 * quad / det) / std::sqrt(det);
}

}  // namespace mechlink
