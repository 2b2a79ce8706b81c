#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

namespace mechlink {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double hbar_si = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann_si = 1.380649e-23;    // J / K

// Bose-Einstein mean occupation 1/(exp(hbar*omega/(kB*T)) - 1).
// T = 0 returns 0 exactly; negative arguments are rejected.
double thermal_occupation(double omega, double temperature);

// Thermal bath description; either the occupation or the temperature is the
// user-supplied quantity, the other is derived (or absent).
struct ThermalEnvironment {
  std::optional<double> temperature;  // kelvin
  double n_T = 0.0;
  enum class Source { Occupation, Temperature } source = Source::Occupation;

  static ThermalEnvironment from_occupation(double n);
  static ThermalEnvironment from_temperature(double omega, double temperature);
};

// Gaussian state over n modes in quadrature ordering (X1, P1, X2, P2, ...)
// with X = (m^dag + m)/sqrt(2); vacuum variance is 1/2.
struct GaussianState {
  Vec means;
  Mat cov;

  int modes() const { return static_cast<int>(means.size()) / 2; }
};

GaussianState vacuum_state(int n_modes);
GaussianState thermal_state(double n_T);  // single mode
GaussianState coherent_state(std::complex<double> alpha);
GaussianState tensor(const GaussianState& a, const GaussianState& b);

// Linear bosonic channel: means' = K means, cov' = K cov K^T + N.
struct GaussianChannel {
  Mat K;
  Mat N;

  int in_modes() const { return static_cast<int>(K.cols()) / 2; }
  int out_modes() const { return static_cast<int>(K.rows()) / 2; }
  void validate() const;  // shape checks, N symmetric PSD
};

GaussianChannel identity_channel(int n_modes);
GaussianChannel tensor(const GaussianChannel& a, const GaussianChannel& b);
// Channel acting as `inner` on the listed modes of an n-mode register and as
// the identity elsewhere. `slots` gives the register index of each inner mode.
GaussianChannel embed_channel(const GaussianChannel& inner, int n_modes,
                              const std::vector<int>& slots);
// second \circ first.
GaussianChannel compose(const GaussianChannel& second,
                        const GaussianChannel& first);
GaussianState apply_channel(const GaussianState& state,
                            const GaussianChannel& channel);

// Block-diagonal [[0,1],[-1,0]] per mode.
Mat symplectic_form(int n_modes);
// Largest |entry| of K Omega K^T - Omega; zero for lossless channels.
double symplectic_defect(const Mat& K);

// Var(X_i + P_j) + Var(P_i + X_j); below 2 certifies entanglement.
double epr_variance(const GaussianState& state, int mode_i, int mode_j);

// pi * Q_out(alpha): overlap of a single-mode Gaussian output with the
// coherent state at alpha. Equals 1 iff the output is exactly that state.
double coherent_fidelity(const GaussianState& out_state,
                         std::complex<double> alpha_target);

}  // namespace mechlink
