#include "mechlink/oracle.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace mechlink {

void OracleConfig::validate() const {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("OracleConfig: tau must be positive");
  if (n_steps < 1) throw std::invalid_argument("OracleConfig: need at least one step");
  if (n_T < 0.0) throw std::invalid_argument("OracleConfig: negative occupation");
  double dt = tau / n_steps;
  if (params.kappa * dt >= 0.05)
    throw std::invalid_argument("OracleConfig: kappa*dt must stay below 0.05");
}

int recommended_steps(const DeviceParams& p, double tau, double kappa_dt) {
  if (kappa_dt <= 0.0 || kappa_dt >= 0.05)
    throw std::invalid_argument("recommended_steps: kappa_dt must be in (0, 0.05)");
  int n = static_cast<int>(std::ceil(p.kappa * tau / kappa_dt));
  return std::max(n, 1000);
}

namespace {

constexpr int kSys = 0;   // cavity (2) + mechanics (2)
constexpr int kOpt = 4;   // optical bin
constexpr int kMech = 6;  // mechanical bath bin

// Hamiltonian generator over (x_a, p_a, x_m, p_m, x_ob, p_ob, x_mb, p_mb).
// The bin couplings are beam splitters at rate sqrt(2 kappa / dt) (and the
// mechanical analog), which reproduce damping plus input-output exactly in
// the dt -> 0 limit while staying symplectic at any dt.
Mat bin_generator(double g, Sideband side, double lambda_o, double lambda_m) {
  Mat A = Mat::Zero(8, 8);
  if (side == Sideband::Red) {
    A(0, 3) += g;
    A(1, 2) -= g;
    A(2, 1) += g;
    A(3, 0) -= g;
  } else {
    A(0, 3) -= g;
    A(1, 2) -= g;
    A(2, 1) -= g;
    A(3, 0) -= g;
  }
  A(0, 4) -= lambda_o;
  A(1, 5) -= lambda_o;
  A(4, 0) += lambda_o;
  A(5, 1) += lambda_o;
  A(2, 6) -= lambda_m;
  A(3, 7) -= lambda_m;
  A(6, 2) += lambda_m;
  A(7, 3) += lambda_m;
  return A;
}

double block_quanta(const Mat& cov, int i) {
  return 0.5 * (cov(i, i) + cov(i + 1, i + 1)) - 0.5;
}

Mat omega2() {
  Mat w(2, 2);
  w << 0.0, 1.0, -1.0, 0.0;
  return w;
}

}  // namespace

OracleChannelResult simulate_channel(const OracleConfig& config) {
  config.validate();
  const DeviceParams& p = config.params;
  double G = cooperativity_rate(p);
  double dt = config.tau / config.n_steps;
  double lambda_o = std::sqrt(2.0 * p.kappa / dt);
  double lambda_m = p.gamma > 0.0 ? std::sqrt(2.0 * p.gamma / dt) : 0.0;

  TemporalEnvelope env_in =
      config.envelope_in.has_value()
          ? *config.envelope_in
          : (config.drive.side == Sideband::Red ? TemporalEnvelope::grow_q(G, config.tau)
                                                : TemporalEnvelope::decay_p(G, config.tau));
  TemporalEnvelope env_out =
      config.envelope_out.has_value()
          ? *config.envelope_out
          : (config.drive.side == Sideband::Red ? TemporalEnvelope::decay_p(G, config.tau)
                                                : TemporalEnvelope::grow_q(G, config.tau));
  std::vector<double> w_in = env_in.bin_weights(config.n_steps);
  std::vector<double> w_out = env_out.bin_weights(config.n_steps);

  PulseShape amp = config.drive.amplitude;
  amp.G = G;
  amp.tau = config.tau;
  bool constant_drive = amp.role == PulseRole::Flat;

  // Persistent frame: system (4), filtered-input accumulator (2),
  // filtered-output accumulator (2).
  Mat T = Mat::Zero(8, 4);
  T.topLeftCorner(4, 4).setIdentity();
  Mat Pin = Mat::Zero(8, 2);
  Mat NBo = Mat::Zero(8, 8);
  Mat NBm = Mat::Zero(8, 8);
  Mat OBo = Mat::Zero(8, 8);
  Mat OBm = Mat::Zero(8, 8);
  const Mat w2 = omega2();

  // Parallel propagation of the physical system covariance for the ledger.
  Mat sys_cov = Mat::Zero(4, 4);
  sys_cov.topLeftCorner(2, 2) = 0.5 * Mat::Identity(2, 2);
  sys_cov.bottomRightCorner(2, 2) = (config.n_T + 0.5) * Mat::Identity(2, 2);

  MomentTrajectory traj;
  traj.mech_quanta_initial = block_quanta(sys_cov, 2);
  Mat sigma0 = sys_cov;  // initial frame covariance factors through T
  int stride = config.trajectory_samples > 0
                   ? std::max(1, config.n_steps / config.trajectory_samples)
                   : 0;
  auto record = [&](int step) {
    traj.times.push_back(step * dt);
    Mat fc = T * sigma0 * T.transpose() + NBo + NBm;
    traj.frame_cov.push_back(0.5 * (fc + fc.transpose()));
  };
  record(0);

  Mat U;
  bool have_u = false;
  for (int k = 0; k < config.n_steps; ++k) {
    if (!have_u || !constant_drive) {
      double t_mid = (k + 0.5) * dt;
      double g = p.coupling() * pulse_value(amp, std::min(t_mid, config.tau));
      U = (bin_generator(g, config.drive.side, lambda_o, lambda_m) * dt).exp();
      have_u = constant_drive;
    }
    Mat U_ss = U.block(kSys, kSys, 4, 4);
    Mat U_so = U.block(kSys, kOpt, 4, 2);
    Mat U_sm = U.block(kSys, kMech, 4, 2);
    Mat U_os = U.block(kOpt, kSys, 2, 4);
    Mat U_oo = U.block(kOpt, kOpt, 2, 2);
    Mat U_om = U.block(kOpt, kMech, 2, 2);

    Mat M_PP = Mat::Zero(8, 8);
    M_PP.topLeftCorner(4, 4) = U_ss;
    M_PP.block(4, 4, 2, 2).setIdentity();
    M_PP.block(6, 6, 2, 2).setIdentity();
    M_PP.block(6, 0, 2, 4) = w_out[k] * U_os;

    Mat C_o = Mat::Zero(8, 2);
    C_o.topRows(4) = U_so;
    C_o.block(4, 0, 2, 2) = w_in[k] * Mat::Identity(2, 2);
    C_o.bottomRows(2) = w_out[k] * U_oo;
    Mat C_m = Mat::Zero(8, 2);
    C_m.topRows(4) = U_sm;
    C_m.bottomRows(2) = w_out[k] * U_om;

    T = M_PP * T;
    Pin = M_PP * Pin + C_o * w_in[k];
    NBo = M_PP * NBo * M_PP.transpose() + 0.5 * C_o * C_o.transpose();
    NBm = M_PP * NBm * M_PP.transpose() + (config.n_T + 0.5) * C_m * C_m.transpose();
    OBo = M_PP * OBo * M_PP.transpose() + C_o * w2 * C_o.transpose();
    OBm = M_PP * OBm * M_PP.transpose() + C_m * w2 * C_m.transpose();

    Mat out_cov = U_os * sys_cov * U_os.transpose() + 0.5 * U_oo * U_oo.transpose() +
                  (config.n_T + 0.5) * U_om * U_om.transpose();
    traj.emitted_quanta += block_quanta(out_cov, 0);
    sys_cov = U_ss * sys_cov * U_ss.transpose() + 0.5 * U_so * U_so.transpose() +
              (config.n_T + 0.5) * U_sm * U_sm.transpose();

    if (stride > 0 && (k + 1) % stride == 0 && k + 1 < config.n_steps) record(k + 1);
  }
  record(config.n_steps);

  traj.cavity_quanta_final = block_quanta(sys_cov, 0);
  traj.mech_quanta_final = block_quanta(sys_cov, 2);

  OracleChannelResult res;
  std::array<int, 4> rows = {6, 7, 2, 3};  // filtered output, then mechanics
  res.channel.K = Mat::Zero(4, 4);
  res.channel.N = Mat::Zero(4, 4);
  Mat Tc = T.leftCols(2);  // coefficients on the initial cavity state
  Mat noise_full = NBo - 0.5 * Pin * Pin.transpose() + NBm + 0.5 * Tc * Tc.transpose();
  Mat omega_corr_full = OBo - Pin * w2 * Pin.transpose() + OBm + Tc * w2 * Tc.transpose();
  for (int i = 0; i < 4; ++i) {
    res.channel.K(i, 0) = Pin(rows[i], 0);
    res.channel.K(i, 1) = Pin(rows[i], 1);
    res.channel.K(i, 2) = T(rows[i], 2);
    res.channel.K(i, 3) = T(rows[i], 3);
    for (int j = 0; j < 4; ++j) res.channel.N(i, j) = noise_full(rows[i], rows[j]);
  }
  res.channel.N = 0.5 * (res.channel.N + res.channel.N.transpose()).eval();

  Mat omega = symplectic_form(2);
  Mat omega_corr = Mat::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) omega_corr(i, j) = omega_corr_full(rows[i], rows[j]);
  Mat comm = res.channel.K * omega * res.channel.K.transpose();
  res.commutator_defect = (comm + omega_corr - omega).cwiseAbs().maxCoeff();
  res.mode_truncation_weight = (comm - omega).cwiseAbs().maxCoeff();

  // Filtered-mode occupation for the ledger: channel applied to the real input.
  GaussianState in_state = tensor(vacuum_state(1), thermal_state(config.n_T));
  Mat out4 = res.channel.K * in_state.cov * res.channel.K.transpose() + res.channel.N;
  traj.filtered_quanta = block_quanta(out4, 0);

  res.trajectory = std::move(traj);
  return res;
}

std::vector<AdiabaticResidual> verify_adiabatic(const DeviceParams& p, Sideband side,
                                                const std::vector<double>& taus,
                                                double n_T, double kappa_dt) {
  std::vector<AdiabaticResidual> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    OracleConfig cfg;
    cfg.params = p;
    cfg.drive = {side, PulseShape::flat(0.0, 0.0)};
    cfg.tau = tau;
    cfg.n_steps = recommended_steps(p, tau, kappa_dt);
    cfg.n_T = n_T;
    OracleChannelResult sim = simulate_channel(cfg);
    SidebandChannel closed = side == Sideband::Red ? red_channel(p, tau, n_T)
                                                   : blue_channel(p, tau, n_T);
    AdiabaticResidual r;
    r.tau = tau;
    r.k_residual = (sim.channel.K - closed.channel.K).cwiseAbs().maxCoeff();
    r.n_residual = (sim.channel.N - closed.channel.N).cwiseAbs().maxCoeff();
    r.commutator_defect = sim.commutator_defect;
    out.push_back(r);
  }
  return out;
}

TransferOracleResult simulate_transfer(const OracleConfig& sender,
                                       const OracleConfig& receiver,
                                       const GaussianState& input) {
  sender.validate();
  receiver.validate();
  if (sender.n_steps != receiver.n_steps || sender.tau != receiver.tau)
    throw std::invalid_argument("simulate_transfer: sender and receiver grids must match");
  if (input.modes() != 1)
    throw std::invalid_argument("simulate_transfer: single-mode input expected");
  if (sender.drive.side != Sideband::Red || receiver.drive.side != Sideband::Red)
    throw std::invalid_argument("simulate_transfer: both drives must sit on the red sideband");

  int n = sender.n_steps;
  double tau = sender.tau;
  double dt = tau / n;

  const DeviceParams& ps = sender.params;
  const DeviceParams& pr = receiver.params;
  double lo_s = std::sqrt(2.0 * ps.kappa / dt);
  double lo_r = std::sqrt(2.0 * pr.kappa / dt);
  double lm_s = ps.gamma > 0.0 ? std::sqrt(2.0 * ps.gamma / dt) : 0.0;
  double lm_r = pr.gamma > 0.0 ? std::sqrt(2.0 * pr.gamma / dt) : 0.0;

  PulseShape amp_s = sender.drive.amplitude;
  amp_s.G = cooperativity_rate(ps);
  amp_s.tau = tau;
  PulseShape amp_r = receiver.drive.amplitude;
  amp_r.G = cooperativity_rate(pr);
  amp_r.tau = tau;

  // Frame: a1 (0:2), m1 (2:4), a2 (4:6), m2 (6:8), shared optical bin (8:10),
  // sender bath bin (10:12), receiver bath bin (12:14).
  const std::array<int, 8> idx_s = {0, 1, 2, 3, 8, 9, 10, 11};
  const std::array<int, 8> idx_r = {4, 5, 6, 7, 8, 9, 12, 13};
  auto embed = [](const Mat& u8, const std::array<int, 8>& idx) {
    Mat m = Mat::Identity(14, 14);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) m(idx[i], idx[j]) = u8(i, j);
    return m;
  };

  Mat T = Mat::Zero(14, 8);  // columns: initial (a1, m1, a2, m2)
  T.topLeftCorner(8, 8).setIdentity();
  Mat sys_cov = Mat::Zero(8, 8);
  sys_cov.block(0, 0, 2, 2) = 0.5 * Mat::Identity(2, 2);
  sys_cov.block(2, 2, 2, 2) = input.cov;
  sys_cov.block(4, 4, 2, 2) = 0.5 * Mat::Identity(2, 2);
  sys_cov.block(6, 6, 2, 2) = (receiver.n_T + 0.5) * Mat::Identity(2, 2);

  double wta_sq = 0.0;
  double emitted = 0.0;
  for (int k = 0; k < n; ++k) {
    double t_mid = (k + 0.5) * dt;
    double g_s = ps.coupling() * pulse_value(amp_s, std::min(t_mid, tau));
    double g_r = pr.coupling() * pulse_value(amp_r, std::min(t_mid, tau));
    Mat U_s = (bin_generator(g_s, Sideband::Red, lo_s, lm_s) * dt).exp();
    Mat U_r = (bin_generator(g_r, Sideband::Red, lo_r, lm_r) * dt).exp();
    Mat E_s = embed(U_s, idx_s);
    Mat E_r = embed(U_r, idx_r);

    T.bottomRows(6).setZero();  // fresh bins carry no initial-state weight
    Mat T_mid = E_s * T;
    // Emitted-field weight of the initial sender mechanics, accumulated
    // before the receiver absorbs the bin.
    wta_sq += T_mid(8, 2) * T_mid(8, 2) + T_mid(8, 3) * T_mid(8, 3);
    T = E_r * T_mid;

    Mat M = E_r * E_s;
    Mat full = Mat::Zero(14, 14);
    full.topLeftCorner(8, 8) = sys_cov;
    full.block(8, 8, 2, 2) = 0.5 * Mat::Identity(2, 2);
    full.block(10, 10, 2, 2) = (sender.n_T + 0.5) * Mat::Identity(2, 2);
    full.block(12, 12, 2, 2) = (receiver.n_T + 0.5) * Mat::Identity(2, 2);
    full = (M * full * M.transpose()).eval();
    sys_cov = full.topLeftCorner(8, 8);
    emitted += block_quanta(full, 8);
  }

  TransferOracleResult res;
  res.weights.w_tm = std::sqrt(T(6, 2) * T(6, 2) + T(6, 3) * T(6, 3));
  if (T(6, 2) < 0.0) res.weights.w_tm = -res.weights.w_tm;
  double survive_sq = T(2, 2) * T(2, 2) + T(2, 3) * T(2, 3);
  res.weights.w_d = std::sqrt(std::max(0.0, 1.0 - survive_sq));
  res.weights.w_ta = std::sqrt(wta_sq);
  res.receiver_state.means = T.block(6, 2, 2, 2) * input.means;
  res.receiver_state.cov = sys_cov.block(6, 6, 2, 2);
  res.cavity_quanta_final = block_quanta(sys_cov, 0) + block_quanta(sys_cov, 4);
  return res;
}

}  // namespace mechlink
