#include "mechlink/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mechlink/quadrature.hpp"

namespace mechlink {

namespace {

// 2G / (1 - e^{-2 G tau}), the squared amplitude shared by both exponential
// envelope branches; tends to 1/tau as G -> 0.
double amplitude_sq(double G, double tau) {
  if (G == 0.0) return 1.0 / tau;
  return 2.0 * G / (-std::expm1(-2.0 * G * tau));
}

}  // namespace

TemporalEnvelope::TemporalEnvelope(EnvelopeKind kind, double G, double tau,
                                   std::vector<double> samples)
    : kind_(kind), rate_(G), tau_(tau), samples_(std::move(samples)) {}

TemporalEnvelope TemporalEnvelope::decay_p(double G, double tau) {
  if (G < 0.0 || tau <= 0.0) throw std::invalid_argument("decay_p: need G >= 0, tau > 0");
  return TemporalEnvelope(EnvelopeKind::DecayP, G, tau, {});
}

TemporalEnvelope TemporalEnvelope::grow_q(double G, double tau) {
  if (G < 0.0 || tau <= 0.0) throw std::invalid_argument("grow_q: need G >= 0, tau > 0");
  return TemporalEnvelope(EnvelopeKind::GrowQ, G, tau, {});
}

TemporalEnvelope TemporalEnvelope::custom(std::vector<double> samples, double tau) {
  if (tau <= 0.0 || samples.size() < 2)
    throw std::invalid_argument("custom envelope: need tau > 0 and at least two samples");
  TemporalEnvelope env(EnvelopeKind::Custom, 0.0, tau, std::move(samples));
  double peak = 0.0;
  for (double s : env.samples_) peak = std::max(peak, std::abs(s));
  double norm_sq = integrate(
      [&env](double t) { double f = env.value(t); return f * f; }, 0.0, tau,
      1e-12 * (1.0 + peak * peak * tau));
  if (norm_sq <= 0.0) throw std::invalid_argument("custom envelope: zero norm");
  double scale = 1.0 / std::sqrt(norm_sq);
  for (double& s : env.samples_) s *= scale;
  return env;
}

double TemporalEnvelope::value(double t) const {
  if (t < 0.0 || t > tau_) return 0.0;
  switch (kind_) {
    case EnvelopeKind::DecayP:
      return std::sqrt(amplitude_sq(rate_, tau_)) * std::exp(-rate_ * t);
    case EnvelopeKind::GrowQ:
      return std::sqrt(amplitude_sq(rate_, tau_)) * std::exp(rate_ * (t - tau_));
    case EnvelopeKind::Custom: {
      double x = t / tau_ * (samples_.size() - 1);
      auto k = static_cast<size_t>(x);
      if (k >= samples_.size() - 1) return samples_.back();
      double w = x - k;
      return (1.0 - w) * samples_[k] + w * samples_[k + 1];
    }
  }
  return 0.0;
}

double TemporalEnvelope::norm_residual() const {
  double norm_sq = integrate(
      [this](double t) { double f = value(t); return f * f; }, 0.0, tau_, 1e-13);
  return std::abs(norm_sq - 1.0);
}

std::vector<double> TemporalEnvelope::bin_weights(int n_bins) const {
  if (n_bins < 1) throw std::invalid_argument("bin_weights: need n_bins >= 1");
  double dt = tau_ / n_bins;
  std::vector<double> w(n_bins);
  double sum_sq = 0.0;
  for (int k = 0; k < n_bins; ++k) {
    w[k] = value((k + 0.5) * dt) * std::sqrt(dt);
    sum_sq += w[k] * w[k];
  }
  double scale = 1.0 / std::sqrt(sum_sq);
  for (double& x : w) x *= scale;
  return w;
}

}  // namespace mechlink
