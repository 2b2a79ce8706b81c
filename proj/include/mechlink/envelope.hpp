#pragma once

#include <vector>

namespace mechlink {

enum class EnvelopeKind { DecayP, GrowQ, Custom };

// Normalized temporal mode weight f(t) on [0, tau] with integral f^2 = 1.
// DecayP ~ e^{-G t}, GrowQ ~ e^{+G t}; both degrade gracefully to the flat
// window 1/sqrt(tau) as G -> 0. Evaluation never overflows: the growing
// branch is computed relative to t = tau.
class TemporalEnvelope {
 public:
  static TemporalEnvelope decay_p(double G, double tau);
  static TemporalEnvelope grow_q(double G, double tau);
  // Tabulated weight on a uniform grid over [0, tau]; renormalized on input.
  static TemporalEnvelope custom(std::vector<double> samples, double tau);

  double value(double t) const;
  double duration() const { return tau_; }
  double rate() const { return rate_; }
  EnvelopeKind kind() const { return kind_; }

  // |integral of f^2 - 1|, evaluated by quadrature.
  double norm_residual() const;

  // f at bin midpoints times sqrt(dt), rescaled to unit sum of squares, for
  // time-binned simulations.
  std::vector<double> bin_weights(int n_bins) const;

 private:
  TemporalEnvelope(EnvelopeKind kind, double G, double tau,
                   std::vector<double> samples);

  EnvelopeKind kind_;
  double rate_;
  double tau_;
  std::vector<double> samples_;  // Custom only
};

}  // namespace mechlink
