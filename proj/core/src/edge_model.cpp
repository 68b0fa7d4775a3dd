#include "mel/edge_model.hpp"

#include <cmath>
#include <stdexcept>

namespace mel {

double channel_gain(double distance_m, double pathloss_exp, double fading_gain) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("channel_gain: distance must be positive");
  }
  return std::pow(distance_m, -pathloss_exp) * fading_gain * fading_gain;
}

double link_rate(double gain, const ChannelParams& ch) {
  if (gain < 0.0) {
    throw std::domain_error("link_rate: gain must be non-negative");
  }
  if (gain == 0.0) return 0.0;
  const double snr = gain * ch.tx_power_w / ch.noise_w;
  return ch.bandwidth_hz * std::log2(1.0 + snr);
}

double bits_data(double n, const TaskSpec& task) {
  if (n < 0.0 || n > 1.0) {
    throw std::domain_error("bits_data: participation fraction outside [0, 1]");
  }
  if (task.mode == Mode::FL) return 0.0;
  return n * task.dataset_size * task.feature_len * task.bits_per_feature;
}

double bits_weights(const TaskSpec& task) {
  return task.weight_count * task.bits_per_weight;
}

PhaseTimes phase_times(double n, double tau, const TaskSpec& task,
                       const LearnerProfile& learner, double rate_bps) {
  const double b_data = bits_data(n, task);
  const double b_weights = bits_weights(task);
  PhaseTimes t;
  if (b_data + b_weights > 0.0) {
    if (rate_bps <= 0.0) {
      throw infeasible_link_error("phase_times: zero-rate link with pending bits");
    }
    t.send_s = (b_data + b_weights) / rate_bps;
    t.upload_s = b_weights / rate_bps;
  }
  t.compute_s = tau * n * task.dataset_size * task.complexity / learner.cpu_hz;
  return t;
}

PhaseEnergies phase_energies(double n, double tau, const TaskSpec& task,
                             const LearnerProfile& learner,
                             const ChannelParams& ch, double upload_s) {
  PhaseEnergies e;
  e.upload_j = ch.tx_power_w * upload_s;
  e.recv_j = task.mode == Mode::FL ? 0.0 : learner.recv_energy_j * n;
  e.compute_j = learner.hw_mu * tau * n * task.dataset_size * task.complexity /
                std::pow(learner.cpu_hz, learner.hw_xi);
  return e;
}

double learning_quality(double tau, double cycles, const TaskSpec& task) {
  if (tau < 1.0) {
    throw std::domain_error("learning_quality: tau must be >= 1");
  }
  if (cycles < 1.0) {
    throw std::domain_error("learning_quality: cycles must be >= 1");
  }
  return -task.c1 / (cycles * std::pow(tau, task.c2));
}

Coefficients compute_coefficients(const TaskSpec& task,
                                  const LearnerProfile& learner,
                                  const ChannelParams& ch,
                                  const NormConstants& norms, double rho,
                                  double distance_m) {
  Coefficients c;
  c.gain = channel_gain(distance_m, ch.pathloss_exp, ch.fading_gain);
  c.rate_bps = link_rate(c.gain, ch);
  if (c.rate_bps <= 0.0) {
    throw infeasible_link_error("compute_coefficients: link rate is zero");
  }
  const double t_norm = task.t_max_s * c.rate_bps;
  c.a0 = 2.0 * bits_weights(task) / t_norm;
  c.zeta0 = ch.tx_power_w * c.a0 / norms.e_max;
  if (task.mode == Mode::FL) {
    c.a1 = 0.0;
    c.zeta1 = 0.0;
  } else {
    c.a1 = task.dataset_size * task.feature_len * task.bits_per_feature / t_norm;
    c.zeta1 = learner.recv_energy_j;
  }
  c.a2 = task.dataset_size * task.complexity / (task.t_max_s * learner.cpu_hz);
  c.price_slope = task.complexity / norms.r_max;
  c.energy_price_term = learner.hw_mu * task.complexity /
                        (std::pow(learner.cpu_hz, learner.hw_xi) * norms.e_max);
  c.zeta2 = c.price_slope * rho - c.energy_price_term;
  return c;
}

double normalized_time(double n, double tau, double cycles,
                       const Coefficients& c) {
  return cycles * (c.a2 * tau * n + c.a1 * n + c.a0);
}

}  // namespace mel
