#pragma once

#include "mel/types.hpp"

namespace mel {

// Pure wireless/compute/energy physics and the analytic learning-quality
// model. Everything here is deterministic and side-effect free.

// h = d^(-nu) * g^2
double channel_gain(double distance_m, double pathloss_exp, double fading_gain);

// Shannon-style rate W * log2(1 + h P / sigma^2). Zero iff h == 0.
double link_rate(double gain, const ChannelParams& ch);

// Bits of training data shipped for participation fraction n. Zero in FL.
double bits_data(double n, const TaskSpec& task);

// Bits of one model-weight transfer.
double bits_weights(const TaskSpec& task);

struct PhaseTimes {
  double send_s = 0.0;     // orchestrator -> learner (data + weights)
  double upload_s = 0.0;   // learner -> orchestrator (weights)
  double compute_s = 0.0;  // local training
};

// Per-cycle transfer and compute times for one learner.
PhaseTimes phase_times(double n, double tau, const TaskSpec& task,
                       const LearnerProfile& learner, double rate_bps);

struct PhaseEnergies {
  double upload_j = 0.0;
  double recv_j = 0.0;
  double compute_j = 0.0;
};

// Per-cycle energy draws matching phase_times.
PhaseEnergies phase_energies(double n, double tau, const TaskSpec& task,
                             const LearnerProfile& learner,
                             const ChannelParams& ch, double upload_s);

// Learning quality F = -c1 / (G * tau^c2); higher is better.
double learning_quality(double tau, double cycles, const TaskSpec& task);

// Builds the six game coefficients for one (learner, orchestrator) link at
// announced price rho. distance_m selects the link; ch.fading_gain must hold
// that link's frozen fading draw.
Coefficients compute_coefficients(const TaskSpec& task,
                                  const LearnerProfile& learner,
                                  const ChannelParams& ch,
                                  const NormConstants& norms, double rho,
                                  double distance_m);

// Fraction of T_max consumed by G cycles at (n, tau): G*(A2*tau*n + A1*n + A0).
// Feasible iff <= 1.
double normalized_time(double n, double tau, double cycles,
                       const Coefficients& c);

}  // namespace mel
