#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mel {

// Whether the task ships training data to the learners (parallelized
// learning) or the learners train on their own local data (federated
// learning). FL zeroes out every data-shipping term.
enum class Mode { PL, FL };

struct ChannelParams {
  double bandwidth_hz = 1.0e6;   // W
  double noise_w = 1.0e-10;      // sigma^2
  double pathloss_exp = 4.0;     // nu
  double fading_gain = 1.0;      // g, frozen per link
  double tx_power_w = 0.1;       // P
};

// One orchestrator's learning task as broadcast in the first round.
struct TaskSpec {
  double dataset_size = 0.0;      // N, samples
  double feature_len = 0.0;       // X, features per sample
  double bits_per_feature = 0.0;  // Gamma_d
  double bits_per_weight = 0.0;   // Gamma_w
  double weight_count = 0.0;      // S_w
  double complexity = 0.0;        // C, CPU cycles per sample
  double c1 = 1.0;                // learning-curve scale
  double c2 = 1.0;                // learning-curve iteration exponent
  double init_price = 0.0;        // rho_i, currency per CPU cycle
  double tau_min = 1.0;
  double tau_max = 1.0;
  long long g_min = 1;            // minimum global cycles
  double n_max = 1.0;             // max participation fraction, in (0, 1]
  double t_max_s = 1.0;           // learning time frame
  Mode mode = Mode::PL;
};

struct LearnerProfile {
  double cpu_hz = 0.0;            // f
  double hw_mu = 1.0e-27;         // mu
  double hw_xi = 2.0;             // xi
  double recv_energy_j = 0.0;     // E_S, joules per unit participation fraction
  std::vector<double> distances_m;  // one entry per orchestrator
};

// Normalization constants for the dimensionless game utilities.
struct NormConstants {
  double e_max = 1.0;  // energy scale, J
  double r_max = 1.0;  // learner revenue scale, currency
  double p_max = 1.0;  // orchestrator payment scale, currency
  double f_max = 1.0;  // loss scale
};

// The six per-(learner, orchestrator) game coefficients plus the building
// blocks needed to re-price them. zeta2 depends on the service price rho:
// zeta2(rho) = price_slope * rho - energy_price_term.
struct Coefficients {
  double a0 = 0.0;     // weight-exchange time fraction per cycle
  double a1 = 0.0;     // data-shipping time fraction per cycle (0 in FL)
  double a2 = 0.0;     // compute time fraction per cycle
  double zeta0 = 0.0;  // fixed upload-energy cost per cycle, normalized
  double zeta1 = 0.0;  // reception-energy cost per unit participation (0 in FL)
  double zeta2 = 0.0;  // net price-minus-compute-energy coefficient
  double price_slope = 0.0;        // C / R_max
  double energy_price_term = 0.0;  // mu * C / (f^xi * E_max)
  double rate_bps = 0.0;           // cached link rate
  double gain = 0.0;               // cached channel gain

  // Same link and task, different announced price.
  Coefficients with_price(double rho) const {
    Coefficients c = *this;
    c.zeta2 = price_slope * rho - energy_price_term;
    return c;
  }
};

// Raised when a link cannot carry the bits the strategy requires.
class infeasible_link_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mel
