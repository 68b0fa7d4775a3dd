#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mel/stackelberg.hpp"
#include "mel/types.hpp"

namespace mel {

enum class Policy { FbaOpt, DbaEe, Random };

std::string to_string(Policy p);
Policy parse_policy(const std::string& name);

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  int orchestrators = 3;
  int learners = 50;
  double distance_min_m = 5.0;
  double distance_max_m = 50.0;
  std::vector<double> cpu_freq_choices_hz = {2.4e9, 1.4e9, 1.0e9};
  double dataset_size = 20000.0;
  double feature_len = 784.0;
  double bits_per_feature = 8.0;
  double bits_per_weight = 32.0;
  // Model sizing: input -> width^depth -> output perceptrons, one depth per
  // orchestrator; deeper means more weights and more cycles per sample.
  std::vector<int> hidden_layers = {3, 4, 5};
  double layer_width = 128.0;
  double input_width = 784.0;
  double output_width = 10.0;
  double cycles_per_weight = 6.0;
  std::vector<double> init_prices = {2.0e-6, 2.6e-6, 2.3e-6};
  double c1 = 1.0;
  double c2 = 1.0;
  double tau_min = 1.0;
  double tau_max = 10.0;
  long long g_min = 1;
  double n_max = 0.1;
  double recv_energy_j = 0.5;
  Mode mode = Mode::PL;

  bool operator==(const ScenarioConfig&) const = default;
};

struct ChannelConfig {
  double bandwidth_hz = 1.0e6;
  double noise_w = 1.0e-10;
  double tx_power_w = 0.1;
  double pathloss_exp = 4.0;
  bool unit_mean_rayleigh_fading = true;

  bool operator==(const ChannelConfig&) const = default;
};

struct HardwareConfig {
  double mu = 1.0e-27;
  double xi = 2.0;

  bool operator==(const HardwareConfig&) const = default;
};

// 0 = derive automatically from the scenario (e_max, r_max) or the run
// (p_max, f_max).
struct NormsConfig {
  double e_max = 0.0;
  double r_max = 0.0;
  double p_max = 0.0;
  double f_max = 0.0;

  bool operator==(const NormsConfig&) const = default;
};

struct BaselineConfig {
  // DBA-EE prices at (1 + margin) times the tau_min participation threshold,
  // which keeps its payments independent of the time frame.
  double dba_price_margin = 1.0;

  bool operator==(const BaselineConfig&) const = default;
};

struct SweepConfig {
  std::vector<double> t_max_list = {15.0, 30.0, 60.0, 120.0, 240.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<Policy> policies = {Policy::FbaOpt, Policy::DbaEe, Policy::Random};

  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ScenarioConfig scenario;
  ChannelConfig channel;
  HardwareConfig hardware;
  NormsConfig norms;
  SolverOptions solver;
  BaselineConfig baselines;
  SweepConfig sweep;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

// Parses and validates a JSON config; an empty document yields the defaults.
// Unknown keys and out-of-range values raise config_error naming the key path.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Canonical JSON rendering; parse(dump(c)) == c.
std::string dump_config(const RunConfig& c);

void validate_config(const RunConfig& c);

// FNV-1a over the canonical rendering; changes iff the config changes.
std::uint64_t config_hash(const RunConfig& c);

}  // namespace mel
