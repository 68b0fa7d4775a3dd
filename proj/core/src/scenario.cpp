#include "mel/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "mel/edge_model.hpp"
#include "mel/rng.hpp"

namespace mel {

namespace {

double mlp_weight_count(const ScenarioConfig& sc, int hidden) {
  return sc.input_width * sc.layer_width +
         (hidden - 1) * sc.layer_width * sc.layer_width +
         sc.layer_width * sc.output_width;
}

// Unit-mean Rayleigh draw.
double rayleigh_unit_mean(double u01) {
  const double sigma = 1.0 / std::sqrt(1.5707963267948966);  // mean 1
  const double t = std::max(1.0 - u01, 1e-300);
  return sigma * std::sqrt(-2.0 * std::log(t));
}

}  // namespace

Scenario generate_scenario(const RunConfig& cfg, std::uint64_t seed) {
  validate_config(cfg);
  const ScenarioConfig& sc = cfg.scenario;
  Scenario out;
  out.seed = seed;
  out.channel.bandwidth_hz = cfg.channel.bandwidth_hz;
  out.channel.noise_w = cfg.channel.noise_w;
  out.channel.tx_power_w = cfg.channel.tx_power_w;
  out.channel.pathloss_exp = cfg.channel.pathloss_exp;
  out.channel.fading_gain = 1.0;

  out.tasks.reserve(sc.orchestrators);
  for (int o = 0; o < sc.orchestrators; ++o) {
    TaskSpec t;
    t.dataset_size = sc.dataset_size;
    t.feature_len = sc.feature_len;
    t.bits_per_feature = sc.bits_per_feature;
    t.bits_per_weight = sc.bits_per_weight;
    t.weight_count = mlp_weight_count(sc, sc.hidden_layers[o]);
    t.complexity = sc.cycles_per_weight * t.weight_count;
    t.c1 = sc.c1;
    t.c2 = sc.c2;
    t.init_price = sc.init_prices[o];
    t.tau_min = sc.tau_min;
    t.tau_max = sc.tau_max;
    t.g_min = sc.g_min;
    t.n_max = sc.n_max;
    t.t_max_s = 1.0;  // runs override
    t.mode = sc.mode;
    out.tasks.push_back(t);
  }

  SplitMix64 rng_dist(mix_seed(seed, 0xd15ull));
  SplitMix64 rng_cpu(mix_seed(seed, 0xc9ull));
  SplitMix64 rng_fade(mix_seed(seed, 0xfadeull));

  out.learners.reserve(sc.learners);
  out.fading.resize(sc.learners);
  for (int l = 0; l < sc.learners; ++l) {
    LearnerProfile p;
    p.hw_mu = cfg.hardware.mu;
    p.hw_xi = cfg.hardware.xi;
    p.recv_energy_j = sc.mode == Mode::FL ? 0.0 : sc.recv_energy_j;
    p.cpu_hz = sc.cpu_freq_choices_hz[rng_cpu.index(sc.cpu_freq_choices_hz.size())];
    p.distances_m.resize(sc.orchestrators);
    out.fading[l].resize(sc.orchestrators);
    for (int o = 0; o < sc.orchestrators; ++o) {
      p.distances_m[o] = rng_dist.uniform(sc.distance_min_m, sc.distance_max_m);
      out.fading[l][o] = cfg.channel.unit_mean_rayleigh_fading
                             ? rayleigh_unit_mean(rng_fade.uniform01())
                             : 1.0;
    }
    out.learners.push_back(std::move(p));
  }

  // Resolve the T_max-independent normalization scales.
  if (cfg.norms.e_max > 0.0) {
    out.e_max = cfg.norms.e_max;
  } else {
    double e = 0.0;
    for (int l = 0; l < sc.learners; ++l) {
      for (int o = 0; o < sc.orchestrators; ++o) {
        const TaskSpec& t = out.tasks[o];
        const ChannelParams ch = out.link_channel(l, o);
        const double h = channel_gain(out.learners[l].distances_m[o],
                                      ch.pathloss_exp, ch.fading_gain);
        const double rate = link_rate(h, ch);
        if (rate <= 0.0) continue;
        const double upload = ch.tx_power_w * bits_weights(t) / rate;
        const double recv = out.learners[l].recv_energy_j * t.n_max;
        const double comp = cfg.hardware.mu * t.tau_max * t.n_max *
                            t.dataset_size * t.complexity /
                            std::pow(out.learners[l].cpu_hz, cfg.hardware.xi);
        e = std::max(e, upload + recv + comp);
      }
    }
    out.e_max = e > 0.0 ? e : 1.0;
  }
  if (cfg.norms.r_max > 0.0) {
    out.r_max = cfg.norms.r_max;
  } else {
    double r = 0.0;
    for (const TaskSpec& t : out.tasks) {
      r = std::max(r, t.complexity * t.init_price * t.tau_max * t.n_max);
    }
    out.r_max = r > 0.0 ? r : 1.0;
  }
  out.p_max_cfg = cfg.norms.p_max;
  out.f_max_cfg = cfg.norms.f_max;
  return out;
}

Scenario with_t_max(Scenario sc, double t_max_s) {
  for (TaskSpec& t : sc.tasks) t.t_max_s = t_max_s;
  return sc;
}

}  // namespace mel
