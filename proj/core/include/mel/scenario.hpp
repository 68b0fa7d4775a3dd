#pragma once

#include <cstdint>
#include <vector>

#include "mel/config.hpp"
#include "mel/types.hpp"

namespace mel {

// One fully drawn game world: tasks, learners, frozen channel draws, and the
// resolved normalization scales. T_max is applied per run on top of this.
struct Scenario {
  std::vector<TaskSpec> tasks;
  std::vector<LearnerProfile> learners;
  ChannelParams channel;                    // base parameters, fading unset
  std::vector<std::vector<double>> fading;  // [learner][orchestrator]
  double e_max = 1.0;
  double r_max = 1.0;
  double p_max_cfg = 0.0;  // 0 = derive per run
  double f_max_cfg = 0.0;  // 0 = derive per run
  std::uint64_t seed = 0;

  ChannelParams link_channel(std::size_t learner, std::size_t orch) const {
    ChannelParams ch = channel;
    ch.fading_gain = fading[learner][orch];
    return ch;
  }

  NormConstants scenario_norms() const {
    return NormConstants{e_max, r_max, 1.0, 1.0};
  }
};

// Draws a scenario from the config: distances uniform in the configured
// range, CPU frequencies uniform over the configured choices, per-link
// fading frozen after one draw. Deterministic in (config, seed).
Scenario generate_scenario(const RunConfig& cfg, std::uint64_t seed);

// Copy with every task's time frame set; runs sweep T_max this way.
Scenario with_t_max(Scenario sc, double t_max_s);

}  // namespace mel
