#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mel/association.hpp"
#include "mel/config.hpp"
#include "mel/scenario.hpp"
#include "mel/stackelberg.hpp"

namespace mel {

struct LearnerOutcome {
  std::size_t orch = 0;
  double tau = 0.0;
  double rho = 0.0;
  double n = 0.0;
  bool participates = false;
  bool infeasible = false;  // weight exchange alone overruns the frame
  double utility = 0.0;     // normalized
  double revenue = 0.0;     // currency, G C rho tau n
  double energy_j = 0.0;
  double loss_term = 0.0;   // c1 / (G tau^c2)
};

struct OrchestratorOutcome {
  long long cycles = 1;
  std::vector<std::size_t> members;
  std::size_t weakest = 0;  // index into members
  bool solver_warning = false;
  bool idle = false;        // attracted no learners
  double loss_term = 0.0;   // mean over members, or the idle-bound
  double payment = 0.0;
};

struct StrategyProfile {
  AssociationMap assoc;
  std::vector<LearnerOutcome> learners;
  std::vector<OrchestratorOutcome> orchestrators;
};

struct MetricsRecord {
  double t_max = 0.0;
  Policy policy = Policy::FbaOpt;
  std::uint64_t seed = 0;
  // Averages over participating learners; 0 when nobody participates.
  double avg_learner_utility = 0.0;
  double avg_revenue = 0.0;
  double avg_energy_j = 0.0;
  double total_payment = 0.0;
  // Mean of c1/(G tau^c2) over all associated learners.
  double avg_learning_loss = 0.0;
  std::vector<long long> cycles_per_orch;
  std::vector<int> participants_per_orch;
  int infeasible_learners = 0;
};

struct GameResult {
  StrategyProfile profile;
  MetricsRecord metrics;
  // Deviation-check contexts for the non-idle orchestrators.
  std::vector<GroupContext> nash_context;
};

// Executes one two-round game: association, weakest-learner cycle count,
// price bounds, the policy's strategy rule, learner best responses, metrics.
GameResult run_game(const Scenario& sc, Policy policy, double t_max,
                    const SolverOptions& solver, const BaselineConfig& base);

// Seed-averaged aggregate of one (policy, t_max) cell.
struct AggregateRecord {
  double t_max = 0.0;
  Policy policy = Policy::FbaOpt;
  double avg_learner_utility = 0.0;
  double avg_revenue = 0.0;
  double avg_energy_j = 0.0;
  double total_payment = 0.0;
  double avg_learning_loss = 0.0;
  int runs = 0;
};

struct SweepResult {
  std::vector<MetricsRecord> raw;         // t_max-major, then seed, then policy
  std::vector<AggregateRecord> aggregate; // t_max-major, then policy
};

// Cross product of (t_max, seed, policy); scenarios are drawn once per seed.
SweepResult sweep(const RunConfig& cfg);

}  // namespace mel
