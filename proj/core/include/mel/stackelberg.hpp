#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mel/types.hpp"

namespace mel {

// ---------------------------------------------------------------------------
// Follower (learner) side
// ---------------------------------------------------------------------------

// zeta2 * tau - zeta1: the learner's net gain per unit participation and
// cycle. Participation is only rational when this is positive.
double net_coefficient(const Coefficients& c, double tau);

struct BestResponse {
  double n = 0.0;
  bool participates = false;
  // G*A0 >= 1: weight exchange alone exhausts the time frame.
  bool time_infeasible = false;
};

// The learner's optimal participation fraction given the leader strategy
// (tau, rho baked into c, cycles) and the cap n_max. Maximizes the
// participation objective subject to the time-frame constraint; declines
// whenever no participation level has non-negative utility.
BestResponse learner_best_response(const Coefficients& c, double tau,
                                   double cycles, double n_max);

// G * (n * (zeta2 tau - zeta1) - zeta0) for n > 0; 0 for n == 0.
double learner_utility(const Coefficients& c, double tau, double cycles,
                       double n);

// Minimum profitable participation, zeta0 / net. Only meaningful when the
// net coefficient is positive.
double min_participation(const Coefficients& c, double tau);

// ---------------------------------------------------------------------------
// Leader (orchestrator) side
// ---------------------------------------------------------------------------

// Index of the learner throttling the group: argmin of normalized CPU
// frequency over normalized distance (min-max over the group, ties to the
// lowest index).
std::size_t weakest_learner(std::span<const double> cpu_hz,
                            std::span<const double> distance_m);

// Global cycle count from the weakest learner's per-cycle time fraction,
// floored to an integer and clamped below by g_min.
long long global_cycles(const Coefficients& weakest, double tau, double n_star,
                        long long g_min);

struct PriceBounds {
  double low = 0.0;   // net coefficient zero at tau_max
  double high = 0.0;  // net coefficient zero at tau_min

  // Opens up degenerate intervals (FL mode, tau_min == tau_max) so the
  // leader retains a strategy space.
  PriceBounds widened(double rel_eps) const;
};

// Price interval within which some tau in [tau_min, tau_max] yields a
// non-negative net coefficient.
PriceBounds price_bounds(const Coefficients& c, const TaskSpec& task);

// Eq-21a style leader utility at explicit strategies and participations.
double orchestrator_utility(const TaskSpec& task, std::span<const double> taus,
                            std::span<const double> rhos,
                            std::span<const double> n_stars, double cycles,
                            const NormConstants& norms,
                            std::size_t group_size);

// ---------------------------------------------------------------------------
// Follower-response model assumed by the leader's optimizer (the closed-form
// participation as a function of price, with the time constraint saturated at
// the participation threshold).
// ---------------------------------------------------------------------------

struct ResponseModel {
  double a = 0.0;          // A2
  double b = 0.0;          // A1
  double c = 0.0;          // A0
  double recv_cost = 0.0;  // zeta1
  double alpha = 0.0;      // d zeta2 / d rho
  double beta = 0.0;       // zeta2(0) offset
  double cycles = 1.0;     // G, fixed before this solve

  static ResponseModel from(const Coefficients& coeff, double cycles);

  double zeta2(double rho) const { return alpha * rho - beta; }
  // aB + bA == 0; always the case in FL mode where the time constraint alone
  // pins participation.
  bool degenerate(double rho) const;
  double n(double rho) const;
  double dn(double rho) const;
  double d2n(double rho) const;
  double n_time_equality(double tau) const;
};

struct Gradient {
  double dtau = 0.0;
  double drho = 0.0;
};

// Analytic first derivatives of the leader utility under the response model,
// in the reference normalization (loss weight 1, payment scale 1, c2 = 1).
Gradient utility_gradient(double tau, double rho, const ResponseModel& m,
                          double complexity);

struct Hessian {
  double h00 = 0.0;  // d2U/dtau2
  double h01 = 0.0;  // mixed, symmetric
  double h11 = 0.0;  // d2U/drho2
  double det() const { return h00 * h11 - h01 * h01; }
};

Hessian utility_hessian(double tau, double rho, const ResponseModel& m,
                        double complexity);

// tau * G * C * rho * n >= 2: the revenue condition under which the source
// analysis treats the leader problem as well-behaved.
bool concavity_condition(double tau, double cycles, double complexity,
                         double rho, double n);

// ---------------------------------------------------------------------------
// Leader solve (P3): per-learner box-constrained maximization
// ---------------------------------------------------------------------------

struct SolverOptions {
  double grad_tol = 1e-8;
  int max_steps = 10000;
  int refine_grid = 32;
  double backtrack_factor = 0.5;
  double init_step_frac = 0.25;
  // Lower edge of the priced box as a fraction of [rho_low, rho_high].
  // Pricing at rho_low itself yields zero net utility at tau_max and hence no
  // realized participation; the floor keeps the mechanism's operating point
  // inside the participation region.
  double price_floor_frac = 0.75;
  double price_widen_rel = 1e-3;

  bool operator==(const SolverOptions&) const = default;
};

struct Box {
  double tau_lo = 0.0, tau_hi = 0.0;
  double rho_lo = 0.0, rho_hi = 0.0;
};

// Per-learner weights of the Eq-21a objective under the run's norms.
struct LeaderWeights {
  double loss = 1.0;  // c1 / (F_max * |L|)
  double pay = 1.0;   // G * C / P_max
};

// One learner's share of the leader objective with the response model
// substituted (clamped to [0, n_max]).
double leader_objective(double tau, double rho, const ResponseModel& m,
                        const TaskSpec& task, const LeaderWeights& w,
                        double n_max);

struct OrchestratorStrategy {
  std::vector<double> tau;
  std::vector<double> rho;
  long long cycles = 1;
  bool warning = false;  // some per-learner solve hit max_steps
  std::vector<Box> boxes;
  std::vector<double> objective;  // per-learner model objective at solution
};

// Solves the second-round leader problem for one orchestrator: for every
// associated learner, maximizes the model objective over
// [tau_min, tau_max] x [rho_floor, rho_high] by projected gradient ascent
// from the box midpoint with backtracking halving, followed by a grid
// refinement when the revenue condition fails or the ascent did not converge.
OrchestratorStrategy solve_orchestrator(const TaskSpec& task,
                                        std::span<const Coefficients> group,
                                        const NormConstants& norms,
                                        long long cycles,
                                        const SolverOptions& opts);

// ---------------------------------------------------------------------------
// Equilibrium verification
// ---------------------------------------------------------------------------

struct EquilibriumReport {
  double max_learner_gain = 0.0;
  double max_orchestrator_gain = 0.0;
  double epsilon = 0.0;
  bool is_epsilon_nash = false;
};

// One orchestrator's slice of a solved game, everything deviation checks need.
struct GroupContext {
  TaskSpec task;                     // run T_max applied
  std::vector<Coefficients> coeffs;  // at solution prices
  std::vector<double> tau;
  std::vector<double> rho;
  std::vector<double> n;
  std::vector<Box> boxes;
  long long cycles = 1;
  LeaderWeights weights;
  double n_max = 1.0;
};

// Grid-based unilateral-deviation audit: (a) no learner can improve its
// utility by more than epsilon by re-picking n; (b) no orchestrator can
// improve its model objective by more than epsilon by re-picking any
// (tau, rho) inside its strategy boxes.
EquilibriumReport verify_nash(std::span<const GroupContext> groups,
                              double epsilon, int grid_density);

}  // namespace mel
