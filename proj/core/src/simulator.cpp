#include "mel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "mel/edge_model.hpp"
#include "mel/rng.hpp"

namespace mel {

namespace {

std::uint64_t policy_salt(Policy p) {
  switch (p) {
    case Policy::FbaOpt: return 0x0f17ull;
    case Policy::DbaEe: return 0xd8a1ull;
    case Policy::Random: return 0x7a2dull;
  }
  return 0;
}

std::uint64_t t_max_bits(double t) {
  std::uint64_t b = 0;
  std::memcpy(&b, &t, sizeof(b));
  return b;
}

// The energy-efficient baseline pays a fixed margin above the tau_min
// participation threshold. The threshold price is independent of the time
// frame, so DBA-EE payments never shrink as the frame grows.
double dba_price(const Coefficients& c, const TaskSpec& task,
                 const BaselineConfig& base) {
  const double threshold =
      (c.zeta1 / task.tau_min + c.energy_price_term) / c.price_slope;
  return threshold * (1.0 + base.dba_price_margin);
}

}  // namespace

GameResult run_game(const Scenario& base_sc, Policy policy, double t_max,
                    const SolverOptions& solver, const BaselineConfig& base) {
  const Scenario sc = with_t_max(base_sc, t_max);
  const std::size_t n_orch = sc.tasks.size();
  const std::size_t n_learners = sc.learners.size();
  const std::uint64_t run_seed =
      mix_seed(mix_seed(sc.seed, policy_salt(policy)), t_max_bits(t_max));

  GameResult out;
  StrategyProfile& prof = out.profile;
  switch (policy) {
    case Policy::FbaOpt: prof.assoc = fba_associate(sc); break;
    case Policy::DbaEe: prof.assoc = dba_associate(sc); break;
    case Policy::Random: prof.assoc = random_associate(sc, run_seed); break;
  }
  prof.learners.resize(n_learners);
  prof.orchestrators.resize(n_orch);

  const NormConstants sc_norms = sc.scenario_norms();

  for (std::size_t o = 0; o < n_orch; ++o) {
    const TaskSpec& task = sc.tasks[o];
    OrchestratorOutcome& orch = prof.orchestrators[o];
    for (std::size_t l = 0; l < n_learners; ++l) {
      if (prof.assoc[l] == o) orch.members.push_back(l);
    }
    if (orch.members.empty()) {
      orch.idle = true;
      orch.cycles = task.g_min;
      orch.loss_term = task.c1 / (static_cast<double>(task.g_min) *
                                  std::pow(task.tau_min, task.c2));
      continue;
    }

    // Link contexts at the broadcast initial price.
    std::vector<Coefficients> coeffs;
    std::vector<double> member_f, member_d;
    coeffs.reserve(orch.members.size());
    for (std::size_t l : orch.members) {
      coeffs.push_back(compute_coefficients(task, sc.learners[l],
                                            sc.link_channel(l, o), sc_norms,
                                            task.init_price,
                                            sc.learners[l].distances_m[o]));
      member_f.push_back(sc.learners[l].cpu_hz);
      member_d.push_back(sc.learners[l].distances_m[o]);
    }

    orch.weakest = weakest_learner(member_f, member_d);
    // Fix G from the weakest learner's single-cycle response at the initial
    // price and tau_min, per the straggler rule.
    const BestResponse weak_br =
        learner_best_response(coeffs[orch.weakest], task.tau_min, 1.0, task.n_max);
    long long cycles = global_cycles(coeffs[orch.weakest], task.tau_min,
                                     weak_br.n, task.g_min);
    if (policy == Policy::DbaEe) cycles = task.g_min;
    orch.cycles = cycles;
    const double g = static_cast<double>(cycles);

    // Run-scoped normalization: worst attainable loss at this G, and the
    // payment ceiling budgeted at the broadcast price.
    NormConstants norms = sc_norms;
    norms.f_max = sc.f_max_cfg > 0.0
                      ? sc.f_max_cfg
                      : task.c1 / (g * std::pow(task.tau_min, task.c2));
    double rho_cap = task.init_price;
    for (const Coefficients& c : coeffs) {
      rho_cap = std::max(rho_cap,
                         price_bounds(c, task).widened(solver.price_widen_rel).high);
    }
    norms.p_max = sc.p_max_cfg > 0.0
                      ? sc.p_max_cfg
                      : static_cast<double>(orch.members.size()) * g *
                            task.complexity * rho_cap * task.tau_max * task.n_max;

    LeaderWeights weights;
    weights.loss = task.c1 / (norms.f_max * static_cast<double>(orch.members.size()));
    weights.pay = g * task.complexity / norms.p_max;

    // Second-round leader strategy.
    std::vector<double> taus(orch.members.size());
    std::vector<double> rhos(orch.members.size());
    std::vector<Box> boxes(orch.members.size());
    switch (policy) {
      case Policy::FbaOpt: {
        OrchestratorStrategy sol =
            solve_orchestrator(task, coeffs, norms, cycles, solver);
        taus = sol.tau;
        rhos = sol.rho;
        boxes = sol.boxes;
        orch.solver_warning = sol.warning;
        break;
      }
      case Policy::DbaEe: {
        for (std::size_t i = 0; i < orch.members.size(); ++i) {
          taus[i] = task.tau_min;
          rhos[i] = dba_price(coeffs[i], task, base);
          const PriceBounds b =
              price_bounds(coeffs[i], task).widened(solver.price_widen_rel);
          boxes[i] = Box{task.tau_min, task.tau_max, b.low, b.high};
        }
        break;
      }
      case Policy::Random: {
        for (std::size_t i = 0; i < orch.members.size(); ++i) {
          SplitMix64 rng(mix_seed(mix_seed(run_seed, o), orch.members[i]));
          const PriceBounds b =
              price_bounds(coeffs[i], task).widened(solver.price_widen_rel);
          taus[i] = rng.uniform(task.tau_min, task.tau_max);
          rhos[i] = rng.uniform(b.low, b.high);
          boxes[i] = Box{task.tau_min, task.tau_max, b.low, b.high};
        }
        break;
      }
    }

    // Learner responses and realized outcomes.
    GroupContext ctx;
    ctx.task = task;
    ctx.cycles = cycles;
    ctx.weights = weights;
    ctx.n_max = task.n_max;
    ctx.boxes = boxes;
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < orch.members.size(); ++i) {
      const std::size_t l = orch.members[i];
      const Coefficients c = coeffs[i].with_price(rhos[i]);
      LearnerOutcome& lo = prof.learners[l];
      lo.orch = o;
      lo.tau = taus[i];
      lo.rho = rhos[i];

      const BestResponse br = learner_best_response(c, taus[i], g, task.n_max);
      lo.infeasible = br.time_infeasible;
      const double n = br.n;
      lo.n = n;
      lo.participates = n > 0.0;
      lo.loss_term = task.c1 / (g * std::pow(taus[i], task.c2));
      loss_sum += lo.loss_term;
      if (lo.participates) {
        lo.utility = learner_utility(c, taus[i], g, n);
        lo.revenue = g * task.complexity * rhos[i] * taus[i] * n;
        const PhaseTimes pt =
            phase_times(n, taus[i], task, sc.learners[l], c.rate_bps);
        const PhaseEnergies pe = phase_energies(
            n, taus[i], task, sc.learners[l], sc.link_channel(l, o), pt.upload_s);
        lo.energy_j = g * (pe.upload_j + pe.recv_j + pe.compute_j);
      }
      ctx.coeffs.push_back(c);
      ctx.tau.push_back(taus[i]);
      ctx.rho.push_back(rhos[i]);
      ctx.n.push_back(n);
    }
    orch.loss_term = loss_sum / static_cast<double>(orch.members.size());
    out.nash_context.push_back(std::move(ctx));
  }

  // Metrics, single canonical pass over learners so payment == revenue holds
  // bit-for-bit.
  MetricsRecord& m = out.metrics;
  m.t_max = t_max;
  m.policy = policy;
  m.seed = sc.seed;
  m.cycles_per_orch.resize(n_orch);
  m.participants_per_orch.assign(n_orch, 0);
  for (std::size_t o = 0; o < n_orch; ++o) {
    m.cycles_per_orch[o] = prof.orchestrators[o].cycles;
  }
  double u_sum = 0.0, r_sum = 0.0, e_sum = 0.0, loss_sum = 0.0;
  int participants = 0;
  for (std::size_t l = 0; l < n_learners; ++l) {
    const LearnerOutcome& lo = prof.learners[l];
    loss_sum += lo.loss_term;
    if (lo.infeasible) ++m.infeasible_learners;
    if (!lo.participates) continue;
    ++participants;
    ++m.participants_per_orch[lo.orch];
    u_sum += lo.utility;
    r_sum += lo.revenue;
    e_sum += lo.energy_j;
    prof.orchestrators[lo.orch].payment += lo.revenue;
  }
  m.total_payment = r_sum;
  if (participants > 0) {
    m.avg_learner_utility = u_sum / participants;
    m.avg_revenue = r_sum / participants;
    m.avg_energy_j = e_sum / participants;
  }
  m.avg_learning_loss = n_learners > 0 ? loss_sum / static_cast<double>(n_learners) : 0.0;
  return out;
}

SweepResult sweep(const RunConfig& cfg) {
  SweepResult out;
  std::vector<Scenario> scenarios;
  scenarios.reserve(cfg.sweep.seeds.size());
  for (std::uint64_t seed : cfg.sweep.seeds) {
    scenarios.push_back(generate_scenario(cfg, seed));
  }
  for (double t : cfg.sweep.t_max_list) {
    for (Policy p : cfg.sweep.policies) {
      AggregateRecord agg;
      agg.t_max = t;
      agg.policy = p;
      for (std::size_t s = 0; s < scenarios.size(); ++s) {
        GameResult r;
        try {
          r = run_game(scenarios[s], p, t, cfg.solver, cfg.baselines);
        } catch (const std::exception& e) {
          throw std::runtime_error(
              "run failed (policy=" + to_string(p) +
              ", seed=" + std::to_string(cfg.sweep.seeds[s]) +
              ", t_max=" + std::to_string(t) + "): " + e.what());
        }
        agg.avg_learner_utility += r.metrics.avg_learner_utility;
        agg.avg_revenue += r.metrics.avg_revenue;
        agg.avg_energy_j += r.metrics.avg_energy_j;
        agg.total_payment += r.metrics.total_payment;
        agg.avg_learning_loss += r.metrics.avg_learning_loss;
        ++agg.runs;
        out.raw.push_back(std::move(r.metrics));
      }
      if (agg.runs > 0) {
        agg.avg_learner_utility /= agg.runs;
        agg.avg_revenue /= agg.runs;
        agg.avg_energy_j /= agg.runs;
        agg.total_payment /= agg.runs;
        agg.avg_learning_loss /= agg.runs;
      }
      out.aggregate.push_back(agg);
    }
  }
  return out;
}

}  // namespace mel
