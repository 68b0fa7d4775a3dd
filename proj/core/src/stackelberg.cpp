#include "mel/stackelberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mel/edge_model.hpp"

namespace mel {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kFloorSlack = 1e-9;

double clampd(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

}  // namespace

double net_coefficient(const Coefficients& c, double tau) {
  return c.zeta2 * tau - c.zeta1;
}

double min_participation(const Coefficients& c, double tau) {
  const double net = net_coefficient(c, tau);
  if (net <= 0.0) return std::numeric_limits<double>::infinity();
  return c.zeta0 / net;
}

BestResponse learner_best_response(const Coefficients& c, double tau,
                                   double cycles, double n_max) {
  if (tau < 1.0) throw std::domain_error("learner_best_response: tau < 1");
  if (cycles < 1.0) throw std::domain_error("learner_best_response: cycles < 1");
  BestResponse r;
  if (cycles * c.a0 >= 1.0) {
    r.time_infeasible = true;
    return r;
  }
  const double net = net_coefficient(c, tau);
  if (net <= 0.0) return r;
  // Time saturation at the assigned tau; participation fills whatever the
  // weight exchange leaves of the frame.
  const double denom = cycles * (c.a2 * tau + c.a1);
  if (denom <= 0.0) return r;
  const double n_sat = (1.0 - cycles * c.a0) / denom;
  const double candidate = std::min(n_max, n_sat);
  if (candidate <= 0.0) return r;
  if (candidate < c.zeta0 / net) return r;  // every level would lose money
  r.n = candidate;
  r.participates = true;
  return r;
}

double learner_utility(const Coefficients& c, double tau, double cycles,
                       double n) {
  if (n <= 0.0) return 0.0;
  return cycles * (n * net_coefficient(c, tau) - c.zeta0);
}

std::size_t weakest_learner(std::span<const double> cpu_hz,
                            std::span<const double> distance_m) {
  if (cpu_hz.empty() || cpu_hz.size() != distance_m.size()) {
    throw std::invalid_argument("weakest_learner: empty or mismatched group");
  }
  const auto [f_min, f_max] =
      std::minmax_element(cpu_hz.begin(), cpu_hz.end());
  const auto [d_min, d_max] =
      std::minmax_element(distance_m.begin(), distance_m.end());
  auto norm = [](double x, double lo, double hi) {
    if (hi <= lo) return 1.0;
    return std::max((x - lo) / (hi - lo), 1e-9);
  };
  std::size_t best = 0;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cpu_hz.size(); ++i) {
    const double ratio = norm(cpu_hz[i], *f_min, *f_max) /
                         norm(distance_m[i], *d_min, *d_max);
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  return best;
}

long long global_cycles(const Coefficients& weakest, double tau, double n_star,
                        long long g_min) {
  const double denom = weakest.a2 * tau * n_star + weakest.a1 * n_star + weakest.a0;
  if (denom <= 0.0) {
    throw std::invalid_argument("global_cycles: non-positive cycle time");
  }
  const double raw = std::floor(1.0 / denom + kFloorSlack);
  const double capped = std::min(raw, 9.0e15);
  return std::max<long long>(g_min, static_cast<long long>(capped));
}

PriceBounds PriceBounds::widened(double rel_eps) const {
  PriceBounds w = *this;
  const double pad = rel_eps * (low > 0.0 ? low : 1.0);
  if (w.high - w.low < pad) w.high = w.low + pad;
  return w;
}

PriceBounds price_bounds(const Coefficients& c, const TaskSpec& task) {
  if (task.tau_min < 1.0) throw std::domain_error("price_bounds: tau_min < 1");
  if (c.price_slope <= 0.0) {
    throw std::domain_error("price_bounds: non-positive price slope");
  }
  PriceBounds b;
  b.low = (c.zeta1 / task.tau_max + c.energy_price_term) / c.price_slope;
  b.high = (c.zeta1 / task.tau_min + c.energy_price_term) / c.price_slope;
  return b;
}

double orchestrator_utility(const TaskSpec& task, std::span<const double> taus,
                            std::span<const double> rhos,
                            std::span<const double> n_stars, double cycles,
                            const NormConstants& norms,
                            std::size_t group_size) {
  if (taus.empty() || taus.size() != rhos.size() ||
      taus.size() != n_stars.size()) {
    throw std::invalid_argument("orchestrator_utility: empty or mismatched group");
  }
  double loss = 0.0;
  double payment = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    loss += task.c1 / (cycles * std::pow(taus[i], task.c2));
    payment += rhos[i] * taus[i] * n_stars[i];
  }
  return -loss / (norms.f_max * static_cast<double>(group_size)) -
         cycles * task.complexity / norms.p_max * payment;
}

// ---------------------------------------------------------------------------
// Response model
// ---------------------------------------------------------------------------

ResponseModel ResponseModel::from(const Coefficients& coeff, double cycles) {
  ResponseModel m;
  m.a = coeff.a2;
  m.b = coeff.a1;
  m.c = coeff.a0;
  m.recv_cost = coeff.zeta1;
  m.alpha = coeff.price_slope;
  m.beta = coeff.energy_price_term;
  m.cycles = cycles;
  return m;
}

bool ResponseModel::degenerate(double rho) const {
  return std::abs(a * recv_cost + b * zeta2(rho)) < kTiny;
}

double ResponseModel::n(double rho) const {
  const double big_a = zeta2(rho);
  const double denom = cycles * (a * recv_cost + b * big_a);
  return big_a * (1.0 - cycles * c) / denom;
}

double ResponseModel::dn(double rho) const {
  const double big_a = zeta2(rho);
  const double d = a * recv_cost + b * big_a;
  return recv_cost * a * alpha * (1.0 - cycles * c) / (cycles * d * d);
}

double ResponseModel::d2n(double rho) const {
  const double big_a = zeta2(rho);
  const double d = a * recv_cost + b * big_a;
  return -2.0 * a * alpha * alpha * b * recv_cost * (1.0 - cycles * c) /
         (cycles * d * d * d);
}

double ResponseModel::n_time_equality(double tau) const {
  return (1.0 - cycles * c) / (cycles * a * tau);
}

Gradient utility_gradient(double tau, double rho, const ResponseModel& m,
                          double complexity) {
  Gradient g;
  const double gc = m.cycles * complexity;
  if (m.degenerate(rho)) {
    // Time-equality response: rho * tau * n is tau-free, so the payment drops
    // out of the tau derivative entirely.
    g.dtau = 1.0 / (tau * tau * m.cycles);
    g.drho = -gc * tau * m.n_time_equality(tau);
    return g;
  }
  const double n = m.n(rho);
  const double nd = m.dn(rho);
  g.dtau = -gc * rho * n + 1.0 / (tau * tau * m.cycles);
  g.drho = -gc * tau * (rho * nd + n);
  return g;
}

Hessian utility_hessian(double tau, double rho, const ResponseModel& m,
                        double complexity) {
  Hessian h;
  h.h00 = -2.0 / (tau * tau * tau * m.cycles);
  const double gc = m.cycles * complexity;
  if (m.degenerate(rho)) {
    return h;  // payment independent of tau and linear in rho
  }
  const double n = m.n(rho);
  const double nd = m.dn(rho);
  const double ndd = m.d2n(rho);
  h.h01 = -gc * (rho * nd + n);
  h.h11 = -gc * tau * (2.0 * nd + rho * ndd);
  return h;
}

bool concavity_condition(double tau, double cycles, double complexity,
                         double rho, double n) {
  return tau * cycles * complexity * rho * n >= 2.0;
}

// ---------------------------------------------------------------------------
// Leader solve
// ---------------------------------------------------------------------------

double leader_objective(double tau, double rho, const ResponseModel& m,
                        const TaskSpec& task, const LeaderWeights& w,
                        double n_max) {
  double n;
  if (m.degenerate(rho)) {
    n = clampd(m.n_time_equality(tau), 0.0, n_max);
  } else {
    n = clampd(m.n(rho), 0.0, n_max);
  }
  const double loss = 1.0 / (m.cycles * std::pow(tau, task.c2));
  return -w.loss * loss - w.pay * rho * tau * n;
}

namespace {

// Exact gradient of leader_objective, clamp-aware. Used for the ascent so the
// backtracking line search and the direction agree on one function.
Gradient leader_gradient(double tau, double rho, const ResponseModel& m,
                         const TaskSpec& task, const LeaderWeights& w,
                         double n_max) {
  Gradient g;
  const double dloss = w.loss * task.c2 / (m.cycles * std::pow(tau, task.c2 + 1.0));
  if (m.degenerate(rho)) {
    const double n_raw = m.n_time_equality(tau);
    if (n_raw <= 0.0) {
      g.dtau = dloss;
      return g;
    }
    if (n_raw >= n_max) {
      g.dtau = dloss - w.pay * rho * n_max;
      g.drho = -w.pay * tau * n_max;
      return g;
    }
    g.dtau = dloss;  // rho*tau*n is tau-free below the cap
    g.drho = -w.pay * tau * n_raw;
    return g;
  }
  const double n_raw = m.n(rho);
  if (n_raw <= 0.0) {
    g.dtau = dloss;
    return g;
  }
  if (n_raw >= n_max) {
    g.dtau = dloss - w.pay * rho * n_max;
    g.drho = -w.pay * tau * n_max;
    return g;
  }
  g.dtau = dloss - w.pay * rho * n_raw;
  g.drho = -w.pay * tau * (rho * m.dn(rho) + n_raw);
  return g;
}

struct PgResult {
  double tau = 0.0, rho = 0.0, obj = 0.0;
  bool converged = false;
};

PgResult projected_ascent(double tau0, double rho0, const Box& box,
                          const ResponseModel& m, const TaskSpec& task,
                          const LeaderWeights& w, double n_max,
                          const SolverOptions& opts) {
  const double tau_ext = std::max(box.tau_hi - box.tau_lo, kTiny);
  const double rho_ext = std::max(box.rho_hi - box.rho_lo, kTiny);
  // Work in unit box coordinates so the two axes are comparably scaled.
  double u0 = (tau0 - box.tau_lo) / tau_ext;
  double u1 = (rho0 - box.rho_lo) / rho_ext;
  auto to_x = [&](double a, double b) {
    return std::pair<double, double>{box.tau_lo + a * tau_ext,
                                     box.rho_lo + b * rho_ext};
  };
  auto eval = [&](double a, double b) {
    auto [t, r] = to_x(a, b);
    return leader_objective(t, r, m, task, w, n_max);
  };
  double obj = eval(u0, u1);
  double step = opts.init_step_frac;
  PgResult out;
  for (int it = 0; it < opts.max_steps; ++it) {
    auto [t, r] = to_x(u0, u1);
    Gradient gx = leader_gradient(t, r, m, task, w, n_max);
    double g0 = gx.dtau * tau_ext;
    double g1 = gx.drho * rho_ext;
    // Projected gradient: zero out components pointing outside the box.
    if ((u0 <= 0.0 && g0 < 0.0) || (u0 >= 1.0 && g0 > 0.0)) g0 = 0.0;
    if ((u1 <= 0.0 && g1 < 0.0) || (u1 >= 1.0 && g1 > 0.0)) g1 = 0.0;
    const double pg_norm = std::sqrt(g0 * g0 + g1 * g1);
    if (pg_norm < opts.grad_tol) {
      out.converged = true;
      break;
    }
    double t_step = step;
    bool accepted = false;
    while (t_step > 1e-18) {
      const double v0 = clampd(u0 + t_step * g0, 0.0, 1.0);
      const double v1 = clampd(u1 + t_step * g1, 0.0, 1.0);
      const double cand = eval(v0, v1);
      if (cand > obj + 1e-4 * t_step * pg_norm * pg_norm) {
        u0 = v0;
        u1 = v1;
        obj = cand;
        accepted = true;
        break;
      }
      t_step *= opts.backtrack_factor;
    }
    if (!accepted) {
      // No ascent direction at machine resolution; treat as converged when
      // the remaining projected gradient is only numerically nonzero.
      out.converged = pg_norm < 1e-4;
      break;
    }
    step = std::min(opts.init_step_frac, t_step * 2.0);
  }
  auto [t, r] = to_x(u0, u1);
  out.tau = t;
  out.rho = r;
  out.obj = obj;
  return out;
}

}  // namespace

OrchestratorStrategy solve_orchestrator(const TaskSpec& task,
                                        std::span<const Coefficients> group,
                                        const NormConstants& norms,
                                        long long cycles,
                                        const SolverOptions& opts) {
  if (group.empty()) {
    throw std::invalid_argument("solve_orchestrator: empty learner group");
  }
  OrchestratorStrategy out;
  out.cycles = cycles;
  const double g = static_cast<double>(cycles);
  LeaderWeights w;
  w.loss = task.c1 / (norms.f_max * static_cast<double>(group.size()));
  w.pay = g * task.complexity / norms.p_max;

  for (const Coefficients& coeff : group) {
    const PriceBounds raw = price_bounds(coeff, task).widened(opts.price_widen_rel);
    Box box;
    box.tau_lo = task.tau_min;
    box.tau_hi = task.tau_max;
    box.rho_lo = raw.low + opts.price_floor_frac * (raw.high - raw.low);
    box.rho_hi = raw.high;
    if (box.rho_hi < box.rho_lo) box.rho_hi = box.rho_lo;

    const ResponseModel m = ResponseModel::from(coeff, g);
    const double tau_mid = 0.5 * (box.tau_lo + box.tau_hi);
    const double rho_mid = 0.5 * (box.rho_lo + box.rho_hi);

    double tau_best = tau_mid, rho_best = rho_mid;
    double obj_best = leader_objective(tau_mid, rho_mid, m, task, w, task.n_max);
    bool warn = false;

    const bool degenerate_box = (box.tau_hi - box.tau_lo) <= 0.0 &&
                                (box.rho_hi - box.rho_lo) <= 0.0;
    if (!degenerate_box) {
      if (task.c2 == 1.0) {
        PgResult pg = projected_ascent(tau_mid, rho_mid, box, m, task, w,
                                       task.n_max, opts);
        tau_best = pg.tau;
        rho_best = pg.rho;
        obj_best = pg.obj;
        warn = !pg.converged;
      } else {
        warn = true;  // analytic derivatives assume c2 == 1; rely on the grid
      }
      double n_at_sol = m.degenerate(rho_best)
                            ? clampd(m.n_time_equality(tau_best), 0.0, task.n_max)
                            : clampd(m.n(rho_best), 0.0, task.n_max);
      if (warn ||
          !concavity_condition(tau_best, g, task.complexity, rho_best, n_at_sol)) {
        const int k = std::max(opts.refine_grid, 2);
        for (int i = 0; i <= k; ++i) {
          for (int j = 0; j <= k; ++j) {
            const double t = box.tau_lo + (box.tau_hi - box.tau_lo) * i / k;
            const double r = box.rho_lo + (box.rho_hi - box.rho_lo) * j / k;
            const double v = leader_objective(t, r, m, task, w, task.n_max);
            if (v > obj_best) {
              obj_best = v;
              tau_best = t;
              rho_best = r;
            }
          }
        }
        if (task.c2 == 1.0) {
          PgResult pg = projected_ascent(tau_best, rho_best, box, m, task, w,
                                         task.n_max, opts);
          if (pg.obj >= obj_best) {
            tau_best = pg.tau;
            rho_best = pg.rho;
            obj_best = pg.obj;
            warn = !pg.converged;
          }
        }
      }
    }

    out.tau.push_back(tau_best);
    out.rho.push_back(rho_best);
    out.boxes.push_back(box);
    out.objective.push_back(obj_best);
    out.warning = out.warning || warn;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equilibrium verification
// ---------------------------------------------------------------------------

EquilibriumReport verify_nash(std::span<const GroupContext> groups,
                              double epsilon, int grid_density) {
  if (groups.empty()) {
    throw std::invalid_argument("verify_nash: no groups");
  }
  EquilibriumReport rep;
  rep.epsilon = epsilon;
  const int k = std::max(grid_density, 2);
  for (const GroupContext& grp : groups) {
    if (grp.coeffs.empty()) {
      throw std::invalid_argument("verify_nash: empty learner group");
    }
    const double g = static_cast<double>(grp.cycles);
    double orch_gain = 0.0;
    for (std::size_t i = 0; i < grp.coeffs.size(); ++i) {
      const Coefficients& c = grp.coeffs[i];
      // (a) learner deviations over an n grid, time-feasible points only.
      const double base_u = learner_utility(c, grp.tau[i], g, grp.n[i]);
      double best_u = 0.0;  // n = 0 is always available
      for (int s = 0; s <= k; ++s) {
        const double n = grp.n_max * s / k;
        if (normalized_time(n, grp.tau[i], g, c) > 1.0 + 1e-12) continue;
        best_u = std::max(best_u, learner_utility(c, grp.tau[i], g, n));
      }
      rep.max_learner_gain = std::max(rep.max_learner_gain, best_u - base_u);

      // (b) leader deviations over the (tau, rho) strategy box.
      const ResponseModel m = ResponseModel::from(c, g);
      const Box& box = grp.boxes[i];
      const double base_o = leader_objective(grp.tau[i], grp.rho[i], m,
                                             grp.task, grp.weights, grp.n_max);
      double best_o = base_o;
      for (int s = 0; s <= k; ++s) {
        for (int t = 0; t <= k; ++t) {
          const double tt = box.tau_lo + (box.tau_hi - box.tau_lo) * s / k;
          const double rr = box.rho_lo + (box.rho_hi - box.rho_lo) * t / k;
          best_o = std::max(best_o, leader_objective(tt, rr, m, grp.task,
                                                     grp.weights, grp.n_max));
        }
      }
      orch_gain += std::max(0.0, best_o - base_o);
    }
    rep.max_orchestrator_gain = std::max(rep.max_orchestrator_gain, orch_gain);
  }
  rep.is_epsilon_nash = rep.max_learner_gain <= epsilon &&
                        rep.max_orchestrator_gain <= epsilon;
  return rep;
}

}  // namespace mel
