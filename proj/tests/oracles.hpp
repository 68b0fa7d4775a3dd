#pragma once

// Test-only oracles, kept independent of the closed forms they check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mel/edge_model.hpp"
#include "mel/rng.hpp"
#include "mel/stackelberg.hpp"

namespace mel::testing {

struct GridArgmax {
  double n = 0.0;
  double utility = 0.0;
};

// Brute-force learner decision: maximize utility over {0} and every
// time-feasible grid point. The candidate set also carries the constraint
// boundary (the largest feasible n) and n_max, which are part of the feasible
// set's geometry rather than of any closed-form solution. Ties go to the
// larger participation.
inline GridArgmax grid_best_response(const Coefficients& c, double tau,
                                     double cycles, double n_max,
                                     double step = 1e-4) {
  std::vector<double> candidates;
  const long long k_max = static_cast<long long>(std::floor(n_max / step));
  candidates.reserve(static_cast<std::size_t>(k_max) + 3);
  for (long long k = 0; k <= k_max; ++k) candidates.push_back(k * step);
  candidates.push_back(n_max);
  const double denom = cycles * (c.a2 * tau + c.a1);
  if (denom > 0.0) {
    const double n_boundary = (1.0 - cycles * c.a0) / denom;
    if (n_boundary > 0.0 && n_boundary <= n_max) candidates.push_back(n_boundary);
  }
  GridArgmax best;  // n = 0, utility 0 is always available
  for (double n : candidates) {
    if (n <= 0.0) continue;
    if (normalized_time(n, tau, cycles, c) > 1.0 + 1e-12) continue;
    const double u = learner_utility(c, tau, cycles, n);
    if (u > best.utility || (u == best.utility && n > best.n)) {
      best.utility = u;
      best.n = n;
    }
  }
  return best;
}

// Leader utility in the reference normalization (loss weight 1, payment
// scale 1), with the unclamped response model. This is the function the
// analytic gradient formulas describe.
inline double reference_leader_utility(double tau, double rho,
                                       const ResponseModel& m,
                                       double complexity) {
  const double n = m.degenerate(rho) ? m.n_time_equality(tau) : m.n(rho);
  return -1.0 / (m.cycles * tau) - m.cycles * complexity * rho * tau * n;
}

inline Gradient fd_gradient(double tau, double rho, const ResponseModel& m,
                            double complexity) {
  const double ht = 1e-6 * std::max(1.0, std::abs(tau));
  const double hr = 1e-6 * std::max(std::abs(rho), 1e-12);
  Gradient g;
  g.dtau = (reference_leader_utility(tau + ht, rho, m, complexity) -
            reference_leader_utility(tau - ht, rho, m, complexity)) /
           (2.0 * ht);
  g.drho = (reference_leader_utility(tau, rho + hr, m, complexity) -
            reference_leader_utility(tau, rho - hr, m, complexity)) /
           (2.0 * hr);
  return g;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

// Physically plausible random coefficient sets for follower-side checks.
struct RandomInstance {
  Coefficients c;
  double tau = 1.0;
  double cycles = 1.0;
  double n_max = 1.0;
};

inline RandomInstance random_instance(SplitMix64& rng, bool fl_mode = false) {
  RandomInstance ri;
  ri.c.a0 = rng.uniform(1e-4, 0.3);
  ri.c.a1 = fl_mode ? 0.0 : rng.uniform(1e-3, 0.5);
  ri.c.a2 = rng.uniform(1e-3, 0.6);
  ri.c.zeta0 = rng.uniform(1e-5, 0.05);
  ri.c.zeta1 = fl_mode ? 0.0 : rng.uniform(0.05, 1.0);
  ri.c.price_slope = rng.uniform(1e4, 1e6);
  ri.c.energy_price_term = rng.uniform(0.0, 0.05);
  const double rho = rng.uniform(0.0, 1.5e-6);
  ri.c.zeta2 = ri.c.price_slope * rho - ri.c.energy_price_term;
  ri.tau = rng.uniform(1.0, 10.0);
  const double g_cap = 0.95 / ri.c.a0;
  ri.cycles = std::max(1.0, std::floor(rng.uniform(1.0, std::min(200.0, g_cap))));
  ri.n_max = rng.uniform(0.05, 1.0);
  return ri;
}

// Random response-model parameters with a positive zeta2 at the sampled rho.
struct RandomModelPoint {
  ResponseModel m;
  double tau = 1.0;
  double rho = 0.0;
  double complexity = 1.0;
};

inline RandomModelPoint random_model_point(SplitMix64& rng) {
  RandomModelPoint p;
  p.m.a = rng.uniform(1e-3, 0.6);
  p.m.b = rng.uniform(1e-3, 0.5);
  p.m.c = rng.uniform(1e-4, 0.3);
  p.m.recv_cost = rng.uniform(0.05, 1.0);
  p.m.alpha = rng.uniform(1e4, 1e6);
  p.m.beta = rng.uniform(0.0, 0.05);
  p.m.cycles = std::floor(rng.uniform(1.0, std::min(300.0, 0.95 / p.m.c)));
  if (p.m.cycles < 1.0) p.m.cycles = 1.0;
  p.complexity = rng.uniform(1e3, 1e7);
  p.tau = rng.uniform(1.2, 9.8);
  // interior rho with zeta2 > 0
  const double rho_pos = (p.m.beta + rng.uniform(0.01, 1.0)) / p.m.alpha;
  p.rho = rho_pos;
  return p;
}

}  // namespace mel::testing
