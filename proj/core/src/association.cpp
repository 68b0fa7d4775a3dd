#include "mel/association.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "mel/edge_model.hpp"
#include "mel/rng.hpp"
#include "mel/stackelberg.hpp"

namespace mel {

std::vector<double> min_max_normalize(std::span<const double> xs, double floor) {
  std::vector<double> out(xs.size(), 1.0);
  if (xs.empty()) return out;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*hi <= *lo) return out;  // degenerate range
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = std::max((xs[i] - *lo) / (*hi - *lo), floor);
  }
  return out;
}

double association_factor(double price_norm, double complexity_norm,
                          double distance_norm, double d_floor) {
  const double d = std::max(distance_norm, d_floor);
  return price_norm * complexity_norm / d;
}

namespace {

void require_orchestrators(const Scenario& sc) {
  if (sc.tasks.empty()) {
    throw std::invalid_argument("association: scenario has no orchestrators");
  }
}

}  // namespace

AssociationMap fba_associate(const Scenario& sc) {
  require_orchestrators(sc);
  const std::size_t n_orch = sc.tasks.size();
  std::vector<double> prices(n_orch), complexities(n_orch);
  for (std::size_t o = 0; o < n_orch; ++o) {
    prices[o] = sc.tasks[o].init_price;
    complexities[o] = sc.tasks[o].complexity;
  }
  const std::vector<double> p_norm = min_max_normalize(prices);
  const std::vector<double> c_norm = min_max_normalize(complexities);

  std::vector<double> all_d;
  all_d.reserve(sc.learners.size() * n_orch);
  for (const LearnerProfile& l : sc.learners) {
    all_d.insert(all_d.end(), l.distances_m.begin(), l.distances_m.end());
  }
  const std::vector<double> d_norm = min_max_normalize(all_d);

  AssociationMap map(sc.learners.size(), 0);
  for (std::size_t l = 0; l < sc.learners.size(); ++l) {
    double best = -1.0;
    std::size_t pick = 0;
    for (std::size_t o = 0; o < n_orch; ++o) {
      const double gamma =
          association_factor(p_norm[o], c_norm[o], d_norm[l * n_orch + o]);
      if (gamma > best) {
        best = gamma;
        pick = o;
      }
    }
    map[l] = pick;
  }
  return map;
}

AssociationMap dba_associate(const Scenario& sc) {
  require_orchestrators(sc);
  AssociationMap map(sc.learners.size(), 0);
  for (std::size_t l = 0; l < sc.learners.size(); ++l) {
    const auto& d = sc.learners[l].distances_m;
    map[l] = static_cast<std::size_t>(
        std::min_element(d.begin(), d.end()) - d.begin());
  }
  return map;
}

AssociationMap random_associate(const Scenario& sc, std::uint64_t seed) {
  require_orchestrators(sc);
  SplitMix64 rng(mix_seed(seed, 0xa550cull));
  AssociationMap map(sc.learners.size(), 0);
  for (std::size_t l = 0; l < sc.learners.size(); ++l) {
    map[l] = rng.index(sc.tasks.size());
  }
  return map;
}

AssociationMap sp1_oracle_associate(const Scenario& sc, double fixed_n,
                                    double fixed_tau) {
  require_orchestrators(sc);
  const AssociationMap fallback = fba_associate(sc);
  const NormConstants norms = sc.scenario_norms();
  AssociationMap map(sc.learners.size(), 0);
  for (std::size_t l = 0; l < sc.learners.size(); ++l) {
    double best = -std::numeric_limits<double>::infinity();
    bool any_feasible = false;
    std::size_t pick = fallback[l];
    for (std::size_t o = 0; o < sc.tasks.size(); ++o) {
      const TaskSpec& task = sc.tasks[o];
      const Coefficients c =
          compute_coefficients(task, sc.learners[l], sc.link_channel(l, o),
                               norms, task.init_price,
                               sc.learners[l].distances_m[o]);
      const double g = static_cast<double>(task.g_min);
      if (normalized_time(fixed_n, fixed_tau, g, c) > 1.0) continue;
      const double u = learner_utility(c, fixed_tau, g, fixed_n);
      if (!any_feasible || u > best) {
        any_feasible = true;
        best = u;
        pick = o;
      }
    }
    map[l] = pick;
  }
  return map;
}

}  // namespace mel
