#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mel/scenario.hpp"

namespace mel {

// learner index -> orchestrator index; every learner maps to exactly one.
using AssociationMap = std::vector<std::size_t>;

// Min-max normalization to [0, 1]; a degenerate range maps everything to 1.
// Values at the minimum are clamped up to `floor` when floor > 0.
std::vector<double> min_max_normalize(std::span<const double> xs,
                                      double floor = 0.0);

// Eq-13 style association factor: normalized initial payment per sample over
// normalized distance.
double association_factor(double price_norm, double complexity_norm,
                          double distance_norm, double d_floor = 1e-6);

// Factor-based association: each learner to the orchestrator with the largest
// association factor; ties to the lowest orchestrator index.
AssociationMap fba_associate(const Scenario& sc);

// Distance-based association (nearest orchestrator, ties to lowest index).
AssociationMap dba_associate(const Scenario& sc);

// Uniform independent association, deterministic under the seed.
AssociationMap random_associate(const Scenario& sc, std::uint64_t seed);

// Exhaustive per-learner association oracle at a fixed (n, tau): picks the
// orchestrator maximizing the learner's utility among the time-feasible ones
// at G_min and the initial prices; falls back to the factor argmax when no
// orchestrator is feasible. Test fixture for scoring the heuristics.
AssociationMap sp1_oracle_associate(const Scenario& sc, double fixed_n,
                                    double fixed_tau);

}  // namespace mel
