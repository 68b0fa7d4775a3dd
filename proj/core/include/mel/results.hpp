#pragma once

#include <string>
#include <vector>

#include "mel/simulator.hpp"

namespace mel {

// Shortest round-trip decimal rendering, locale-independent.
std::string format_double(double x);

// Per-run CSV: one row per (t_max, policy, seed).
std::string raw_csv(const SweepResult& res, std::size_t n_orch);

// Seed-averaged CSV keyed by (policy, t_max).
std::string aggregated_csv(const SweepResult& res);

// Run manifest: config hash, sweep axes, column documentation.
std::string manifest_json(const RunConfig& cfg,
                          const std::vector<std::string>& files,
                          std::size_t n_orch);

struct EmittedFiles {
  std::string raw_path;
  std::string aggregated_path;
  std::string manifest_path;
};

// Writes raw.csv, aggregated.csv and manifest.json under dir (created if
// missing). Throws std::runtime_error when the directory is not writable.
EmittedFiles emit_results(const SweepResult& res, const RunConfig& cfg,
                          const std::string& dir);

}  // namespace mel
