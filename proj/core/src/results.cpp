#include "mel/results.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mel {

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string raw_csv(const SweepResult& res, std::size_t n_orch) {
  std::ostringstream out;
  out << "t_max,policy,seed,avg_learner_utility,avg_revenue,avg_energy,"
         "total_payment,avg_learning_loss,infeasible_learners";
  for (std::size_t o = 0; o < n_orch; ++o) out << ",g_orch" << o;
  for (std::size_t o = 0; o < n_orch; ++o) out << ",participants_orch" << o;
  out << "\n";
  for (const MetricsRecord& m : res.raw) {
    out << format_double(m.t_max) << ',' << to_string(m.policy) << ',' << m.seed
        << ',' << format_double(m.avg_learner_utility) << ','
        << format_double(m.avg_revenue) << ',' << format_double(m.avg_energy_j)
        << ',' << format_double(m.total_payment) << ','
        << format_double(m.avg_learning_loss) << ',' << m.infeasible_learners;
    for (std::size_t o = 0; o < n_orch; ++o) {
      out << ',' << (o < m.cycles_per_orch.size() ? m.cycles_per_orch[o] : 0);
    }
    for (std::size_t o = 0; o < n_orch; ++o) {
      out << ','
          << (o < m.participants_per_orch.size() ? m.participants_per_orch[o] : 0);
    }
    out << "\n";
  }
  return out.str();
}

std::string aggregated_csv(const SweepResult& res) {
  std::ostringstream out;
  out << "t_max,policy,avg_learner_utility,avg_revenue,avg_energy,"
         "total_payment,avg_learning_loss\n";
  for (const AggregateRecord& a : res.aggregate) {
    out << format_double(a.t_max) << ',' << to_string(a.policy) << ','
        << format_double(a.avg_learner_utility) << ','
        << format_double(a.avg_revenue) << ',' << format_double(a.avg_energy_j)
        << ',' << format_double(a.total_payment) << ','
        << format_double(a.avg_learning_loss) << "\n";
  }
  return out.str();
}

std::string manifest_json(const RunConfig& cfg,
                          const std::vector<std::string>& files,
                          std::size_t n_orch) {
  nlohmann::ordered_json j;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hash_hex;
  j["seeds"] = cfg.sweep.seeds;
  j["t_max_list"] = cfg.sweep.t_max_list;
  std::vector<std::string> policy_names;
  for (Policy p : cfg.sweep.policies) policy_names.push_back(to_string(p));
  j["policies"] = policy_names;
  j["orchestrators"] = n_orch;
  j["files"] = files;
  j["columns"] = {
      {"t_max", "learning time frame in seconds"},
      {"policy", "association/strategy policy for the run"},
      {"seed", "scenario RNG seed (raw CSV only)"},
      {"avg_learner_utility",
       "mean normalized utility over participating learners"},
      {"avg_revenue", "mean payment received per participating learner"},
      {"avg_energy", "mean energy draw per participating learner, joules"},
      {"total_payment", "sum of all payments made by orchestrators"},
      {"avg_learning_loss",
       "mean analytic loss c1/(G tau^c2) over associated learners"},
      {"infeasible_learners",
       "learners whose weight exchange alone overruns the frame (raw CSV only)"},
      {"g_orchK", "global cycle count of orchestrator K (raw CSV only)"},
      {"participants_orchK",
       "participating learners of orchestrator K (raw CSV only)"},
  };
  return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) {
    throw std::runtime_error("emit_results: cannot write '" + p.string() + "'");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("emit_results: short write to '" + p.string() + "'");
  }
}

}  // namespace

EmittedFiles emit_results(const SweepResult& res, const RunConfig& cfg,
                          const std::string& dir) {
  if (res.raw.empty()) {
    throw std::invalid_argument("emit_results: empty results table");
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("emit_results: cannot create '" + dir + "': " +
                             ec.message());
  }
  const std::size_t n_orch = static_cast<std::size_t>(cfg.scenario.orchestrators);
  EmittedFiles out;
  out.raw_path = (fs::path(dir) / "raw.csv").string();
  out.aggregated_path = (fs::path(dir) / "aggregated.csv").string();
  out.manifest_path = (fs::path(dir) / "manifest.json").string();
  write_file(out.raw_path, raw_csv(res, n_orch));
  write_file(out.aggregated_path, aggregated_csv(res));
  write_file(out.manifest_path,
             manifest_json(cfg, {"raw.csv", "aggregated.csv"}, n_orch));
  return out;
}

}  // namespace mel
