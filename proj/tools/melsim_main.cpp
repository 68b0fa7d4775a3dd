// melsim: two-round incentive game simulator for multi-orchestrator mobile
// edge learning. Runs (t_max, seed, policy) sweeps and writes plot-ready CSVs.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mel/config.hpp"
#include "mel/results.hpp"
#include "mel/scenario.hpp"
#include "mel/simulator.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& csv,
                                      const char* flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw mel::config_error(std::string(flag) + ": bad number '" + item + "'");
    }
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw mel::config_error(std::string("--seeds: bad seed '") + item + "'");
    }
  }
  return out;
}

void print_summary(const mel::SweepResult& res) {
  std::printf("%10s  %-8s  %12s  %12s  %12s  %12s  %12s\n", "t_max", "policy",
              "utility", "revenue", "energy_j", "payment", "loss");
  for (const mel::AggregateRecord& a : res.aggregate) {
    std::printf("%10.4g  %-8s  %12.5g  %12.5g  %12.5g  %12.5g  %12.5g\n",
                a.t_max, mel::to_string(a.policy).c_str(),
                a.avg_learner_utility, a.avg_revenue, a.avg_energy_j,
                a.total_payment, a.avg_learning_loss);
  }
}

void run_nash_audit(const mel::RunConfig& cfg) {
  for (std::uint64_t seed : cfg.sweep.seeds) {
    const mel::Scenario sc = mel::generate_scenario(cfg, seed);
    for (double t : cfg.sweep.t_max_list) {
      for (mel::Policy p : cfg.sweep.policies) {
        const mel::GameResult r =
            mel::run_game(sc, p, t, cfg.solver, cfg.baselines);
        if (r.nash_context.empty()) {
          std::printf("nash  policy=%s seed=%llu t_max=%g  (no active groups)\n",
                      mel::to_string(p).c_str(),
                      static_cast<unsigned long long>(seed), t);
          continue;
        }
        const mel::EquilibriumReport rep =
            mel::verify_nash(r.nash_context, 1e-5, 48);
        std::printf(
            "nash  policy=%s seed=%llu t_max=%g  learner_gain=%.3g "
            "orch_gain=%.3g  eps_nash=%s\n",
            mel::to_string(p).c_str(), static_cast<unsigned long long>(seed), t,
            rep.max_learner_gain, rep.max_orchestrator_gain,
            rep.is_epsilon_nash ? "yes" : "no");
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg incentive simulator for mobile edge learning"};
  std::string config_path;
  std::string out_dir;
  std::string seeds_csv, tmax_csv, policies_csv, mode;
  std::string dump_path;
  bool verify_nash_flag = false;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seeds", seeds_csv, "comma-separated seed list");
  app.add_option("--tmax", tmax_csv, "comma-separated T_max list, seconds");
  app.add_option("--policies", policies_csv,
                 "comma-separated subset of fba-opt,dba-ee,random");
  app.add_option("--mode", mode, "pl or fl (overrides config)");
  app.add_flag("--verify-nash", verify_nash_flag,
               "print a per-run equilibrium audit");
  app.add_option("--dump-config", dump_path,
                 "write the effective config as JSON and exit");
  app.add_flag("--quiet", quiet, "suppress the summary table");

  CLI11_PARSE(app, argc, argv);

  try {
    mel::RunConfig cfg = config_path.empty()
                             ? mel::RunConfig{}
                             : mel::parse_config(config_path);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (!seeds_csv.empty()) cfg.sweep.seeds = parse_seed_list(seeds_csv);
    if (!tmax_csv.empty()) {
      cfg.sweep.t_max_list = parse_double_list(tmax_csv, "--tmax");
    }
    if (!policies_csv.empty()) {
      cfg.sweep.policies.clear();
      std::stringstream ss(policies_csv);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) cfg.sweep.policies.push_back(mel::parse_policy(item));
      }
    }
    if (!mode.empty()) {
      if (mode == "pl") {
        cfg.scenario.mode = mel::Mode::PL;
      } else if (mode == "fl") {
        cfg.scenario.mode = mel::Mode::FL;
      } else {
        throw mel::config_error("--mode: expected pl or fl");
      }
      if (cfg.scenario.mode == mel::Mode::FL) cfg.scenario.recv_energy_j = 0.0;
    }
    mel::validate_config(cfg);

    if (!dump_path.empty()) {
      std::ofstream out(dump_path, std::ios::binary);
      if (!out) {
        throw std::runtime_error("cannot write '" + dump_path + "'");
      }
      out << mel::dump_config(cfg);
      return 0;
    }

    const mel::SweepResult res = mel::sweep(cfg);
    const mel::EmittedFiles files = mel::emit_results(res, cfg, cfg.output.dir);
    if (!quiet) {
      print_summary(res);
      std::printf("wrote %s, %s, %s\n", files.raw_path.c_str(),
                  files.aggregated_path.c_str(), files.manifest_path.c_str());
    }
    if (verify_nash_flag) run_nash_audit(cfg);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "melsim: " << e.what() << "\n";
    return 1;
  }
}
