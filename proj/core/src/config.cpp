#include "mel/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mel {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Policy p) {
  switch (p) {
    case Policy::FbaOpt: return "fba-opt";
    case Policy::DbaEe: return "dba-ee";
    case Policy::Random: return "random";
  }
  return "?";
}

Policy parse_policy(const std::string& name) {
  if (name == "fba-opt") return Policy::FbaOpt;
  if (name == "dba-ee") return Policy::DbaEe;
  if (name == "random") return Policy::Random;
  throw config_error("unknown policy '" + name +
                     "' (expected fba-opt, dba-ee or random)");
}

namespace {

std::string mode_name(Mode m) { return m == Mode::PL ? "pl" : "fl"; }

Mode parse_mode(const std::string& s, const std::string& path) {
  if (s == "pl") return Mode::PL;
  if (s == "fl") return Mode::FL;
  throw config_error(path + ": expected \"pl\" or \"fl\" (got \"" + s + "\")");
}

// Pulls `key` out of `obj` into `dst` when present, with type checking.
template <typename T>
void read_field(const ordered_json& obj, const std::string& path,
                const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(path + "." + key + ": wrong type");
  }
}

void check_keys(const ordered_json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw config_error(path + "." + it.key() + ": unknown key");
  }
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw config_error(msg);
}

}  // namespace

void validate_config(const RunConfig& c) {
  const ScenarioConfig& s = c.scenario;
  require(s.orchestrators >= 1, "scenario.orchestrators: must be >= 1");
  require(s.learners >= 1, "scenario.learners: must be >= 1");
  require(s.distance_min_m > 0.0 && s.distance_max_m >= s.distance_min_m,
          "scenario.distance_min_m/max_m: need 0 < min <= max");
  require(!s.cpu_freq_choices_hz.empty(),
          "scenario.cpu_freq_choices_hz: must be non-empty");
  for (double f : s.cpu_freq_choices_hz) {
    require(f > 0.0, "scenario.cpu_freq_choices_hz: entries must be positive");
  }
  require(s.dataset_size > 0.0, "scenario.dataset_size: must be positive");
  require(s.feature_len > 0.0, "scenario.feature_len: must be positive");
  require(s.bits_per_feature > 0.0, "scenario.bits_per_feature: must be positive");
  require(s.bits_per_weight > 0.0, "scenario.bits_per_weight: must be positive");
  require(static_cast<int>(s.hidden_layers.size()) == s.orchestrators,
          "scenario.hidden_layers: need one entry per orchestrator");
  for (int h : s.hidden_layers) {
    require(h >= 1, "scenario.hidden_layers: entries must be >= 1");
  }
  require(s.layer_width > 0.0, "scenario.layer_width: must be positive");
  require(s.input_width > 0.0, "scenario.input_width: must be positive");
  require(s.output_width > 0.0, "scenario.output_width: must be positive");
  require(s.cycles_per_weight > 0.0, "scenario.cycles_per_weight: must be positive");
  require(static_cast<int>(s.init_prices.size()) == s.orchestrators,
          "scenario.init_prices: need one entry per orchestrator");
  for (double p : s.init_prices) {
    require(p > 0.0, "scenario.init_prices: entries must be positive");
  }
  require(s.c1 > 0.0, "scenario.c1: must be positive");
  require(s.c2 > 0.0, "scenario.c2: must be positive");
  require(s.tau_min >= 1.0 && s.tau_max >= s.tau_min,
          "scenario.tau_min/tau_max: need 1 <= tau_min <= tau_max");
  require(s.g_min >= 1, "scenario.g_min: must be >= 1");
  require(s.n_max > 0.0 && s.n_max <= 1.0, "scenario.n_max: must be in (0, 1]");
  require(s.recv_energy_j >= 0.0, "scenario.recv_energy_j: must be >= 0");

  require(c.channel.bandwidth_hz > 0.0, "channel.bandwidth_hz: must be positive");
  require(c.channel.noise_w > 0.0, "channel.noise_w: must be positive");
  require(c.channel.tx_power_w > 0.0, "channel.tx_power_w: must be positive");
  require(c.channel.pathloss_exp > 0.0, "channel.pathloss_exp: must be positive");
  require(c.hardware.mu > 0.0, "hardware.mu: must be positive");
  require(c.hardware.xi > 0.0, "hardware.xi: must be positive");
  require(c.norms.e_max >= 0.0, "norms.e_max: must be >= 0 (0 = auto)");
  require(c.norms.r_max >= 0.0, "norms.r_max: must be >= 0 (0 = auto)");
  require(c.norms.p_max >= 0.0, "norms.p_max: must be >= 0 (0 = auto)");
  require(c.norms.f_max >= 0.0, "norms.f_max: must be >= 0 (0 = auto)");

  require(c.solver.grad_tol > 0.0, "solver.grad_tol: must be positive");
  require(c.solver.max_steps >= 1, "solver.max_steps: must be >= 1");
  require(c.solver.refine_grid >= 2, "solver.refine_grid: must be >= 2");
  require(c.solver.backtrack_factor > 0.0 && c.solver.backtrack_factor < 1.0,
          "solver.backtrack_factor: must be in (0, 1)");
  require(c.solver.init_step_frac > 0.0, "solver.init_step_frac: must be positive");
  require(c.solver.price_floor_frac >= 0.0 && c.solver.price_floor_frac < 1.0,
          "solver.price_floor_frac: must be in [0, 1)");
  require(c.solver.price_widen_rel > 0.0, "solver.price_widen_rel: must be positive");

  require(c.baselines.dba_price_margin > 0.0,
          "baselines.dba_price_margin: must be positive");

  require(!c.sweep.t_max_list.empty(), "sweep.t_max_list: must be non-empty");
  for (double t : c.sweep.t_max_list) {
    require(t > 0.0, "sweep.t_max_list: entries must be positive");
  }
  require(!c.sweep.seeds.empty(), "sweep.seeds: must be non-empty");
  require(!c.sweep.policies.empty(), "sweep.policies: must be non-empty");
  require(!c.output.dir.empty(), "output.dir: must be non-empty");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (trimmed.empty()) {
    validate_config(cfg);
    return cfg;
  }
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: top level must be an object");
  check_keys(j, "config",
             {"scenario", "channel", "hardware", "norms", "solver", "baselines",
              "sweep", "output"});

  if (j.contains("scenario")) {
    const auto& o = j["scenario"];
    check_keys(o, "scenario",
               {"orchestrators", "learners", "distance_min_m", "distance_max_m",
                "cpu_freq_choices_hz", "dataset_size", "feature_len",
                "bits_per_feature", "bits_per_weight", "hidden_layers",
                "layer_width", "input_width", "output_width", "cycles_per_weight",
                "init_prices", "c1", "c2", "tau_min", "tau_max", "g_min", "n_max",
                "recv_energy_j", "mode"});
    ScenarioConfig& s = cfg.scenario;
    read_field(o, "scenario", "orchestrators", s.orchestrators);
    read_field(o, "scenario", "learners", s.learners);
    read_field(o, "scenario", "distance_min_m", s.distance_min_m);
    read_field(o, "scenario", "distance_max_m", s.distance_max_m);
    read_field(o, "scenario", "cpu_freq_choices_hz", s.cpu_freq_choices_hz);
    read_field(o, "scenario", "dataset_size", s.dataset_size);
    read_field(o, "scenario", "feature_len", s.feature_len);
    read_field(o, "scenario", "bits_per_feature", s.bits_per_feature);
    read_field(o, "scenario", "bits_per_weight", s.bits_per_weight);
    read_field(o, "scenario", "hidden_layers", s.hidden_layers);
    read_field(o, "scenario", "layer_width", s.layer_width);
    read_field(o, "scenario", "input_width", s.input_width);
    read_field(o, "scenario", "output_width", s.output_width);
    read_field(o, "scenario", "cycles_per_weight", s.cycles_per_weight);
    read_field(o, "scenario", "init_prices", s.init_prices);
    read_field(o, "scenario", "c1", s.c1);
    read_field(o, "scenario", "c2", s.c2);
    read_field(o, "scenario", "tau_min", s.tau_min);
    read_field(o, "scenario", "tau_max", s.tau_max);
    read_field(o, "scenario", "g_min", s.g_min);
    read_field(o, "scenario", "n_max", s.n_max);
    read_field(o, "scenario", "recv_energy_j", s.recv_energy_j);
    if (o.contains("mode")) {
      s.mode = parse_mode(o.at("mode").get<std::string>(), "scenario.mode");
    }
  }
  if (j.contains("channel")) {
    const auto& o = j["channel"];
    check_keys(o, "channel",
               {"bandwidth_hz", "noise_w", "tx_power_w", "pathloss_exp",
                "unit_mean_rayleigh_fading"});
    read_field(o, "channel", "bandwidth_hz", cfg.channel.bandwidth_hz);
    read_field(o, "channel", "noise_w", cfg.channel.noise_w);
    read_field(o, "channel", "tx_power_w", cfg.channel.tx_power_w);
    read_field(o, "channel", "pathloss_exp", cfg.channel.pathloss_exp);
    read_field(o, "channel", "unit_mean_rayleigh_fading",
               cfg.channel.unit_mean_rayleigh_fading);
  }
  if (j.contains("hardware")) {
    const auto& o = j["hardware"];
    check_keys(o, "hardware", {"mu", "xi"});
    read_field(o, "hardware", "mu", cfg.hardware.mu);
    read_field(o, "hardware", "xi", cfg.hardware.xi);
  }
  if (j.contains("norms")) {
    const auto& o = j["norms"];
    check_keys(o, "norms", {"e_max", "r_max", "p_max", "f_max"});
    read_field(o, "norms", "e_max", cfg.norms.e_max);
    read_field(o, "norms", "r_max", cfg.norms.r_max);
    read_field(o, "norms", "p_max", cfg.norms.p_max);
    read_field(o, "norms", "f_max", cfg.norms.f_max);
  }
  if (j.contains("solver")) {
    const auto& o = j["solver"];
    check_keys(o, "solver",
               {"grad_tol", "max_steps", "refine_grid", "backtrack_factor",
                "init_step_frac", "price_floor_frac", "price_widen_rel"});
    read_field(o, "solver", "grad_tol", cfg.solver.grad_tol);
    read_field(o, "solver", "max_steps", cfg.solver.max_steps);
    read_field(o, "solver", "refine_grid", cfg.solver.refine_grid);
    read_field(o, "solver", "backtrack_factor", cfg.solver.backtrack_factor);
    read_field(o, "solver", "init_step_frac", cfg.solver.init_step_frac);
    read_field(o, "solver", "price_floor_frac", cfg.solver.price_floor_frac);
    read_field(o, "solver", "price_widen_rel", cfg.solver.price_widen_rel);
  }
  if (j.contains("baselines")) {
    const auto& o = j["baselines"];
    check_keys(o, "baselines", {"dba_price_margin"});
    read_field(o, "baselines", "dba_price_margin", cfg.baselines.dba_price_margin);
  }
  if (j.contains("sweep")) {
    const auto& o = j["sweep"];
    check_keys(o, "sweep", {"t_max_list", "seeds", "policies"});
    read_field(o, "sweep", "t_max_list", cfg.sweep.t_max_list);
    read_field(o, "sweep", "seeds", cfg.sweep.seeds);
    if (o.contains("policies")) {
      cfg.sweep.policies.clear();
      for (const auto& p : o.at("policies")) {
        cfg.sweep.policies.push_back(parse_policy(p.get<std::string>()));
      }
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "output", {"dir"});
    read_field(o, "output", "dir", cfg.output.dir);
  }
  validate_config(cfg);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string dump_config(const RunConfig& c) {
  ordered_json j;
  j["scenario"] = {
      {"orchestrators", c.scenario.orchestrators},
      {"learners", c.scenario.learners},
      {"distance_min_m", c.scenario.distance_min_m},
      {"distance_max_m", c.scenario.distance_max_m},
      {"cpu_freq_choices_hz", c.scenario.cpu_freq_choices_hz},
      {"dataset_size", c.scenario.dataset_size},
      {"feature_len", c.scenario.feature_len},
      {"bits_per_feature", c.scenario.bits_per_feature},
      {"bits_per_weight", c.scenario.bits_per_weight},
      {"hidden_layers", c.scenario.hidden_layers},
      {"layer_width", c.scenario.layer_width},
      {"input_width", c.scenario.input_width},
      {"output_width", c.scenario.output_width},
      {"cycles_per_weight", c.scenario.cycles_per_weight},
      {"init_prices", c.scenario.init_prices},
      {"c1", c.scenario.c1},
      {"c2", c.scenario.c2},
      {"tau_min", c.scenario.tau_min},
      {"tau_max", c.scenario.tau_max},
      {"g_min", c.scenario.g_min},
      {"n_max", c.scenario.n_max},
      {"recv_energy_j", c.scenario.recv_energy_j},
      {"mode", mode_name(c.scenario.mode)},
  };
  j["channel"] = {
      {"bandwidth_hz", c.channel.bandwidth_hz},
      {"noise_w", c.channel.noise_w},
      {"tx_power_w", c.channel.tx_power_w},
      {"pathloss_exp", c.channel.pathloss_exp},
      {"unit_mean_rayleigh_fading", c.channel.unit_mean_rayleigh_fading},
  };
  j["hardware"] = {{"mu", c.hardware.mu}, {"xi", c.hardware.xi}};
  j["norms"] = {
      {"e_max", c.norms.e_max},
      {"r_max", c.norms.r_max},
      {"p_max", c.norms.p_max},
      {"f_max", c.norms.f_max},
  };
  j["solver"] = {
      {"grad_tol", c.solver.grad_tol},
      {"max_steps", c.solver.max_steps},
      {"refine_grid", c.solver.refine_grid},
      {"backtrack_factor", c.solver.backtrack_factor},
      {"init_step_frac", c.solver.init_step_frac},
      {"price_floor_frac", c.solver.price_floor_frac},
      {"price_widen_rel", c.solver.price_widen_rel},
  };
  j["baselines"] = {{"dba_price_margin", c.baselines.dba_price_margin}};
  std::vector<std::string> policy_names;
  for (Policy p : c.sweep.policies) policy_names.push_back(to_string(p));
  j["sweep"] = {
      {"t_max_list", c.sweep.t_max_list},
      {"seeds", c.sweep.seeds},
      {"policies", policy_names},
  };
  j["output"] = {{"dir", c.output.dir}};
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string s = dump_config(c);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace mel
