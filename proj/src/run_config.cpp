#include "fedgame/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fedgame/errors.hpp"

namespace fedgame {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw InvalidArgument(fmt::format("key '{}': '{}' is not a number", key, v));
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw InvalidArgument(fmt::format("key '{}': '{}' is not an integer", key, v));
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || v.front() == '-') {
    throw InvalidArgument(fmt::format("key '{}': '{}' is not an unsigned integer", key, v));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

Setter real(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.*field = to_double(k, v);
  };
}

Setter integer(int RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.*field = static_cast<int>(to_integer(k, v));
  };
}

Setter micro(double WifiParams::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.wifi.*field = to_double(k, v) * 1e-6;
  };
}

Setter wifi_int(int WifiParams::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.wifi.*field = static_cast<int>(to_integer(k, v));
  };
}

Setter energy_real(double EnergyParams::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.energy.*field = to_double(k, v);
  };
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"game",
       {
           {"N", integer(&RunConfig::n)},
           {"n", integer(&RunConfig::n)},
           {"c", real(&RunConfig::c)},
           {"gamma", real(&RunConfig::gamma)},
           {"degree", integer(&RunConfig::degree)},
           {"fit_mode",
            [](RunConfig& c, const std::string&, const std::string& v) {
              c.fit_mode = fit_mode_from_string(v);
            }},
           {"resamples", integer(&RunConfig::resamples)},
           {"seed",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); }},
           {"grid_points", integer(&RunConfig::grid_points)},
           {"refine_tol", real(&RunConfig::refine_tol)},
           {"p_min", real(&RunConfig::p_min)},
       }},
      {"energy",
       {
           {"p_hw", energy_real(&EnergyParams::p_hw)},
           {"p_idle", energy_real(&EnergyParams::p_idle)},
           {"ptx_dbm",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.energy.p_tx = dbm_to_watts(to_double(k, v));
            }},
           {"ptx_w", energy_real(&EnergyParams::p_tx)},
           {"t_round", energy_real(&EnergyParams::t_round)},
           {"t_train_dist",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "uniform") {
                c.energy.t_train.kind = TrainTimeDist::Kind::uniform;
              } else if (v == "constant") {
                c.energy.t_train.kind = TrainTimeDist::Kind::constant;
              } else {
                throw InvalidArgument(fmt::format("key '{}': unknown distribution '{}'", k, v));
              }
            }},
           {"t_train_lo",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.energy.t_train.lo = to_double(k, v);
            }},
           {"t_train_hi",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.energy.t_train.hi = to_double(k, v);
            }},
           {"t_train",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.energy.t_train.kind = TrainTimeDist::Kind::constant;
              c.energy.t_train.lo = to_double(k, v);
            }},
       }},
      {"wifi",
       {
           {"model_size_mb",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.wifi.model_size_bits = to_double(k, v) * 8e6;
            }},
           {"model_size_bits",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.wifi.model_size_bits = to_double(k, v);
            }},
           {"legacy_symbol_us", micro(&WifiParams::legacy_symbol_s)},
           {"legacy_bits_per_symbol", wifi_int(&WifiParams::legacy_bits_per_symbol)},
           {"n_subcarriers", wifi_int(&WifiParams::n_subcarriers)},
           {"n_spatial_streams", wifi_int(&WifiParams::n_spatial_streams)},
           {"bits_per_subcarrier", wifi_int(&WifiParams::bits_per_subcarrier)},
           {"coding_rate",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.wifi.coding_rate = to_double(k, v);
            }},
           {"he_symbol_us", micro(&WifiParams::he_symbol_s)},
           {"t_empty_slot_us", micro(&WifiParams::t_empty_slot)},
           {"t_sifs_us", micro(&WifiParams::t_sifs)},
           {"t_difs_us", micro(&WifiParams::t_difs)},
           {"t_phy_us", micro(&WifiParams::t_phy)},
           {"t_he_su_us", micro(&WifiParams::t_he_su)},
           {"l_rts", wifi_int(&WifiParams::l_rts)},
           {"l_cts", wifi_int(&WifiParams::l_cts)},
           {"l_ack", wifi_int(&WifiParams::l_ack)},
           {"l_sf", wifi_int(&WifiParams::l_sf)},
           {"l_mac", wifi_int(&WifiParams::l_mac)},
           {"cw", wifi_int(&WifiParams::cw)},
           {"max_ampdu_bits",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.wifi.max_ampdu_bits = to_double(k, v);
            }},
       }},
      {"sim",
       {
           {"mode",
            [](RunConfig& c, const std::string&, const std::string& v) {
              c.mode = sim_mode_from_string(v);
            }},
           {"reps", integer(&RunConfig::reps)},
           {"max_rounds", integer(&RunConfig::max_rounds)},
       }},
  };
  return table;
}

}  // namespace

FitMode fit_mode_from_string(const std::string& name) {
  if (name == "deterministic_wls" || name == "wls") return FitMode::deterministic_wls;
  if (name == "stochastic_resample" || name == "resample") return FitMode::stochastic_resample;
  throw InvalidArgument(fmt::format("unknown fit mode '{}'", name));
}

std::string to_string(FitMode mode) {
  return mode == FitMode::deterministic_wls ? "deterministic_wls" : "stochastic_resample";
}

void apply_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                        const std::string& value) {
  const auto& table = setters();
  const auto sec = table.find(section);
  if (sec == table.end()) throw InvalidArgument(fmt::format("unknown section '{}'", section));
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) {
    throw InvalidArgument(fmt::format("unknown key '{}' in section [{}]", key, section));
  }
  it->second(cfg, key, value);
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(fmt::format("line {}: malformed section header", lineno), lineno);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!setters().contains(section)) {
        throw ParseError(fmt::format("line {}: unknown section '{}'", lineno, section), lineno);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(fmt::format("line {}: expected key = value", lineno), lineno);
    }
    if (section.empty()) {
      throw ParseError(fmt::format("line {}: key outside of a section", lineno), lineno);
    }
    try {
      apply_config_value(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InvalidArgument& e) {
      throw ParseError(fmt::format("line {}: {}", lineno, e.what()), lineno);
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open config file '{}'", path));
  return parse_run_config(in);
}

}  // namespace fedgame
