#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "fedgame/duration_model.hpp"
#include "fedgame/energy.hpp"
#include "fedgame/simulate.hpp"

namespace fedgame {

/// Settings shared by the command-line tools. Every field has a default;
/// a config file overrides defaults and command-line flags override both.
///
/// File format: INI-style sections [game], [energy], [wifi], [sim] with
/// `key = value` lines; `#` and `;` start comments. Unknown sections or keys
/// are errors naming the offending key.
struct RunConfig {
  // [game]
  int n = 50;
  double c = 0.0;
  double gamma = 0.0;
  int degree = 3;
  FitMode fit_mode = FitMode::deterministic_wls;
  int resamples = 100;
  std::uint64_t seed = 0;
  int grid_points = 2001;
  double refine_tol = 1e-8;
  double p_min = 1e-6;

  // [energy], [wifi]
  EnergyParams energy;
  WifiParams wifi;

  // [sim]
  SimMode mode = SimMode::progress;
  int reps = 100;
  int max_rounds = 0;
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Applies one `key = value` assignment from `section`.
void apply_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                        const std::string& value);

FitMode fit_mode_from_string(const std::string& name);
std::string to_string(FitMode mode);

}  // namespace fedgame
