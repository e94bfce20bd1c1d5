#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fedgame/duration_model.hpp"
#include "fedgame/energy.hpp"
#include "fedgame/pbdist.hpp"

namespace fedgame {

// Neither mode trains a model; both stand in for the accuracy-based stopping
// rule.
//   static_draw: one participant count drawn at the first round fixes the
//                run length round(d(m)); later rounds only accrue energy.
//   progress:    each round adds 1/d(k_t) progress, 1/d_cap when k_t = 0;
//                the run ends when progress reaches 1.
enum class SimMode { static_draw, progress };

std::string to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& name);

struct SimConfig {
  ProbabilityProfile profile;
  DurationModel dm;
  EnergyParams ep;
  WifiParams wifi;
  SimMode mode = SimMode::progress;
  std::uint64_t seed = 0;
  int max_rounds = 0;  // 0 selects 10 * d_cap
  int reps = 1;

  int effective_max_rounds() const;
  void validate() const;
};

struct SimResult {
  int rounds = 0;
  double energy_total = 0.0;  // J
  std::vector<double> per_node_energy;
  std::vector<int> participants_per_round;
  bool truncated = false;
};

SimResult simulate_run(const SimConfig& cfg);
SimResult simulate_run(const SimConfig& cfg, std::uint64_t seed);

/// Seed of replication `rep`, a fixed function of (master, rep).
std::uint64_t rep_seed(std::uint64_t master, std::uint64_t rep);

struct MonteCarloSummary {
  SimMode mode;
  int reps = 0;
  int completed = 0;
  double mean_rounds = 0.0;
  double std_rounds = 0.0;
  double mean_energy_wh = 0.0;
  double std_energy_wh = 0.0;
  double truncation_rate = 0.0;
  bool valid = false;  // false when every run was truncated
  std::vector<SimResult> runs;
};

/// Independent replications seeded by rep_seed(cfg.seed, rep). Statistics are
/// over completed runs (sample standard deviation, 0 for a single run) and do
/// not depend on the thread count.
MonteCarloSummary monte_carlo(const SimConfig& cfg, int reps, unsigned threads = 1);

/// Columns rep,rounds,energy_wh,truncated,rounds_std,energy_wh_std,valid,convergence_model;
/// one row per replication and a final row with rep = summary.
void write_monte_carlo_csv(std::ostream& out, const MonteCarloSummary& summary);

}  // namespace fedgame
