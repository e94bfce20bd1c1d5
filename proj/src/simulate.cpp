#include "fedgame/simulate.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "fedgame/errors.hpp"
#include "parallel.hpp"

namespace fedgame {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform doubles in [0, 1) from the top 53 bits, identical on every platform.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

class RoundRunner {
 public:
  RoundRunner(const SimConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), stream_(seed), tx_(tx_energy(cfg.wifi, cfg.ep)) {
    result_.per_node_energy.assign(cfg.profile.size(), 0.0);
    active_.resize(cfg.profile.size());
  }

  // Draws who participates this round; returns the count.
  int draw() {
    int k = 0;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      active_[i] = stream_.uniform() < cfg_.profile[i];
      k += active_[i] ? 1 : 0;
    }
    return k;
  }

  // Books the energy of the last drawn round.
  void account(int k) {
    for (std::size_t i = 0; i < active_.size(); ++i) {
      const double t = active_[i] ? cfg_.ep.t_train.quantile(stream_.uniform()) : cfg_.ep.t_round;
      result_.per_node_energy[i] += node_round_energy(active_[i], cfg_.ep, t, tx_).total;
    }
    result_.participants_per_round.push_back(k);
    ++result_.rounds;
  }

  SimResult finish(bool truncated) {
    result_.truncated = truncated;
    result_.energy_total = 0.0;
    for (double e : result_.per_node_energy) result_.energy_total += e;
    return std::move(result_);
  }

 private:
  const SimConfig& cfg_;
  Stream stream_;
  double tx_;
  std::vector<bool> active_;
  SimResult result_;
};

double sample_std(double sum, double sum_sq, int n) {
  if (n < 2) return 0.0;
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

std::string to_string(SimMode mode) {
  return mode == SimMode::static_draw ? "static_draw" : "progress";
}

SimMode sim_mode_from_string(const std::string& name) {
  if (name == "static_draw" || name == "static") return SimMode::static_draw;
  if (name == "progress") return SimMode::progress;
  throw InvalidArgument(fmt::format("unknown simulation mode '{}'", name));
}

int SimConfig::effective_max_rounds() const {
  return max_rounds > 0 ? max_rounds : static_cast<int>(std::ceil(10.0 * dm.d_cap()));
}

void SimConfig::validate() const {
  ep.validate();
  wifi.validate();
  if (reps < 1) throw InvalidArgument(fmt::format("reps {} < 1", reps));
  if (max_rounds < 0) throw InvalidArgument(fmt::format("max_rounds {} < 0", max_rounds));
  if (profile.size() > static_cast<std::size_t>(dm.max_k())) {
    throw InvalidArgument(fmt::format("duration model covers k <= {}, profile has {} nodes",
                                      dm.max_k(), profile.size()));
  }
}

SimResult simulate_run(const SimConfig& cfg) { return simulate_run(cfg, cfg.seed); }

SimResult simulate_run(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int max_rounds = cfg.effective_max_rounds();
  RoundRunner runner(cfg, seed);

  if (cfg.mode == SimMode::static_draw) {
    const int m = runner.draw();
    const int d = static_cast<int>(std::floor(cfg.dm.eval(m) + 0.5));
    const int rounds = std::min(d, max_rounds);
    runner.account(m);
    for (int t = 1; t < rounds; ++t) runner.account(runner.draw());
    return runner.finish(d > max_rounds);
  }

  double progress = 0.0;
  for (int t = 0; t < max_rounds; ++t) {
    const int k = runner.draw();
    runner.account(k);
    progress += 1.0 / (k == 0 ? cfg.dm.d_cap() : cfg.dm.eval(k));
    if (progress >= 1.0 - 1e-12) return runner.finish(false);
  }
  return runner.finish(true);
}

std::uint64_t rep_seed(std::uint64_t master, std::uint64_t rep) {
  return splitmix64(splitmix64(master) ^ splitmix64(rep + 0x632BE59BD9B4E019ULL));
}

MonteCarloSummary monte_carlo(const SimConfig& cfg, int reps, unsigned threads) {
  if (reps < 1) throw InvalidArgument(fmt::format("reps {} < 1", reps));
  cfg.validate();
  MonteCarloSummary s;
  s.mode = cfg.mode;
  s.reps = reps;
  s.runs.resize(static_cast<std::size_t>(reps));
  detail::parallel_for(s.runs.size(), threads, [&](std::size_t rep) {
    s.runs[rep] = simulate_run(cfg, rep_seed(cfg.seed, rep));
  });

  double r_sum = 0.0, r_sq = 0.0, e_sum = 0.0, e_sq = 0.0;
  int truncated = 0;
  for (const auto& run : s.runs) {
    if (run.truncated) {
      ++truncated;
      continue;
    }
    const double e = run.energy_total / kJoulesPerWh;
    r_sum += run.rounds;
    r_sq += static_cast<double>(run.rounds) * run.rounds;
    e_sum += e;
    e_sq += e * e;
    ++s.completed;
  }
  s.truncation_rate = static_cast<double>(truncated) / reps;
  s.valid = s.completed > 0;
  if (s.valid) {
    s.mean_rounds = r_sum / s.completed;
    s.std_rounds = sample_std(r_sum, r_sq, s.completed);
    s.mean_energy_wh = e_sum / s.completed;
    s.std_energy_wh = sample_std(e_sum, e_sq, s.completed);
  }
  return s;
}

void write_monte_carlo_csv(std::ostream& out, const MonteCarloSummary& summary) {
  const auto model = to_string(summary.mode) + "_standin";
  out << "rep,rounds,energy_wh,truncated,rounds_std,energy_wh_std,valid,convergence_model\n";
  for (std::size_t rep = 0; rep < summary.runs.size(); ++rep) {
    const auto& run = summary.runs[rep];
    out << fmt::format("{},{},{:.6f},{},,,,{}\n", rep, run.rounds,
                       run.energy_total / kJoulesPerWh, run.truncated ? 1 : 0, model);
  }
  if (summary.valid) {
    out << fmt::format("summary,{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},1,{}\n", summary.mean_rounds,
                       summary.mean_energy_wh, summary.truncation_rate, summary.std_rounds,
                       summary.std_energy_wh, model);
  } else {
    out << fmt::format("summary,,,{:.6f},,,0,{}\n", summary.truncation_rate, model);
  }
}

}  // namespace fedgame
