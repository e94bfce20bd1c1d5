#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "fedgame/empirics.hpp"
#include "fedgame/errors.hpp"
#include "fedgame/pbdist.hpp"
#include "fedgame/simulate.hpp"

using namespace fedgame;

namespace {

DurationModel table_model() {
  return fit_duration_model(load_empirical_table(TableSource::averaged), 50, 3);
}

SimConfig make_config(const ProbabilityProfile& prof, const DurationModel& dm, SimMode mode) {
  SimConfig cfg{prof, dm};
  cfg.mode = mode;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("full participation in progress mode") {
  const auto dm = table_model();
  const auto cfg = make_config(ProbabilityProfile::symmetric(50, 1.0), dm, SimMode::progress);
  const auto r = simulate_run(cfg);
  CHECK(r.rounds == static_cast<int>(std::ceil(dm.eval(50) - 1e-9)));
  CHECK_FALSE(r.truncated);
  for (int k : r.participants_per_round) CHECK(k == 50);
}

TEST_CASE("nobody participates") {
  const auto dm = table_model();
  auto cfg = make_config(ProbabilityProfile::symmetric(50, 0.0), dm, SimMode::progress);
  cfg.max_rounds = 20;
  const auto r = simulate_run(cfg);
  CHECK(r.truncated);
  CHECK(r.rounds == 20);
  CHECK(r.energy_total == doctest::Approx(20 * 50 * 968.5));

  cfg.max_rounds = 0;
  const auto full = simulate_run(cfg);
  CHECK_FALSE(full.truncated);
  CHECK(full.rounds == static_cast<int>(std::ceil(dm.d_cap())));
}

TEST_CASE("runs are reproducible") {
  const auto dm = table_model();
  for (auto mode : {SimMode::progress, SimMode::static_draw}) {
    const auto cfg = make_config(ProbabilityProfile::symmetric(50, 0.37), dm, mode);
    const auto a = simulate_run(cfg);
    const auto b = simulate_run(cfg);
    CHECK(a.rounds == b.rounds);
    CHECK(a.energy_total == b.energy_total);
    CHECK(a.per_node_energy == b.per_node_energy);
    CHECK(a.participants_per_round == b.participants_per_round);
  }
}

TEST_CASE("participant counts follow the Poisson-Binomial law") {
  std::vector<double> p(12);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.05 + 0.075 * i;
  const ProbabilityProfile prof(p);
  const auto dm = DurationModel::constant(12, 1.0);
  std::map<int, int> hist;
  int total = 0;
  for (std::uint64_t rep = 0; rep < 4000; ++rep) {
    const auto r = simulate_run(make_config(prof, dm, SimMode::static_draw), rep_seed(3, rep));
    for (int k : r.participants_per_round) {
      ++hist[k];
      ++total;
    }
  }
  const auto pmf = poibin_pmf(prof);
  // Pool sparse tails so every expected count is at least 5.
  double stat = 0.0;
  int bins = 0;
  double exp_acc = 0.0, obs_acc = 0.0;
  for (std::size_t m = 0; m < pmf.size(); ++m) {
    exp_acc += pmf[m] * total;
    obs_acc += hist[static_cast<int>(m)];
    if (exp_acc >= 5.0 || m + 1 == pmf.size()) {
      stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
      ++bins;
      exp_acc = obs_acc = 0.0;
    }
  }
  const boost::math::chi_squared chi(bins - 1);
  const double pvalue = 1.0 - boost::math::cdf(chi, stat);
  CHECK(pvalue > 1e-4);
}

TEST_CASE("static draw mean matches the analytic expectation") {
  const auto dm = table_model();
  for (double p : {0.2, 0.5}) {
    const auto prof = ProbabilityProfile::symmetric(50, p);
    auto cfg = make_config(prof, dm, SimMode::static_draw);
    const auto s = monte_carlo(cfg, 4000, 4);
    // Oracle: the expectation over the same round-half-up durations.
    auto rounded = dm.tabulate(50);
    for (auto& d : rounded) d = std::floor(d + 0.5);
    const double want = expected_duration(poibin_pmf(prof), rounded);
    const double se = s.std_rounds / std::sqrt(static_cast<double>(s.completed));
    CHECK(std::abs(s.mean_rounds - want) <= 3.0 * se);
  }
}

TEST_CASE("monte carlo summary") {
  const auto dm = table_model();
  const auto cfg = make_config(ProbabilityProfile::symmetric(50, 0.5), dm, SimMode::progress);
  const auto one = monte_carlo(cfg, 1, 1);
  const auto run = simulate_run(cfg, rep_seed(cfg.seed, 0));
  CHECK(one.mean_rounds == run.rounds);
  CHECK(one.std_rounds == 0.0);
  CHECK(one.std_energy_wh == 0.0);
  CHECK(one.mean_energy_wh == doctest::Approx(run.energy_total / kJoulesPerWh));

  const auto many = monte_carlo(cfg, 200, 3);
  CHECK(many.mean_energy_wh == doctest::Approx(704.10).epsilon(0.15));

  const auto again = monte_carlo(cfg, 200, 1);
  std::ostringstream a, b;
  write_monte_carlo_csv(a, many);
  write_monte_carlo_csv(b, again);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("progress_standin") != std::string::npos);

  CHECK_THROWS_AS(monte_carlo(cfg, 0, 1), InvalidArgument);
}

TEST_CASE("all runs truncated gives an invalid summary") {
  const auto dm = table_model();
  auto cfg = make_config(ProbabilityProfile::symmetric(50, 0.0), dm, SimMode::progress);
  cfg.max_rounds = 3;
  const auto s = monte_carlo(cfg, 5, 2);
  CHECK_FALSE(s.valid);
  CHECK(s.truncation_rate == 1.0);
  std::ostringstream out;
  write_monte_carlo_csv(out, s);
  CHECK(out.str().find("summary,,,1.000000,,,0,") != std::string::npos);
}

TEST_CASE("simulation config errors") {
  const auto dm = DurationModel::constant(10, 5.0);
  auto cfg = make_config(ProbabilityProfile::symmetric(11, 0.5), dm, SimMode::progress);
  CHECK_THROWS_AS(simulate_run(cfg), InvalidArgument);
  CHECK(sim_mode_from_string("static") == SimMode::static_draw);
  CHECK_THROWS_AS(sim_mode_from_string("other"), InvalidArgument);
}
