#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fedgame/empirics.hpp"
#include "fedgame/energy.hpp"
#include "fedgame/errors.hpp"

using namespace fedgame;

TEST_CASE("dBm conversion") {
  CHECK(dbm_to_watts(9.0) == doctest::Approx(7.943e-3).epsilon(1e-3));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
}

TEST_CASE("default airtime") {
  const WifiParams w;
  CHECK(w.data_bits_per_symbol() == 1950);
  const auto b = airtime_breakdown(w);
  CHECK(b.aggregates == 7);
  // Payload oracle: bits divided by the HE data rate.
  const double payload = w.model_size_bits / (1950.0 / 13.6e-6);
  CHECK(b.data_symbols == doctest::Approx(payload).epsilon(1e-3));
  CHECK(b.total > payload);
  CHECK(b.total - payload < 0.01);
  CHECK(b.total == doctest::Approx(b.backoff + b.control + b.ifs + b.data_preamble + b.data_symbols));
  // Per-exchange overhead by hand: CW/2 slots, RTS/CTS/ACK with preambles, 3 SIFS + DIFS.
  const double frames =
      3 * 20e-6 + (std::ceil(160 / 24.0) + std::ceil(112 / 24.0) + std::ceil(240 / 24.0)) * 4e-6;
  const double exchange = 7.5 * 9e-6 + frames + 3 * 16e-6 + 34e-6;
  CHECK(b.backoff + b.control + b.ifs == doctest::Approx(7 * exchange));
}

TEST_CASE("airtime monotone in payload") {
  WifiParams w;
  w.model_size_bits = 0.0;
  const auto empty = airtime_breakdown(w);
  CHECK(empty.data_symbols <= w.he_symbol_s);
  CHECK(empty.total == doctest::Approx(empty.backoff + empty.control + empty.ifs +
                                       empty.data_preamble + empty.data_symbols));
  w.model_size_bits = 10e6;
  const auto one = airtime_breakdown(w);
  w.model_size_bits = 20e6;
  const auto two = airtime_breakdown(w);
  CHECK(two.data_symbols >= 2.0 * one.data_symbols - w.he_symbol_s);
  CHECK(two.total > one.total);
  w.model_size_bits = -1.0;
  CHECK_THROWS_AS(airtime(w), InvalidArgument);
}

TEST_CASE("tx energy") {
  const WifiParams w;
  EnergyParams ep;
  ep.p_tx = dbm_to_watts(9.0);
  const double e = tx_energy(w, ep);
  CHECK(e == doctest::Approx(dbm_to_watts(9.0) * airtime(w)));
  CHECK(e == tx_energy(w, ep));
}

TEST_CASE("node round energy") {
  EnergyParams ep;
  const auto idle = node_round_energy(false, ep, 7.0, WifiParams{});
  CHECK(idle.total == doctest::Approx(968.5).epsilon(1e-12));
  CHECK(idle.idle == doctest::Approx(96.85 * 10.0));
  CHECK(idle.train == 0.0);
  CHECK(idle.tx == 0.0);

  const auto full = node_round_energy(true, ep, ep.t_round, 0.02);
  CHECK(full.idle == 0.0);
  const auto part = node_round_energy(true, ep, 6.0, 0.02);
  CHECK(part.train == ep.p_hw * 6.0);
  CHECK(part.tx == 0.02);
  CHECK(part.idle == doctest::Approx(96.85 * 4.0));
  CHECK_THROWS_AS(node_round_energy(true, ep, 11.0, 0.02), ContributionDiscarded);
}

TEST_CASE("round and run energy") {
  const EnergyParams ep;
  const WifiParams w;
  const std::vector<double> t2{5.0, 7.0};
  CHECK(round_energy({}, 2, ep, t2, w) == doctest::Approx(2 * 968.5));

  const std::vector<std::size_t> first{0};
  const double tx = tx_energy(w, ep);
  CHECK(round_energy(first, 2, ep, t2, w) ==
        doctest::Approx(968.5 + ep.p_hw * 5.0 + tx + 96.85 * 5.0));

  const std::vector<std::size_t> all{0, 1, 2};
  const std::vector<double> t3(3, 6.0);
  const double per = ep.p_hw * 6.0 + tx + 96.85 * 4.0;
  CHECK(round_energy(all, 3, ep, t3, w) == doctest::Approx(3 * per));

  const std::vector<std::size_t> dup{1, 1};
  CHECK_THROWS_AS(round_energy(dup, 2, ep, t2, w), InvalidArgument);
  const std::vector<std::size_t> out_of_range{2};
  CHECK_THROWS_AS(round_energy(out_of_range, 2, ep, t2, w), InvalidArgument);

  CHECK(run_energy(std::vector<double>{}) == 0.0);
  RoundRecord rec{2, {0}, t2};
  const std::vector<RoundRecord> recs(5, rec);
  CHECK(run_energy(recs, ep, w) == doctest::Approx(5 * round_energy(first, 2, ep, t2, w)));

  std::vector<double> e{0.1, 1e9, 3.3, 1e-7, 42.0};
  const double a = run_energy(e);
  std::reverse(e.begin(), e.end());
  CHECK(run_energy(e) == a);
}

TEST_CASE("expected round energy matches a weighted sum") {
  const EnergyParams ep;
  const WifiParams w;
  const double active = ep.p_hw * 7.0 + tx_energy(w, ep) + 96.85 * 3.0;
  CHECK(expected_round_energy(50, 0.3, ep, w) ==
        doctest::Approx(50 * (0.3 * active + 0.7 * 968.5)));
}

TEST_CASE("calibration round trip") {
  EnergyParams truth;
  truth.p_hw = 210.0;
  const WifiParams w;
  std::vector<EmpiricalRow> rows;
  for (double p : {0.2, 0.4, 0.6, 0.8}) {
    const double d = 60.0 - 30.0 * p;
    rows.push_back({p, d, 1.0, d * expected_round_energy(50, p, truth, w) / kJoulesPerWh, 1.0,
                    TableSource::averaged});
  }
  EnergyParams start;
  start.p_hw = 1.0;
  const auto res = calibrate_energy_params(rows, start, 50, w);
  CHECK(res.params.p_hw == doctest::Approx(210.0).epsilon(0.01));
  CHECK(res.rms_rel_error < 1e-9);

  const std::vector<EmpiricalRow> one{rows[1]};
  const auto single = calibrate_energy_params(one, start, 50, w);
  CHECK(single.rows[0].model_wh == doctest::Approx(rows[1].e_mean).epsilon(1e-12));

  std::vector<EmpiricalRow> nobody{{0.0, 10.0, 0.0, 100.0, 0.0, TableSource::averaged}};
  CHECK_THROWS_AS(calibrate_energy_params(nobody, start, 50, w), ModelRegimeError);
}

TEST_CASE("frozen hardware power matches the averaged table calibration") {
  const auto rows = load_empirical_table(TableSource::averaged);
  const auto res = calibrate_energy_params(rows, EnergyParams{}, 50, WifiParams{});
  CHECK(kCalibratedHardwarePower == doctest::Approx(res.params.p_hw).epsilon(1e-6));
  int within = 0;
  for (const auto& r : res.rows) within += std::abs(r.rel_error) <= 0.15 ? 1 : 0;
  CHECK(within >= 0.8 * static_cast<double>(res.rows.size()));
}

TEST_CASE("parameter validation") {
  EnergyParams ep;
  ep.t_round = 0.0;
  CHECK_THROWS_AS(ep.validate(), InvalidArgument);
  ep = EnergyParams{};
  ep.t_train.hi = 12.0;
  CHECK_THROWS(ep.validate());
  WifiParams w;
  w.cw = -1;
  CHECK_THROWS_AS(w.validate(), InvalidArgument);
}
