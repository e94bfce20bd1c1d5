#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fedgame/empirics.hpp"

namespace fedgame {

inline constexpr double kJoulesPerWh = 3600.0;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Distribution of the local training time within a round.
struct TrainTimeDist {
  enum class Kind { uniform, constant };
  Kind kind = Kind::uniform;
  double lo = 5.0;  // s; the constant value when kind == constant
  double hi = 9.0;  // s

  double mean() const { return kind == Kind::constant ? lo : 0.5 * (lo + hi); }
  /// Maps u in [0, 1) to a training time.
  double quantile(double u) const { return kind == Kind::constant ? lo : lo + (hi - lo) * u; }
};

// Hardware power while training, obtained by calibrate_energy_params on the
// averaged table with the other defaults below (N = 50).
inline constexpr double kCalibratedHardwarePower = 176.2195;

struct EnergyParams {
  double p_hw = kCalibratedHardwarePower;  // W
  double p_idle = 96.85;                   // W
  double p_tx = dbm_to_watts(9.0);         // W
  double t_round = 10.0;                   // s
  TrainTimeDist t_train;

  void validate() const;
};

/// IEEE 802.11ax single-user upload of one model update.
struct WifiParams {
  double model_size_bits = 44.73e6 * 8.0;
  double legacy_symbol_s = 4e-6;
  int legacy_bits_per_symbol = 24;
  int n_subcarriers = 234;
  int n_spatial_streams = 1;
  int bits_per_subcarrier = 10;  // 1024-QAM
  double coding_rate = 5.0 / 6.0;
  double he_symbol_s = 13.6e-6;  // 12.8 us + 0.8 us guard interval
  double t_empty_slot = 9e-6;
  double t_sifs = 16e-6;
  double t_difs = 34e-6;
  double t_phy = 20e-6;
  double t_he_su = 100e-6;
  int l_rts = 160;
  int l_cts = 112;
  int l_ack = 240;
  int l_sf = 16;
  int l_mac = 320;
  int cw = 15;
  double max_ampdu_bits = 6500631.0 * 8.0;

  /// Data bits carried by one HE symbol (1950 with the defaults).
  int data_bits_per_symbol() const;

  void validate() const;
};

/// Time components of a complete upload, summed over all aggregates.
struct AirtimeBreakdown {
  int aggregates;
  double backoff;
  double control;  // RTS + CTS + ACK
  double ifs;      // 3 SIFS + DIFS per exchange
  double data_preamble;
  double data_symbols;
  double total;
};

/// Every aggregate is one RTS/CTS/DATA/ACK exchange preceded by the mean
/// fixed-window backoff (CW/2 empty slots). No collisions.
AirtimeBreakdown airtime_breakdown(const WifiParams& wifi);
double airtime(const WifiParams& wifi);

/// P_tx * T_tx, identical for every node and round.
double tx_energy(const WifiParams& wifi, const EnergyParams& ep);

struct EnergyBreakdown {
  double train = 0.0;
  double tx = 0.0;
  double idle = 0.0;
  double total = 0.0;
};

EnergyBreakdown node_round_energy(bool participating, const EnergyParams& ep, double t_train,
                                  double tx_joules);
EnergyBreakdown node_round_energy(bool participating, const EnergyParams& ep, double t_train,
                                  const WifiParams& wifi);

/// Energy (J) of one round. Participants are zero-based node ids below n;
/// t_train_per_node has one entry per node (ignored for non-participants).
double round_energy(std::span<const std::size_t> participants, std::size_t n,
                    const EnergyParams& ep, std::span<const double> t_train_per_node,
                    const WifiParams& wifi);

struct RoundRecord {
  std::size_t n = 0;
  std::vector<std::size_t> participants;
  std::vector<double> t_train;
};

/// Sum of round energies (J). The summation order is canonical, so any
/// permutation of the rounds gives the identical total.
double run_energy(std::span<const double> round_energies);
double run_energy(std::span<const RoundRecord> rounds, const EnergyParams& ep,
                  const WifiParams& wifi);

/// Mean energy (J) of one round when each of n nodes participates with
/// probability p and trains for the mean training time.
double expected_round_energy(int n, double p, const EnergyParams& ep, const WifiParams& wifi);

struct CalibrationRow {
  double p;
  double d_mean;
  double observed_wh;
  double model_wh;
  double rel_error;
};

struct CalibrationResult {
  EnergyParams params;
  std::vector<CalibrationRow> rows;
  double rms_rel_error;
};

/// Least-squares hardware power so that d_mean * expected_round_energy(n, p)
/// matches each row's e_mean; everything else is taken from ep0.
CalibrationResult calibrate_energy_params(std::span<const EmpiricalRow> rows,
                                          const EnergyParams& ep0, int n,
                                          const WifiParams& wifi);

std::string to_string(TrainTimeDist::Kind kind);

}  // namespace fedgame
