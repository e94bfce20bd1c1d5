#include "fedgame/energy.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "fedgame/errors.hpp"

namespace fedgame {

namespace {

double legacy_frame(const WifiParams& w, int bits) {
  const auto symbols = (bits + w.legacy_bits_per_symbol - 1) / w.legacy_bits_per_symbol;
  return w.t_phy + symbols * w.legacy_symbol_s;
}

}  // namespace

void EnergyParams::validate() const {
  if (!(p_hw > 0.0)) throw InvalidArgument(fmt::format("p_hw {} must be positive", p_hw));
  if (!(p_idle > 0.0)) throw InvalidArgument(fmt::format("p_idle {} must be positive", p_idle));
  if (!(p_tx > 0.0)) throw InvalidArgument(fmt::format("p_tx {} must be positive", p_tx));
  if (!(t_round > 0.0)) throw InvalidArgument(fmt::format("t_round {} must be positive", t_round));
  if (!(t_train.lo > 0.0)) throw InvalidArgument("training time must be positive");
  if (t_train.kind == TrainTimeDist::Kind::uniform && !(t_train.hi >= t_train.lo)) {
    throw InvalidArgument("training time upper bound below lower bound");
  }
  const double upper = t_train.kind == TrainTimeDist::Kind::constant ? t_train.lo : t_train.hi;
  if (upper > t_round) {
    throw InvalidArgument(fmt::format("training time {} s exceeds round length {} s", upper, t_round));
  }
}

int WifiParams::data_bits_per_symbol() const {
  return static_cast<int>(std::floor(n_subcarriers * n_spatial_streams * bits_per_subcarrier *
                                     coding_rate + 1e-9));
}

void WifiParams::validate() const {
  if (data_bits_per_symbol() <= 0) throw InvalidArgument("data bits per HE symbol is zero");
  if (!(model_size_bits >= 0.0)) throw InvalidArgument("model size must be non-negative");
  if (legacy_bits_per_symbol <= 0) throw InvalidArgument("legacy bits per symbol must be positive");
  for (double t : {legacy_symbol_s, he_symbol_s, t_empty_slot, t_sifs, t_difs, t_phy, t_he_su}) {
    if (!(t > 0.0)) throw InvalidArgument("all wifi durations must be positive");
  }
  for (int l : {l_rts, l_cts, l_ack, l_sf, l_mac}) {
    if (l <= 0) throw InvalidArgument("all wifi frame lengths must be positive");
  }
  if (cw < 0) throw InvalidArgument("contention window must be non-negative");
  if (!(max_ampdu_bits > 0.0)) throw InvalidArgument("aggregate cap must be positive");
}

AirtimeBreakdown airtime_breakdown(const WifiParams& wifi) {
  wifi.validate();
  const double dbps = wifi.data_bits_per_symbol();
  const int aggregates =
      std::max(1, static_cast<int>(std::ceil(wifi.model_size_bits / wifi.max_ampdu_bits)));

  AirtimeBreakdown b{};
  b.aggregates = aggregates;
  const double header = wifi.l_sf + wifi.l_mac;
  double remaining = wifi.model_size_bits;
  for (int a = 0; a < aggregates; ++a) {
    const double payload = std::min(remaining, wifi.max_ampdu_bits);
    remaining -= payload;
    b.backoff += 0.5 * wifi.cw * wifi.t_empty_slot;
    b.control += legacy_frame(wifi, wifi.l_rts) + legacy_frame(wifi, wifi.l_cts) +
                 legacy_frame(wifi, wifi.l_ack);
    b.ifs += 3.0 * wifi.t_sifs + wifi.t_difs;
    b.data_preamble += wifi.t_phy + wifi.t_he_su;
    b.data_symbols += std::ceil((header + payload) / dbps) * wifi.he_symbol_s;
  }
  b.total = b.backoff + b.control + b.ifs + b.data_preamble + b.data_symbols;
  return b;
}

double airtime(const WifiParams& wifi) { return airtime_breakdown(wifi).total; }

double tx_energy(const WifiParams& wifi, const EnergyParams& ep) {
  return ep.p_tx * airtime(wifi);
}

EnergyBreakdown node_round_energy(bool participating, const EnergyParams& ep, double t_train,
                                  double tx_joules) {
  EnergyBreakdown e;
  if (participating) {
    if (!(t_train > 0.0)) throw InvalidArgument(fmt::format("training time {} s", t_train));
    if (t_train > ep.t_round) {
      throw ContributionDiscarded(fmt::format(
          "training took {} s, longer than the {} s round; update discarded", t_train, ep.t_round));
    }
    e.train = ep.p_hw * t_train;
    e.tx = tx_joules;
    e.idle = ep.p_idle * (ep.t_round - t_train);
  } else {
    e.idle = ep.p_idle * ep.t_round;
  }
  e.total = e.train + e.tx + e.idle;
  return e;
}

EnergyBreakdown node_round_energy(bool participating, const EnergyParams& ep, double t_train,
                                  const WifiParams& wifi) {
  return node_round_energy(participating, ep, t_train, participating ? tx_energy(wifi, ep) : 0.0);
}

double round_energy(std::span<const std::size_t> participants, std::size_t n,
                    const EnergyParams& ep, std::span<const double> t_train_per_node,
                    const WifiParams& wifi) {
  if (t_train_per_node.size() != n) {
    throw InvalidArgument(
        fmt::format("{} training times for {} nodes", t_train_per_node.size(), n));
  }
  std::vector<bool> active(n, false);
  for (auto id : participants) {
    if (id >= n) throw InvalidArgument(fmt::format("participant {} not below {}", id, n));
    if (active[id]) throw InvalidArgument(fmt::format("participant {} listed twice", id));
    active[id] = true;
  }
  const double tx = participants.empty() ? 0.0 : tx_energy(wifi, ep);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += node_round_energy(active[i], ep, t_train_per_node[i], tx).total;
  }
  return total;
}

double run_energy(std::span<const double> round_energies) {
  std::vector<double> sorted(round_energies.begin(), round_energies.end());
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0);
}

double run_energy(std::span<const RoundRecord> rounds, const EnergyParams& ep,
                  const WifiParams& wifi) {
  std::vector<double> per_round;
  per_round.reserve(rounds.size());
  for (const auto& r : rounds) {
    per_round.push_back(round_energy(r.participants, r.n, ep, r.t_train, wifi));
  }
  return run_energy(per_round);
}

double expected_round_energy(int n, double p, const EnergyParams& ep, const WifiParams& wifi) {
  const double t = ep.t_train.mean();
  const double active = ep.p_hw * t + tx_energy(wifi, ep) + ep.p_idle * (ep.t_round - t);
  const double idle = ep.p_idle * ep.t_round;
  return n * (p * active + (1.0 - p) * idle);
}

CalibrationResult calibrate_energy_params(std::span<const EmpiricalRow> rows,
                                          const EnergyParams& ep0, int n,
                                          const WifiParams& wifi) {
  if (rows.empty()) throw InvalidArgument("calibration needs at least one row");
  if (n < 1) throw InvalidArgument(fmt::format("node count {} < 1", n));
  ep0.validate();

  // Row energy is affine in p_hw: e = base + slope * p_hw (Wh).
  const double t = ep0.t_train.mean();
  const double tx = tx_energy(wifi, ep0);
  double num = 0.0, den = 0.0;
  for (const auto& r : rows) {
    const double base = r.d_mean * n *
                        (r.p * (tx + ep0.p_idle * (ep0.t_round - t)) +
                         (1.0 - r.p) * ep0.p_idle * ep0.t_round) /
                        kJoulesPerWh;
    const double slope = r.d_mean * n * r.p * t / kJoulesPerWh;
    num += slope * (r.e_mean - base);
    den += slope * slope;
  }
  if (!(den > 0.0)) throw ModelRegimeError("no row has participating nodes; p_hw unidentifiable");
  const double p_hw = num / den;
  if (!(p_hw > 0.0)) {
    throw ModelRegimeError(fmt::format("least-squares hardware power {} W is not positive", p_hw));
  }

  CalibrationResult out;
  out.params = ep0;
  out.params.p_hw = p_hw;
  double sq = 0.0;
  for (const auto& r : rows) {
    const double model = r.d_mean * expected_round_energy(n, r.p, out.params, wifi) / kJoulesPerWh;
    const double rel = (model - r.e_mean) / r.e_mean;
    out.rows.push_back({r.p, r.d_mean, r.e_mean, model, rel});
    sq += rel * rel;
  }
  out.rms_rel_error = std::sqrt(sq / static_cast<double>(rows.size()));
  return out;
}

std::string to_string(TrainTimeDist::Kind kind) {
  return kind == TrainTimeDist::Kind::constant ? "constant" : "uniform";
}

}  // namespace fedgame
