#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fedgame/duration_model.hpp"

namespace fedgame {

enum class TableSource { single_seed, averaged };

/// One measured configuration: rounds to converge and energy in Wh at
/// participation probability p. Single-seed rows carry zero deviations.
struct EmpiricalRow {
  double p;
  double d_mean;
  double d_std;
  double e_mean;
  double e_std;
  TableSource source;
};

/// The embedded measurement tables (42 rows each, p in [0.1, 0.7]).
std::vector<EmpiricalRow> load_empirical_table(TableSource which);

struct FitOptions {
  FitMode mode = FitMode::deterministic_wls;
  std::uint64_t seed = 0;
  // Normal draws per row in stochastic_resample mode.
  int resamples = 100;
  // Lower bound on the deviation used for weights.
  double sigma_floor = 0.5;
};

inline constexpr int kDefaultDegree = 3;
inline constexpr int kMaxDegree = 6;

/// Polynomial fit of rounds against expected participant count k = N p.
/// The cap is twice the largest observed mean.
DurationModel fit_duration_model(std::span<const EmpiricalRow> rows, int n, int degree,
                                 const FitOptions& options = {});

struct EnergyLinearModel {
  double slope;      // Wh per round
  double intercept;  // Wh

  double operator()(double rounds) const { return intercept + slope * rounds; }
};

/// Ordinary least squares of e_mean on d_mean.
EnergyLinearModel fit_energy_linear(std::span<const EmpiricalRow> rows);

std::string to_string(TableSource source);
TableSource table_source_from_string(const std::string& name);

/// CSV with header p,d_mean,d_std,e_mean,e_std,source.
void write_empirical_csv(std::ostream& out, std::span<const EmpiricalRow> rows);

/// Reads the format written by write_empirical_csv. Malformed rows throw
/// ParseError carrying the 1-based line number.
std::vector<EmpiricalRow> read_empirical_csv(std::istream& in);

}  // namespace fedgame
