#include "fedgame/empirics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "fedgame/errors.hpp"

namespace fedgame {

namespace {

struct SingleSeed {
  double p, e, d;
};

struct Averaged {
  double p, d, d_std, e, e_std;
};

// Rounds to converge and energy (Wh), one training run per probability.
constexpr std::array<SingleSeed, 42> kSingleSeed{{
    {0.100, 1056.81, 74}, {0.125, 1060.25, 73}, {0.130, 830.90, 57}, {0.150, 1073.33, 73},
    {0.160, 962.90, 65},  {0.175, 600.42, 40},  {0.200, 861.87, 57}, {0.225, 691.04, 45},
    {0.250, 638.27, 41},  {0.300, 720.66, 45},  {0.350, 641.78, 39}, {0.400, 691.90, 41},
    {0.410, 811.87, 48},  {0.420, 647.21, 38},  {0.430, 736.57, 43}, {0.440, 686.69, 40},
    {0.450, 827.07, 48},  {0.460, 884.16, 51},  {0.470, 698.03, 40}, {0.480, 700.97, 40},
    {0.490, 686.84, 39},  {0.500, 689.25, 39},  {0.510, 656.18, 37}, {0.520, 660.68, 37},
    {0.530, 663.44, 37},  {0.540, 702.24, 39},  {0.550, 741.38, 41}, {0.560, 781.14, 43},
    {0.570, 692.42, 38},  {0.580, 659.89, 36},  {0.590, 662.56, 36}, {0.600, 627.10, 34},
    {0.610, 666.57, 36},  {0.620, 707.24, 38},  {0.630, 804.00, 43}, {0.640, 865.10, 46},
    {0.650, 716.03, 38},  {0.660, 698.39, 37},  {0.670, 816.24, 43}, {0.680, 724.07, 38},
    {0.690, 612.04, 32},  {0.700, 711.64, 37},
}};

// Mean and standard deviation over seeds.
constexpr std::array<Averaged, 42> kAveraged{{
    {0.100, 74.50, 11.47, 1072.14, 123.43}, {0.125, 68.00, 13.09, 1005.97, 140.49},
    {0.130, 56.00, 5.29, 862.84, 60.19},    {0.150, 62.50, 8.81, 950.26, 100.14},
    {0.160, 57.25, 6.13, 887.80, 61.31},    {0.175, 51.00, 9.42, 797.18, 145.67},
    {0.200, 51.00, 4.55, 816.96, 37.86},    {0.225, 45.50, 3.70, 747.44, 54.52},
    {0.250, 51.00, 9.56, 803.96, 132.64},   {0.300, 46.75, 2.75, 768.25, 41.50},
    {0.350, 43.00, 5.23, 724.40, 73.21},    {0.400, 43.25, 2.22, 734.25, 33.22},
    {0.410, 44.50, 5.32, 758.88, 62.29},    {0.420, 42.75, 4.11, 725.76, 59.45},
    {0.430, 42.75, 3.30, 734.69, 35.41},    {0.440, 43.00, 4.08, 732.95, 49.07},
    {0.450, 43.50, 4.43, 751.96, 61.11},    {0.460, 42.75, 5.56, 750.14, 89.77},
    {0.470, 39.50, 3.11, 698.25, 33.15},    {0.480, 39.25, 6.70, 696.30, 71.74},
    {0.490, 40.67, 2.89, 709.99, 33.48},    {0.500, 40.00, 0.82, 704.10, 11.11},
    {0.510, 41.75, 3.30, 719.96, 43.71},    {0.520, 42.50, 7.33, 729.13, 81.90},
    {0.530, 40.00, 3.16, 703.01, 37.23},    {0.540, 41.75, 4.27, 726.11, 44.34},
    {0.550, 39.50, 2.65, 706.41, 35.12},    {0.560, 40.25, 2.99, 719.03, 48.51},
    {0.570, 40.50, 4.43, 712.93, 46.15},    {0.580, 46.25, 14.15, 771.83, 152.41},
    {0.590, 39.00, 2.58, 694.74, 27.70},    {0.600, 39.00, 4.24, 691.24, 51.19},
    {0.610, 37.75, 2.87, 682.34, 30.05},    {0.620, 39.75, 5.56, 708.59, 58.31},
    {0.630, 37.75, 3.50, 697.93, 70.71},    {0.640, 39.75, 5.91, 726.61, 102.68},
    {0.650, 39.00, 2.16, 702.75, 23.75},    {0.660, 40.75, 4.99, 719.79, 48.48},
    {0.670, 40.00, 4.69, 725.12, 75.90},    {0.680, 41.25, 4.03, 728.89, 36.60},
    {0.690, 37.50, 3.87, 676.75, 45.17},    {0.700, 38.25, 5.50, 696.29, 59.19},
}};

// Weighted least squares on monomials of x = k / scale; returns coefficients
// in powers of k.
std::vector<double> polyfit(const std::vector<double>& k, const std::vector<double>& y,
                            const std::vector<double>& w, int degree, double scale) {
  const auto rows = static_cast<Eigen::Index>(k.size());
  const Eigen::Index cols = degree + 1;
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double sw = std::sqrt(w[static_cast<std::size_t>(i)]);
    const double x = k[static_cast<std::size_t>(i)] / scale;
    double pw = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(i, j) = pw * sw;
      pw *= x;
    }
    b(i) = y[static_cast<std::size_t>(i)] * sw;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols) {
    throw RankDeficient(
        fmt::format("design matrix rank {} < {} unknowns", qr.rank(), cols));
  }
  const Eigen::VectorXd sol = qr.solve(b);
  std::vector<double> out(static_cast<std::size_t>(cols));
  double s = 1.0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    out[static_cast<std::size_t>(j)] = sol(j) / s;
    s *= scale;
  }
  return out;
}

}  // namespace

std::vector<EmpiricalRow> load_empirical_table(TableSource which) {
  std::vector<EmpiricalRow> rows;
  if (which == TableSource::single_seed) {
    for (const auto& r : kSingleSeed) rows.push_back({r.p, r.d, 0.0, r.e, 0.0, which});
  } else {
    for (const auto& r : kAveraged) rows.push_back({r.p, r.d, r.d_std, r.e, r.e_std, which});
  }
  return rows;
}

DurationModel fit_duration_model(std::span<const EmpiricalRow> rows, int n, int degree,
                                 const FitOptions& options) {
  if (degree < 0 || degree > kMaxDegree) {
    throw InvalidArgument(fmt::format("polynomial degree {} outside [0, {}]", degree, kMaxDegree));
  }
  if (n < 1) throw InvalidArgument(fmt::format("node count {} < 1", n));
  if (rows.size() < static_cast<std::size_t>(degree) + 1) {
    throw InvalidArgument(
        fmt::format("{} rows cannot determine a degree-{} polynomial", rows.size(), degree));
  }
  if (!(options.sigma_floor > 0.0)) throw InvalidArgument("sigma floor must be positive");

  double max_d = 0.0;
  for (const auto& r : rows) {
    if (!(r.p >= 0.0 && r.p <= 1.0) || !(r.d_mean >= 1.0) || !(r.d_std >= 0.0)) {
      throw InvalidArgument(fmt::format("invalid empirical row at p={}", r.p));
    }
    max_d = std::max(max_d, r.d_mean);
  }
  const double scale = static_cast<double>(n);

  std::vector<double> ks, ys, ws;
  if (options.mode == FitMode::deterministic_wls) {
    for (const auto& r : rows) {
      const double s = std::max(r.d_std, options.sigma_floor);
      ks.push_back(scale * r.p);
      ys.push_back(r.d_mean);
      ws.push_back(1.0 / (s * s));
    }
  } else {
    if (options.resamples < 1) throw InvalidArgument("resample count must be >= 1");
    std::mt19937_64 rng(options.seed);
    for (const auto& r : rows) {
      std::normal_distribution<double> noise(r.d_mean, r.d_std);
      for (int j = 0; j < options.resamples; ++j) {
        ks.push_back(scale * r.p);
        ys.push_back(r.d_std > 0.0 ? noise(rng) : r.d_mean);
        ws.push_back(1.0);
      }
    }
  }
  auto coeffs = polyfit(ks, ys, ws, degree, scale);
  return DurationModel(std::move(coeffs), n, 2.0 * max_d, options.mode, options.seed);
}

EnergyLinearModel fit_energy_linear(std::span<const EmpiricalRow> rows) {
  if (rows.size() < 2) throw InvalidArgument("energy fit needs at least two rows");
  double mx = 0.0, my = 0.0;
  for (const auto& r : rows) {
    mx += r.d_mean;
    my += r.e_mean;
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows) {
    sxx += (r.d_mean - mx) * (r.d_mean - mx);
    sxy += (r.d_mean - mx) * (r.e_mean - my);
  }
  if (sxx <= 0.0) throw RankDeficient("all rows have the same round count");
  const double slope = sxy / sxx;
  if (!(slope > 0.0)) {
    throw ModelRegimeError(fmt::format("energy-per-round slope {} is not positive", slope));
  }
  return {slope, my - slope * mx};
}

std::string to_string(TableSource source) {
  return source == TableSource::single_seed ? "single_seed" : "averaged";
}

TableSource table_source_from_string(const std::string& name) {
  if (name == "single_seed" || name == "single") return TableSource::single_seed;
  if (name == "averaged") return TableSource::averaged;
  throw InvalidArgument(fmt::format("unknown table '{}'", name));
}

void write_empirical_csv(std::ostream& out, std::span<const EmpiricalRow> rows) {
  out << "p,d_mean,d_std,e_mean,e_std,source\n";
  for (const auto& r : rows) {
    out << fmt::format("{:.3f},{:.2f},{:.2f},{:.2f},{:.2f},{}\n", r.p, r.d_mean, r.d_std,
                       r.e_mean, r.e_std, to_string(r.source));
  }
}

std::vector<EmpiricalRow> read_empirical_csv(std::istream& in) {
  std::vector<EmpiricalRow> rows;
  std::string line;
  int lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "p,d_mean,d_std,e_mean,e_std,source") {
        throw ParseError(fmt::format("line {}: unexpected header '{}'", lineno, line), lineno);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw ParseError(fmt::format("line {}: expected 6 fields, got {}", lineno, fields.size()),
                       lineno);
    }
    EmpiricalRow row{};
    try {
      std::size_t used = 0;
      double* targets[] = {&row.p, &row.d_mean, &row.d_std, &row.e_mean, &row.e_std};
      for (std::size_t j = 0; j < 5; ++j) {
        *targets[j] = std::stod(fields[j], &used);
        if (used != fields[j].size()) throw std::invalid_argument(fields[j]);
      }
      row.source = table_source_from_string(fields[5]);
    } catch (const std::exception&) {
      throw ParseError(fmt::format("line {}: malformed row '{}'", lineno, line), lineno);
    }
    if (!(row.p >= 0.0 && row.p <= 1.0) || !(row.d_mean >= 1.0) || !(row.e_mean > 0.0) ||
        !(row.d_std >= 0.0) || !(row.e_std >= 0.0)) {
      throw ParseError(fmt::format("line {}: values out of range", lineno), lineno);
    }
    rows.push_back(row);
  }
  if (header) throw ParseError("empty input, missing header", 1);
  return rows;
}

}  // namespace fedgame
