#include "fedgame/pbdist.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "fedgame/errors.hpp"

namespace fedgame {

namespace {

constexpr double kNegativeTolerance = 1e-9;
constexpr double kImagTolerance = 1e-7;

void check_probability(double p, std::size_t i) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(fmt::format("probability {} at node {} outside [0, 1]", p, i));
  }
}

}  // namespace

ProbabilityProfile::ProbabilityProfile(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw InvalidArgument("profile needs at least one node");
  }
  if (probs_.size() > kMaxNodes) {
    throw InvalidArgument(fmt::format("profile size {} exceeds {}", probs_.size(), kMaxNodes));
  }
  for (std::size_t i = 0; i < probs_.size(); ++i) check_probability(probs_[i], i);
}

ProbabilityProfile ProbabilityProfile::symmetric(std::size_t n, double p) {
  return ProbabilityProfile(std::vector<double>(n, p));
}

ProbabilityProfile ProbabilityProfile::with(std::size_t i, double p) const {
  if (i >= probs_.size()) {
    throw InvalidArgument(fmt::format("node index {} out of range [0, {})", i, probs_.size()));
  }
  check_probability(p, i);
  auto copy = probs_;
  copy[i] = p;
  return ProbabilityProfile(std::move(copy));
}

double ProbabilityProfile::sum() const {
  return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

double Pmf::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) m += static_cast<double>(k) * mass[k];
  return m;
}

Pmf poibin_pmf(std::span<const double> probs) {
  const std::size_t n = probs.size();
  if (n > kMaxNodes) {
    throw InvalidArgument(fmt::format("profile size {} exceeds {}", n, kMaxNodes));
  }
  for (std::size_t i = 0; i < n; ++i) check_probability(probs[i], i);
  if (n == 0) return Pmf{{1.0}};

  const std::size_t len = n + 1;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(len);

  // Twiddles w^j = exp(i step j), indexed modulo len to avoid phase drift.
  std::vector<std::complex<double>> twiddle(len);
  for (std::size_t j = 0; j < len; ++j) twiddle[j] = std::polar(1.0, step * static_cast<double>(j));

  // Characteristic function at the len roots of unity; chi[len - j] = conj(chi[j]).
  std::vector<std::complex<double>> chi(len);
  for (std::size_t j = 0; j <= len / 2; ++j) {
    // Plain real arithmetic; std::complex multiplication carries NaN recovery code.
    const double zr = twiddle[j].real() - 1.0;
    const double zi = twiddle[j].imag();
    double re = 1.0, im = 0.0;
    for (double p : probs) {
      const double fr = 1.0 + p * zr;
      const double fi = p * zi;
      const double t = re * fr - im * fi;
      im = re * fi + im * fr;
      re = t;
      // Every factor has modulus <= 1; stop before denormals slow the loop down.
      if (std::abs(re) + std::abs(im) < 1e-300) {
        re = im = 0.0;
        break;
      }
    }
    const std::complex<double> prod{re, im};
    chi[j] = prod;
    if (j != 0) chi[len - j] = std::conj(prod);
  }

  Pmf out;
  out.mass.resize(len);
  for (std::size_t m = 0; m < len; ++m) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;  // j * m mod len
    for (std::size_t j = 0; j < len; ++j) {
      const auto& w = twiddle[idx];
      re += chi[j].real() * w.real() + chi[j].imag() * w.imag();
      im += chi[j].imag() * w.real() - chi[j].real() * w.imag();
      idx += m;
      if (idx >= len) idx -= len;
    }
    const std::complex<double> acc{re / static_cast<double>(len), im / static_cast<double>(len)};
    if (std::abs(acc.imag()) > kImagTolerance) {
      throw NumericalFailure(
          fmt::format("imaginary residue {:.3e} at m={} exceeds tolerance", acc.imag(), m));
    }
    if (acc.real() < -kNegativeTolerance) {
      throw NumericalFailure(fmt::format("negative mass {:.3e} at m={}", acc.real(), m));
    }
    out.mass[m] = acc.real() < 0.0 ? 0.0 : acc.real();
  }

  const double total = std::accumulate(out.mass.begin(), out.mass.end(), 0.0);
  for (double& v : out.mass) v /= total;
  return out;
}

Pmf poibin_pmf(const ProbabilityProfile& profile) { return poibin_pmf(profile.probs()); }

Pmf poibin_pmf_excluding(const ProbabilityProfile& profile, std::size_t i) {
  if (i >= profile.size()) {
    throw InvalidArgument(fmt::format("node index {} out of range [0, {})", i, profile.size()));
  }
  std::vector<double> others;
  others.reserve(profile.size() - 1);
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j != i) others.push_back(profile[j]);
  }
  return poibin_pmf(others);
}

double expected_duration(const Pmf& pmf, std::span<const double> durations) {
  if (durations.size() < pmf.size()) {
    throw InvalidArgument(fmt::format("duration table has {} entries, need {}",
                                      durations.size(), pmf.size()));
  }
  double e = 0.0;
  for (std::size_t m = 0; m < pmf.size(); ++m) e += durations[m] * pmf[m];
  return e;
}

double expected_duration(const ProbabilityProfile& profile, const DurationModel& dm) {
  const auto d = dm.tabulate(static_cast<int>(profile.size()));
  return expected_duration(poibin_pmf(profile), d);
}

double duration_gradient(const Pmf& others, std::span<const double> durations) {
  if (durations.size() < others.size() + 1) {
    throw InvalidArgument(fmt::format("duration table has {} entries, need {}",
                                      durations.size(), others.size() + 1));
  }
  double g = 0.0;
  for (std::size_t k = 0; k < others.size(); ++k) {
    g += (durations[k + 1] - durations[k]) * others[k];
  }
  return g;
}

double duration_gradient(const ProbabilityProfile& profile, std::size_t i,
                         const DurationModel& dm) {
  const auto d = dm.tabulate(static_cast<int>(profile.size()));
  return duration_gradient(poibin_pmf_excluding(profile, i), d);
}

}  // namespace fedgame
