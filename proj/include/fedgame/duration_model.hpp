#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fedgame {

enum class FitMode { deterministic_wls, stochastic_resample };

/// Expected number of rounds to convergence as a function of the number of
/// participating nodes k, defined on [0, max_k].
///
/// The mapping is a polynomial in k whose value is clamped to
/// [d_floor, d_cap]. The data never observes k = 0, so the cap is what keeps
/// d(0) finite.
class DurationModel {
 public:
  static constexpr double kFloor = 1.0;

  /// `coefficients` are in ascending powers of k.
  DurationModel(std::vector<double> coefficients, int max_k, double d_cap,
                FitMode mode = FitMode::deterministic_wls, std::uint64_t seed = 0);

  /// d(k) = value for every k.
  static DurationModel constant(int max_k, double value);

  /// Exact interpolating polynomial through (k, values[k]) for k = 0..n-1.
  /// Used for hand-built tables in tests and examples; cap = max(values).
  static DurationModel interpolate(std::span<const double> values);

  double eval(double k) const;
  double operator()(double k) const { return eval(k); }

  /// d(0), d(1), ..., d(n).
  std::vector<double> tabulate(int n) const;

  /// Same polynomial shifted by `offset` rounds, cap shifted accordingly.
  DurationModel shifted(double offset) const;

  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
  int max_k() const noexcept { return max_k_; }
  double d_floor() const noexcept { return kFloor; }
  double d_cap() const noexcept { return d_cap_; }
  FitMode fit_mode() const noexcept { return mode_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::vector<double> coefficients_;
  int max_k_;
  double d_cap_;
  FitMode mode_;
  std::uint64_t seed_;
};

}  // namespace fedgame
