#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedgame/duration_model.hpp"

namespace fedgame {

/// Per-node participation probabilities, one entry per node, each in [0, 1].
class ProbabilityProfile {
 public:
  explicit ProbabilityProfile(std::vector<double> probs);

  static ProbabilityProfile symmetric(std::size_t n, double p);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Copy with node i's probability replaced.
  ProbabilityProfile with(std::size_t i, double p) const;

  double sum() const;

 private:
  std::vector<double> probs_;
};

/// Distribution of the participant count; mass[m] = P[m participants].
struct Pmf {
  std::vector<double> mass;

  std::size_t size() const noexcept { return mass.size(); }
  double operator[](std::size_t m) const { return mass[m]; }
  double mean() const;
};

// Largest profile accepted by the O(N^2) closed-form evaluation.
inline constexpr std::size_t kMaxNodes = 10000;

/// Poisson-Binomial PMF of the number of successes among independent
/// Bernoulli(p_k) trials, evaluated with the discrete Fourier closed form
///
///   P[m] = 1/(N+1) sum_n exp(-i 2 pi n m/(N+1)) prod_k (p_k (exp(i 2 pi n/(N+1)) - 1) + 1).
///
/// Masses in (-1e-9, 0) are flushed to zero and the vector renormalized;
/// anything more negative, or an imaginary residue above 1e-7, throws
/// NumericalFailure. An empty span gives the degenerate PMF {1}.
Pmf poibin_pmf(std::span<const double> probs);
Pmf poibin_pmf(const ProbabilityProfile& profile);

/// PMF of the participant count among the other N-1 nodes (length N).
Pmf poibin_pmf_excluding(const ProbabilityProfile& profile, std::size_t i);

/// sum_m d(m) P[m]; `durations` holds d(0..N).
double expected_duration(const Pmf& pmf, std::span<const double> durations);
double expected_duration(const ProbabilityProfile& profile, const DurationModel& dm);

/// dE[D]/dp_i = sum_k (d(k+1) - d(k)) Q_k with Q the PMF of the others.
double duration_gradient(const Pmf& others, std::span<const double> durations);
double duration_gradient(const ProbabilityProfile& profile, std::size_t i,
                         const DurationModel& dm);

}  // namespace fedgame
