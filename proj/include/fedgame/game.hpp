#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedgame/duration_model.hpp"
#include "fedgame/pbdist.hpp"

namespace fedgame {

/// One instance of the participation game: N nodes, each maximizing
///   u_i = -E[D] - gamma * ln(AoI(p_i)) - c * p_i.
struct GameConfig {
  DurationModel dm;
  int n = 50;
  double c = 0.0;
  double gamma = 0.0;
  int grid_points = 2001;
  double refine_tol = 1e-8;
  double p_min = 1e-6;

  void validate() const;

  /// Lower end of the strategy set: p_min when the incentive is active
  /// (the AoI logarithm diverges at 0), otherwise 0.
  double strategy_floor() const { return gamma > 0.0 ? p_min : 0.0; }
};

enum class EquilibriumKind { interior, boundary_zero, boundary_one };

std::string to_string(EquilibriumKind kind);

struct EquilibriumResult {
  double p_star;
  double utility_at_ne;
  double residual;  // marginal utility at p_star
  EquilibriumKind kind;
};

struct SocialOptimum {
  double p;
  double utility;
};

struct PoAReport {
  double cost_worst_ne;
  double cost_optimum;
  double poa;
  double p_ne_worst;
  std::vector<EquilibriumResult> ne_set;
  double p_opt;
  double u_opt;
};

/// Expected age of information under Bernoulli(p) participation, 1/p - 1/2.
double aoi(double p);

double utility(const ProbabilityProfile& profile, std::size_t i, const GameConfig& cfg);

/// Closed-form du_i/dp_i = -dE[D]/dp_i + 2 gamma / (p_i (2 - p_i)) - c.
double marginal_utility(const ProbabilityProfile& profile, std::size_t i, const GameConfig& cfg);

/// Utility of every node when all play p.
double symmetric_utility(double p, const GameConfig& cfg);

/// Node i's utility-maximizing probability with every other entry of
/// `others_fixed` held. Grid scan plus golden-section refinement; ties go to
/// the smaller probability.
double best_response(std::size_t i, const ProbabilityProfile& others_fixed,
                     const GameConfig& cfg);

/// All symmetric Nash equilibria found on the grid, sorted by p. Throws
/// NoEquilibrium when none survives verification.
std::vector<EquilibriumResult> solve_symmetric_ne(const GameConfig& cfg);

SocialOptimum solve_social_optimum(const GameConfig& cfg);

/// Worst-equilibrium cost over optimal cost, with cost = -utility.
PoAReport price_of_anarchy(const GameConfig& cfg);

struct SweepRow {
  double c;
  double gamma;
  std::optional<double> p_ne;  // worst (highest-cost) equilibrium
  double p_opt;
  std::optional<double> u_ne;
  double u_opt;
  std::optional<double> poa;
  std::vector<std::string> flags;  // no_equilibrium, poa_undefined
};

/// One row per (c, gamma), c-major in the order given. `threads` = 0 uses the
/// hardware concurrency; the output does not depend on it.
std::vector<SweepRow> sweep(const GameConfig& base, std::span<const double> c_values,
                            std::span<const double> gamma_values, unsigned threads = 1);

/// Incentive weight giving the highest worst-equilibrium participation at
/// cost `at_c`; ties go to the smaller weight.
double best_gamma(const GameConfig& base, std::span<const double> gamma_values, double at_c,
                  unsigned threads = 1);

}  // namespace fedgame
