#include "fedgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "fedgame/errors.hpp"
#include "optimize1d.hpp"
#include "parallel.hpp"

namespace fedgame {

namespace {

double tie_eps(double value) { return 1e-12 * (1.0 + std::abs(value)); }

// Incentive term gamma * ln(AoI(p)) and its derivative, with p held at or
// above p_min. Zero when gamma is zero.
double incentive(double p, const GameConfig& cfg) {
  if (cfg.gamma == 0.0) return 0.0;
  return cfg.gamma * std::log(aoi(std::max(p, cfg.p_min)));
}

double incentive_slope(double p, const GameConfig& cfg) {
  if (cfg.gamma == 0.0) return 0.0;
  const double q = std::max(p, cfg.p_min);
  return 2.0 * cfg.gamma / (q * (2.0 - q));
}

// E[D] seen by one node as an affine function of its own probability q:
// E(q) = base + q * slope, from the distribution of the other nodes.
struct Affine {
  double base;
  double slope;
};

Affine own_duration(const Pmf& others, std::span<const double> d) {
  double base = 0.0;
  for (std::size_t k = 0; k < others.size(); ++k) base += d[k] * others[k];
  return {base, duration_gradient(others, d)};
}

double own_utility(double q, const Affine& e, const GameConfig& cfg) {
  return -(e.base + q * e.slope) - incentive(q, cfg) - cfg.c * q;
}

struct Response {
  double q;
  double value;
};

Response best_response_affine(const Affine& e, const GameConfig& cfg) {
  const double lo = cfg.strategy_floor();
  const int n = cfg.grid_points;
  const double h = (1.0 - lo) / (n - 1);
  auto f = [&](double q) { return own_utility(q, e, cfg); };

  int best = 0;
  double best_value = f(lo);
  for (int j = 1; j < n; ++j) {
    const double q = j == n - 1 ? 1.0 : lo + j * h;
    const double v = f(q);
    if (v > best_value + tie_eps(best_value)) {
      best = j;
      best_value = v;
    }
  }
  Response r{best == n - 1 ? 1.0 : lo + best * h, best_value};
  const double a = std::max(lo, r.q - h);
  const double b = std::min(1.0, r.q + h);
  const auto refined = detail::golden_section_max(f, a, b, cfg.refine_tol);
  if (refined.value > r.value + tie_eps(r.value)) r = {refined.x, refined.value};
  return r;
}

Pmf symmetric_pmf(std::size_t n, double p) { return poibin_pmf(std::vector<double>(n, p)); }

// Symmetric-profile quantities tabulated once per (N, dm, grid); shared by
// every (c, gamma) cell of a sweep.
struct Landscape {
  std::vector<double> d;
  double lo = 0.0;
  std::vector<double> grid;
  std::vector<double> e;  // E[D] with all nodes at grid[j]
  std::vector<double> g;  // dE[D]/dp_i at the same profile

  double spacing() const { return grid[1] - grid[0]; }
};

double symmetric_duration(double p, const GameConfig& cfg, std::span<const double> d) {
  return expected_duration(symmetric_pmf(static_cast<std::size_t>(cfg.n), p), d);
}

double symmetric_gradient(double p, const GameConfig& cfg, std::span<const double> d) {
  return duration_gradient(symmetric_pmf(static_cast<std::size_t>(cfg.n) - 1, p), d);
}

Landscape build_landscape(const GameConfig& cfg, double lo) {
  Landscape l;
  l.d = cfg.dm.tabulate(cfg.n);
  l.lo = lo;
  const int n = cfg.grid_points;
  l.grid.resize(static_cast<std::size_t>(n));
  l.e.resize(l.grid.size());
  l.g.resize(l.grid.size());
  for (int j = 0; j < n; ++j) {
    const double p = j == n - 1 ? 1.0 : lo + j * (1.0 - lo) / (n - 1);
    const auto idx = static_cast<std::size_t>(j);
    l.grid[idx] = p;
    l.e[idx] = symmetric_duration(p, cfg, l.d);
    l.g[idx] = symmetric_gradient(p, cfg, l.d);
  }
  return l;
}

double symmetric_marginal(double p, const GameConfig& cfg, std::span<const double> d) {
  return -symmetric_gradient(p, cfg, d) + incentive_slope(p, cfg) - cfg.c;
}

double symmetric_utility_at(double p, double e, const GameConfig& cfg) {
  return -e - incentive(p, cfg) - cfg.c * p;
}

// A candidate is an equilibrium when p attains the best own utility against
// all others at p. With gamma = 0 the own utility is affine in q, so an
// interior equilibrium is a point of indifference: compare utility values,
// not argmax positions.
bool is_global_best_response(double p, double residual_bound, const Landscape& l,
                             const GameConfig& cfg) {
  const auto others = symmetric_pmf(static_cast<std::size_t>(cfg.n) - 1, p);
  const auto e = own_duration(others, l.d);
  const auto br = best_response_affine(e, cfg);
  if (std::abs(br.q - p) <= 10.0 * l.spacing()) return true;
  const double at_p = own_utility(p, e, cfg);
  return at_p >= br.value - residual_bound - tie_eps(at_p);
}

std::vector<EquilibriumResult> solve_ne(const GameConfig& cfg, const Landscape& l) {
  const auto n = l.grid.size();
  std::vector<double> m(n);
  for (std::size_t j = 0; j < n; ++j) {
    m[j] = -l.g[j] + incentive_slope(l.grid[j], cfg) - cfg.c;
  }
  auto marginal = [&](double p) { return symmetric_marginal(p, cfg, l.d); };

  std::vector<EquilibriumResult> out;
  auto add = [&](double p, double residual, EquilibriumKind kind, double residual_bound) {
    for (const auto& r : out) {
      if (std::abs(r.p_star - p) <= cfg.refine_tol) return;
    }
    if (!is_global_best_response(p, residual_bound, l, cfg)) return;
    const double u = symmetric_utility_at(p, symmetric_duration(p, cfg, l.d), cfg);
    out.push_back({p, u, residual, kind});
  };

  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a = l.grid[j], b = l.grid[j + 1];
    const bool exact = m[j] == 0.0 && j > 0;
    if (!exact && !(m[j] * m[j + 1] < 0.0)) continue;
    const double p = exact ? a : detail::bisect(marginal, a, b, cfg.refine_tol);
    if (p <= l.lo || p >= 1.0) continue;
    const double residual = marginal(p);
    const double scale = 1.0 + std::abs(m[j + 1] - m[j]) / (b - a);
    if (std::abs(residual) > cfg.refine_tol * scale) continue;
    add(p, residual, EquilibriumKind::interior, std::abs(residual));
  }
  if (cfg.gamma == 0.0) add(0.0, m.front(), EquilibriumKind::boundary_zero, 0.0);
  add(1.0, m.back(), EquilibriumKind::boundary_one, 0.0);

  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.p_star < y.p_star; });
  if (out.empty()) {
    throw NoEquilibrium(
        fmt::format("no symmetric equilibrium for c={} gamma={}", cfg.c, cfg.gamma));
  }
  return out;
}

SocialOptimum solve_optimum(const GameConfig& cfg, const Landscape& l) {
  std::size_t best = 0;
  double best_value = symmetric_utility_at(l.grid[0], l.e[0], cfg);
  for (std::size_t j = 1; j < l.grid.size(); ++j) {
    const double v = symmetric_utility_at(l.grid[j], l.e[j], cfg);
    if (v > best_value + tie_eps(best_value)) {
      best = j;
      best_value = v;
    }
  }
  SocialOptimum opt{l.grid[best], best_value};
  const double h = l.spacing();
  auto f = [&](double p) { return symmetric_utility(p, cfg); };
  const auto refined = detail::golden_section_max(f, std::max(l.lo, opt.p - h),
                                                  std::min(1.0, opt.p + h), cfg.refine_tol);
  if (refined.value > opt.utility + tie_eps(opt.utility)) opt = {refined.x, refined.value};
  return opt;
}

PoAReport poa_impl(const GameConfig& cfg, const Landscape& l) {
  PoAReport report{};
  report.ne_set = solve_ne(cfg, l);
  const auto opt = solve_optimum(cfg, l);
  report.p_opt = opt.p;
  report.u_opt = opt.utility;
  report.cost_optimum = -opt.utility;
  if (!(report.cost_optimum > 0.0)) {
    throw ModelRegimeError(
        fmt::format("non-positive optimal cost {} at p={}", report.cost_optimum, opt.p));
  }
  report.cost_worst_ne = -std::numeric_limits<double>::infinity();
  for (const auto& ne : report.ne_set) {
    const double cost = -ne.utility_at_ne;
    if (!(cost > 0.0)) {
      throw ModelRegimeError(fmt::format("non-positive equilibrium cost {} at p={}", cost,
                                         ne.p_star));
    }
    if (cost > report.cost_worst_ne) {
      report.cost_worst_ne = cost;
      report.p_ne_worst = ne.p_star;
    }
  }
  report.poa = report.cost_worst_ne / report.cost_optimum;
  return report;
}

// Landscapes keyed by the strategy-set lower bound, which is all that varies
// across cells of a sweep.
class LandscapeCache {
 public:
  explicit LandscapeCache(const GameConfig& base, std::span<const double> gammas) {
    for (double g : gammas) {
      GameConfig cfg = base;
      cfg.gamma = g;
      const double lo = cfg.strategy_floor();
      if (!by_floor_.contains(lo)) by_floor_.emplace(lo, build_landscape(base, lo));
    }
  }

  const Landscape& at(const GameConfig& cfg) const { return by_floor_.at(cfg.strategy_floor()); }

 private:
  std::map<double, Landscape> by_floor_;
};

}  // namespace

void GameConfig::validate() const {
  if (n < 1) throw InvalidArgument(fmt::format("node count {} < 1", n));
  if (n > dm.max_k()) {
    throw InvalidArgument(
        fmt::format("duration model covers k <= {}, game has {} nodes", dm.max_k(), n));
  }
  if (!(c >= 0.0)) throw InvalidArgument(fmt::format("cost factor {} < 0", c));
  if (!(gamma >= 0.0)) throw InvalidArgument(fmt::format("incentive weight {} < 0", gamma));
  if (grid_points < 11) throw InvalidArgument(fmt::format("grid_points {} < 11", grid_points));
  if (!(refine_tol > 0.0)) throw InvalidArgument("refine_tol must be positive");
  if (!(p_min > 0.0 && p_min < 1.0)) throw InvalidArgument(fmt::format("p_min {} not in (0, 1)", p_min));
}

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::interior:
      return "interior";
    case EquilibriumKind::boundary_zero:
      return "boundary_zero";
    case EquilibriumKind::boundary_one:
      return "boundary_one";
  }
  return "unknown";
}

double aoi(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError(fmt::format("age of information undefined at p={}", p));
  }
  return 1.0 / p - 0.5;
}

double utility(const ProbabilityProfile& profile, std::size_t i, const GameConfig& cfg) {
  cfg.validate();
  if (profile.size() != static_cast<std::size_t>(cfg.n)) {
    throw InvalidArgument(fmt::format("profile has {} nodes, game has {}", profile.size(), cfg.n));
  }
  if (i >= profile.size()) throw InvalidArgument(fmt::format("node index {} out of range", i));
  const double p = profile[i];
  if (cfg.gamma > 0.0 && p == 0.0) {
    throw DomainError("age of information diverges at p=0 with a positive incentive weight");
  }
  const auto d = cfg.dm.tabulate(cfg.n);
  const double e = expected_duration(poibin_pmf(profile), d);
  return -e - incentive(p, cfg) - cfg.c * p;
}

double marginal_utility(const ProbabilityProfile& profile, std::size_t i, const GameConfig& cfg) {
  cfg.validate();
  if (profile.size() != static_cast<std::size_t>(cfg.n)) {
    throw InvalidArgument(fmt::format("profile has {} nodes, game has {}", profile.size(), cfg.n));
  }
  const auto d = cfg.dm.tabulate(cfg.n);
  const double g = duration_gradient(poibin_pmf_excluding(profile, i), d);
  return -g + incentive_slope(profile[i], cfg) - cfg.c;
}

double symmetric_utility(double p, const GameConfig& cfg) {
  if (cfg.gamma > 0.0 && p == 0.0) {
    throw DomainError("age of information diverges at p=0 with a positive incentive weight");
  }
  const auto d = cfg.dm.tabulate(cfg.n);
  return symmetric_utility_at(p, symmetric_duration(p, cfg, d), cfg);
}

double best_response(std::size_t i, const ProbabilityProfile& others_fixed, const GameConfig& cfg) {
  cfg.validate();
  if (others_fixed.size() != static_cast<std::size_t>(cfg.n)) {
    throw InvalidArgument(
        fmt::format("profile has {} nodes, game has {}", others_fixed.size(), cfg.n));
  }
  const auto d = cfg.dm.tabulate(cfg.n);
  const auto e = own_duration(poibin_pmf_excluding(others_fixed, i), d);
  return best_response_affine(e, cfg).q;
}

std::vector<EquilibriumResult> solve_symmetric_ne(const GameConfig& cfg) {
  cfg.validate();
  return solve_ne(cfg, build_landscape(cfg, cfg.strategy_floor()));
}

SocialOptimum solve_social_optimum(const GameConfig& cfg) {
  cfg.validate();
  return solve_optimum(cfg, build_landscape(cfg, cfg.strategy_floor()));
}

PoAReport price_of_anarchy(const GameConfig& cfg) {
  cfg.validate();
  return poa_impl(cfg, build_landscape(cfg, cfg.strategy_floor()));
}

std::vector<SweepRow> sweep(const GameConfig& base, std::span<const double> c_values,
                            std::span<const double> gamma_values, unsigned threads) {
  base.validate();
  if (c_values.empty() || gamma_values.empty()) {
    throw InvalidArgument("sweep needs non-empty c and gamma lists");
  }
  for (double c : c_values) {
    if (!(c >= 0.0)) throw InvalidArgument(fmt::format("cost factor {} < 0", c));
  }
  for (double g : gamma_values) {
    if (!(g >= 0.0)) throw InvalidArgument(fmt::format("incentive weight {} < 0", g));
  }
  const LandscapeCache cache(base, gamma_values);
  std::vector<SweepRow> rows(c_values.size() * gamma_values.size());
  detail::parallel_for(rows.size(), threads, [&](std::size_t idx) {
    GameConfig cfg = base;
    cfg.c = c_values[idx / gamma_values.size()];
    cfg.gamma = gamma_values[idx % gamma_values.size()];
    const auto& l = cache.at(cfg);
    SweepRow row{cfg.c, cfg.gamma, std::nullopt, 0.0, std::nullopt, 0.0, std::nullopt, {}};
    const auto opt = solve_optimum(cfg, l);
    row.p_opt = opt.p;
    row.u_opt = opt.utility;
    try {
      const auto ne = solve_ne(cfg, l);
      const auto worst = std::min_element(ne.begin(), ne.end(), [](const auto& a, const auto& b) {
        return a.utility_at_ne < b.utility_at_ne;
      });
      row.p_ne = worst->p_star;
      row.u_ne = worst->utility_at_ne;
      if (-worst->utility_at_ne > 0.0 && -opt.utility > 0.0 &&
          std::all_of(ne.begin(), ne.end(), [](const auto& r) { return r.utility_at_ne < 0.0; })) {
        row.poa = worst->utility_at_ne / opt.utility;
      } else {
        row.flags.push_back("poa_undefined");
      }
    } catch (const NoEquilibrium&) {
      row.flags = {"no_equilibrium", "poa_undefined"};
    }
    rows[idx] = std::move(row);
  });
  return rows;
}

double best_gamma(const GameConfig& base, std::span<const double> gamma_values, double at_c,
                  unsigned threads) {
  if (gamma_values.empty()) throw InvalidArgument("best_gamma needs a non-empty list");
  const double c_values[] = {at_c};
  const auto rows = sweep(base, c_values, gamma_values, threads);
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (!rows[j].p_ne) continue;
    if (!best) {
      best = j;
      continue;
    }
    const double diff = *rows[j].p_ne - *rows[*best].p_ne;
    if (diff > base.refine_tol ||
        (std::abs(diff) <= base.refine_tol && rows[j].gamma < rows[*best].gamma)) {
      best = j;
    }
  }
  if (!best) throw NoEquilibrium(fmt::format("no equilibrium for any incentive weight at c={}", at_c));
  return rows[*best].gamma;
}

}  // namespace fedgame
