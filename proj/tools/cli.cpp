#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fedgame/empirics.hpp"
#include "fedgame/energy.hpp"
#include "fedgame/errors.hpp"
#include "fedgame/game.hpp"
#include "fedgame/run_config.hpp"
#include "fedgame/simulate.hpp"

namespace fedgame::cli {

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

// "a,b,c" or "start:stop:step" (inclusive).
std::vector<double> parse_values(const std::string& spec, const std::string& what) {
  std::vector<double> out;
  auto to_d = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw InvalidArgument(fmt::format("{}: '{}' is not a number", what, s));
    }
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw InvalidArgument(fmt::format("{}: expected start:stop:step", what));
    const double a = to_d(parts[0]), b = to_d(parts[1]), step = to_d(parts[2]);
    if (!(step > 0.0) || b < a) throw InvalidArgument(fmt::format("{}: empty range '{}'", what, spec));
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(to_d(part));
  }
  if (out.empty()) throw InvalidArgument(fmt::format("{}: no values", what));
  return out;
}

struct Options {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;
  unsigned threads = 1;

  std::string table = "averaged";
  std::string input;
  int n = 50;
  int degree = 3;
  std::string fit_mode;
  int resamples = 100;
  double c = 0.0;
  double gamma = 0.0;
  int grid_points = 2001;

  std::string c_values = "0:10:0.25";
  std::string gamma_values = "0:1.5:0.1";
  std::string best_gamma_values = "0:1.5:0.05";

  double p = 0.5;
  std::string probs;
  std::string sim_mode;
  int reps = 100;
  int max_rounds = 0;

  double size_mb = 44.73;
  double ptx_dbm = 9.0;
  int cw = 15;
};

class Command {
 public:
  Command(CLI::App& app, Options& opts) : app_(app), opts_(opts) {}

  RunConfig config() const {
    RunConfig cfg = opts_.config_path.empty() ? RunConfig{} : load_run_config(opts_.config_path);
    if (given("--seed")) cfg.seed = opts_.seed;
    if (given("--n")) cfg.n = opts_.n;
    if (given("--degree")) cfg.degree = opts_.degree;
    if (given("--fit-mode")) cfg.fit_mode = fit_mode_from_string(opts_.fit_mode);
    if (given("--resamples")) cfg.resamples = opts_.resamples;
    if (given("--c")) cfg.c = opts_.c;
    if (given("--gamma")) cfg.gamma = opts_.gamma;
    if (given("--grid")) cfg.grid_points = opts_.grid_points;
    if (given("--mode")) {
      if (app_.get_name() == "simulate") {
        cfg.mode = sim_mode_from_string(opts_.sim_mode);
      } else {
        cfg.fit_mode = fit_mode_from_string(opts_.fit_mode);
      }
    }
    if (given("--reps")) cfg.reps = opts_.reps;
    if (given("--max-rounds")) cfg.max_rounds = opts_.max_rounds;
    if (given("--size-mb")) cfg.wifi.model_size_bits = opts_.size_mb * 8e6;
    if (given("--ptx-dbm")) cfg.energy.p_tx = dbm_to_watts(opts_.ptx_dbm);
    if (given("--cw")) cfg.wifi.cw = opts_.cw;
    return cfg;
  }

  std::vector<EmpiricalRow> rows() const {
    if (!opts_.input.empty()) {
      std::ifstream in(opts_.input);
      if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", opts_.input));
      return read_empirical_csv(in);
    }
    return load_empirical_table(table_source_from_string(opts_.table));
  }

  DurationModel duration_model(const RunConfig& cfg) const {
    FitOptions fo;
    fo.mode = cfg.fit_mode;
    fo.seed = cfg.seed;
    fo.resamples = cfg.resamples;
    const auto data = rows();
    return fit_duration_model(data, cfg.n, cfg.degree, fo);
  }

  GameConfig game(const RunConfig& cfg) const {
    GameConfig g{duration_model(cfg)};
    g.n = cfg.n;
    g.c = cfg.c;
    g.gamma = cfg.gamma;
    g.grid_points = cfg.grid_points;
    g.refine_tol = cfg.refine_tol;
    g.p_min = cfg.p_min;
    return g;
  }

 private:
  bool given(const std::string& name) const {
    for (const auto* app = &app_; app != nullptr; app = app->get_parent()) {
      try {
        if (app->get_option(name)->count() > 0) return true;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    return false;
  }

  CLI::App& app_;
  Options& opts_;
};

void cmd_data_export(const Command& cmd, std::ostream& out) {
  const auto data = cmd.rows();
  write_empirical_csv(out, data);
}

void cmd_fit(const Command& cmd, std::ostream& out) {
  const auto cfg = cmd.config();
  const auto data = cmd.rows();
  const auto dm = cmd.duration_model(cfg);
  out << "record,index,p,x,observed,fitted,residual\n";
  for (std::size_t j = 0; j < dm.coefficients().size(); ++j) {
    out << fmt::format("duration_coefficient,{},,,,{},\n", j, num(dm.coefficients()[j]));
  }
  out << fmt::format("duration_cap,,,,,{},\n", num(dm.d_cap()));
  std::optional<EnergyLinearModel> line;
  try {
    line = fit_energy_linear(data);
    out << fmt::format("energy_slope,,,,,{},\n", num(line->slope));
    out << fmt::format("energy_intercept,,,,,{},\n", num(line->intercept));
  } catch (const Error&) {
    // Constant round counts (e.g. synthetic data) leave the energy line undefined.
    out << "energy_slope,,,,,,\nenergy_intercept,,,,,,\n";
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double k = cfg.n * data[i].p;
    const double fit = dm.eval(k);
    out << fmt::format("duration_residual,{},{},{},{},{},{}\n", i, num(data[i].p), num(k),
                       num(data[i].d_mean), num(fit), num(data[i].d_mean - fit));
  }
  if (line) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double fit = (*line)(data[i].d_mean);
      out << fmt::format("energy_residual,{},{},{},{},{},{}\n", i, num(data[i].p),
                         num(data[i].d_mean), num(data[i].e_mean), num(fit),
                         num(data[i].e_mean - fit));
    }
  }
}

void cmd_solve(const Command& cmd, std::ostream& out) {
  const auto cfg = cmd.config();
  const auto g = cmd.game(cfg);
  g.validate();
  const auto opt = solve_social_optimum(g);
  out << "role,p,utility,cost,kind,residual,poa\n";
  try {
    const auto report = price_of_anarchy(g);
    for (const auto& ne : report.ne_set) {
      out << fmt::format("ne,{},{},{},{},{},\n", num(ne.p_star), num(ne.utility_at_ne),
                         num(-ne.utility_at_ne), to_string(ne.kind), num(ne.residual));
    }
    out << fmt::format("optimum,{},{},{},,,\n", num(report.p_opt), num(report.u_opt),
                       num(report.cost_optimum));
    out << fmt::format("poa,{},,{},worst_ne,,{}\n", num(report.p_ne_worst),
                       num(report.cost_worst_ne), num(report.poa));
  } catch (const NoEquilibrium&) {
    out << "ne,,,,no_equilibrium,,\n";
    out << fmt::format("optimum,{},{},{},,,\n", num(opt.p), num(opt.utility), num(-opt.utility));
    out << "poa,,,,poa_undefined,,\n";
  } catch (const ModelRegimeError&) {
    for (const auto& ne : solve_symmetric_ne(g)) {
      out << fmt::format("ne,{},{},{},{},{},\n", num(ne.p_star), num(ne.utility_at_ne),
                         num(-ne.utility_at_ne), to_string(ne.kind), num(ne.residual));
    }
    out << fmt::format("optimum,{},{},{},,,\n", num(opt.p), num(opt.utility), num(-opt.utility));
    out << "poa,,,,poa_undefined,,\n";
  }
}

void cmd_sweep(const Command& cmd, const Options& opts, std::ostream& out) {
  const auto cfg = cmd.config();
  const auto g = cmd.game(cfg);
  const auto cs = parse_values(opts.c_values, "--c-values");
  const auto gs = parse_values(opts.gamma_values, "--gamma-values");
  const auto rows = sweep(g, cs, gs, opts.threads);
  out << "c,gamma,p_ne,p_opt,u_ne,u_opt,poa,flags\n";
  for (const auto& r : rows) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    out << fmt::format("{},{},{},{},{},{},{},{}\n", num(r.c), num(r.gamma), opt_num(r.p_ne),
                       num(r.p_opt), opt_num(r.u_ne), num(r.u_opt), opt_num(r.poa), flags);
  }
}

void cmd_best_gamma(const Command& cmd, const Options& opts, std::ostream& out) {
  const auto cfg = cmd.config();
  const auto g = cmd.game(cfg);
  const auto gs = parse_values(opts.best_gamma_values, "--gamma-values");
  const double best = best_gamma(g, gs, cfg.c, opts.threads);
  out << "c,best_gamma\n" << fmt::format("{},{}\n", num(cfg.c), num(best));
}

void cmd_simulate(const Command& cmd, const Options& opts, std::ostream& out, bool p_given) {
  const auto cfg = cmd.config();
  std::vector<double> probs;
  if (!opts.probs.empty()) {
    if (p_given) throw InvalidArgument("--p and --probs are mutually exclusive");
    probs = parse_values(opts.probs, "--probs");
  } else {
    probs.assign(static_cast<std::size_t>(cfg.n), opts.p);
  }
  const auto dm = cmd.duration_model(cfg);
  SimConfig sim{ProbabilityProfile(probs), dm, cfg.energy, cfg.wifi};
  sim.mode = cfg.mode;
  sim.seed = cfg.seed;
  sim.max_rounds = cfg.max_rounds;
  sim.reps = cfg.reps;
  const auto summary = monte_carlo(sim, cfg.reps, opts.threads);
  write_monte_carlo_csv(out, summary);
}

void cmd_airtime(const Command& cmd, std::ostream& out) {
  const auto cfg = cmd.config();
  const auto b = airtime_breakdown(cfg.wifi);
  out << "component,value,unit\n";
  out << fmt::format("aggregates,{},count\n", b.aggregates);
  out << fmt::format("data_bits_per_symbol,{},bits\n", cfg.wifi.data_bits_per_symbol());
  out << fmt::format("backoff,{},s\n", num(b.backoff));
  out << fmt::format("control_frames,{},s\n", num(b.control));
  out << fmt::format("interframe_spaces,{},s\n", num(b.ifs));
  out << fmt::format("data_preamble,{},s\n", num(b.data_preamble));
  out << fmt::format("data_symbols,{},s\n", num(b.data_symbols));
  out << fmt::format("total_airtime,{},s\n", num(b.total));
  out << fmt::format("p_tx,{},W\n", num(cfg.energy.p_tx));
  out << fmt::format("tx_energy,{},J\n", num(cfg.energy.p_tx * b.total));
}

void cmd_calibrate(const Command& cmd, std::ostream& out) {
  const auto cfg = cmd.config();
  const auto data = cmd.rows();
  const auto result = calibrate_energy_params(data, cfg.energy, cfg.n, cfg.wifi);
  out << "record,p,d_mean,observed_wh,model_wh,rel_error,value\n";
  int within = 0;
  for (const auto& r : result.rows) {
    out << fmt::format("row,{},{},{},{},{},\n", num(r.p), num(r.d_mean), num(r.observed_wh),
                       num(r.model_wh), num(r.rel_error));
    within += std::abs(r.rel_error) <= 0.15 ? 1 : 0;
  }
  out << fmt::format("p_hw_w,,,,,,{}\n", num(result.params.p_hw));
  out << fmt::format("rms_rel_error,,,,,,{}\n", num(result.rms_rel_error));
  out << fmt::format("fraction_within_15pct,,,,,,{}\n",
                     num(static_cast<double>(within) / static_cast<double>(result.rows.size())));
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Participation game analytics for federated learning"};
  app.name("fedgame");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opts.config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", opts.seed, "Master random seed");
  app.add_option("--out", opts.out_path, "Write output to this file instead of stdout");
  app.add_option("--threads", opts.threads, "Worker threads (0 = all cores)");

  auto add_data_source = [&](CLI::App* sub) {
    sub->add_option("--table", opts.table, "Embedded table: averaged or single_seed");
    sub->add_option("--input", opts.input, "CSV in the data export schema")->check(CLI::ExistingFile);
  };
  auto add_fit = [&](CLI::App* sub) {
    add_data_source(sub);
    sub->add_option("--n", opts.n, "Number of nodes");
    sub->add_option("--degree", opts.degree, "Polynomial degree of d(k)");
    if (sub->get_name() == "simulate") {
      sub->add_option("--fit-mode", opts.fit_mode, "Fit mode: wls or resample");
    } else {
      sub->add_option("--mode,--fit-mode", opts.fit_mode, "Fit mode: wls or resample");
    }
    sub->add_option("--resamples", opts.resamples, "Normal draws per row in resample mode");
  };
  auto add_game = [&](CLI::App* sub) {
    add_fit(sub);
    sub->add_option("--c", opts.c, "Participation cost factor");
    sub->add_option("--gamma", opts.gamma, "Incentive weight");
    sub->add_option("--grid", opts.grid_points, "Probability grid points");
  };

  auto* data = app.add_subcommand("data", "Embedded measurement data");
  data->require_subcommand(1);
  auto* data_export = data->add_subcommand("export", "Write the embedded table as CSV");
  add_data_source(data_export);

  auto* fit = app.add_subcommand("fit", "Fit d(k) and the energy-vs-rounds line");
  add_fit(fit);

  auto* solve = app.add_subcommand("solve", "Equilibria, social optimum and PoA for one (c, gamma)");
  add_game(solve);

  auto* sweep_cmd = app.add_subcommand("sweep", "Equilibria over a (c, gamma) grid");
  add_game(sweep_cmd);
  sweep_cmd->add_option("--c-values", opts.c_values, "List a,b,c or range start:stop:step");
  sweep_cmd->add_option("--gamma-values", opts.gamma_values, "List or range");

  auto* best = app.add_subcommand("best-gamma", "Incentive weight maximizing equilibrium participation");
  add_game(best);
  best->add_option("--gamma-values", opts.best_gamma_values, "List or range");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo participation simulation");
  add_fit(simulate);
  auto* p_opt = simulate->add_option("--p", opts.p, "Symmetric participation probability");
  simulate->add_option("--probs", opts.probs, "Per-node probabilities a,b,c");
  simulate->add_option("--mode", opts.sim_mode, "Convergence model: static or progress");
  simulate->add_option("--reps", opts.reps, "Replications");
  simulate->add_option("--max-rounds", opts.max_rounds, "Round cap (0 = 10 * d_cap)");

  auto* airtime_cmd = app.add_subcommand("airtime", "802.11ax upload airtime and energy");
  airtime_cmd->add_option("--size-mb", opts.size_mb, "Model update size in MB");
  airtime_cmd->add_option("--ptx-dbm", opts.ptx_dbm, "Transmit power in dBm");
  airtime_cmd->add_option("--cw", opts.cw, "Contention window");

  auto* calibrate = app.add_subcommand("calibrate", "Fit hardware power to the energy column");
  add_data_source(calibrate);
  calibrate->add_option("--n", opts.n, "Number of nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!opts.out_path.empty()) {
      file.open(opts.out_path, std::ios::binary | std::ios::trunc);
      if (!file) throw InvalidArgument(fmt::format("cannot write '{}'", opts.out_path));
      sink = &file;
    }
    std::ostringstream buffer;
    const auto parsed = app.get_subcommands();
    if (parsed.empty()) throw InvalidArgument("no subcommand given");
    CLI::App* sub = parsed.front();
    const Command cmd(sub == data ? *data_export : *sub, opts);
    if (sub == data) {
      cmd_data_export(cmd, buffer);
    } else if (sub == fit) {
      cmd_fit(cmd, buffer);
    } else if (sub == solve) {
      cmd_solve(cmd, buffer);
    } else if (sub == sweep_cmd) {
      cmd_sweep(cmd, opts, buffer);
    } else if (sub == best) {
      cmd_best_gamma(cmd, opts, buffer);
    } else if (sub == simulate) {
      cmd_simulate(cmd, opts, buffer, p_opt->count() > 0);
    } else if (sub == airtime_cmd) {
      cmd_airtime(cmd, buffer);
    } else if (sub == calibrate) {
      cmd_calibrate(cmd, buffer);
    }
    *sink << buffer.str();
    sink->flush();
  } catch (const ParseError& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fedgame::cli
