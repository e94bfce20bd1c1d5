#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fedgame/empirics.hpp"
#include "fedgame/energy.hpp"
#include "fedgame/errors.hpp"
#include "fedgame/game.hpp"
#include "fedgame/pbdist.hpp"
#include "fedgame/simulate.hpp"

namespace py = pybind11;
using namespace fedgame;

namespace {

DurationModel fit_table(const std::string& table, int n, int degree, const std::string& mode,
                        std::uint64_t seed, int resamples) {
  FitOptions fo;
  fo.mode = mode == "resample" || mode == "stochastic_resample" ? FitMode::stochastic_resample
                                                                : FitMode::deterministic_wls;
  fo.seed = seed;
  fo.resamples = resamples;
  const auto rows = load_empirical_table(table_source_from_string(table));
  return fit_duration_model(rows, n, degree, fo);
}

GameConfig make_game(const DurationModel& dm, int n, double c, double gamma, int grid_points,
                     double refine_tol, double p_min) {
  GameConfig g{dm};
  g.n = n;
  g.c = c;
  g.gamma = gamma;
  g.grid_points = grid_points;
  g.refine_tol = refine_tol;
  g.p_min = p_min;
  g.validate();
  return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Participation game analytics for federated learning";

  static py::exception<Error> error(m, "FedgameError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::enum_<FitMode>(m, "FitMode")
      .value("deterministic_wls", FitMode::deterministic_wls)
      .value("stochastic_resample", FitMode::stochastic_resample);

  py::class_<DurationModel>(m, "DurationModel")
      .def(py::init<std::vector<double>, int, double>(), py::arg("coefficients"), py::arg("max_k"),
           py::arg("d_cap"))
      .def_static("constant", &DurationModel::constant, py::arg("max_k"), py::arg("value"))
      .def_static("interpolate",
                  [](const std::vector<double>& v) { return DurationModel::interpolate(v); })
      .def("eval", &DurationModel::eval, py::arg("k"))
      .def("__call__", &DurationModel::eval, py::arg("k"))
      .def("tabulate", &DurationModel::tabulate, py::arg("n"))
      .def_property_readonly("coefficients", &DurationModel::coefficients)
      .def_property_readonly("degree", &DurationModel::degree)
      .def_property_readonly("max_k", &DurationModel::max_k)
      .def_property_readonly("d_cap", &DurationModel::d_cap);

  m.def("load_empirical_table", [](const std::string& which) {
    py::list out;
    for (const auto& r : load_empirical_table(table_source_from_string(which))) {
      py::dict d;
      d["p"] = r.p;
      d["d_mean"] = r.d_mean;
      d["d_std"] = r.d_std;
      d["e_mean"] = r.e_mean;
      d["e_std"] = r.e_std;
      d["source"] = to_string(r.source);
      out.append(d);
    }
    return out;
  }, py::arg("which") = "averaged");

  m.def("fit_duration_model", &fit_table, py::arg("table") = "averaged", py::arg("n") = 50,
        py::arg("degree") = kDefaultDegree, py::arg("mode") = "wls", py::arg("seed") = 0,
        py::arg("resamples") = 100);

  m.def("poibin_pmf", [](const std::vector<double>& p) { return poibin_pmf(p).mass; },
        py::arg("probs"));
  m.def("expected_duration", [](const std::vector<double>& p, const DurationModel& dm) {
    return expected_duration(ProbabilityProfile(p), dm);
  }, py::arg("probs"), py::arg("dm"));
  m.def("duration_gradient", [](const std::vector<double>& p, std::size_t i, const DurationModel& dm) {
    return duration_gradient(ProbabilityProfile(p), i, dm);
  }, py::arg("probs"), py::arg("i"), py::arg("dm"));

  py::class_<GameConfig>(m, "GameConfig")
      .def(py::init(&make_game), py::arg("dm"), py::arg("n") = 50, py::arg("c") = 0.0,
           py::arg("gamma") = 0.0, py::arg("grid_points") = 2001, py::arg("refine_tol") = 1e-8,
           py::arg("p_min") = 1e-6)
      .def_readwrite("n", &GameConfig::n)
      .def_readwrite("c", &GameConfig::c)
      .def_readwrite("gamma", &GameConfig::gamma)
      .def_readwrite("grid_points", &GameConfig::grid_points);

  py::class_<EquilibriumResult>(m, "EquilibriumResult")
      .def_readonly("p_star", &EquilibriumResult::p_star)
      .def_readonly("utility", &EquilibriumResult::utility_at_ne)
      .def_readonly("residual", &EquilibriumResult::residual)
      .def_property_readonly("kind", [](const EquilibriumResult& r) { return to_string(r.kind); })
      .def("__repr__", [](const EquilibriumResult& r) {
        return "EquilibriumResult(p_star=" + std::to_string(r.p_star) + ", kind=" + to_string(r.kind) + ")";
      });

  py::class_<PoAReport>(m, "PoAReport")
      .def_readonly("poa", &PoAReport::poa)
      .def_readonly("cost_worst_ne", &PoAReport::cost_worst_ne)
      .def_readonly("cost_optimum", &PoAReport::cost_optimum)
      .def_readonly("p_ne_worst", &PoAReport::p_ne_worst)
      .def_readonly("p_opt", &PoAReport::p_opt)
      .def_readonly("ne_set", &PoAReport::ne_set);

  m.def("aoi", &aoi, py::arg("p"));
  m.def("symmetric_utility", &symmetric_utility, py::arg("p"), py::arg("cfg"));
  m.def("marginal_utility", [](const std::vector<double>& p, std::size_t i, const GameConfig& cfg) {
    return marginal_utility(ProbabilityProfile(p), i, cfg);
  }, py::arg("probs"), py::arg("i"), py::arg("cfg"));
  m.def("best_response", [](std::size_t i, const std::vector<double>& p, const GameConfig& cfg) {
    return best_response(i, ProbabilityProfile(p), cfg);
  }, py::arg("i"), py::arg("probs"), py::arg("cfg"));
  m.def("solve_symmetric_ne", &solve_symmetric_ne, py::arg("cfg"));
  m.def("solve_social_optimum", [](const GameConfig& cfg) {
    const auto opt = solve_social_optimum(cfg);
    return py::make_tuple(opt.p, opt.utility);
  }, py::arg("cfg"));
  m.def("price_of_anarchy", &price_of_anarchy, py::arg("cfg"));
  m.def("sweep", [](const GameConfig& cfg, const std::vector<double>& cs,
                    const std::vector<double>& gs, unsigned threads) {
    py::list out;
    for (const auto& r : sweep(cfg, cs, gs, threads)) {
      py::dict d;
      d["c"] = r.c;
      d["gamma"] = r.gamma;
      d["p_ne"] = r.p_ne ? py::cast(*r.p_ne) : py::none();
      d["p_opt"] = r.p_opt;
      d["u_ne"] = r.u_ne ? py::cast(*r.u_ne) : py::none();
      d["u_opt"] = r.u_opt;
      d["poa"] = r.poa ? py::cast(*r.poa) : py::none();
      d["flags"] = r.flags;
      out.append(d);
    }
    return out;
  }, py::arg("cfg"), py::arg("c_values"), py::arg("gamma_values"), py::arg("threads") = 1);
  m.def("best_gamma", [](const GameConfig& cfg, const std::vector<double>& gs, double at_c,
                         unsigned threads) { return best_gamma(cfg, gs, at_c, threads); },
        py::arg("cfg"), py::arg("gamma_values"), py::arg("at_c") = 0.0, py::arg("threads") = 1);

  py::class_<WifiParams>(m, "WifiParams")
      .def(py::init<>())
      .def_readwrite("model_size_bits", &WifiParams::model_size_bits)
      .def_readwrite("cw", &WifiParams::cw)
      .def_readwrite("max_ampdu_bits", &WifiParams::max_ampdu_bits)
      .def_property_readonly("data_bits_per_symbol", &WifiParams::data_bits_per_symbol);

  py::class_<EnergyParams>(m, "EnergyParams")
      .def(py::init<>())
      .def_readwrite("p_hw", &EnergyParams::p_hw)
      .def_readwrite("p_idle", &EnergyParams::p_idle)
      .def_readwrite("p_tx", &EnergyParams::p_tx)
      .def_readwrite("t_round", &EnergyParams::t_round);

  m.def("dbm_to_watts", &dbm_to_watts, py::arg("dbm"));
  m.def("airtime", &airtime, py::arg("wifi") = WifiParams{});
  m.def("tx_energy", &tx_energy, py::arg("wifi") = WifiParams{}, py::arg("ep") = EnergyParams{});
  m.def("calibrate_hardware_power", [](const std::string& table, int n) {
    const auto rows = load_empirical_table(table_source_from_string(table));
    return calibrate_energy_params(rows, EnergyParams{}, n, WifiParams{}).params.p_hw;
  }, py::arg("table") = "averaged", py::arg("n") = 50);

  m.def("monte_carlo", [](const std::vector<double>& probs, const DurationModel& dm,
                          const std::string& mode, std::uint64_t seed, int reps, int max_rounds,
                          unsigned threads) {
    SimConfig cfg{ProbabilityProfile(probs), dm, EnergyParams{}, WifiParams{}};
    cfg.mode = sim_mode_from_string(mode);
    cfg.seed = seed;
    cfg.reps = reps;
    cfg.max_rounds = max_rounds;
    const auto s = monte_carlo(cfg, reps, threads);
    py::dict d;
    d["mean_rounds"] = s.mean_rounds;
    d["std_rounds"] = s.std_rounds;
    d["mean_energy_wh"] = s.mean_energy_wh;
    d["std_energy_wh"] = s.std_energy_wh;
    d["truncation_rate"] = s.truncation_rate;
    d["valid"] = s.valid;
    py::list rounds;
    for (const auto& r : s.runs) rounds.append(r.rounds);
    d["rounds"] = rounds;
    return d;
  }, py::arg("probs"), py::arg("dm"), py::arg("mode") = "progress", py::arg("seed") = 0,
     py::arg("reps") = 100, py::arg("max_rounds") = 0, py::arg("threads") = 1);
}
