"""Participation game analytics for federated learning.

Thin Python surface over the C++ core: Poisson-Binomial participant counts,
duration fits on the embedded measurements, symmetric Nash equilibria, social
optimum, price of anarchy, 802.11ax airtime and the Monte-Carlo simulator.
"""

from ._core import (  # noqa: F401
    DurationModel,
    EnergyParams,
    EquilibriumResult,
    FedgameError,
    FitMode,
    GameConfig,
    PoAReport,
    WifiParams,
    airtime,
    aoi,
    best_gamma,
    best_response,
    calibrate_hardware_power,
    dbm_to_watts,
    duration_gradient,
    expected_duration,
    fit_duration_model,
    load_empirical_table,
    marginal_utility,
    monte_carlo,
    poibin_pmf,
    price_of_anarchy,
    solve_social_optimum,
    solve_symmetric_ne,
    sweep,
    symmetric_utility,
    tx_energy,
)

__version__ = "0.1.0"
