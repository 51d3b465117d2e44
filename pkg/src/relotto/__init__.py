"""Relativistic quantum Otto engine toolkit.

Exact cycle energetics for a harmonic-oscillator working medium whose cold
bath moves at relativistic speed, the adiabaticity factor of arbitrary
frequency-modulation strokes, the closed-form efficiency bounds for the
adiabatic and sudden-quench regimes, and seeded Monte Carlo machinery that
certifies those bounds numerically.
"""

__version__ = "0.1.0"

from .adiabaticity import (
    DriveProtocol,
    IntegrationError,
    OscillatorTrajectory,
    lambda_closed_form,
    lambda_for_protocol,
    lambda_from_trajectory,
    solve_husimi,
    stroke_lambda_pair,
)
from .bounds import (
    BoundsReport,
    bounds_report,
    directional_temperature,
    effective_temperature,
    emw_adiabatic,
    eta_ss_exact,
    eta_ss_high_t,
    eta_ss_mw,
    eta_ss_upper,
    generalized_carnot,
    pwc_threshold,
    rezek_kosloff,
    w_adiabatic_high_t,
    w_ss_exact,
    w_ss_high_t,
    z_squared_from_eta,
)
from .thermo import (
    BathSpec,
    CycleEnergies,
    CycleResult,
    EngineParams,
    Velocity,
    coth,
    cycle_energies,
    cycle_quantities,
    doppler_factor,
    energy_a,
    energy_b,
    energy_c,
    energy_d,
    evaluate_cycle,
    log1m_exp,
    log_sinh,
    mean_photon_moving,
    thermal_energy_moving,
)
from .verify import (
    EnsembleConfig,
    FIG_HISTOGRAM,
    FIG_SCATTER,
    HistogramSpec,
    SampleEnsemble,
    high_t_convergence,
    maximize_scalar,
    run_all_checks,
    run_histogram,
    run_scatter,
    solid_angle_average_inverse_doppler,
)

__all__ = [
    "BathSpec",
    "BoundsReport",
    "CycleEnergies",
    "CycleResult",
    "DriveProtocol",
    "EngineParams",
    "EnsembleConfig",
    "FIG_HISTOGRAM",
    "FIG_SCATTER",
    "HistogramSpec",
    "IntegrationError",
    "OscillatorTrajectory",
    "SampleEnsemble",
    "Velocity",
    "bounds_report",
    "coth",
    "cycle_energies",
    "cycle_quantities",
    "directional_temperature",
    "doppler_factor",
    "effective_temperature",
    "emw_adiabatic",
    "energy_a",
    "energy_b",
    "energy_c",
    "energy_d",
    "eta_ss_exact",
    "eta_ss_high_t",
    "eta_ss_mw",
    "eta_ss_upper",
    "evaluate_cycle",
    "generalized_carnot",
    "high_t_convergence",
    "lambda_closed_form",
    "lambda_for_protocol",
    "lambda_from_trajectory",
    "log1m_exp",
    "log_sinh",
    "maximize_scalar",
    "mean_photon_moving",
    "pwc_threshold",
    "rezek_kosloff",
    "run_all_checks",
    "run_histogram",
    "run_scatter",
    "solid_angle_average_inverse_doppler",
    "solve_husimi",
    "stroke_lambda_pair",
    "thermal_energy_moving",
    "w_adiabatic_high_t",
    "w_ss_exact",
    "w_ss_high_t",
    "z_squared_from_eta",
]
