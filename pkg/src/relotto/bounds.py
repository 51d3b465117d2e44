"""Closed-form efficiency bounds and optimal operating points.

Everything here is expressed in the reduced parameters

    z   = omega_c / omega_h   (compression ratio),
    tau = beta_h / beta_c     (temperature ratio, eta_Carnot = 1 - tau),
    v   = cold-bath speed,

with the Doppler weight f(v) from :func:`relotto.thermo.doppler_factor`.
Adiabatic driving (lam = 1) is capped by the generalized Carnot bound
1 - tau f(v); a sudden quench is capped by an analogous expression that
never reaches 1/2.  The exact sudden-quench work and efficiency are also
provided as an independent transcription to cross-check the corner-energy
cycle evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .thermo import coth, doppler_factor, thermal_energy_moving


def _check_unit_interval(x, name):
    x = float(x)
    if not math.isfinite(x) or not 0.0 < x < 1.0:
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {x!r}")
    return x


def _check_speed(v):
    v = float(v)
    if not math.isfinite(v) or v < 0.0 or v >= 1.0:
        raise ValueError(f"speed must satisfy 0 <= v < 1, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# effective temperatures and adiabatic-regime bounds
# ---------------------------------------------------------------------------

def directional_temperature(T, v, theta) -> float:
    """Apparent temperature of a bath moving at speed v seen at angle theta.

        T_eff(theta) = T sqrt(1 - v^2) / (1 - v cos(theta))
    """
    T = float(T)
    if not T > 0.0:
        raise ValueError("temperature must be positive")
    v = _check_speed(v)
    theta = float(theta)
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    return T * math.sqrt((1.0 - v) * (1.0 + v)) / (1.0 - v * math.cos(theta))


def effective_temperature(T, v) -> float:
    """Isotropic (solid-angle averaged) effective temperature T * f(v)."""
    T = float(T)
    if not T > 0.0:
        raise ValueError("temperature must be positive")
    return T * float(doppler_factor(v))


def generalized_carnot(tau, v) -> float:
    """Efficiency ceiling 1 - tau f(v) for adiabatic driving.

    Equals the Carnot bound 1 - tau at v = 0 and tends to 1 as v -> 1: the
    moving cold bath looks colder by the factor f(v).
    """
    tau = _check_unit_interval(tau, "tau")
    return 1.0 - tau * float(doppler_factor(v))


def pwc_threshold(regime: str, tau, v) -> float:
    """Work-extraction threshold: minimum z (adiabatic) or z^2 (sudden).

    Both regimes share the value tau * f(v); for the sudden regime it bounds
    the squared compression ratio.
    """
    tau = _check_unit_interval(tau, "tau")
    if regime not in ("adiabatic", "sudden"):
        raise ValueError(f"unknown regime {regime!r}")
    return tau * float(doppler_factor(v))


def emw_adiabatic(tau, v) -> float:
    """Efficiency at maximum work for adiabatic driving: 1 - sqrt(tau f(v)).

    The high-temperature work (1 - z)(z - tau f)/z peaks at z* = sqrt(tau f),
    so the efficiency 1 - z there is 1 - sqrt(tau f); at v = 0 this is the
    Curzon-Ahlborn value 1 - sqrt(tau).
    """
    tau = _check_unit_interval(tau, "tau")
    return 1.0 - math.sqrt(tau * float(doppler_factor(v)))


def w_adiabatic_high_t(z, tau, v, beta_h) -> float:
    """High-temperature extracted work per cycle, adiabatic driving.

        W = (1 - z)(z - tau f(v)) / (beta_h z)

    Negative below the threshold z = tau f(v).
    """
    z = _check_unit_interval(z, "z")
    tau = _check_unit_interval(tau, "tau")
    beta_h = float(beta_h)
    if not beta_h > 0.0:
        raise ValueError("beta_h must be positive")
    return (1.0 - z) * (z - tau * float(doppler_factor(v))) / (beta_h * z)


# ---------------------------------------------------------------------------
# sudden-quench regime
# ---------------------------------------------------------------------------

def _sudden_pieces(omega_c, omega_h, beta_c, beta_h, v):
    omega_c, omega_h = float(omega_c), float(omega_h)
    beta_c, beta_h = float(beta_c), float(beta_h)
    v = _check_speed(v)
    if not 0.0 < omega_c < omega_h:
        raise ValueError("need 0 < omega_c < omega_h")
    if not beta_c > beta_h > 0.0:
        raise ValueError("need beta_c > beta_h > 0")
    coth_h = float(coth(0.5 * beta_h * omega_h))
    # 2S = sqrt(1-v^2)/(beta_c v) * log(sinh ratio); thermal_energy_moving
    # carries the stable small-v branch
    s_cold = float(thermal_energy_moving(beta_c, omega_c, v))
    wc2, wh2 = omega_c * omega_c, omega_h * omega_h
    work = (wh2 - wc2) / (4.0 * wc2 * omega_h) * (wc2 * coth_h - 2.0 * omega_h * s_cold)
    q_h = (wc2 * omega_h * coth_h - (wc2 + wh2) * s_cold) / (2.0 * wc2)
    return work, q_h


def w_ss_exact(omega_c, omega_h, beta_c, beta_h, v) -> float:
    """Exact extracted work of the sudden-quench cycle (any temperature)."""
    work, _ = _sudden_pieces(omega_c, omega_h, beta_c, beta_h, v)
    return work


def eta_ss_exact(omega_c, omega_h, beta_c, beta_h, v) -> float | None:
    """Exact sudden-quench efficiency, or None outside engine mode.

    Single rational expression in the stable kernels; agrees with
    :func:`relotto.thermo.evaluate_cycle` at lam = (wc^2 + wh^2)/(2 wc wh)
    and always stays below 1/2 in engine mode.
    """
    work, q_h = _sudden_pieces(omega_c, omega_h, beta_c, beta_h, v)
    if not (work > 0.0 and q_h > 0.0):
        return None
    return work / q_h


def w_ss_high_t(z, tau, v, beta_h) -> float:
    """High-temperature sudden-quench work (1 - z^2)(z^2 - tau f) / (2 z^2 beta_h)."""
    z = _check_unit_interval(z, "z")
    tau = _check_unit_interval(tau, "tau")
    beta_h = float(beta_h)
    if not beta_h > 0.0:
        raise ValueError("beta_h must be positive")
    z2 = z * z
    return (1.0 - z2) * (z2 - tau * float(doppler_factor(v))) / (2.0 * z2 * beta_h)


def eta_ss_high_t(z, tau, v) -> float:
    """High-temperature sudden-quench efficiency.

        eta = (1 - z^2)(z^2 - tau f) / (z^2 (2 - tau f) - tau f)

    This is the direct beta -> 0 limit of the exact expression; the
    denominator carries tau f(v) (not a bare tau), which is what the
    convergence check in :mod:`relotto.verify` certifies.
    """
    z = _check_unit_interval(z, "z")
    tau = _check_unit_interval(tau, "tau")
    a = tau * float(doppler_factor(v))
    z2 = z * z
    return (1.0 - z2) * (z2 - a) / (z2 * (2.0 - a) - a)


def z_squared_from_eta(eta, tau, v, branch: str = "lower") -> float:
    """Invert the high-temperature sudden efficiency for z^2.

    eta(z^2) is unimodal, so each achievable efficiency is reached by two
    compression ratios; ``branch`` picks the smaller ("lower", the root that
    tends to the work threshold tau f(v) as eta -> 0) or the larger
    ("upper") one.  Raises for efficiencies beyond the achievable maximum
    (negative discriminant).
    """
    eta = float(eta)
    tau = _check_unit_interval(tau, "tau")
    a = tau * float(doppler_factor(v))
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta!r}")
    if branch not in ("lower", "upper"):
        raise ValueError(f"unknown branch {branch!r}")
    b = 1.0 + a - eta * (2.0 - a)
    c = a * (1.0 - eta)
    disc = b * b - 4.0 * c
    if disc < 0.0:
        raise ValueError(f"eta = {eta!r} is not achievable at tau = {tau!r}, v = {v!r}")
    root = math.sqrt(disc)
    return 0.5 * (b - root) if branch == "lower" else 0.5 * (b + root)


def eta_ss_upper(eta_carnot, v) -> float:
    """Efficiency ceiling of the sudden-quench engine, always below 1/2.

        eta_up = [1 - f(v)(1 - eta_C)] / [sqrt(2) + sqrt(f(v)(1 - eta_C))]^2

    Approaches 1/2 as v -> 1 and can exceed the Carnot value 1 - tau for
    small eta_C at large v.
    """
    eta_carnot = _check_unit_interval(eta_carnot, "eta_carnot")
    a = float(doppler_factor(v)) * (1.0 - eta_carnot)
    return (1.0 - a) / (math.sqrt(2.0) + math.sqrt(a)) ** 2


def rezek_kosloff(tau) -> float:
    """Stationary-bath sudden-quench efficiency at maximum work, (1-sqrt(tau))/(2+sqrt(tau))."""
    tau = _check_unit_interval(tau, "tau")
    s = math.sqrt(tau)
    return (1.0 - s) / (2.0 + s)


def eta_ss_mw(tau, v) -> float:
    """Sudden-quench efficiency at maximum work.

    The high-temperature work peaks at z^2 = sqrt(tau f(v)); with
    s = sqrt(tau f(v)) the efficiency there is (1 - s)/(2 + s), equivalently
    (2 + tau f - 3 sqrt(tau f))/(4 - tau f).  Reduces to the Rezek-Kosloff
    value at v = 0.
    """
    tau = _check_unit_interval(tau, "tau")
    s = math.sqrt(tau * float(doppler_factor(v)))
    return (1.0 - s) / (2.0 + s)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    """Every bound and threshold at one (tau, v) point.

    ``t_c_eff`` is the isotropic effective cold temperature in units of the
    hot temperature, i.e. tau * f(v).
    """

    tau: float
    v: float
    eta_carnot: float
    eta_gen_carnot: float
    t_c_eff: float
    eta_mw_adiabatic: float
    z_min_adiabatic: float
    z2_min_sudden: float
    eta_ss_upper: float
    eta_ss_mw: float
    eta_rk: float


def bounds_report(tau, v) -> BoundsReport:
    """Evaluate all closed-form bounds at one (tau, v) point."""
    tau = _check_unit_interval(tau, "tau")
    v = _check_speed(v)
    fv = float(doppler_factor(v))
    eta_carnot = 1.0 - tau
    return BoundsReport(
        tau=tau,
        v=v,
        eta_carnot=eta_carnot,
        eta_gen_carnot=1.0 - tau * fv,
        t_c_eff=tau * fv,
        eta_mw_adiabatic=emw_adiabatic(tau, v),
        z_min_adiabatic=tau * fv,
        z2_min_sudden=tau * fv,
        eta_ss_upper=eta_ss_upper(eta_carnot, v),
        eta_ss_mw=eta_ss_mw(tau, v),
        eta_rk=rezek_kosloff(tau),
    )
