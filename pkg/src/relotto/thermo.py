"""Exact energetics of a quantum Otto cycle whose cold bath moves relativistically.

The working medium is a harmonic oscillator driven between frequencies
``omega_c`` and ``omega_h`` (natural units, hbar = k_B = c = 1).  The hot
isochore couples the oscillator to a stationary bath at inverse temperature
``beta_h``; the cold isochore couples it to a bath at ``beta_c`` seen from a
frame moving at speed ``v``.  Doppler reshaping of the cold bath enters only
through the thermal occupation of the oscillator mode, which is what
:func:`mean_photon_moving` evaluates.

Sign conventions used throughout (and by everything downstream):

* heat absorbed by the medium is positive (``q_h``, ``q_c``),
* ``w_ab`` and ``w_cd`` are the works performed *on* the medium during the
  compression and expansion strokes (energy differences along the stroke),
* extracted work is ``w_ext = q_h + q_c = -(w_ab + w_cd)``, positive when the
  cycle runs as an engine.

All kernels are evaluated in the log domain so that large ``beta * omega``
and ultra-relativistic speeds cannot overflow, and the small-``v`` limits are
taken analytically instead of through 0/0 cancellation.  Every public kernel
broadcasts over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LN2 = math.log(2.0)

#: speed below which the closed v = 0 forms are used instead of the moving-bath
#: kernels (which are 0/0 at v = 0)
SMALL_V = 1e-12

#: speed below which the Doppler factor is evaluated by its Taylor series
SMALL_V_SERIES = 1e-3

MODE_ENGINE = "engine"
MODE_NON_ENGINE = "non_engine"


# ---------------------------------------------------------------------------
# numerically stable scalar kernels
# ---------------------------------------------------------------------------

def log_sinh(x):
    """log(sinh(x)) for x > 0 without overflow.

    Uses sinh(x) = exp(x) (1 - exp(-2x)) / 2, i.e.

        log sinh(x) = x - log 2 + log(1 - exp(-2x)),

    so the result stays finite for arbitrarily large x.  Small arguments go
    through log(-expm1(-2x)) which is exact down to the underflow threshold.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError("log_sinh requires x > 0")
    with np.errstate(divide="ignore", over="ignore"):
        out = x - LN2 + _log1m_exp_raw(2.0 * x)
    return out if out.ndim else float(out)


def log1m_exp(x):
    """log(1 - exp(-x)) for x > 0, accurate for both tiny and huge x.

    Splits at x = log 2: below it 1 - exp(-x) is small and -expm1(-x) keeps
    full relative precision; above it exp(-x) is small and log1p(-exp(-x))
    does.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError("log1m_exp requires x > 0")
    out = _log1m_exp_raw(x)
    return out if out.ndim else float(out)


def _log1m_exp_raw(x):
    # assumes x > 0 already validated; keeps both branch evaluations safe
    cut = x > LN2
    big = np.where(cut, x, 1.0)
    small = np.where(cut, 1.0, x)
    return np.where(cut, np.log1p(-np.exp(-big)), np.log(-np.expm1(-small)))


def coth(x):
    """coth(x) for x > 0 via 1 + 2/expm1(2x); saturates cleanly to 1."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError("coth requires x > 0")
    with np.errstate(over="ignore"):
        out = 1.0 + 2.0 / np.expm1(2.0 * x)
    return out if out.ndim else float(out)


def doppler_factor(v):
    """Solid-angle averaged inverse Doppler shift f(v) of a bath moving at speed v.

        f(v) = sqrt(1 - v^2) / (2 v) * log((1 + v) / (1 - v))

    f is strictly decreasing on (0, 1) with f(0) = 1 and f -> 0 as v -> 1.
    Below ``SMALL_V_SERIES`` the 0/0 form is replaced by the series
    1 - v^2/6 - 11 v^4/120.
    """
    v = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(v)) or np.any(v < 0.0) or np.any(v >= 1.0):
        raise ValueError("speed must satisfy 0 <= v < 1")
    small = v < SMALL_V_SERIES
    vm = np.where(small, 0.5, v)
    direct = np.sqrt((1.0 - vm) * (1.0 + vm)) * (np.log1p(vm) - np.log1p(-vm)) / (2.0 * vm)
    v2 = v * v
    series = 1.0 - v2 / 6.0 - 11.0 * v2 * v2 / 120.0
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def mean_photon_moving(beta, omega, v):
    """Mean occupation of an oscillator mode thermalized with a moving bath.

        n(beta, omega, v) = log[(1 - e^{-beta omega g (1+v)}) /
                                (1 - e^{-beta omega g (1-v)})] / (2 g v beta omega)

    with g = 1/sqrt(1 - v^2).  At v = 0 this is the Planck occupation
    1/(expm1(beta omega)).  The log ratio is folded into a single log1p so no
    precision is lost when the two arguments are close (small v): with
    x = beta omega g,

        log ratio = log1p[ e^{-x(1-v)} (1 - e^{-2xv}) / (1 - e^{-x(1-v)}) ].
    """
    beta = np.asarray(beta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_positive(beta, "beta")
    _check_positive(omega, "omega")
    if np.any(~np.isfinite(v)) or np.any(v < 0.0) or np.any(v >= 1.0):
        raise ValueError("speed must satisfy 0 <= v < 1")

    small = v < SMALL_V
    vm = np.where(small, 0.5, v)
    g = 1.0 / np.sqrt((1.0 - vm) * (1.0 + vm))
    x = beta * omega * g
    with np.errstate(over="ignore", divide="ignore"):
        num = np.exp(-x * (1.0 - vm)) * (-np.expm1(-2.0 * x * vm))
        den = -np.expm1(-x * (1.0 - vm))
        moving = np.log1p(num / den) / (2.0 * g * vm * beta * omega)
        rest = 1.0 / np.expm1(beta * omega)
    out = np.where(small, rest, moving)
    return out if out.ndim else float(out)


def thermal_energy_moving(beta, omega, v):
    """Mean oscillator energy after thermalizing with a bath moving at speed v.

    Log-of-sinh-ratio form:

        E = sqrt(1 - v^2) / (2 beta v) *
            log[ sinh(x_+) / sinh(x_-) ],      x_± = (beta omega / 2) sqrt((1±v)/(1∓v))

    The argument difference x_+ - x_- = beta omega v / sqrt(1 - v^2) is formed
    analytically, so the expression stays accurate down to v ~ SMALL_V, below
    which the stationary form (omega/2) coth(beta omega / 2) takes over.
    Satisfies E = (mean_photon_moving + 1/2) * omega.
    """
    beta = np.asarray(beta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_positive(beta, "beta")
    _check_positive(omega, "omega")
    if np.any(~np.isfinite(v)) or np.any(v < 0.0) or np.any(v >= 1.0):
        raise ValueError("speed must satisfy 0 <= v < 1")

    small = v < SMALL_V
    vm = np.where(small, 0.5, v)
    root = np.sqrt((1.0 + vm) / (1.0 - vm))
    x_plus = 0.5 * beta * omega * root
    x_minus = 0.5 * beta * omega / root
    gap = beta * omega * vm / np.sqrt((1.0 - vm) * (1.0 + vm))  # x_+ - x_-
    with np.errstate(over="ignore", divide="ignore"):
        # log sinh(x_+) - log sinh(x_-) with the cancellation folded into log1p
        num = np.exp(-2.0 * x_minus) * (-np.expm1(-2.0 * gap))
        den = -np.expm1(-2.0 * x_minus)
        log_ratio = gap + np.log1p(num / den)
        moving = np.sqrt((1.0 - vm) * (1.0 + vm)) * log_ratio / (2.0 * beta * vm)
        rest = 0.5 * omega * (1.0 + 2.0 / np.expm1(beta * omega))
    out = np.where(small, rest, moving)
    return out if out.ndim else float(out)


def _check_positive(x, name):
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError(f"{name} must be positive and finite")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Velocity:
    """Dimensionless speed in units of the speed of light, 0 <= v < 1."""

    v: float

    def __post_init__(self):
        v = float(self.v)
        if not math.isfinite(v) or v < 0.0 or v >= 1.0:
            raise ValueError(f"speed must satisfy 0 <= v < 1, got {self.v}")
        object.__setattr__(self, "v", v)

    @property
    def gamma(self) -> float:
        """Lorentz factor 1/sqrt(1 - v^2); equals 1 exactly at v = 0."""
        if self.v == 0.0:
            return 1.0
        return 1.0 / math.sqrt((1.0 - self.v) * (1.0 + self.v))

    def __float__(self) -> float:
        return self.v


@dataclass(frozen=True)
class BathSpec:
    """A thermal reservoir: inverse temperature plus its lab-frame velocity."""

    beta: float
    velocity: Velocity = Velocity(0.0)

    def __post_init__(self):
        beta = float(self.beta)
        if not math.isfinite(beta) or beta <= 0.0:
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        object.__setattr__(self, "beta", beta)
        if not isinstance(self.velocity, Velocity):
            object.__setattr__(self, "velocity", Velocity(float(self.velocity)))


@dataclass(frozen=True)
class EngineParams:
    """One operating point of the cycle.

    Requires 0 < omega_c < omega_h, beta_c > beta_h > 0 (the cold bath really
    is colder) and a work-stroke adiabaticity factor lam >= 1 (lam = 1 is
    frictionless driving).  ``v`` is the speed of the cold-stroke motion; the
    hot bath is always stationary.
    """

    omega_c: float
    omega_h: float
    beta_c: float
    beta_h: float
    v: Velocity = Velocity(0.0)
    lam: float = 1.0

    def __post_init__(self):
        for name in ("omega_c", "omega_h", "beta_c", "beta_h", "lam"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")
            object.__setattr__(self, name, val)
        if not isinstance(self.v, Velocity):
            object.__setattr__(self, "v", Velocity(float(self.v)))
        if not 0.0 < self.omega_c < self.omega_h:
            raise ValueError(
                f"need 0 < omega_c < omega_h, got omega_c={self.omega_c}, omega_h={self.omega_h}"
            )
        if not self.beta_c > self.beta_h > 0.0:
            raise ValueError(
                f"need beta_c > beta_h > 0, got beta_c={self.beta_c}, beta_h={self.beta_h}"
            )
        if self.lam < 1.0:
            raise ValueError(f"adiabaticity factor must satisfy lam >= 1, got {self.lam}")

    @classmethod
    def from_baths(cls, cold: BathSpec, hot: BathSpec, omega_c, omega_h, lam=1.0):
        if hot.velocity.v != 0.0:
            raise ValueError("the hot bath must be stationary")
        return cls(omega_c=omega_c, omega_h=omega_h, beta_c=cold.beta,
                   beta_h=hot.beta, v=cold.velocity, lam=lam)

    @property
    def z(self) -> float:
        """Compression ratio omega_c/omega_h in (0, 1)."""
        return self.omega_c / self.omega_h

    @property
    def tau(self) -> float:
        """Temperature ratio beta_h/beta_c = T_c/T_h in (0, 1)."""
        return self.beta_h / self.beta_c


@dataclass(frozen=True)
class CycleEnergies:
    """Mean oscillator energies at the four cycle corners A, B, C, D."""

    h_a: float
    h_b: float
    h_c: float
    h_d: float

    def __post_init__(self):
        for name in ("h_a", "h_b", "h_c", "h_d"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"corner energy {name} must be positive")


@dataclass(frozen=True)
class CycleResult:
    """Per-stroke works and heats plus the net cycle bookkeeping.

    ``w_ab``/``w_cd`` are works done on the medium, ``q_h``/``q_c`` heats
    absorbed by it, ``w_ext = q_h + q_c`` the net extracted work.  ``eta`` is
    populated only in engine mode (w_ext > 0 and q_h > 0).
    """

    w_ab: float
    w_cd: float
    q_h: float
    q_c: float
    w_ext: float
    mode: str
    eta: float | None = None
    energies: CycleEnergies | None = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# cycle evaluation
# ---------------------------------------------------------------------------

def _corner_energies(omega_c, omega_h, beta_c, beta_h, v, lam):
    """Corner energies as broadcastable arrays; inputs pre-validated."""
    h_a = thermal_energy_moving(beta_c, omega_c, v)
    h_b = h_a * (np.asarray(omega_h, dtype=float) / omega_c) * lam
    coth_h = coth(0.5 * np.asarray(beta_h, dtype=float) * omega_h)
    h_c = 0.5 * np.asarray(omega_h, dtype=float) * coth_h
    h_d = 0.5 * np.asarray(omega_c, dtype=float) * lam * coth_h
    return h_a, h_b, h_c, h_d


def energy_a(params: EngineParams) -> float:
    """Corner A: oscillator thermal with the moving cold bath at omega_c."""
    return float(thermal_energy_moving(params.beta_c, params.omega_c, params.v.v))


def energy_b(params: EngineParams) -> float:
    """Corner B: corner-A energy scaled by (omega_h/omega_c) * lam."""
    return energy_a(params) * (params.omega_h / params.omega_c) * params.lam


def energy_c(params: EngineParams) -> float:
    """Corner C: oscillator thermal with the stationary hot bath at omega_h."""
    return 0.5 * params.omega_h * float(coth(0.5 * params.beta_h * params.omega_h))


def energy_d(params: EngineParams) -> float:
    """Corner D: hot-corner populations carried down to omega_c with friction lam."""
    return 0.5 * params.omega_c * params.lam * float(coth(0.5 * params.beta_h * params.omega_h))


def cycle_energies(params: EngineParams) -> CycleEnergies:
    h_a, h_b, h_c, h_d = _corner_energies(
        params.omega_c, params.omega_h, params.beta_c, params.beta_h,
        params.v.v, params.lam,
    )
    return CycleEnergies(float(h_a), float(h_b), float(h_c), float(h_d))


def cycle_quantities(omega_c, omega_h, beta_c, beta_h, v, lam):
    """Stroke works, heats and extracted work; broadcasts over arrays.

    Returns ``(w_ab, w_cd, q_h, q_c, w_ext)`` with the module's sign
    convention.  This is the bulk-evaluation path used by the Monte Carlo
    ensembles; :func:`evaluate_cycle` wraps it for scalar parameters.
    """
    omega_c = np.asarray(omega_c, dtype=float)
    omega_h = np.asarray(omega_h, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(omega_c >= omega_h):
        raise ValueError("need omega_c < omega_h")
    if np.any(lam < 1.0):
        raise ValueError("adiabaticity factor must satisfy lam >= 1")
    if np.any(np.asarray(beta_c, dtype=float) <= np.asarray(beta_h, dtype=float)):
        raise ValueError("need beta_c > beta_h")
    h_a, h_b, h_c, h_d = _corner_energies(omega_c, omega_h, beta_c, beta_h, v, lam)
    w_ab = h_b - h_a
    w_cd = h_d - h_c
    q_h = h_c - h_b
    q_c = h_a - h_d
    w_ext = q_h + q_c
    return w_ab, w_cd, q_h, q_c, w_ext


def evaluate_cycle(params: EngineParams) -> CycleResult:
    """Evaluate one full cycle and classify its operating mode.

    Engine mode requires w_ext > 0 and q_h > 0; every other sign pattern is
    lumped into the non-engine tag and ``eta`` is left unset.
    """
    w_ab, w_cd, q_h, q_c, w_ext = cycle_quantities(
        params.omega_c, params.omega_h, params.beta_c, params.beta_h,
        params.v.v, params.lam,
    )
    w_ab, w_cd = float(w_ab), float(w_cd)
    q_h, q_c, w_ext = float(q_h), float(q_c), float(w_ext)
    engine = w_ext > 0.0 and q_h > 0.0
    return CycleResult(
        w_ab=w_ab,
        w_cd=w_cd,
        q_h=q_h,
        q_c=q_c,
        w_ext=w_ext,
        mode=MODE_ENGINE if engine else MODE_NON_ENGINE,
        eta=(w_ext / q_h) if engine else None,
        energies=cycle_energies(params),
    )
