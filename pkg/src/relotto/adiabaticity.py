"""Adiabaticity factor of a frequency-modulated oscillator work stroke.

The degree of nonadiabatic excitation produced by sweeping an oscillator
from ``omega_start`` to ``omega_end`` is captured by Husimi's dimensionless
factor

    lam = [w0^2 (w1^2 X^2 + Xdot^2) + (w1^2 Y^2 + Ydot^2)] / (2 w0 w1)

evaluated at the end of the stroke, where X and Y solve the classical
equation  u'' + omega(t)^2 u = 0  with X(0)=0, Xdot(0)=1, Y(0)=1, Ydot(0)=0.
lam >= 1 always; lam = 1 for perfectly slow driving and
(w0^2 + w1^2)/(2 w0 w1) for an instantaneous quench.

The two fundamental solutions are integrated together with an adaptive
embedded Dormand-Prince 5(4) pair.  The Wronskian Xdot*Y - X*Ydot = 1 is
conserved by the exact flow and is tracked at every accepted step as the
integrator health check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

PROTOCOL_KINDS = ("sudden", "linear_omega", "linear_omega_squared", "tabulated")

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
_REL_TOL_RANGE = (1e-13, 1e-6)
_MAX_STEPS = 10_000_000


class IntegrationError(RuntimeError):
    """Adaptive stepping failed (step-size underflow or step budget)."""


@dataclass(frozen=True)
class DriveProtocol:
    """A frequency schedule omega(t) over one work stroke.

    kind is one of ``sudden`` (duration 0, analytic), ``linear_omega``
    (omega interpolated linearly), ``linear_omega_squared`` (omega^2
    interpolated linearly) or ``tabulated`` (monotone piecewise-cubic through
    ``times``/``omegas`` samples covering [0, duration]).
    """

    kind: str
    omega_start: float
    omega_end: float
    duration: float
    times: tuple = ()
    omegas: tuple = ()
    _interp: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in PROTOCOL_KINDS:
            raise ValueError(f"unknown protocol kind {self.kind!r}")
        for name in ("omega_start", "omega_end", "duration"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.omega_start > 0.0 and self.omega_end > 0.0):
            raise ValueError("endpoint frequencies must be positive")
        if self.kind == "sudden":
            if self.duration != 0.0:
                raise ValueError("sudden protocols have zero duration")
            return
        if not self.duration > 0.0 or not math.isfinite(self.duration):
            raise ValueError("duration must be positive and finite")
        if self.kind == "tabulated":
            t = np.asarray(self.times, dtype=float)
            w = np.asarray(self.omegas, dtype=float)
            if t.ndim != 1 or t.shape != w.shape or t.size < 2:
                raise ValueError("tabulated protocol needs matching 1-d time/omega samples")
            if np.any(np.diff(t) <= 0.0):
                raise ValueError("tabulated time grid must be strictly increasing")
            if t[0] != 0.0 or t[-1] != self.duration:
                raise ValueError("tabulated time grid must cover [0, duration]")
            if np.any(w <= 0.0) or np.any(~np.isfinite(w)):
                raise ValueError("tabulated frequency samples must be positive and finite")
            object.__setattr__(self, "times", tuple(float(x) for x in t))
            object.__setattr__(self, "omegas", tuple(float(x) for x in w))
            object.__setattr__(self, "_interp", PchipInterpolator(t, w))

    # -- constructors -------------------------------------------------------

    @classmethod
    def sudden(cls, omega_start, omega_end):
        return cls("sudden", omega_start, omega_end, 0.0)

    @classmethod
    def linear_omega(cls, omega_start, omega_end, duration):
        return cls("linear_omega", omega_start, omega_end, duration)

    @classmethod
    def linear_omega_squared(cls, omega_start, omega_end, duration):
        return cls("linear_omega_squared", omega_start, omega_end, duration)

    @classmethod
    def tabulated(cls, times, omegas):
        times = tuple(float(t) for t in times)
        omegas = tuple(float(w) for w in omegas)
        return cls("tabulated", omegas[0], omegas[-1], times[-1],
                   times=times, omegas=omegas)

    @classmethod
    def from_csv(cls, path):
        """Load a tabulated protocol from a two-column ``t,omega`` CSV with header."""
        times, omegas = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or len(header) < 2:
                raise ValueError(f"{path}: expected a header row 't,omega'")
            for row in reader:
                if not row:
                    continue
                times.append(float(row[0]))
                omegas.append(float(row[1]))
        if len(times) < 2:
            raise ValueError(f"{path}: need at least two samples")
        return cls.tabulated(times, omegas)

    # -- evaluation ---------------------------------------------------------

    def omega_squared(self, t: float) -> float:
        """omega(t)^2 used by the oscillator equation."""
        if self.kind == "linear_omega":
            w = self.omega_start + (self.omega_end - self.omega_start) * (t / self.duration)
            return w * w
        if self.kind == "linear_omega_squared":
            w0sq = self.omega_start * self.omega_start
            w1sq = self.omega_end * self.omega_end
            return w0sq + (w1sq - w0sq) * (t / self.duration)
        if self.kind == "tabulated":
            w = float(self._interp(t))
            return w * w
        raise ValueError("sudden protocols have no time evolution")

    def mirrored(self) -> "DriveProtocol":
        """The time-reversed stroke, omega~(t) = omega(duration - t)."""
        if self.kind == "tabulated":
            T = self.duration
            times = tuple(T - t for t in reversed(self.times))
            return DriveProtocol.tabulated(times, tuple(reversed(self.omegas)))
        return DriveProtocol(self.kind, self.omega_end, self.omega_start, self.duration)


@dataclass(frozen=True)
class OscillatorTrajectory:
    """Final state of the two fundamental solutions plus integrator statistics.

    ``wronskian_drift`` is the maximum of |Xdot*Y - X*Ydot - 1| over all
    accepted steps; ``local_error_bound`` the largest accepted per-step
    embedded error estimate (max-norm).
    """

    x: float
    x_dot: float
    y: float
    y_dot: float
    steps: int
    rejected: int
    local_error_bound: float
    wronskian_drift: float

    def __post_init__(self):
        if abs(self.wronskian - 1.0) > 1e-6:
            raise ValueError(
                f"integration lost the Wronskian invariant: |W - 1| = "
                f"{abs(self.wronskian - 1.0):.3e}"
            )

    @property
    def wronskian(self) -> float:
        return self.x_dot * self.y - self.x * self.y_dot


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) pair
# ---------------------------------------------------------------------------

_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)


def _deriv(om2, t, y):
    w2 = om2(t)
    return (y[1], -w2 * y[0], y[3], -w2 * y[2])


def solve_husimi(protocol: DriveProtocol, rel_tol: float = DEFAULT_REL_TOL,
                 abs_tol: float = DEFAULT_ABS_TOL) -> OscillatorTrajectory:
    """Integrate both fundamental oscillator solutions across the stroke.

    ``rel_tol`` must lie in [1e-13, 1e-6].  Sudden protocols are analytic and
    rejected here; use :func:`lambda_closed_form` /
    :func:`lambda_for_protocol` for those.
    """
    if protocol.kind == "sudden":
        raise ValueError("sudden protocols are analytic; no integration is defined")
    if not (_REL_TOL_RANGE[0] <= rel_tol <= _REL_TOL_RANGE[1]):
        raise ValueError(f"rel_tol must lie in [{_REL_TOL_RANGE[0]:g}, {_REL_TOL_RANGE[1]:g}]")
    if not abs_tol > 0.0:
        raise ValueError("abs_tol must be positive")

    om2 = protocol.omega_squared
    duration = protocol.duration
    t = 0.0
    y = (0.0, 1.0, 1.0, 0.0)
    k1 = _deriv(om2, t, y)
    w0 = math.sqrt(om2(0.0))
    h = min(duration, 0.1 / w0)
    steps = rejected = 0
    max_err = 0.0
    max_drift = 0.0

    while t < duration:
        last = h >= duration - t
        hs = duration - t if last else h

        y2 = tuple(yj + hs * _A21 * k1j for yj, k1j in zip(y, k1))
        k2 = _deriv(om2, t + _C2 * hs, y2)
        y3 = tuple(yj + hs * (_A31 * a + _A32 * b)
                   for yj, a, b in zip(y, k1, k2))
        k3 = _deriv(om2, t + _C3 * hs, y3)
        y4 = tuple(yj + hs * (_A41 * a + _A42 * b + _A43 * c)
                   for yj, a, b, c in zip(y, k1, k2, k3))
        k4 = _deriv(om2, t + _C4 * hs, y4)
        y5 = tuple(yj + hs * (_A51 * a + _A52 * b + _A53 * c + _A54 * d)
                   for yj, a, b, c, d in zip(y, k1, k2, k3, k4))
        k5 = _deriv(om2, t + _C5 * hs, y5)
        y6 = tuple(yj + hs * (_A61 * a + _A62 * b + _A63 * c + _A64 * d + _A65 * e)
                   for yj, a, b, c, d, e in zip(y, k1, k2, k3, k4, k5))
        k6 = _deriv(om2, t + hs, y6)
        y_new = tuple(yj + hs * (_B1 * a + _B3 * c + _B4 * d + _B5 * e + _B6 * f)
                      for yj, a, c, d, e, f in zip(y, k1, k3, k4, k5, k6))
        k7 = _deriv(om2, t + hs, y_new)

        err_norm = 0.0
        err_abs = 0.0
        for j in range(4):
            ej = hs * (_E1 * k1[j] + _E3 * k3[j] + _E4 * k4[j] + _E5 * k5[j]
                       + _E6 * k6[j] + _E7 * k7[j])
            scale = abs_tol + rel_tol * max(abs(y[j]), abs(y_new[j]))
            err_norm += (ej / scale) ** 2
            err_abs = max(err_abs, abs(ej))
        err_norm = math.sqrt(err_norm / 4.0)

        if err_norm <= 1.0:
            t = duration if last else t + hs
            y = y_new
            k1 = k7
            steps += 1
            max_err = max(max_err, err_abs)
            drift = abs(y[1] * y[2] - y[0] * y[3] - 1.0)
            max_drift = max(max_drift, drift)
            factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err_norm ** -0.2)
        h = hs * factor
        if h < 1e-14 * max(abs(t), 1.0):
            raise IntegrationError(f"step size underflow at t = {t!r}")
        if steps + rejected > _MAX_STEPS:
            raise IntegrationError(f"step budget exhausted at t = {t!r}")

    return OscillatorTrajectory(
        x=y[0], x_dot=y[1], y=y[2], y_dot=y[3],
        steps=steps, rejected=rejected,
        local_error_bound=max_err, wronskian_drift=max_drift,
    )


# ---------------------------------------------------------------------------
# adiabaticity factor
# ---------------------------------------------------------------------------

def lambda_from_trajectory(traj: OscillatorTrajectory, omega_c, omega_h) -> float:
    """Husimi factor from an integrated trajectory and the stroke's endpoint frequencies."""
    omega_c, omega_h = float(omega_c), float(omega_h)
    if omega_c <= 0.0 or omega_h <= 0.0:
        raise ValueError("endpoint frequencies must be positive")
    wc2, wh2 = omega_c * omega_c, omega_h * omega_h
    lam = (wc2 * (wh2 * traj.x ** 2 + traj.x_dot ** 2)
           + (wh2 * traj.y ** 2 + traj.y_dot ** 2)) / (2.0 * omega_c * omega_h)
    return lam


def lambda_closed_form(regime: str, omega_c, omega_h) -> float:
    """Analytic limits: 1 for adiabatic, (wc^2 + wh^2)/(2 wc wh) for sudden."""
    omega_c, omega_h = float(omega_c), float(omega_h)
    if omega_c <= 0.0 or omega_h <= 0.0:
        raise ValueError("frequencies must be positive")
    if regime == "adiabatic":
        return 1.0
    if regime == "sudden":
        return (omega_c * omega_c + omega_h * omega_h) / (2.0 * omega_c * omega_h)
    raise ValueError(f"unknown regime {regime!r}")


def lambda_for_protocol(protocol: DriveProtocol, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Adiabaticity factor of a stroke: analytic for sudden, integrated otherwise."""
    if protocol.kind == "sudden":
        return lambda_closed_form("sudden", protocol.omega_start, protocol.omega_end)
    traj = solve_husimi(protocol, rel_tol=rel_tol)
    return lambda_from_trajectory(traj, protocol.omega_start, protocol.omega_end)


def stroke_lambda_pair(protocol: DriveProtocol, rel_tol: float = DEFAULT_REL_TOL,
                       match_tol: float = 1e-8) -> tuple[float, float]:
    """Adiabaticity factors of a stroke and its time-mirrored partner.

    Both work strokes of a cycle built from a protocol and its mirror share
    one factor; this computes both and raises if they disagree beyond
    ``match_tol`` (integrator slack).
    """
    lam_fwd = lambda_for_protocol(protocol, rel_tol=rel_tol)
    lam_rev = lambda_for_protocol(protocol.mirrored(), rel_tol=rel_tol)
    if abs(lam_fwd - lam_rev) > match_tol * max(1.0, abs(lam_fwd)):
        raise ValueError(
            f"mirrored strokes disagree: {lam_fwd!r} vs {lam_rev!r}"
        )
    return lam_fwd, lam_rev
