"""Independent numeric oracles and seeded Monte Carlo bound certification.

Nothing in this module trusts the closed forms in :mod:`relotto.bounds`:
optimal points are re-found by golden-section search, the solid-angle
average behind the Doppler weight is redone by quadrature, the
high-temperature expressions are checked by driving the exact ones to
beta -> 0, and the efficiency ceilings are stress-tested against seeded
random ensembles with strict (zero-slack) violation counting.

Ensembles are a pure function of (seed, config): samples are drawn shard by
shard, each shard's stream derived from the seed and the shard index, and
shards are merged in index order, so results do not depend on how many
worker threads ran them (``OTTO_THREADS``, 0 = auto).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from functools import lru_cache

import numpy as np

from . import bounds
from .adiabaticity import DriveProtocol, lambda_closed_form, lambda_for_protocol, solve_husimi
from .thermo import cycle_quantities, doppler_factor, mean_photon_moving

GENERATOR_ID = "numpy.philox4x64-10/seedseq-spawn"
_SHARD = 1 << 16

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


# ---------------------------------------------------------------------------
# scalar oracles
# ---------------------------------------------------------------------------

def maximize_scalar(objective, interval, tol: float = 1e-8, max_iter: int = 500):
    """Golden-section maximization of a unimodal objective on an interval.

    Returns ``(argmax, max)``.  Unimodality is the caller's responsibility;
    here the intervals are work-extraction windows where it holds.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"degenerate interval ({a!r}, {b!r})")
    if not tol > 0.0:
        raise ValueError("tolerance must be positive")
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)
    x = 0.5 * (a + b)
    return x, objective(x)


@lru_cache(maxsize=8)
def _leggauss(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


def solid_angle_average_inverse_doppler(v, nodes: int = 128) -> float:
    """Quadrature of the solid-angle average of 1/(1 - v cos(theta)).

    After the cos substitution the average is (1/2) * int_{-1}^{1} dx/(1-vx),
    done with an ``nodes``-point Gauss-Legendre rule; closed form is
    log((1+v)/(1-v)) / (2v).  128 nodes hold 1e-10 up to v = 0.99 (the
    integrand has a pole just outside the interval at x = 1/v).
    """
    v = float(v)
    if not 0.0 <= v < 1.0:
        raise ValueError(f"speed must satisfy 0 <= v < 1, got {v!r}")
    if nodes < 16:
        raise ValueError("need at least 16 quadrature nodes")
    x, w = _leggauss(int(nodes))
    return float(0.5 * np.sum(w / (1.0 - v * x)))


def high_t_convergence(regime: str, z, tau, v, beta_h_seq, quantity: str = "work"):
    """Relative error of the high-temperature forms along a beta_h -> 0 sequence.

    For each beta_h (with beta_c = beta_h / tau, omega_h = 1, omega_c = z)
    compares the exact work (or efficiency, ``quantity="efficiency"``)
    against its high-temperature expression.  The errors must shrink as the
    sequence descends; callers assert monotonicity.
    """
    if regime not in ("adiabatic", "sudden"):
        raise ValueError(f"unknown regime {regime!r}")
    if quantity not in ("work", "efficiency"):
        raise ValueError(f"unknown quantity {quantity!r}")
    z, tau, v = float(z), float(tau), float(v)
    seq = [float(b) for b in beta_h_seq]
    if not seq or any(b <= 0.0 for b in seq) or any(a <= b for a, b in zip(seq, seq[1:])):
        raise ValueError("beta_h_seq must be a decreasing sequence of positive values")
    omega_h = 1.0
    omega_c = z * omega_h
    errors = []
    for beta_h in seq:
        beta_c = beta_h / tau
        if regime == "adiabatic":
            lam = 1.0
            approx_w = bounds.w_adiabatic_high_t(z, tau, v, beta_h)
            approx_eta = 1.0 - z
        else:
            lam = lambda_closed_form("sudden", omega_c, omega_h)
            approx_w = bounds.w_ss_high_t(z, tau, v, beta_h)
            approx_eta = bounds.eta_ss_high_t(z, tau, v)
        _, _, q_h, _, w_ext = cycle_quantities(omega_c, omega_h, beta_c, beta_h, v, lam)
        if quantity == "work":
            errors.append(abs(float(w_ext) - approx_w) / abs(float(w_ext)))
        else:
            errors.append(abs(float(w_ext) / float(q_h) - approx_eta) / abs(approx_eta))
    return errors


# ---------------------------------------------------------------------------
# seeded ensembles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnsembleConfig:
    """Sampling configuration for one bound-certification ensemble."""

    seed: int
    count: int
    omega_c_range: tuple[float, float]
    omega_h_range: tuple[float, float]
    beta_c: float
    beta_h: float
    v: float
    regime: str  # "adiabatic" (lam = 1) or "sudden"
    bins: int = 50

    def __post_init__(self):
        if self.regime not in ("adiabatic", "sudden"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        for name in ("omega_c_range", "omega_h_range"):
            lo, hi = getattr(self, name)
            if not 0.0 <= lo < hi:
                raise ValueError(f"{name} must be an increasing nonnegative interval")
        if not self.beta_c > self.beta_h > 0.0:
            raise ValueError("need beta_c > beta_h > 0")
        if not 0.0 <= self.v < 1.0:
            raise ValueError("speed must satisfy 0 <= v < 1")
        if self.bins < 1:
            raise ValueError("need at least one histogram bin")

    @property
    def tau(self) -> float:
        return self.beta_h / self.beta_c


@dataclass
class SampleEnsemble:
    """Accepted engine-mode samples plus the violation count against ``bound``.

    ``samples`` has columns (omega_c, omega_h, w_ext, eta); rows are in
    draw order, bit-identical for identical (seed, config).
    """

    config: EnsembleConfig
    bound: float
    samples: np.ndarray
    violations: int
    generator: str = GENERATOR_ID

    @property
    def eta(self) -> np.ndarray:
        return self.samples[:, 3]

    @property
    def max_eta(self) -> float:
        return float(self.samples[:, 3].max()) if len(self.samples) else math.nan


@dataclass(frozen=True)
class HistogramSpec:
    """Efficiency histogram over [0, bound]; counts cover every accepted sample."""

    bin_count: int
    upper: float
    counts: tuple


def _worker_count() -> int:
    raw = os.environ.get("OTTO_THREADS", "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"OTTO_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError("OTTO_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _run_shard(config: EnsembleConfig, index: int, size: int) -> np.ndarray:
    """Draw and evaluate one shard; pure function of (config, index, size)."""
    ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(index,))
    rng = np.random.Generator(np.random.Philox(ss))
    lo_c, hi_c = config.omega_c_range
    lo_h, hi_h = config.omega_h_range
    omega_c = rng.uniform(lo_c, hi_c, size)
    omega_h = rng.uniform(lo_h, hi_h, size)
    keep = (omega_c > 0.0) & (omega_c < omega_h)
    omega_c, omega_h = omega_c[keep], omega_h[keep]
    if config.regime == "sudden":
        lam = (omega_c * omega_c + omega_h * omega_h) / (2.0 * omega_c * omega_h)
        lam = np.maximum(lam, 1.0)  # guard rounding when omega_c ~ omega_h
    else:
        lam = np.ones_like(omega_c)
    _, _, q_h, _, w_ext = cycle_quantities(
        omega_c, omega_h, config.beta_c, config.beta_h, config.v, lam,
    )
    engine = (w_ext > 0.0) & (q_h > 0.0)
    omega_c, omega_h = omega_c[engine], omega_h[engine]
    w_ext = w_ext[engine]
    if config.regime == "sudden":
        eta = w_ext / q_h[engine]
    else:
        eta = 1.0 - omega_c / omega_h
    return np.column_stack([omega_c, omega_h, w_ext, eta])


def _run_ensemble(config: EnsembleConfig, bound: float) -> SampleEnsemble:
    sizes = [_SHARD] * (config.count // _SHARD)
    if config.count % _SHARD:
        sizes.append(config.count % _SHARD)
    if not sizes:
        parts = []
    else:
        workers = min(_worker_count(), len(sizes))
        if workers <= 1:
            parts = [_run_shard(config, i, n) for i, n in enumerate(sizes)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_run_shard, [config] * len(sizes),
                                      range(len(sizes)), sizes))
    samples = np.concatenate(parts, axis=0) if parts else np.empty((0, 4))
    violations = int(np.count_nonzero(samples[:, 3] >= bound)) if len(samples) else 0
    return SampleEnsemble(config=config, bound=bound, samples=samples,
                          violations=violations)


def run_scatter(config: EnsembleConfig) -> SampleEnsemble:
    """Adiabatic work-versus-efficiency ensemble, checked against 1 - tau f(v)."""
    if config.regime != "adiabatic":
        raise ValueError("scatter ensembles use the adiabatic regime")
    bound = bounds.generalized_carnot(config.tau, config.v)
    return _run_ensemble(config, bound)


def run_histogram(config: EnsembleConfig):
    """Sudden-quench efficiency ensemble plus its histogram over [0, bound]."""
    if config.regime != "sudden":
        raise ValueError("histogram ensembles use the sudden regime")
    bound = bounds.eta_ss_upper(1.0 - config.tau, config.v)
    ens = _run_ensemble(config, bound)
    counts, _ = np.histogram(ens.eta, bins=config.bins, range=(0.0, bound))
    hist = HistogramSpec(bin_count=config.bins, upper=bound,
                         counts=tuple(int(c) for c in counts))
    if sum(hist.counts) != len(ens.samples):
        raise RuntimeError(
            "histogram counts do not cover the accepted samples; "
            f"{ens.violations} sample(s) breached the bound"
        )
    return ens, hist


#: ensemble behind the adiabatic work-vs-efficiency scatter study
FIG_SCATTER = EnsembleConfig(
    seed=42, count=100_000,
    omega_c_range=(0.0, 30.0), omega_h_range=(0.0, 60.0),
    beta_c=0.2, beta_h=0.1, v=0.85, regime="adiabatic",
)

#: ensemble behind the sudden-quench efficiency histogram study
FIG_HISTOGRAM = EnsembleConfig(
    seed=42, count=1_000_000,
    omega_c_range=(0.0, 20.0), omega_h_range=(0.0, 40.0),
    beta_c=0.2, beta_h=0.05, v=0.9, regime="sudden",
)


# ---------------------------------------------------------------------------
# CSV + manifest emission
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def write_scatter_csv(path, ensemble: SampleEnsemble) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("omega_c,omega_h,w_ext,eta\n")
        for row in ensemble.samples:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_histogram_csv(path, hist: HistogramSpec) -> None:
    edges = np.linspace(0.0, hist.upper, hist.bin_count + 1)
    with open(path, "w", newline="") as fh:
        fh.write("bin_left,bin_right,count\n")
        for i, count in enumerate(hist.counts):
            fh.write(f"{_fmt(edges[i])},{_fmt(edges[i + 1])},{count}\n")


def ensemble_manifest(ensemble: SampleEnsemble, **extra) -> dict:
    cfg = asdict(ensemble.config)
    cfg["omega_c_range"] = list(cfg["omega_c_range"])
    cfg["omega_h_range"] = list(cfg["omega_h_range"])
    manifest = {
        "seed": ensemble.config.seed,
        "generator": ensemble.generator,
        "config": cfg,
        "bound": ensemble.bound,
        "violations": ensemble.violations,
        "accepted": int(len(ensemble.samples)),
        "max_eta": None if math.isnan(ensemble.max_eta) else ensemble.max_eta,
    }
    manifest.update(extra)
    return manifest


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# full regression suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _grid_tau_v():
    taus = [round(0.1 * i, 1) for i in range(1, 10)]
    vs = [round(0.1 * i, 1) for i in range(10)] + [0.95]
    return [(t, v) for t in taus for v in vs]


def run_all_checks(randomized_configs: int = 20) -> list[CheckResult]:
    """Run every oracle/regression check; all must pass for a clean exit."""
    results = []

    def add(name, passed, detail=""):
        results.append(CheckResult(name, bool(passed), detail))

    # quadrature identity ties the directional-temperature average to f(v)
    worst = 0.0
    for v in [0.1 * i for i in range(1, 10)] + [0.95]:
        closed = math.log((1.0 + v) / (1.0 - v)) / (2.0 * v)
        worst = max(worst, abs(solid_angle_average_inverse_doppler(v) - closed))
    add("quadrature-identity", worst <= 1e-10, f"max abs err {worst:.2e}")

    # golden-section argmax vs closed-form optima, both regimes
    worst_ad = worst_ss = 0.0
    for tau, v in _grid_tau_v():
        a = tau * float(doppler_factor(v))
        z_ad, _ = maximize_scalar(
            lambda z: bounds.w_adiabatic_high_t(z, tau, v, 1.0), (a, 1.0 - 1e-12), tol=1e-9)
        worst_ad = max(worst_ad, abs(z_ad - math.sqrt(a)))
        z_ss, _ = maximize_scalar(
            lambda z: bounds.w_ss_high_t(z, tau, v, 1.0), (math.sqrt(a), 1.0 - 1e-12), tol=1e-9)
        worst_ss = max(worst_ss, abs(z_ss - a ** 0.25))
    add("argmax-adiabatic", worst_ad <= 1e-6, f"max |dz| {worst_ad:.2e}")
    add("argmax-sudden", worst_ss <= 1e-6, f"max |dz| {worst_ss:.2e}")

    # bound orderings on the grid
    ordering_ok = True
    sudden_below = True
    for tau, v in _grid_tau_v():
        rep = bounds.bounds_report(tau, v)
        ordering_ok &= (rep.eta_ss_mw <= rep.eta_ss_upper < 0.5)
        ordering_ok &= (rep.eta_mw_adiabatic <= rep.eta_gen_carnot < 1.0)
        ordering_ok &= (rep.eta_carnot <= rep.eta_gen_carnot)
        sudden_below &= (rep.eta_ss_upper <= rep.eta_gen_carnot)
    add("bound-ordering", ordering_ok)
    add("sudden-below-adiabatic", sudden_below)

    up = bounds.eta_ss_upper(0.05, 0.9)
    add("carnot-crossing", up > 0.05, f"eta_ss_upper(0.05, 0.9) = {up:.4f}")

    # high-temperature convergence, both regimes, work and efficiency
    seq = [1e-1, 1e-2, 1e-3]
    errs_w = high_t_convergence("adiabatic", 0.7, 0.5, 0.85, seq, "work")
    add("high-t-adiabatic-work",
        all(a > b for a, b in zip(errs_w, errs_w[1:])), f"errors {errs_w}")
    errs_e = high_t_convergence("sudden", 0.7, 0.25, 0.9, seq, "efficiency")
    add("high-t-sudden-efficiency",
        all(a > b for a, b in zip(errs_e, errs_e[1:])) and errs_e[-1] < 1e-4,
        f"errors {errs_e}")

    # integrator limits
    lam_sud = lambda_for_protocol(DriveProtocol.linear_omega(1.0, 2.0, 1e-4))
    add("lambda-sudden-limit", abs(lam_sud - 1.25) < 1e-3, f"lam(1e-4) = {lam_sud!r}")
    traj = solve_husimi(DriveProtocol.linear_omega(1.0, 2.0, 200.0), rel_tol=1e-12)
    lam_ad = (1.0 * (4.0 * traj.x ** 2 + traj.x_dot ** 2)
              + (4.0 * traj.y ** 2 + traj.y_dot ** 2)) / 4.0
    add("lambda-adiabatic-limit", lam_ad - 1.0 < 1e-4, f"lam(200) - 1 = {lam_ad - 1.0:.2e}")
    add("wronskian-drift", traj.wronskian_drift < 1e-9, f"{traj.wronskian_drift:.2e}")

    # nonrelativistic limits at v = 1e-12
    ok = True
    for tau in (0.1, 0.25, 0.5, 0.75):
        ok &= abs(bounds.emw_adiabatic(tau, 1e-12) / (1.0 - math.sqrt(tau)) - 1.0) < 1e-8
        ok &= abs(bounds.eta_ss_mw(tau, 1e-12) / bounds.rezek_kosloff(tau) - 1.0) < 1e-8
    planck = 1.0 / math.expm1(1.0)
    ok &= abs(mean_photon_moving(1.0, 1.0, 1e-12) / planck - 1.0) < 1e-8
    add("nonrelativistic-limits", ok)

    # paper-anchored ensembles and the v = 0 control
    ens = run_scatter(FIG_SCATTER)
    add("scatter-anchored", ens.violations == 0,
        f"{ens.violations} violations of {ens.bound:.6f}")
    ens0 = run_scatter(replace(FIG_SCATTER, v=0.0))
    add("scatter-v0-control", ens0.violations == 0,
        f"{ens0.violations} violations of {ens0.bound:.6f}")
    ens_h, _ = run_histogram(FIG_HISTOGRAM)
    add("histogram-anchored", ens_h.violations == 0,
        f"{ens_h.violations} violations of {ens_h.bound:.6f}")

    # randomized (tau, v) configurations
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(2024)))
    bad = 0
    for i in range(randomized_configs):
        tau = float(rng.uniform(0.1, 0.9))
        v = float(rng.uniform(0.0, 0.95))
        beta_h = float(rng.uniform(0.02, 0.5))
        regime = "adiabatic" if i % 2 == 0 else "sudden"
        cfg = EnsembleConfig(
            seed=1000 + i, count=100_000,
            omega_c_range=(0.0, 30.0), omega_h_range=(0.0, 60.0),
            beta_c=beta_h / tau, beta_h=beta_h, v=v, regime=regime,
        )
        ens_i = run_scatter(cfg) if regime == "adiabatic" else run_histogram(cfg)[0]
        bad += ens_i.violations
    add("randomized-ensembles", bad == 0, f"{bad} total violations")

    # determinism of the ensemble machinery
    rerun = run_scatter(FIG_SCATTER)
    add("ensemble-determinism",
        rerun.samples.shape == ens.samples.shape and np.array_equal(rerun.samples, ens.samples))

    return results
