"""Command-line front end; every subcommand is deterministic given its config.

Parameters may come from flags or from a flat JSON config file
(``--config``), keyed by the flag names without leading dashes; flags win.
The effective merged config is echoed into every output, and feeding an
emitted manifest back through ``--config`` reproduces the run.

Exit codes: 0 success (engine mode for ``cycle``), 1 input error,
2 ``cycle`` ran but not as an engine, 3 ``verify`` found failing checks.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__, bounds, verify
from .adiabaticity import (DriveProtocol, lambda_for_protocol, solve_husimi,
                           lambda_from_trajectory)
from .thermo import EngineParams, evaluate_cycle

_RAMP_NAMES = ("sudden", "linear_omega", "linear_omega_squared")


class CliError(Exception):
    """Invalid input; reported as a one-line diagnostic with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# each field: (dest, type, default, required); flag name is dest with
# underscores swapped for hyphens, "lam" spelled --lambda
_FLAG_NAMES = {"lam": "lambda"}


def _flag(dest: str) -> str:
    return _FLAG_NAMES.get(dest, dest).replace("_", "-")


_FIELDS = {
    "cycle": [
        ("omega_c", float, None, True),
        ("omega_h", float, None, True),
        ("beta_c", float, None, True),
        ("beta_h", float, None, True),
        ("v", float, None, True),
        ("lam", float, None, False),
        ("lambda_protocol", str, None, False),
        ("duration", float, None, False),
        ("rel_tol", float, 1e-10, False),
    ],
    "bounds": [
        ("tau", float, None, True),
        ("v", float, None, True),
    ],
    "lambda": [
        ("protocol", str, None, True),
        ("omega_c", float, None, False),
        ("omega_h", float, None, False),
        ("duration", float, None, False),
        ("rel_tol", float, 1e-10, False),
    ],
    "sweep": [
        ("tau", float, None, True),
        ("v", list, None, True),
        ("z_grid", str, "0.01:0.99:0.01", False),
        ("regime", str, "adiabatic", False),
        ("beta_h", float, 1.0, False),
    ],
    "scatter": [
        ("seed", int, 42, False),
        ("count", int, None, True),
        ("omega_c_max", float, None, True),
        ("omega_h_max", float, None, True),
        ("beta_c", float, None, True),
        ("beta_h", float, None, True),
        ("v", float, None, True),
    ],
    "hist": [
        ("seed", int, 42, False),
        ("count", int, None, True),
        ("omega_c_max", float, None, True),
        ("omega_h_max", float, None, True),
        ("beta_c", float, None, True),
        ("beta_h", float, None, True),
        ("v", float, None, True),
        ("bins", int, 50, False),
    ],
    "optimize": [
        ("regime", str, None, True),
        ("tau", float, None, True),
        ("v", float, None, True),
        ("tol", float, 1e-9, False),
    ],
}

_PRESETS = {
    "scatter": {
        "fig3": {"seed": 42, "count": 100_000, "omega_c_max": 30.0,
                 "omega_h_max": 60.0, "beta_c": 0.2, "beta_h": 0.1, "v": 0.85},
    },
    "hist": {
        "fig5": {"seed": 42, "count": 1_000_000, "omega_c_max": 20.0,
                 "omega_h_max": 40.0, "beta_c": 0.2, "beta_h": 0.05, "v": 0.9,
                 "bins": 50},
    },
    "sweep": {
        "fig2": {"tau": 0.5, "v": [0.0, 0.4, 0.7, 0.9],
                 "z_grid": "0.01:0.99:0.01", "regime": "adiabatic", "beta_h": 1.0},
    },
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="relotto", description=__doc__)
    parser.add_argument("--version", action="version", version=f"relotto {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, fields in _FIELDS.items():
        p = sub.add_parser(command)
        for dest, typ, _default, _required in fields:
            if typ is list:
                p.add_argument(f"--{_flag(dest)}", dest=dest, type=float,
                               nargs="+", default=None)
            else:
                p.add_argument(f"--{_flag(dest)}", dest=dest, type=typ, default=None)
        if command in _PRESETS:
            p.add_argument("--preset", choices=sorted(_PRESETS[command]), default=None)
        p.add_argument("--config", default=None)
        p.add_argument("--output", default=None)
    sub.add_parser("verify")
    return parser


def _load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"--config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"--config: {path} is not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise CliError(f"--config: {path} must hold a JSON object")
    if isinstance(data.get("config"), dict):  # accept an emitted manifest directly
        data = data["config"]
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _effective_config(command: str, args) -> dict:
    fields = _FIELDS[command]
    file_cfg = _load_config_file(args.config) if args.config else {}
    known = {dest for dest, *_ in fields} | {"preset", "lambda"}
    unknown = set(file_cfg) - known
    if unknown:
        raise CliError(f"--config: unknown keys {sorted(unknown)}")
    if "lambda" in file_cfg:  # config files spell the flag name
        file_cfg["lam"] = file_cfg.pop("lambda")

    preset_name = getattr(args, "preset", None)
    if preset_name is None:
        preset_name = file_cfg.pop("preset", None)
    else:
        file_cfg.pop("preset", None)
    preset = {}
    if preset_name is not None:
        table = _PRESETS.get(command, {})
        if preset_name not in table:
            raise CliError(f"--preset: unknown preset {preset_name!r} for {command}")
        preset = table[preset_name]

    eff = {}
    for dest, typ, default, required in fields:
        val = getattr(args, dest)
        if val is None:
            val = file_cfg.get(dest, preset.get(dest, default))
        if val is None:
            if required:
                raise CliError(f"missing required --{_flag(dest)}")
            eff[dest] = None
            continue
        try:
            if typ is list:
                val = [float(x) for x in (val if isinstance(val, (list, tuple)) else [val])]
            else:
                val = typ(val)
        except (TypeError, ValueError) as exc:
            raise CliError(f"--{_flag(dest)}: {exc}") from exc
        eff[dest] = val
    if preset_name is not None:
        eff["preset"] = preset_name
    return eff


def _echo_config(eff: dict) -> dict:
    return {_flag(k): v for k, v in eff.items() if v is not None}


def _emit_json(payload: dict, output) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def _manifest_path(csv_path: str) -> str:
    p = Path(csv_path)
    return str(p.with_suffix(".manifest.json"))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _resolve_lambda(eff: dict) -> float:
    if eff["lambda_protocol"] is not None:
        if eff["lam"] is not None:
            raise CliError("give either --lambda or --lambda-protocol, not both")
        name = eff["lambda_protocol"]
        protocol = _make_protocol(name, eff["omega_c"], eff["omega_h"], eff["duration"])
        if protocol.kind == "tabulated":
            ends = (protocol.omega_start, protocol.omega_end)
            want = (eff["omega_c"], eff["omega_h"])
            if any(abs(a - b) > 1e-6 * max(1.0, abs(b)) for a, b in zip(ends, want)):
                raise CliError(
                    f"--lambda-protocol: file endpoints {ends} do not match "
                    f"cycle frequencies {want}"
                )
        return lambda_for_protocol(protocol, rel_tol=eff["rel_tol"])
    if eff["lam"] is None:
        raise CliError("missing required --lambda (or --lambda-protocol)")
    return eff["lam"]


def _make_protocol(name: str, omega_c, omega_h, duration) -> DriveProtocol:
    if name == "sudden":
        return DriveProtocol.sudden(omega_c, omega_h)
    if name in _RAMP_NAMES:
        if duration is None:
            raise CliError(f"--duration is required for the {name} protocol")
        return DriveProtocol(name, omega_c, omega_h, duration)
    path = Path(name)
    if not path.exists():
        raise CliError(f"unknown protocol {name!r} (not a name in "
                       f"{_RAMP_NAMES} and not a file)")
    return DriveProtocol.from_csv(path)


def cmd_cycle(eff: dict, output) -> int:
    lam = _resolve_lambda(eff)
    try:
        params = EngineParams(omega_c=eff["omega_c"], omega_h=eff["omega_h"],
                              beta_c=eff["beta_c"], beta_h=eff["beta_h"],
                              v=eff["v"], lam=lam)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    result = evaluate_cycle(params)
    payload = {
        "command": "cycle",
        "config": _echo_config(eff),
        "lambda_used": lam,
        "result": {
            "mode": result.mode,
            "w_ab": result.w_ab,
            "w_cd": result.w_cd,
            "q_h": result.q_h,
            "q_c": result.q_c,
            "w_ext": result.w_ext,
            "eta": result.eta,
            "energies": asdict(result.energies),
        },
    }
    _emit_json(payload, output)
    return 0 if result.mode == "engine" else 2


def cmd_bounds(eff: dict, output) -> int:
    try:
        report = bounds.bounds_report(eff["tau"], eff["v"])
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    payload = {"command": "bounds", "config": _echo_config(eff),
               "result": asdict(report)}
    _emit_json(payload, output)
    return 0


def cmd_lambda(eff: dict, output) -> int:
    for dest in ("omega_c", "omega_h"):
        if eff[dest] is None and eff["protocol"] in _RAMP_NAMES:
            raise CliError(f"missing required --{_flag(dest)}")
    try:
        protocol = _make_protocol(eff["protocol"], eff["omega_c"], eff["omega_h"],
                                  eff["duration"])
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    result = {"omega_start": protocol.omega_start, "omega_end": protocol.omega_end}
    if protocol.kind == "sudden":
        result["lambda"] = lambda_for_protocol(protocol)
        result["method"] = "closed-form"
    else:
        traj = solve_husimi(protocol, rel_tol=eff["rel_tol"])
        result.update({
            "lambda": lambda_from_trajectory(traj, protocol.omega_start,
                                             protocol.omega_end),
            "method": "dormand-prince-5(4)",
            "steps": traj.steps,
            "rejected": traj.rejected,
            "wronskian_drift": traj.wronskian_drift,
            "local_error_bound": traj.local_error_bound,
        })
    payload = {"command": "lambda", "config": _echo_config(eff), "result": result}
    _emit_json(payload, output)
    return 0


def _parse_grid(spec: str):
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError as exc:
        raise CliError(f"--z-grid: expected start:stop:step, got {spec!r}") from exc
    if step <= 0 or stop < start:
        raise CliError(f"--z-grid: bad range {spec!r}")
    n = int(round((stop - start) / step))
    grid = [start + i * step for i in range(n + 1)]
    return [z for z in grid if z <= stop + 1e-12]


def cmd_sweep(eff: dict, output) -> int:
    grid = _parse_grid(eff["z_grid"])
    if eff["regime"] not in ("adiabatic", "sudden"):
        raise CliError(f"--regime: unknown regime {eff['regime']!r}")
    csv_path = output or "sweep.csv"
    rows = []
    try:
        for v in eff["v"]:
            for z in grid:
                if eff["regime"] == "adiabatic":
                    w = bounds.w_adiabatic_high_t(z, eff["tau"], v, eff["beta_h"])
                    eta = 1.0 - z
                else:
                    w = bounds.w_ss_high_t(z, eff["tau"], v, eff["beta_h"])
                    eta = bounds.eta_ss_high_t(z, eff["tau"], v)
                rows.append((v, z, w, eta))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    with open(csv_path, "w", newline="") as fh:
        fh.write("v,z,w_ext,eta\n")
        for row in rows:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    verify.write_manifest(_manifest_path(csv_path), {
        "command": "sweep", "config": _echo_config(eff), "csv": str(csv_path),
        "rows": len(rows),
    })
    return 0


def _ensemble_config(eff: dict, regime: str) -> verify.EnsembleConfig:
    try:
        return verify.EnsembleConfig(
            seed=eff["seed"], count=eff["count"],
            omega_c_range=(0.0, eff["omega_c_max"]),
            omega_h_range=(0.0, eff["omega_h_max"]),
            beta_c=eff["beta_c"], beta_h=eff["beta_h"], v=eff["v"],
            regime=regime, bins=eff.get("bins", 50),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def cmd_scatter(eff: dict, output) -> int:
    config = _ensemble_config(eff, "adiabatic")
    ens = verify.run_scatter(config)
    csv_path = output or "scatter.csv"
    verify.write_scatter_csv(csv_path, ens)
    manifest = verify.ensemble_manifest(ens, command="scatter",
                                        config=_echo_config(eff), csv=str(csv_path))
    verify.write_manifest(_manifest_path(csv_path), manifest)
    return 0


def cmd_hist(eff: dict, output) -> int:
    config = _ensemble_config(eff, "sudden")
    ens, hist = verify.run_histogram(config)
    csv_path = output or "hist.csv"
    verify.write_histogram_csv(csv_path, hist)
    manifest = verify.ensemble_manifest(ens, command="hist",
                                        config=_echo_config(eff), csv=str(csv_path),
                                        bins=hist.bin_count)
    verify.write_manifest(_manifest_path(csv_path), manifest)
    return 0


def cmd_optimize(eff: dict, output) -> int:
    regime, tau, v = eff["regime"], eff["tau"], eff["v"]
    if regime not in ("adiabatic", "sudden"):
        raise CliError(f"--regime: unknown regime {regime!r}")
    try:
        a = bounds.pwc_threshold(regime, tau, v)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if regime == "adiabatic":
        lo, closed = a, a ** 0.5
        objective = lambda z: bounds.w_adiabatic_high_t(z, tau, v, 1.0)  # noqa: E731
        eta_at = bounds.emw_adiabatic(tau, v)
    else:
        lo, closed = a ** 0.5, a ** 0.25
        objective = lambda z: bounds.w_ss_high_t(z, tau, v, 1.0)  # noqa: E731
        eta_at = bounds.eta_ss_mw(tau, v)
    z_num, w_max = verify.maximize_scalar(objective, (lo, 1.0 - 1e-12), tol=eff["tol"])
    csv_path = output or "optimize.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write("regime,tau,v,z_opt_numeric,z_opt_closed_form,abs_diff,w_max,eta_at_opt\n")
        fh.write(f"{regime},{tau!r},{v!r},{z_num!r},{closed!r},"
                 f"{abs(z_num - closed)!r},{w_max!r},{eta_at!r}\n")
    verify.write_manifest(_manifest_path(csv_path), {
        "command": "optimize", "config": _echo_config(eff), "csv": str(csv_path),
        "z_opt_numeric": z_num, "z_opt_closed_form": closed,
        "abs_diff": abs(z_num - closed), "w_max": w_max, "eta_at_opt": eta_at,
    })
    return 0


def cmd_verify() -> int:
    results = verify.run_all_checks()
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        detail = f"  ({r.detail})" if r.detail else ""
        print(f"{status} {r.name}{detail}")
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed: "
              + ", ".join(r.name for r in failed))
        return 3
    print(f"all {len(results)} checks passed")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return cmd_verify()
        eff = _effective_config(args.command, args)
        handler = {
            "cycle": cmd_cycle,
            "bounds": cmd_bounds,
            "lambda": cmd_lambda,
            "sweep": cmd_sweep,
            "scatter": cmd_scatter,
            "hist": cmd_hist,
            "optimize": cmd_optimize,
        }[args.command]
        return handler(eff, args.output)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
