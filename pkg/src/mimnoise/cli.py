"""Command-line interface.

Configs are flat JSON objects holding the parameter keys
(``J``, ``kappa_L``, ... , ``delta``, ``alpha_L_re``, ...) plus optional
command-specific keys.  Every output embeds the resolved run config, and a
previously written CSV can be passed back as ``--config`` to regenerate it.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import backaction, io, validation
from .errors import NoNetDampingError, ParameterError
from .noise import normalize_variant, spectrum_series
from .optimize import optimize
from .params import PARAM_KEYS, derive, from_record, load_record, to_record
from .steady_state import solve_steady_state

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2
COMMANDS = ("spectrum", "optimize", "qnd", "cool", "jumps", "validate")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict
    options: dict = field(default_factory=dict)
    variant: str = "exact"
    seed: int = 0
    grid: list | None = None

    def to_dict(self) -> dict:
        return io.jsonable(asdict(self))


def parse_grid(text: str) -> list:
    try:
        lo, hi, n = text.split(":")
        return [float(lo), float(hi), int(n)]
    except ValueError as exc:
        raise ConfigError(f"bad --grid {text!r}; expected min:max:n") from exc


def _grid_values(grid, log: bool = False) -> np.ndarray:
    lo, hi, n = grid
    n = int(n)
    if n <= 0:
        raise ConfigError("empty grid")
    if log:
        if lo <= 0 or hi <= 0:
            raise ConfigError("log grid needs positive bounds")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _load_config(path: str | None) -> dict:
    """A flat JSON config, or the embedded run config of an earlier CSV/JSON output."""
    if path is None:
        return {}
    text = Path(path).read_text() if Path(path).exists() else None
    if text is None:
        raise ConfigError(f"config not found: {path}")
    if text.startswith("# "):
        return {"__run_config__": json.loads(text.splitlines()[0][2:])["run_config"]}
    rec = load_record(path)
    if "run_config" in rec:
        return {"__run_config__": rec["run_config"]}
    return rec


def build_run_config(args) -> RunConfig:
    raw = _load_config(args.config)
    if "__run_config__" in raw:
        rc = RunConfig(**raw["__run_config__"])
        if rc.command != args.command:
            raise ConfigError(f"embedded config is for {rc.command!r}, not {args.command!r}")
    else:
        params = {k: v for k, v in raw.items() if k in PARAM_KEYS}
        options = {k: v for k, v in raw.items() if k not in PARAM_KEYS}
        rc = RunConfig(args.command, params, options)
        rc.variant = options.pop("variant", rc.variant)
        rc.seed = int(options.pop("seed", rc.seed))
        g = options.pop("grid", None)
        rc.grid = parse_grid(g) if isinstance(g, str) else g
    if args.variant:
        rc.variant = args.variant
    if args.seed is not None:
        rc.seed = args.seed
    if args.grid:
        rc.grid = parse_grid(args.grid)
    try:
        rc.variant = normalize_variant(rc.variant)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return rc


def _header(rc: RunConfig, **extra) -> dict:
    return {"run_config": rc.to_dict(), **extra}


def _out_dir(args) -> Path:
    return Path(args.out) if args.out else Path(".")


def _emit_record(args, record: dict) -> None:
    if args.out:
        io.write_json(args.out, record)
    else:
        print(json.dumps(io.jsonable(record), indent=2, sort_keys=True))


def _params(rc: RunConfig, **override):
    return from_record({**rc.params, **override})


def _overlays(rc: RunConfig):
    ov = rc.options.get("overlay")
    if not ov:
        return [({}, "")]
    if len(ov) != 1:
        raise ConfigError("overlay must name exactly one parameter")
    (key, values), = ov.items()
    return [({key: v}, f"_{key}={v}") for v in values]


# -- commands ------------------------------------------------------------------


def cmd_spectrum(rc: RunConfig, args) -> int:
    out = _out_dir(args)
    written = []
    for override, suffix in _overlays(rc):
        p, d = _params(rc, **override)
        grid = rc.grid or [-10 * derive(p).kappa_bar, 10 * derive(p).kappa_bar, 2001]
        try:
            series = spectrum_series(_grid_values(grid), p, d, rc.variant)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ss = solve_steady_state(p, d)
        header = _header(rc, overlay=override, resolved=series.params_snapshot, G=ss.G)
        written.append(io.write_csv(out / f"spectrum{suffix}.csv", header,
                                    {"omega": series.omegas, "s_ff": series.values}))
    for path in written:
        print(path)
    return EXIT_OK


def cmd_optimize(rc: RunConfig, args) -> int:
    o = rc.options
    p, d = _params(rc)
    variable = o.get("variable", "delta")
    objective = o.get("objective", "s_minus")
    delta_rule = o.get("delta_rule") or ("cold" if rc.params.get("delta") == "cold" else None)
    if variable == "both":
        bounds = o.get("bounds")
        n = int(o.get("n", 512))
    else:
        if rc.grid:
            bounds, n = rc.grid[:2], int(rc.grid[2])
        else:
            bounds, n = o.get("bounds"), int(o.get("n", 512))
    if bounds is None:
        raise ConfigError("optimize needs bounds (config 'bounds' or --grid)")
    if n < 512:
        raise ConfigError("optimize needs at least 512 scan points per axis")
    try:
        res = optimize(p, d, objective, variable, bounds, n, rc.variant, delta_rule, bool(o.get("log", False)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    x = list(res.x) if isinstance(res.x, tuple) else res.x
    _emit_record(args, _header(rc, result={"variable": variable, "objective": objective, "x": x,
                                           "value": res.value, "scan_min": res.scan_best}))
    return EXIT_OK


def cmd_qnd(rc: RunConfig, args) -> int:
    axis = rc.options.get("axis", "omega_m")
    if axis not in PARAM_KEYS or axis == "delta":
        raise ConfigError(f"bad qnd axis {axis!r}")
    if not rc.grid:
        raise ConfigError("qnd needs a grid (--grid or config 'grid')")
    n_max = int(rc.options.get("n_max", 3))
    values = _grid_values(rc.grid, bool(rc.options.get("log", False)))
    cols = {axis: values, "tau_meas": [], "ratio": []}
    cols.update({f"tau_ba_{n}": [] for n in range(n_max + 1)})
    for v in values:
        p, d = _params(rc, **{axis: float(v)})
        b = backaction.qnd_budget(p, d, n_max, rc.variant)
        cols["tau_meas"].append(b.tau_meas)
        cols["ratio"].append(b.ratio)
        for n in range(n_max + 1):
            cols[f"tau_ba_{n}"].append(b.tau_ba[n])
    path = io.write_csv(_out_dir(args) / "qnd.csv", _header(rc), cols)
    print(path)
    return EXIT_OK


def cmd_cool(rc: RunConfig, args) -> int:
    p, d = _params(rc)
    record = _header(rc)
    try:
        record["exact"] = backaction.cooling_figures(p, d, rc.variant)
    except NoNetDampingError as exc:
        record["exact"] = {"error": str(exc)}
    if d.alpha_R == 0:
        dc = backaction.delta_cold(p.omega_m, p.J)
        exact_cold = backaction.cooling_figures(p, replace(d, delta=dc), rc.variant)
        approx = backaction.cooling_small_kr(p, d)
        record["delta_cold"] = dc
        record["exact_at_delta_cold"] = exact_cold
        record["small_kr_expansion"] = approx
        record["difference"] = {
            "n_eff": approx.n_eff - exact_cold.n_eff,
            "n_eff_relative": (approx.n_eff - exact_cold.n_eff) / exact_cold.n_eff if exact_cold.n_eff else None,
            "gamma_ratio": approx.gamma_opt / exact_cold.gamma_opt,
        }
    _emit_record(args, record)
    return EXIT_OK


def cmd_jumps(rc: RunConfig, args) -> int:
    o = rc.options
    regime = o.get("regime")
    if regime == "all":
        cases = [("none",) + backaction.jump_regime("none"), ("slow",) + backaction.jump_regime("slow"),
                 ("fast",) + backaction.jump_regime("fast")]
    elif regime:
        cases = [(regime,) + backaction.jump_regime(regime)]
    else:
        p, d = _params(rc)
        cases = [("trace", p, d, True)]
    written = []
    for name, p, d, ba in cases:
        tm = backaction.tau_meas(p, solve_steady_state(p, d))
        if "duration" in o:
            duration = float(o["duration"])
        else:
            duration = float(o.get("duration_tau_meas", 12.0)) * tm
        if not duration > 0 or not math.isfinite(duration):
            raise ConfigError("duration must be > 0")
        tr = backaction.simulate_jumps(p, d, duration, rc.seed, rc.variant, backaction=ba)
        header = _header(rc, regime=name, resolved=to_record(p, d), tau_meas=tm, rates=tr.meta)
        written.append(io.write_csv(_out_dir(args) / f"jumps_{name}.csv", header,
                                    {"time": tr.times, "n_true": tr.n_true, "signal": tr.signal}))
    for path in written:
        print(path)
    return EXIT_OK


def cmd_validate(rc: RunConfig, args) -> int:
    report = validation.run_all()
    for chk in report["checks"]:
        status = "PASS" if chk["passed"] else "FAIL"
        print(f"[{status}] criterion {chk['criterion']}: {chk['name']}")
    report["run_config"] = rc.to_dict()
    io.write_json(args.out or "validation_report.json", report)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


HANDLERS = {
    "spectrum": cmd_spectrum, "optimize": cmd_optimize, "qnd": cmd_qnd,
    "cool": cmd_cool, "jumps": cmd_jumps, "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mimnoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat JSON config, or an earlier output to rerun")
        sp.add_argument("--out", help="output directory (spectrum, qnd, jumps) or file (others)")
        sp.add_argument("--variant", choices=["exact", "large-j", "one-port", "generic"])
        sp.add_argument("--seed", type=int)
        sp.add_argument("--grid", help="min:max:n")
    return parser


def _join_grid(argv: list[str]) -> list[str]:
    # "--grid -5:5:101" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--grid":
            out.append("--grid=" + next(it, ""))
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_grid(argv))
    try:
        rc = build_run_config(args)
        if args.command not in ("validate", "jumps") and not rc.params:
            raise ConfigError(f"{args.command} needs --config with parameters")
        return HANDLERS[args.command](rc, args)
    except (ConfigError, ParameterError, ArithmeticError, ValueError, RuntimeError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
