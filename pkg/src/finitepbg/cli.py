"""``finitepbg`` command line: DOM, field, energy and emission sweeps plus validation.

Exit codes: 0 success, 1 validation failure or non-finite output, 2 config error.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ROUTE_CHOICES, bundled_names, bundled_raw, parse_config
from .dom import cell_bulk_velocity, dom, quarter_wave_indices
from .emission import emission_rate
from .errors import ConfigError, DomainError
from .fields import cell_field, stack_energy, stack_fields
from .validation import MUTATIONS, run_checks

DEFAULT_CONFIG = {"dom": "fig4", "field": "fig5", "energy": "fig6", "emission": "fig7",
                  "validate": "fig4"}


class NonFiniteOutput(ArithmeticError):
    pass


def _read_raw(spec: str) -> dict:
    path = Path(spec)
    if path.is_file():
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {spec} is not valid JSON: {exc}") from exc
    if spec in bundled_names():
        return bundled_raw(spec)
    raise ConfigError(f"config {spec!r} is neither a file nor a bundled name {bundled_names()}")


def _effective_config(args):
    raw = copy.deepcopy(_read_raw(args.config or DEFAULT_CONFIG[args.command]))
    if not isinstance(raw, dict):
        raise ConfigError("config error at <root>: expected a JSON object")
    if args.points is not None:
        raw.setdefault("grid", {"omega_min": 1 / 512, "omega_max": 1.0})
        if isinstance(raw["grid"], dict):
            raw["grid"]["points"] = args.points
    if getattr(args, "cell", None) is not None:
        raw["cell_index"] = args.cell
    if args.route not in (None, "all"):
        raw["routes"] = [args.route]
    cfg = parse_config(raw)
    return cfg, args.route == "all"


def _routes(cfg, all_routes: bool) -> list[str]:
    if not all_routes:
        return list(cfg.routes)
    routes = ["phase", "closed"]
    if quarter_wave_indices(cfg.cell) is not None:
        routes.append("qw")
    return routes


def _require_finite(columns: dict, omega, label_of) -> None:
    for name, values in columns.items():
        bad = ~np.isfinite(np.asarray(values, dtype=float))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise NonFiniteOutput(f"non-finite {name} at omega={omega[i]!r} (route {label_of(name)})")


def sweep_dom(cfg, routes):
    omega = cfg.grid.values
    v = cell_bulk_velocity(cfg.cell)
    cols = {"omega": omega}
    for r in routes:
        cols[f"dom_{r}"] = np.asarray(dom(cfg.cell, cfg.periods, omega, r).rho) * v
    return cols


def sweep_energy(cfg, routes):
    omega = cfg.grid.values
    U = np.array([stack_energy(stack_fields(cfg.cell, cfg.periods, w)).total for w in omega])
    return {"omega": omega, "energy": U}


def sweep_field(cfg, routes):
    """Long format: one row per (omega, layer, fractional position)."""
    fracs = np.linspace(0.0, 1.0, cfg.field_points)
    rows = {"omega": [], "layer": [], "x_frac": [], "intensity": []}
    for w in cfg.grid.values:
        fld = cell_field(cfg.cell, cfg.periods, cfg.cell_index, w)
        for j, L in enumerate(cfg.cell.thicknesses):
            rows["omega"].extend([w] * len(fracs))
            rows["layer"].extend([j] * len(fracs))
            rows["x_frac"].extend(fracs)
            rows["intensity"].extend(np.abs(fld.in_layer(j, fracs * L)) ** 2)
    return {k: np.asarray(v) for k, v in rows.items()}


def _dipole_label(d) -> str:
    return f"c{d.cell_index}_l{d.layer}_f{d.fraction:g}"


def sweep_emission(cfg, routes):
    omega = cfg.grid.values
    cols = {"omega": omega}
    for r in routes:
        for d in cfg.dipoles:
            name = "p_rel_" + (f"{r}_" if len(routes) > 1 else "") + _dipole_label(d)
            cols[name] = np.array([emission_rate(d, cfg.cell, cfg.periods, w, r).p_rel for w in omega])
    return cols


SWEEPS = {"dom": sweep_dom, "field": sweep_field, "energy": sweep_energy, "emission": sweep_emission}


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def render(columns: dict, meta: dict, fmt: str) -> str:
    if fmt == "json":
        payload = {"meta": meta, "columns": list(columns),
                   "data": {k: [float(x) for x in np.asarray(v)] for k, v in columns.items()}}
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns.keys())
    arrays = [np.asarray(v) for v in columns.values()]
    for row in zip(*arrays):
        writer.writerow(_fmt(x) for x in row)
    return buf.getvalue()


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run_sweep(args) -> int:
    cfg, all_routes = _effective_config(args)
    routes = _routes(cfg, all_routes) if args.command in ("dom", "emission") else ["matrix"]
    columns = SWEEPS[args.command](cfg, routes)
    _require_finite({k: v for k, v in columns.items() if k != "omega"}, columns["omega"],
                    lambda name: next((r for r in routes if f"_{r}" in name), ",".join(routes)))
    meta = {
        "tool": f"finitepbg {__version__}",
        "command": args.command,
        "config_sha256": cfg.digest,
        "routes": ",".join(routes),
        "periods": cfg.periods,
    }
    if args.command == "field":
        meta["cell_index"] = cfg.cell_index
    if args.command == "dom":
        meta["normalisation"] = f"rho * v_bulk, v_bulk = {cell_bulk_velocity(cfg.cell)!r}"
    _emit(render(columns, meta, args.format), args.out)
    return 0


def run_validate(args) -> int:
    cfg, _ = _effective_config(args)
    results = run_checks(cfg, mutate=args.mutate)
    if args.format == "json":
        text = json.dumps({
            "config_sha256": cfg.digest,
            "mutation": args.mutate,
            "checks": [{"name": r.name, "deviation": r.deviation, "tolerance": r.tolerance,
                        "passed": r.passed} for r in results],
        }, indent=1) + "\n"
    else:
        lines = [f"{'check':<40} {'max deviation':>14} {'tolerance':>10}  result"]
        for r in results:
            lines.append(f"{r.name:<40} {r.deviation:>14.3e} {r.tolerance:>10.1e}  "
                         f"{'PASS' if r.passed else 'FAIL'}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finitepbg",
        description="Density of modes, modal fields and dipole emission in finite 1D periodic stacks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file or bundled name (" + ", ".join(bundled_names()) + ")")
        p.add_argument("--route", choices=ROUTE_CHOICES, help="DOM route(s) to evaluate")
        p.add_argument("--points", type=int, help="override the number of grid points")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="write here instead of stdout")

    for name, help_text in (("dom", "normalised DOM sweep"),
                            ("field", "|E|^2 across the layers of one cell"),
                            ("energy", "total stack energy sweep"),
                            ("emission", "scaled emission rate of each dipole")):
        p = sub.add_parser(name, help=help_text)
        common(p)
        if name in ("field", "emission"):
            p.add_argument("--cell", type=int, help="cell number n (1-based)")
    p = sub.add_parser("validate", help="run cross-route and oracle checks")
    common(p)
    p.add_argument("--mutate", choices=MUTATIONS, help="inject a known fault to test the harness")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return run_validate(args)
        return run_sweep(args)
    except ConfigError as exc:
        print(f"finitepbg: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"finitepbg: config error: {exc}", file=sys.stderr)
        return 2
    except NonFiniteOutput as exc:
        print(f"finitepbg: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
