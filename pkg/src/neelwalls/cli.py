"""Batch command-line front end.

Subcommands
-----------
eval-w      evaluate the renormalised energy of a configuration
minimize-w  descend the renormalised energy (optionally multi-start)
scan        tabulate W along a collapse/dilation path
simulate    minimise the full energy E_eps for one configuration
fit         fit the two-term energy expansion over a list of epsilons
verify      run the acceptance suite and report pass/fail per criterion

Configuration can come from a JSON file (--config); explicit flags
override file values.  Every run echoes its resolved configuration into
run-manifest.json next to the outputs, and fixed seeds give byte-identical
outputs at a fixed thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import acceptance, micromag, renorm
from .errors import DomainError
from .geometry import CONFINED, UNCONFINED, WallConfig

__all__ = ["main"]


def _parse_walls(text: str):
    """'0:+1,1.5:-1' -> positions and signs."""
    positions, signs = [], []
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        pos, _, sign = chunk.partition(":")
        positions.append(float(pos))
        signs.append(int(sign.replace("+", "")))
    return positions, signs


def _parse_signs(text: str):
    mapping = {"+": 1, "-": -1, "+1": 1, "-1": -1, "1": 1}
    return [mapping[token.strip()] for token in text.split(",") if token.strip()]


def _config_from(args, need_walls=True) -> WallConfig:
    model = args.model
    alpha = args.alpha
    if args.walls:
        positions, signs = _parse_walls(args.walls)
    elif getattr(args, "d", None):
        signs = _parse_signs(args.d)
        count = args.n or len(signs)
        if count != len(signs):
            raise DomainError("--n disagrees with the number of signs in --d")
        if model == CONFINED:
            positions = list(np.linspace(-0.5, 0.5, count))
        else:
            positions = list(np.arange(count, dtype=float))
    elif need_walls:
        raise DomainError("specify walls via --walls or --n/--d")
    else:
        positions, signs = [], []
    return WallConfig(model, np.asarray(positions), np.asarray(signs), alpha)


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", dir=path.parent, delete=False, suffix=".tmp"
    )
    with handle as tmp:
        tmp.write(text)
    os.replace(handle.name, path)


def _emit(args, payload: dict, tables: dict | None = None):
    """Print the JSON payload; optionally persist payload + CSV tables and a
    manifest into the output directory."""
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        out = Path(args.out)
        _write_atomic(out / "result.json", text + "\n")
        manifest = {
            "command": args.command,
            "arguments": {
                key: value
                for key, value in sorted(vars(args).items())
                if key != "func" and value is not None
            },
        }
        _write_atomic(out / "run-manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        for name, (header, rows) in (tables or {}).items():
            lines = [",".join(header)]
            lines.extend(",".join(repr(cell) for cell in row) for row in rows)
            _write_atomic(out / f"{name}.csv", "\n".join(lines) + "\n")
            if args.svg:
                _render_svg(out / f"{name}.svg", header, rows)


def _render_svg(path: Path, header, rows):
    """Thin static renderer over a CSV table: first column as abscissa."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.asarray(rows, dtype=float)
    figure, axes = plt.subplots(figsize=(6, 4))
    for column in range(1, data.shape[1]):
        axes.plot(data[:, 0], data[:, column], label=header[column])
    axes.set_xlabel(header[0])
    axes.legend(loc="best", fontsize=8)
    figure.tight_layout()
    figure.savefig(path, format="svg")
    plt.close(figure)


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_eval_w(args):
    config = _config_from(args)
    result = renorm.renormalised_energy(config)
    payload = {
        "W": result.total,
        "self_terms": list(result.self_terms),
        "pair_terms": [list(row) for row in result.pair_terms],
        "status": result.status,
        "gradient": list(renorm.energy_gradient(config))
        if result.status == "ok" and config.n_walls
        else None,
    }
    _emit(args, payload)
    return 0


def _cmd_minimize_w(args):
    config = _config_from(args)
    options = renorm.MinimizeOptions(max_iter=args.max_iter)
    if args.starts > 1:
        reports = renorm.minimise_multistart(
            config, n_starts=args.starts, seed=args.seed, options=options
        )
        best = min(
            (r for r in reports if r.status == "converged"),
            key=lambda r: r.value,
            default=reports[0],
        )
    else:
        reports = [renorm.minimise(config, options)]
        best = reports[0]
    payload = {
        "status": best.status,
        "positions": list(best.positions),
        "W": best.value,
        "grad_norm": best.grad_norm,
        "iterations": best.iterations,
        "all_statuses": [r.status for r in reports],
    }
    _emit(args, payload)
    return 0 if best.status in ("converged", "no-critical-point") else 1


def _cmd_scan(args):
    config = _config_from(args)
    etas = np.geomspace(args.eta_start, args.eta_stop, args.samples)
    if args.path == "dilate":
        path = renorm.dilation_path(config.a - config.a.mean())
    elif args.path == "collapse":
        path = renorm.dilation_path(config.a)
    elif args.path.startswith("block:"):
        _, lo, hi = args.path.split(":")
        path = renorm.block_collapse_path(config.a, int(lo), int(hi))
    else:
        raise DomainError(f"unknown path {args.path!r}")
    rows = renorm.scan_path(config, path, etas)
    payload = {"path": args.path, "rows": [[eta, w] for eta, w in rows]}
    _emit(args, payload, tables={"scan": (["eta", "W"], rows)})
    return 0


def _cmd_simulate(args):
    config = _config_from(args)
    params = micromag.SimulationParams(
        epsilon=args.eps,
        model=args.model,
        n_nodes=args.nodes,
        max_iter=args.max_iter,
        grad_tol=args.grad_tol,
    )
    report = micromag.minimize_energy(config, params)
    payload = {
        "status": report.status,
        "iterations": report.iterations,
        "grad_norm": report.grad_norm,
        "exchange": report.breakdown.exchange,
        "anisotropy": report.breakdown.anisotropy,
        "stray": report.breakdown.stray,
        "total": report.breakdown.total,
        "delta": params.delta,
    }
    profile = report.profile
    tables = {
        "profile": (
            ["x", "phi", "m1", "m2"],
            list(
                zip(
                    profile.grid.nodes(),
                    profile.phi,
                    profile.m1,
                    profile.m2,
                )
            ),
        ),
        "trace": (
            ["iteration", "exchange", "anisotropy", "stray", "total"],
            [list(row) for row in report.trace],
        ),
    }
    _emit(args, payload, tables)
    return 0 if report.status == "converged" else 1


def _cmd_fit(args):
    config = _config_from(args)
    template = micromag.SimulationParams(
        epsilon=0.5,
        model=args.model,
        n_nodes=args.nodes,
        max_iter=args.max_iter,
        grad_tol=args.grad_tol,
    )
    eps_list = [float(token) for token in args.eps_list.split(",")]
    fit = micromag.expansion_fit(config, eps_list, template)
    payload = {
        "leading": fit.leading,
        "second": fit.second,
        "residual": fit.residual,
        "energies": list(fit.energies),
        "log_factors": list(fit.log_factors),
        "leading_prediction": 0.5
        * math.pi
        * float(np.sum((config.d - math.cos(config.alpha)) ** 2)),
    }
    rows = [
        [1.0 / lf, energy] for lf, energy in zip(fit.log_factors, fit.energies)
    ]
    _emit(args, payload, tables={"fit": (["inverse_log_factor", "energy"], rows)})
    return 0


def _cmd_verify(args):
    failures = 0
    suites = args.suite.split(",") if args.suite != "all" else list(acceptance.SUITES)
    for name in suites:
        if args.fast and name == "expansion":
            print(f"[SKIP] {name} (slow; run without --fast to include)")
            continue
        kwargs = {}
        if name == "expansion" and args.nodes:
            kwargs = {"n_nodes": args.nodes}
        for record in acceptance.run_suite(name.strip(), **kwargs):
            print(record.line())
            failures += not record.passed
    if failures:
        print(f"{failures} acceptance check(s) FAILED")
        return 1
    print("all acceptance checks passed")
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_common(parser, need_model=True):
    if need_model:
        parser.add_argument(
            "--model", choices=[CONFINED, UNCONFINED], default=CONFINED
        )
        parser.add_argument("--alpha", type=float, default=math.pi / 2)
        parser.add_argument("--walls", help="comma list of position:sign, e.g. 0:+1,1.5:-1")
        parser.add_argument("--n", type=int, help="wall count (with --d)")
        parser.add_argument("--d", help="comma list of signs, e.g. +,-")
    parser.add_argument("--out", help="output directory for result/manifest/CSV files")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--svg", action="store_true", help="render CSV tables to SVG")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neelwalls",
        description="Renormalised Neel-wall interaction energies and the full nonlocal model",
    )
    parser.add_argument("--config", help="JSON file with default argument values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-w", help="evaluate the renormalised energy")
    _add_common(p)
    p.set_defaults(func=_cmd_eval_w)

    p = sub.add_parser("minimize-w", help="minimise the renormalised energy")
    _add_common(p)
    p.add_argument("--starts", type=int, default=1)
    p.add_argument("--max-iter", type=int, default=500)
    p.set_defaults(func=_cmd_minimize_w)

    p = sub.add_parser("scan", help="tabulate W along a path")
    _add_common(p)
    p.add_argument("--path", default="collapse", help="collapse | dilate | block:K:L")
    p.add_argument("--eta-start", type=float, default=1.0)
    p.add_argument("--eta-stop", type=float, default=1e-6)
    p.add_argument("--samples", type=int, default=13)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("simulate", help="minimise the full energy")
    _add_common(p)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--nodes", type=int, default=2**14)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--grad-tol", type=float, default=3e-10)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit the two-term energy expansion")
    _add_common(p)
    p.add_argument("--eps-list", default="1e-2,3e-3,1e-3,3e-4,1e-4")
    p.add_argument("--nodes", type=int, default=2**14)
    p.add_argument("--max-iter", type=int, default=12000)
    p.add_argument("--grad-tol", type=float, default=3e-9)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("verify", help="run the acceptance suite")
    _add_common(p, need_model=False)
    p.add_argument("--suite", default="all", help="comma list or 'all'")
    p.add_argument("--fast", action="store_true", help="skip the slow expansion suite")
    p.add_argument("--nodes", type=int, help="override grid size for the expansion suite")
    p.set_defaults(func=_cmd_verify)
    return parser


def _apply_config_file(parser, argv):
    """Flags override config-file values: parse once to find --config, load
    it as defaults, then reparse."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        with open(known.config) as handle:
            defaults = json.load(handle)
        for action in parser._subparsers._group_actions[0].choices.values():
            action.set_defaults(
                **{k.replace("-", "_"): v for k, v in defaults.items()}
            )
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config_file(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
