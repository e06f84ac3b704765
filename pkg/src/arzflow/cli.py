"""Command-line front end.

Subcommands:

* ``run``     -- one scenario / scheme / law combination, outputs to a directory
* ``compare`` -- both schemes on the same setup, prints the time-step factor
* ``sweep``   -- a stiffness ladder (epsilon or gamma values), one factor row each

Options can also come from a key=value config file (``--config``); explicit
flags override file entries.  Exit code is 0 on success and 1 with a
diagnostic on any solver error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import scenarios
from .driver import RunConfig, compare_report, run, write_run_outputs
from .errors import ArzFlowError


def _parse_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


_FILE_KEYS = {
    "scenario": str, "scheme": str, "law": str,
    "epsilon": float, "gamma": float, "rho_star": float, "v_ref": float,
    "rho_num": float, "rho_num_prefactor": float,
    "dx": float, "cfl": float, "t_final": float,
}


def _add_common(p: argparse.ArgumentParser, need_scenario: bool = True) -> None:
    p.add_argument("--scenario", required=need_scenario,
                   choices=scenarios.names() if need_scenario else None)
    p.add_argument("--law", choices=["vo1", "vo2", "vo3"], default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--rho-star", dest="rho_star", type=float, default=None)
    p.add_argument("--v-ref", dest="v_ref", type=float, default=None)
    p.add_argument("--rho-num", dest="rho_num", type=float, default=None)
    p.add_argument("--rho-num-prefactor", dest="rho_num_prefactor",
                   type=float, default=None)
    p.add_argument("--dx", type=float, default=None)
    p.add_argument("--cfl", type=float, default=None)
    p.add_argument("--t-final", dest="t_final", type=float, default=None)
    p.add_argument("--config", default=None, help="key=value file; flags win")
    p.add_argument("--out", default=None, help="output directory")


def _build_config(args: argparse.Namespace, scheme: str | None = None,
                  **overrides) -> RunConfig:
    merged: dict = {}
    if args.config:
        raw = _parse_config_file(args.config)
        for key, conv in _FILE_KEYS.items():
            if key in raw:
                merged[key] = conv(raw[key])
        if "snapshots" in raw and raw["snapshots"]:
            merged["snapshot_times"] = tuple(
                float(tok) for tok in raw["snapshots"].split(","))
    for key in _FILE_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    snaps = getattr(args, "snapshot", None)
    if snaps:
        merged["snapshot_times"] = tuple(snaps)
    if scheme is not None:
        merged["scheme"] = scheme
    merged.update(overrides)
    merged.setdefault("law", "vo1")
    merged.setdefault("dx", 1e-3)
    merged.setdefault("cfl", 0.5)
    merged.setdefault("rho_num_prefactor", 0.2)
    if "scenario" not in merged:
        raise ArzFlowError("a scenario is required (flag or config file)")
    return RunConfig(**merged)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _build_config(args, scheme=args.scheme)
    result = run(config)
    log = result.log
    print(f"{config.scenario} / {config.scheme} / {result.law.kind.value}: "
          f"{log.n_steps} steps, min dt = {log.min_dt:.4g}, "
          f"mass drift = {log.mass_drift:.3%}, wall = {log.wall_time:.2f}s")
    if args.out:
        for path in write_run_outputs(result, args.out):
            print(f"  wrote {path}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    results = {}
    for scheme in ("glimm", "imex"):
        config = _build_config(args, scheme=scheme)
        results[scheme] = run(config)
        if args.out:
            write_run_outputs(results[scheme], Path(args.out) / scheme)
    print(compare_report(results["glimm"].log, results["imex"].log))
    return 0


def _sweep_one(config: RunConfig):
    res = run(config)
    return res.log.min_dt, res.log.n_steps, res.log.mass_drift


def _cmd_sweep(args: argparse.Namespace) -> int:
    if bool(args.epsilons) == bool(args.gammas):
        raise ArzFlowError("sweep needs exactly one of --epsilons / --gammas")
    values = args.epsilons or args.gammas
    knob = "epsilon" if args.epsilons else "gamma"
    configs = []
    for value in values:
        for scheme in ("glimm", "imex"):
            configs.append(_build_config(args, scheme=scheme,
                                         keep_step_log=False,
                                         **{knob: value}))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            stats = list(pool.map(_sweep_one, configs))
    else:
        stats = [_sweep_one(c) for c in configs]

    header = (f"{knob:>10}  {'dt glimm':>12}  {'dt imex':>12}  {'factor':>8}"
              f"  {'drift glimm':>12}  {'drift imex':>12}")
    print(header)
    rows = []
    for k, value in enumerate(values):
        dt_g, _, drift_g = stats[2 * k]
        dt_i, _, drift_i = stats[2 * k + 1]
        factor = dt_i / dt_g if dt_g > 0 else float("nan")
        line = (f"{value:>10g}  {dt_g:>12.4g}  {dt_i:>12.4g}  {factor:>8.2f}"
                f"  {drift_g:>12.3%}  {drift_i:>12.3%}")
        rows.append(line)
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.txt").write_text("\n".join([header] + rows) + "\n",
                                       encoding="utf-8")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="arzflow",
        description="Finite-volume solvers for congestion-aware traffic flow")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    _add_common(p_run)
    p_run.add_argument("--scheme", choices=["glimm", "imex"], default="glimm")
    p_run.add_argument("--snapshot", type=float, action="append", default=None,
                       help="snapshot time (repeatable)")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare",
                           help="run both schemes, report the dt factor")
    _add_common(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_sw = sub.add_parser("sweep", help="stiffness ladder, factor table")
    _add_common(p_sw)
    p_sw.add_argument("--epsilons", type=float, nargs="+", default=None)
    p_sw.add_argument("--gammas", type=float, nargs="+", default=None)
    p_sw.add_argument("--jobs", type=int, default=1)
    p_sw.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ArzFlowError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
