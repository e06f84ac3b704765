"""Simulation driver: configuration, time loop, logging, and output emission.

A run advances one scenario with one scheme from t = 0 to the final time,
truncating any step that would cross a requested snapshot time (or the final
time) so that outputs land exactly on the requested times.  Runs are fully
deterministic: the only sampling source is the Van der Corput sequence.

The run log records per-step (t, dt) for the time-step tables, the running
extremes of v and w = v + p(rho) for the invariant-region checks, and the
largest density seen (the singular law must never reach rho_star).
"""

from __future__ import annotations

import time as _time
from array import array
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import scenarios as _scen
from .errors import ParameterError
from .glimm import (CflConfig, dt_from_speeds, glimm_update,
                    interface_solutions, max_signal_speed, van_der_corput)
from .grid import (BoundaryPolicy, Grid1D, SolutionField, field_to_primitive,
                   primitive_to_field)
from .imex import ImexConfig, imex_step
from .pressure import PressureLaw, SplitLaw
from .riemann import max_wave_speed

_SCHEMES = ("glimm", "imex")


@dataclass
class RunConfig:
    """Everything a run needs; unset law parameters fall back to the scenario."""

    scenario: str
    scheme: str = "glimm"
    law: str = "vo1"
    epsilon: float | None = None
    gamma: float | None = None
    rho_star: float | None = None
    v_ref: float | None = None
    rho_num: float | None = None
    rho_num_prefactor: float = 0.2  # knob in the singular-law truncation rule
    dx: float = 1e-3
    cfl: float = 0.5
    dt_min: float = 1e-13
    t_final: float | None = None    # None: scenario default
    snapshot_times: tuple[float, ...] = ()
    keep_step_log: bool = True
    track_invariants: bool = True

    def __post_init__(self) -> None:
        if self.scheme not in _SCHEMES:
            raise ParameterError(f"scheme must be one of {_SCHEMES}")
        if self.dx <= 0.0:
            raise ParameterError("dx must be positive")


@dataclass
class RunLog:
    """Per-run record: step sizes, wall time, mass, and invariant extremes."""

    times: array = dc_field(default_factory=lambda: array("d"))
    dts: array = dc_field(default_factory=lambda: array("d"))
    n_steps: int = 0
    min_dt: float = np.inf
    wall_time: float = 0.0
    mass_initial: float = 0.0
    mass_final: float = 0.0
    max_rho: float = 0.0
    v_initial: tuple[float, float] = (np.inf, -np.inf)
    w_initial: tuple[float, float] = (np.inf, -np.inf)
    v_seen: tuple[float, float] = (np.inf, -np.inf)
    w_seen: tuple[float, float] = (np.inf, -np.inf)
    # worst excursion of a sampling-stage output outside its admissible box
    invariant_excess: float = 0.0

    @property
    def mass_drift(self) -> float:
        if self.mass_initial == 0.0:
            return 0.0
        return (self.mass_final - self.mass_initial) / self.mass_initial


@dataclass
class RunResult:
    config: RunConfig
    law: PressureLaw
    split: SplitLaw | None
    snapshots: list[tuple[float, SolutionField]]
    log: RunLog

    @property
    def final(self) -> SolutionField:
        return self.snapshots[-1][1]


def build_law(config: RunConfig, scenario: "_scen.Scenario") -> PressureLaw:
    return scenario.default_law(config.law, epsilon=config.epsilon,
                                gamma=config.gamma, rho_star=config.rho_star,
                                v_ref=config.v_ref)


def _box(rho: np.ndarray, v: np.ndarray, law):
    """(v_lo, v_hi, w_lo, w_hi) over non-vacuum interior cells, or None."""
    inside = rho[1:-1] >= law.rho_vac
    if not np.any(inside):
        return None
    vi = v[1:-1][inside]
    wi = vi + law.value(rho[1:-1][inside])
    return (float(np.min(vi)), float(np.max(vi)),
            float(np.min(wi)), float(np.max(wi)))


class _InvariantMonitor:
    """Checks that each sampling stage keeps (v, w) inside its input box.

    The random-choice construction cannot enlarge the invariant box of the
    field it acts on.  For a pure Glimm run the admissible box is the initial
    one for the whole run, so only freshly sampled cells need checking; for
    the splitting scheme the implicit stage moves states legitimately, so each
    explicit stage is checked against its own input box.  Rarefactions
    adjacent to vacuum raise v up to w, so when the data contain vacuum the
    admissible v-range extends to the top of the w-range.
    """

    def __init__(self, law, rho, v):
        self.law = law
        self.initial = _box(rho, v, law)
        self.vacuum = bool(np.any(rho[1:-1] < law.rho_vac))
        self.excess = 0.0
        if self.initial is not None:
            self.v_seen = [self.initial[0], self.initial[1]]
            self.w_seen = [self.initial[2], self.initial[3]]
        else:
            self.v_seen = [np.inf, -np.inf]
            self.w_seen = [np.inf, -np.inf]

    def _admissible(self, box):
        v_lo, v_hi, w_lo, w_hi = box
        if self.vacuum:
            v_hi = max(v_hi, w_hi)
        return v_lo, v_hi, w_lo, w_hi

    def check_cell(self, rho_j: float, v_j: float) -> None:
        """One freshly sampled state against the fixed initial box."""
        if rho_j < self.law.rho_vac or self.initial is None:
            return
        w_j = v_j + self.law.value(rho_j)
        v_lo, v_hi, w_lo, w_hi = self._admissible(self.initial)
        self.excess = max(self.excess, v_lo - v_j, v_j - v_hi,
                          w_lo - w_j, w_j - w_hi)
        if v_j < self.v_seen[0]:
            self.v_seen[0] = v_j
        if v_j > self.v_seen[1]:
            self.v_seen[1] = v_j
        if w_j < self.w_seen[0]:
            self.w_seen[0] = w_j
        if w_j > self.w_seen[1]:
            self.w_seen[1] = w_j

    def check_stage(self, rho, v, input_box) -> None:
        """Whole stage output against the stage's own input box."""
        out = _box(rho, v, self.law)
        if out is None or input_box is None:
            return
        v_lo, v_hi, w_lo, w_hi = self._admissible(input_box)
        ov_lo, ov_hi, ow_lo, ow_hi = out
        self.excess = max(self.excess, v_lo - ov_lo, ov_hi - v_hi,
                          w_lo - ow_lo, ow_hi - w_hi)
        self.v_seen[0] = min(self.v_seen[0], ov_lo)
        self.v_seen[1] = max(self.v_seen[1], ov_hi)
        self.w_seen[0] = min(self.w_seen[0], ow_lo)
        self.w_seen[1] = max(self.w_seen[1], ow_hi)


def run(config: RunConfig) -> RunResult:
    """Advance the configured scenario and return snapshots plus the run log."""
    scenario = _scen.build(config.scenario)
    law = build_law(config, scenario)
    cfl_cfg = CflConfig(number=config.cfl, dt_min=config.dt_min)
    split = None
    stage_law = law
    imex_cfg = None
    if config.scheme == "imex":
        rho_num = config.rho_num
        if rho_num is None:
            rho_num = scenario.default_rho_num(
                law, prefactor=config.rho_num_prefactor)
        split = SplitLaw(law, rho_num)
        stage_law = split.explicit
        imex_cfg = ImexConfig(cfl=cfl_cfg)

    t_final = config.t_final if config.t_final is not None else scenario.t_final
    if t_final < 0.0:
        raise ParameterError("t_final must be nonnegative")
    n_cells = max(1, round((scenario.x_max - scenario.x_min) / config.dx))
    grid = Grid1D(scenario.x_min, scenario.x_max, n_cells)
    field = _scen.initial_field(scenario, grid, law)
    policy = BoundaryPolicy.from_field(field)
    dx = grid.dx

    log = RunLog()
    log.mass_initial = field.mass()
    log.max_rho = float(np.max(field.rho[1:-1]))

    # marching state: primitive arrays under the stage law (the physical
    # (rho, v) for Glimm; (rho, v + p_imp) for the splitting scheme)
    rho, v = field_to_primitive(field, stage_law)
    monitor = None
    if config.track_invariants:
        monitor = _InvariantMonitor(stage_law, rho, v)
        if monitor.initial is not None:
            log.v_initial = monitor.initial[:2]
            log.w_initial = monitor.initial[2:]

    targets = sorted({float(t) for t in config.snapshot_times
                      if 0.0 < t <= t_final} | {t_final})
    snapshots: list[tuple[float, SolutionField]] = []
    if 0.0 in config.snapshot_times and t_final > 0.0:
        snapshots.append((0.0, field.copy()))

    wall_start = _time.perf_counter()
    t = 0.0
    n = 0  # Van der Corput counter
    eps_t = 1e-14 * max(1.0, t_final)
    if config.scheme == "glimm":
        # per-cell signal speeds, maintained incrementally over the few cells
        # each step actually resamples
        lam = np.maximum(np.abs(v - rho * law.deriv(rho)), np.abs(v))
    for target in targets:
        while target - t > eps_t:
            a = van_der_corput(n)
            n += 1
            if config.scheme == "glimm":
                # the stability bound also honours waves born at the
                # interfaces (a fresh congestion star can be far faster than
                # any cell state); this is stricter than the cellwise bound,
                # never looser
                interfaces = interface_solutions(rho, v, law)
                s = float(lam.max())
                for sol in interfaces[1]:
                    ws = max_wave_speed(sol)
                    if ws > s:
                        s = ws
                dt_stab = dt_from_speeds(s, dx, cfl_cfg)
                dt = min(dt_stab, target - t)
                rho, v, cells = glimm_update(grid, rho, v, law, dt, a,
                                             interfaces)
                for j in cells:
                    rj, vj = rho[j], v[j]
                    lam[j] = max(abs(vj - rj * law.deriv(rj)), vj) if rj > 0.0 \
                        else abs(vj)
                    if rj > log.max_rho:
                        log.max_rho = rj
                    if monitor is not None:
                        monitor.check_cell(rj, vj)
            else:
                dt_stab = dt_from_speeds(max_signal_speed(rho, v, stage_law),
                                         dx, cfl_cfg)
                dt = min(dt_stab, target - t)
                field = primitive_to_field(grid, rho, v, stage_law, t)
                field.rho[0], field.y[0] = policy.left.rho, policy.left.y
                field.rho[-1], field.y[-1] = policy.right.rho, policy.right.y
                input_box = _box(rho, v, stage_law) if monitor is not None else None
                res = imex_step(field, split, imex_cfg, a, dt=dt)
                if monitor is not None:
                    monitor.check_stage(res.explicit_rho, res.explicit_vel,
                                        input_box)
                rho, v = field_to_primitive(res.field, stage_law)
                mx = float(np.max(rho[1:-1]))
                if mx > log.max_rho:
                    log.max_rho = mx
            t += dt
            if config.keep_step_log:
                log.times.append(t)
                log.dts.append(dt)
            log.n_steps += 1
            # min_dt tracks the stability bound; a final step truncated to
            # land exactly on a snapshot time is not a stability event
            if dt_stab < log.min_dt:
                log.min_dt = dt_stab
        t = target
        # reconstructing y with the stage law recovers the full-law y in both
        # schemes (for the splitting scheme, vel + p_exp = v + p)
        snap = primitive_to_field(grid, rho, v, stage_law, t)
        snap.rho[0], snap.y[0] = policy.left.rho, policy.left.y
        snap.rho[-1], snap.y[-1] = policy.right.rho, policy.right.y
        snapshots.append((t, snap))
    log.wall_time = _time.perf_counter() - wall_start
    log.mass_final = snapshots[-1][1].mass()
    if monitor is not None:
        log.invariant_excess = monitor.excess
        log.v_seen = tuple(monitor.v_seen)
        log.w_seen = tuple(monitor.w_seen)
    if log.n_steps == 0:
        log.min_dt = 0.0
    return RunResult(config, law, split, snapshots, log)


# -- output emission ---------------------------------------------------------

def write_csv(field: SolutionField, law, path: "Path | str") -> None:
    """Write interior cells as `x,rho,v,y` rows, 17 significant digits.

    That width makes the text round-trip to the exact binary doubles.  The
    velocity column is 0 for vacuum cells, where it has no physical meaning.
    """
    rho, v = field_to_primitive(field, law)
    x = field.grid.cell_centers()
    lines = ["x,rho,v,y"]
    for j in range(field.grid.n_cells):
        lines.append(f"{x[j]:.17g},{rho[j + 1]:.17g},{v[j + 1]:.17g},"
                     f"{field.y[j + 1]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path: "Path | str") -> dict[str, np.ndarray]:
    """Read back a profile CSV into column arrays (used by tests and plots)."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    cols = text[0].split(",")
    data = np.array([[float(tok) for tok in line.split(",")] for line in text[1:]])
    return {c: data[:, k] for k, c in enumerate(cols)}


def write_log(log: RunLog, path: "Path | str") -> None:
    """Per-step record as `step,t,dt` rows."""
    lines = ["step,t,dt"]
    for k in range(len(log.dts)):
        lines.append(f"{k},{log.times[k]:.17g},{log.dts[k]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_summary(result: RunResult, path: "Path | str") -> None:
    log = result.log
    cfg = result.config
    kv = {
        "scenario": cfg.scenario,
        "scheme": cfg.scheme,
        "law": result.law.kind.value,
        "epsilon": result.law.epsilon,
        "gamma": result.law.gamma,
        "rho_star": result.law.rho_star,
        "v_ref": result.law.v_ref,
        "rho_num": result.split.rho_num if result.split else "",
        "dx": cfg.dx,
        "cfl": cfg.cfl,
        "t_final": result.snapshots[-1][0],
        "steps": log.n_steps,
        "min_dt": log.min_dt,
        "wall_time_s": f"{log.wall_time:.3f}",
        "mass_initial": log.mass_initial,
        "mass_final": log.mass_final,
        "mass_drift": log.mass_drift,
        "max_rho": log.max_rho,
        "invariant_excess": log.invariant_excess,
    }
    Path(path).write_text(
        "\n".join(f"{k}={v}" for k, v in kv.items()) + "\n", encoding="utf-8")


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Density / velocity profile plot, generated alongside the run outputs.

Run from the directory containing the CSV files:  python {script_name}
"""
import csv

import matplotlib.pyplot as plt

FILES = {files!r}

fig, (ax_rho, ax_v) = plt.subplots(1, 2, figsize=(11, 4))
for fname, label in FILES:
    xs, rhos, vs = [], [], []
    with open(fname, newline="") as fh:
        for row in csv.DictReader(fh):
            xs.append(float(row["x"]))
            rhos.append(float(row["rho"]))
            vs.append(float(row["v"]))
    ax_rho.plot(xs, rhos, label=label)
    ax_v.plot(xs, vs, label=label)
ax_rho.set_xlabel("x"); ax_rho.set_ylabel("density"); ax_rho.legend()
ax_v.set_xlabel("x"); ax_v.set_ylabel("velocity"); ax_v.legend()
fig.suptitle({title!r})
fig.tight_layout()
fig.savefig({png_name!r}, dpi=150)
print("wrote", {png_name!r})
'''


def emit_plot_script(csv_files: list[tuple[str, str]], path: "Path | str",
                     title: str = "profiles") -> None:
    """Emit a self-contained matplotlib script reading the given CSVs.

    ``csv_files`` is a list of (file name, legend label) pairs with names
    relative to the script's directory.
    """
    path = Path(path)
    script = _PLOT_TEMPLATE.format(files=list(csv_files), title=title,
                                   png_name=path.stem + ".png",
                                   script_name=path.name)
    path.write_text(script, encoding="utf-8")


def write_run_outputs(result: RunResult, out_dir: "Path | str") -> list[Path]:
    """Write profile CSVs, the step log, a summary, and a plot script."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    csv_files = []
    for t, field in result.snapshots:
        name = f"profile_t{t:g}.csv"
        write_csv(field, result.law, out / name)
        csv_files.append((name, f"t={t:g}"))
        written.append(out / name)
    write_log(result.log, out / "steps.csv")
    written.append(out / "steps.csv")
    write_summary(result, out / "summary.txt")
    written.append(out / "summary.txt")
    cfg = result.config
    emit_plot_script(csv_files, out / "plot_profiles.py",
                     title=f"{cfg.scenario} / {cfg.scheme} / {result.law.kind.value}")
    written.append(out / "plot_profiles.py")
    return written


def compare_report(glimm_log: RunLog, imex_log: RunLog) -> str:
    """Time-step comparison: the factor is min-dt(imex) / min-dt(glimm)."""
    factor = imex_log.min_dt / glimm_log.min_dt if glimm_log.min_dt > 0 else np.nan
    lines = [
        f"{'scheme':<18}{'min_dt':>14}{'steps':>10}{'mass drift':>14}",
        f"{'glimm':<18}{glimm_log.min_dt:>14.6g}{glimm_log.n_steps:>10}"
        f"{glimm_log.mass_drift:>14.3%}",
        f"{'imex':<18}{imex_log.min_dt:>14.6g}{imex_log.n_steps:>10}"
        f"{imex_log.mass_drift:>14.3%}",
        f"factor (imex/glimm) = {factor:.3f}",
    ]
    return "\n".join(lines)
