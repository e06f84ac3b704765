"""Glimm random-choice scheme: quasi-random sampling of exact Riemann solutions.

Instead of averaging, the update picks for every cell a single state sampled
from the exact solution of an interface Riemann problem, at the quasi-random
in-cell position a_n supplied by the Van der Corput sequence.  There is no
projection step, so the non-convex invariant regions of the system are
preserved by construction; the price is that the scheme is non-conservative.

Under the half CFL condition the sample point x_{j-1/2} + a_n dx lies in the
domain of the left interface's Riemann fan when a_n < 1/2 and of the right
interface's when a_n >= 1/2, which fixes the bookkeeping used here.  A single
a_n is shared by all cells within a step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, TimestepUnderflow
from .grid import (Grid1D, PrimitiveState, SolutionField, field_to_primitive,
                   primitive_to_field)
from .riemann import sample, solve


def van_der_corput(n: int) -> float:
    """n-th element of the base-2 Van der Corput sequence (bit reversal)."""
    if n < 0:
        raise ParameterError("sequence index must be nonnegative")
    a = 0.0
    scale = 0.5
    while n:
        if n & 1:
            a += scale
        n >>= 1
        scale *= 0.5
    return a


@dataclass(frozen=True)
class CflConfig:
    """Time-step control.  The stability bound carries the factor 1/2."""

    number: float = 0.5
    dt_min: float = 1e-13
    dt_max: float | None = None  # None: capped at dx (lets static fields advance)

    def __post_init__(self) -> None:
        if not 0.0 < self.number <= 0.5:
            raise ParameterError("cfl number must lie in (0, 1/2]")
        if self.dt_min <= 0.0:
            raise ParameterError("dt_min must be positive")


def max_signal_speed(rho: np.ndarray, v: np.ndarray, law) -> float:
    """max(|v - rho p'(rho)|, |v|) over the given cell states."""
    lam1 = v - rho * law.deriv(rho)
    return float(max(np.max(np.abs(lam1)), np.max(np.abs(v))))


def dt_from_speeds(s: float, dx: float, cfg: CflConfig) -> float:
    cap = cfg.dt_max if cfg.dt_max is not None else dx
    dt = cfg.number * dx / s if s > 0.0 else cap
    dt = min(dt, cap)
    if dt < cfg.dt_min:
        raise TimestepUnderflow(f"dt = {dt!r} fell below the floor {cfg.dt_min!r}")
    return dt


def cfl_dt(field: SolutionField, law, cfg: CflConfig) -> float:
    """Stable time step for the field under ``law``'s eigenvalues.

    For the splitting scheme this is called with the explicit offset part,
    which is what keeps dt independent of the stiffness parameter.
    """
    rho, v = field_to_primitive(field, law)
    return dt_from_speeds(max_signal_speed(rho, v, law), field.grid.dx, cfg)


def interface_solutions(rho: np.ndarray, v: np.ndarray, law):
    """Solve the Riemann problems at all interfaces with distinct neighbours.

    Returns (interface indices, solutions); interface k separates array cells
    k and k+1.  Interfaces with equal neighbours have a constant solution and
    are skipped.
    """
    jumps = np.nonzero((rho[:-1] != rho[1:]) | (v[:-1] != v[1:]))[0]
    sols = [solve(PrimitiveState(rho[k], v[k]),
                  PrimitiveState(rho[k + 1], v[k + 1]), law) for k in jumps]
    return jumps, sols


def glimm_update(grid: Grid1D, rho: np.ndarray, v: np.ndarray, law, dt: float,
                 a: float, interfaces=None):
    """Core update on primitive arrays (ghosts included, left untouched).

    Only interfaces whose two states differ are solved; for equal neighbours
    the sampled value is the state itself, so those cells carry over
    unchanged (this is exact, not an approximation).  ``interfaces`` may pass
    precomputed :func:`interface_solutions` output for reuse.  Returns the new
    arrays plus the indices of the cells that were resampled, which lets
    callers maintain per-cell caches incrementally.
    """
    if dt <= 0.0:
        raise ParameterError("dt must be positive")
    new_rho = rho.copy()
    new_v = v.copy()
    jumps, sols = interfaces if interfaces is not None else \
        interface_solutions(rho, v, law)
    n = grid.n_cells
    dx = grid.dx
    if a < 0.5:
        xi = a * dx / dt
        # cell j samples the Riemann problem at its left interface (j-1 | j),
        # i.e. interface index j-1; the right-ghost interface is not used
        pick = jumps <= n - 1
        cells = jumps[pick] + 1
    else:
        xi = (a - 1.0) * dx / dt
        # cell j samples its right interface (j | j+1), interface index j
        pick = jumps >= 1
        cells = jumps[pick]
    vac = law.rho_vac
    for j, sol in zip(cells, (s for s, keep in zip(sols, pick) if keep)):
        st = sample(sol, xi)
        if st.rho < vac:
            new_rho[j], new_v[j] = 0.0, 0.0
        else:
            new_rho[j], new_v[j] = st.rho, st.v
    return new_rho, new_v, cells


def glimm_step(field: SolutionField, law, dt: float, a: float) -> SolutionField:
    """Advance one Glimm step with sample point a in [0, 1)."""
    rho, v = field_to_primitive(field, law)
    new_rho, new_v, _ = glimm_update(field.grid, rho, v, law, dt, a)
    out = primitive_to_field(field.grid, new_rho, new_v, law, field.time + dt)
    # ghosts are frozen: keep their conserved values bit-exact
    out.rho[0], out.y[0] = field.rho[0], field.y[0]
    out.rho[-1], out.y[-1] = field.rho[-1], field.y[-1]
    return out
