"""Two-step splitting scheme: explicit Glimm transport, implicit stiff relaxation.

Step 1 advances the system with the bounded-speed offset part p_exp by the
Glimm scheme (same structure as the full system, so the same solver applies).
Step 2 handles the stiff remainder

    d_t rho - d_x (rho p_imp(rho)) = 0,
    d_t y   - d_x (y   p_imp(rho)) = 0,

whose equations decouple: the density obeys a scalar conservation law with
flux Phi(rho) = -rho p_imp(rho), discretized implicitly with the
Engquist-Osher flux (Phi' <= 0, so the numerical flux reduces to
Phi(rho_{j+1}) and the update is a triangular chain of scalar equations,
swept right to left); y then obeys a linear transport at speed -p_imp(rho),
discretized with the implicit upwind scheme, a bidiagonal system solved by
backward substitution.

Both stages act on the full-law conserved pair (rho, y), y = rho (v + p(rho)).
Splitting only the flux means Step 1 is again a traffic system with law p_exp,
but in the effective velocity y/rho - p_exp(rho) = v + p_imp(rho); its first
Riemann invariant is then the physical desired velocity w = v + p(rho), so the
sampling stage keeps w inside its initial bounds.  That maximum principle is
what caps the jam density for stiff laws: handing off the physical v instead
(and giving Step 1 its own conserved variable rho (v + p_exp)) loses control
of w and blows up on congested data.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from ._rootfind import bracketed_newton
from .errors import ConvergenceError
from .glimm import CflConfig, dt_from_speeds, glimm_step, glimm_update, \
    max_signal_speed
from .grid import SolutionField, field_to_primitive, primitive_to_field
from .pressure import SplitLaw


@dataclass(frozen=True)
class ImexConfig:
    newton_tol: float = 1e-12
    newton_max_iter: int = 100
    cfl: CflConfig = dc_field(default_factory=CflConfig)


def explicit_step(field: SolutionField, split: SplitLaw, dt: float,
                  a: float) -> SolutionField:
    """Glimm step for the p_exp sub-system.

    ``field`` carries the full-law conserved variables; the (rho, y) <->
    (rho, velocity) conversions inside the step use p_exp, which is exactly
    what realizes the flux splitting.
    """
    return glimm_step(field, split.explicit, dt, a)


def implicit_density_step(rho_half: np.ndarray, rho_ghost_right: float,
                          split: SplitLaw, dt: float, dx: float,
                          cfg: ImexConfig | None = None) -> np.ndarray:
    """Implicit Engquist-Osher sweep for the stiff density equation.

    Solves, right to left (the result for cell j needs cell j+1),

        rho_j - r Phi(rho_j) = rho_half_j - r Phi(rho_{j+1}^{new}),   r = dt/dx,

    with Phi(rho) = -rho p_imp(rho).  The map rho -> rho - r Phi(rho) is
    strictly increasing (Phi' <= 0), so each scalar equation has a unique
    root; it lies in [rho_num, rhs] when the right-hand side exceeds rho_num
    and *is* the right-hand side otherwise (p_imp vanishes there), which makes
    sub-threshold stretches exact identity at no cost.
    """
    if cfg is None:
        cfg = ImexConfig()
    imp = split.implicit
    r = dt / dx
    rho_num = split.rho_num
    rho_sup = split.full.rho_sup
    out = np.empty_like(rho_half)

    phi_right = -rho_ghost_right * imp.value(rho_ghost_right)
    for j in range(len(rho_half) - 1, -1, -1):
        rhs = rho_half[j] - r * phi_right
        if rhs <= rho_num:
            out[j] = rhs
            phi_right = 0.0
            continue

        def h(rho: float) -> float:
            return rho + r * rho * imp.value(rho) - rhs

        def dh(rho: float) -> float:
            return 1.0 + r * (imp.value(rho) + rho * imp.deriv(rho))

        if rhs < rho_sup:
            hi = rhs  # h(rhs) >= 0 since the map dominates the identity
        else:
            # singular law: h -> inf at rho_star, walk the bracket toward it
            hi = rho_num + (rho_sup - rho_num) * 0.5
            for _ in range(200):
                if h(hi) >= 0.0:
                    break
                hi = rho_sup - (rho_sup - hi) * 0.5
            else:
                raise ConvergenceError(
                    f"implicit density step: no bracket in cell {j}")
        x0 = min(max(rho_half[j], rho_num), hi)
        try:
            root = bracketed_newton(h, dh, rho_num, hi, x0,
                                    max_iter=cfg.newton_max_iter,
                                    what="implicit density step")
        except ConvergenceError as err:
            raise ConvergenceError(f"cell {j}: {err}") from err
        out[j] = root
        phi_right = -root * imp.value(root)
    return out


def implicit_y_step(y_half: np.ndarray, rho_new: np.ndarray,
                    rho_ghost_right: float, y_ghost_right: float,
                    split: SplitLaw, dt: float, dx: float) -> np.ndarray:
    """Implicit upwind update of y by backward substitution.

        y_j = (y_half_j + r p_imp(rho_{j+1}) y_{j+1}) / (1 + r p_imp(rho_j))

    swept right to left; the denominator is >= 1, so no pivoting issues.
    Cells whose own and right-neighbour coefficients vanish are untouched.
    """
    r = dt / dx
    c = r * split.implicit_value(np.append(rho_new, rho_ghost_right))
    out = y_half.copy()
    active = np.nonzero((c[:-1] > 0.0) | (c[1:] > 0.0))[0]
    y_right = y_ghost_right
    prev = len(y_half)  # index of the cell whose value y_right currently holds
    for j in active[::-1]:
        if j + 1 != prev:
            # gap: the right neighbour was untouched, so c[j+1] is zero and
            # its value does not enter; reset for clarity anyway
            y_right = y_half[j + 1] if j + 1 < len(y_half) else y_ghost_right
        out[j] = (y_half[j] + c[j + 1] * y_right) / (1.0 + c[j])
        y_right = out[j]
        prev = j
    return out


@dataclass
class ImexStepResult:
    field: SolutionField        # advanced field, full-law conserved variables
    dt: float                   # step actually taken
    explicit_rho: np.ndarray    # intermediate state after the Glimm stage:
    explicit_vel: np.ndarray    # density and stage velocity v + p_imp(rho),
    #                             ghosts included


def imex_dt(field: SolutionField, split: SplitLaw, cfg: ImexConfig) -> float:
    """Stability step for the explicit stage (p_exp eigenvalues)."""
    rho, vel = field_to_primitive(field, split.explicit)
    s = max_signal_speed(rho, vel, split.explicit)
    return dt_from_speeds(s, field.grid.dx, cfg.cfl)


def imex_step(field: SolutionField, split: SplitLaw, cfg: ImexConfig, a: float,
              dt: float | None = None) -> ImexStepResult:
    """One full splitting step; dt defaults to the p_exp CFL bound."""
    pexp = split.explicit
    grid = field.grid

    # stage velocity: y/rho - p_exp(rho) = v + p_imp(rho)
    rho, vel = field_to_primitive(field, pexp)
    if dt is None:
        dt = dt_from_speeds(max_signal_speed(rho, vel, pexp), grid.dx, cfg.cfl)

    rho_h, vel_h, _ = glimm_update(grid, rho, vel, pexp, dt, a)

    # back to the conserved variable (still the full-law y)
    vac = rho_h < pexp.rho_vac
    y_h = np.where(vac, 0.0,
                   rho_h * (vel_h + pexp.value(np.where(vac, 0.0, rho_h))))

    rho_new = implicit_density_step(rho_h[1:-1], float(rho_h[-1]), split,
                                    dt, grid.dx, cfg)
    y_new = implicit_y_step(y_h[1:-1], rho_new, float(rho_h[-1]),
                            float(y_h[-1]), split, dt, grid.dx)

    out_rho = field.rho.copy()
    out_y = field.y.copy()
    out_rho[1:-1] = rho_new
    out_y[1:-1] = y_new
    out = SolutionField(grid, out_rho, out_y, field.time + dt)
    return ImexStepResult(out, dt, rho_h, vel_h)
