"""Safeguarded scalar root finding: Newton iteration inside a bisection bracket.

All solvers in this package reduce to monotone scalar equations (offset-law
inversion, rarefaction fans, the implicit density update), so a single
bracketed Newton routine covers them.  Newton gives the usual quadratic
convergence; whenever a step leaves the current bracket the routine falls back
to bisection, which guarantees progress for any continuous increasing f.
"""

from __future__ import annotations

from typing import Callable

from .errors import ConvergenceError


def bracketed_newton(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    x0: float,
    max_iter: int = 100,
    xtol_rel: float = 1e-14,
    what: str = "scalar equation",
) -> float:
    """Solve f(x) = 0 for increasing f with f(lo) <= 0 <= f(hi).

    ``x0`` is the initial guess (clamped into the bracket).  Convergence is on
    the root itself: iteration stops once the update is below ``xtol_rel``
    relative to the iterate, which is tighter than any residual tolerance used
    by callers.  Raises ConvergenceError after ``max_iter`` iterations.
    """
    a, b = lo, hi
    x = min(max(x0, a), b)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0.0:
            return x
        if fx < 0.0:
            a = x
        else:
            b = x
        if b - a <= xtol_rel * max(abs(a), abs(b)):
            return 0.5 * (a + b)
        d = df(x)
        if d > 0.0:
            x_new = x - fx / d
            if not (a < x_new < b):
                x_new = 0.5 * (a + b)
        else:
            x_new = 0.5 * (a + b)
        if abs(x_new - x) <= xtol_rel * max(abs(x_new), 1e-300):
            return x_new
        x = x_new
    raise ConvergenceError(f"{what}: no convergence in {max_iter} iterations "
                           f"(bracket [{a!r}, {b!r}])")
