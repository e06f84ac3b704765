"""Benchmark scenarios: initial data, stiffness defaults, reference solutions.

All six cases live on [0, 1] with piecewise-constant data (jumps are placed on
cell interfaces, so evaluating at cell centers gives exact cell averages):

=============  ======================================  =====  =================
name           initial (rho | v)                       T      reference
=============  ======================================  =====  =================
transport      rho 0.4|0.95 at 0.5, v = 1              0.4    jump moved to 0.9
decongestion   rho = 0.95, v 1|2 at 0.5                0.2    vacuum on [0.7,0.9)
congestion     rho = 0.95, v 2|1 at 0.5                0.01   plateau rho = 1 on
                                                              [0.5-18t, 0.5+t]
two_blocks     (0.95, 2) on [0.2,0.3],                 0.3    merged jam, printed
               (0.9, 1) on [0.35,0.5], vacuum else            at T = 0.3 only
AI             rho 0.7|0.5, v 0.5|0.1 at 0.5           0.6    jam on
                                                              [0.5-(25/30)t, 0.5+0.1t]
AIII           rho 0.7|0.5, v 0.1|0.5 at 0.5           0.8    vacuum gap
                                                              [0.5+0.1t, 0.5+0.5t]
=============  ======================================  =====  =================

The references are solutions of the constrained limit model (they need not be
unique for the congestion-type data); runs at finite stiffness approach them
as eps -> 0 or gamma -> inf.  Velocity is NaN inside vacuum regions, where it
has no meaning, and is excluded from error metrics.

Per-law stiffness defaults follow the benchmark set: gamma = 2, eps = 1e-3 for
the singular laws and gamma = 4 for the power law, except AI/AIII which use
gamma = 1, eps = 1e-3 and gamma = 64.  The power law's truncation density is
pinned at rho_star (1 - 1e-2) in all benchmark runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import UnknownScenario
from .grid import Grid1D, SolutionField, make_field
from .pressure import LawKind, PressureLaw, default_rho_num

InitFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
ExactFn = Callable[[float, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class Scenario:
    name: str
    t_final: float
    initial: InitFn
    exact: ExactFn | None
    law_params: Mapping[LawKind, dict]
    vo3_rho_num: float | None = None  # benchmark override for the power law
    x_min: float = 0.0
    x_max: float = 1.0

    def default_law(self, kind: "LawKind | str", **overrides) -> PressureLaw:
        """Law with this scenario's stiffness defaults, plus explicit overrides."""
        kind = LawKind(kind.lower()) if isinstance(kind, str) else kind
        params = dict(self.law_params[kind])
        params.update({k: v for k, v in overrides.items() if v is not None})
        return PressureLaw(kind, **params)

    def default_rho_num(self, law: PressureLaw, prefactor: float = 0.2) -> float:
        if law.kind is LawKind.VO3 and self.vo3_rho_num is not None:
            return self.vo3_rho_num * law.rho_star
        return default_rho_num(law, prefactor=prefactor)


def _step_fn(x: np.ndarray, edge: float, lo: float, hi: float) -> np.ndarray:
    return np.where(x < edge, lo, hi)


# -- initial data -----------------------------------------------------------

def _init_transport(x):
    return _step_fn(x, 0.5, 0.4, 0.95), np.ones_like(x)


def _init_decongestion(x):
    return np.full_like(x, 0.95), _step_fn(x, 0.5, 1.0, 2.0)


def _init_congestion(x):
    return np.full_like(x, 0.95), _step_fn(x, 0.5, 2.0, 1.0)


def _init_two_blocks(x):
    fast = (x >= 0.2) & (x <= 0.3)
    slow = (x >= 0.35) & (x <= 0.5)
    rho = np.where(fast, 0.95, np.where(slow, 0.9, 0.0))
    v = np.where(fast, 2.0, np.where(slow, 1.0, 0.0))
    return rho, v


def _init_ai(x):
    return _step_fn(x, 0.5, 0.7, 0.5), _step_fn(x, 0.5, 0.5, 0.1)


def _init_aiii(x):
    return _step_fn(x, 0.5, 0.7, 0.5), _step_fn(x, 0.5, 0.1, 0.5)


# -- reference solutions ----------------------------------------------------

def _exact_transport(t, x):
    return _step_fn(x, 0.5 + t, 0.4, 0.95), np.ones_like(x)


def _exact_decongestion(t, x):
    a, b = 0.5 + t, 0.5 + 2.0 * t
    gap = (x >= a) & (x < b)
    rho = np.where(gap, 0.0, 0.95)
    v = np.where(x < a, 1.0, np.where(gap, np.nan, 2.0))
    return rho, v


def _exact_congestion(t, x):
    a, b = 0.5 - 18.0 * t, 0.5 + t
    jam = (x >= a) & (x <= b)
    rho = np.where(jam, 1.0, 0.95)
    v = np.where(x < a, 2.0, 1.0)
    return rho, v


def _exact_two_blocks(t, x):
    if abs(t - 0.3) > 1e-9:
        raise ValueError("the merged-jam reference is printed at t = 0.3 only")
    jam = (x >= 0.555) & (x <= 0.65)
    tail = (x > 0.65) & (x <= 0.8)
    rho = np.where(jam, 1.0, np.where(tail, 0.9, 0.0))
    v = np.where(jam | tail, 1.0, np.nan)
    return rho, v


def _exact_ai(t, x):
    a, b = 0.5 - (25.0 / 30.0) * t, 0.5 + 0.1 * t
    jam = (x >= a) & (x <= b)
    rho = np.where(jam, 1.0, _step_fn(x, 0.5, 0.7, 0.5))
    v = np.where(x < a, 0.5, 0.1)
    return rho, v


def _exact_aiii(t, x):
    a, b = 0.5 + 0.1 * t, 0.5 + 0.5 * t
    gap = (x >= a) & (x < b)
    rho = np.where(gap, 0.0, _step_fn(x, 0.5 + 0.3 * t, 0.7, 0.5))
    v = np.where(x < a, 0.1, np.where(gap, np.nan, 0.5))
    return rho, v


_STANDARD_PARAMS: dict[LawKind, dict] = {
    LawKind.VO1: {"epsilon": 1e-3, "gamma": 2.0},
    LawKind.VO2: {"epsilon": 1e-3, "gamma": 2.0},
    LawKind.VO3: {"gamma": 4.0},
}
_RIEMANN_PARAMS: dict[LawKind, dict] = {
    LawKind.VO1: {"epsilon": 1e-3, "gamma": 1.0},
    LawKind.VO2: {"epsilon": 1e-3, "gamma": 1.0},
    LawKind.VO3: {"gamma": 64.0},
}

_SCENARIOS: dict[str, Scenario] = {
    "transport": Scenario("transport", 0.4, _init_transport, _exact_transport,
                          _STANDARD_PARAMS, vo3_rho_num=0.99),
    "decongestion": Scenario("decongestion", 0.2, _init_decongestion,
                             _exact_decongestion, _STANDARD_PARAMS,
                             vo3_rho_num=0.99),
    "congestion": Scenario("congestion", 0.01, _init_congestion,
                           _exact_congestion, _STANDARD_PARAMS,
                           vo3_rho_num=0.99),
    "two_blocks": Scenario("two_blocks", 0.3, _init_two_blocks,
                           _exact_two_blocks, _STANDARD_PARAMS,
                           vo3_rho_num=0.99),
    "AI": Scenario("AI", 0.6, _init_ai, _exact_ai, _RIEMANN_PARAMS,
                   vo3_rho_num=0.99),
    "AIII": Scenario("AIII", 0.8, _init_aiii, _exact_aiii, _RIEMANN_PARAMS,
                     vo3_rho_num=0.99),
}


def names() -> list[str]:
    return list(_SCENARIOS)


def build(name: str) -> Scenario:
    try:
        return _SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(
            f"unknown scenario {name!r}; choose from {', '.join(_SCENARIOS)}") from None


def initial_field(scenario: Scenario, grid: Grid1D, law) -> SolutionField:
    rho, v = scenario.initial(grid.cell_centers())
    return make_field(grid, np.asarray(rho, float), np.asarray(v, float), law)


def error_l1(numeric: SolutionField, exact: ExactFn, t: float) -> float:
    """L1 density error against the reference, sum |rho_j - rho_ref(t, x_j)| dx.

    Density only: velocity is undefined in vacuum regions.
    """
    x = numeric.grid.cell_centers()
    rho_ref, _ = exact(t, x)
    return float(np.sum(np.abs(numeric.rho[1:-1] - rho_ref))) * numeric.grid.dx
