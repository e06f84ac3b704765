"""Exact Riemann solver for the traffic system with an arbitrary C^2 offset law.

The 2x2 system has a genuinely nonlinear first field (shocks / rarefactions)
and a linearly degenerate second field (contacts moving at v).  Both 1-wave
curves coincide with the level set of the desired velocity w = v + p(rho), so
the intermediate state is

    v* = v_R,        rho* = p^{-1}( v_L - v_R + p(rho_L) ),

and the case structure depends only on how v_R compares with v_L and with
v_L + p(rho_L):

* constant          -- identical data;
* shock + contact   -- 0 <= v_R <= v_L (compression);
* rarefaction + contact          -- v_L < v_R <= v_L + p(rho_L);
* rarefaction + vacuum + contact -- v_L + p(rho_L) < v_R;
* pure rarefaction  -- right state is vacuum;
* pure contact      -- left state is vacuum (also used for the degenerate
  zero-strength 1-wave, where the shock-speed formula is 0/0).

Inside a rarefaction fan the self-similar profile solves

    p(rho) + rho p'(rho) = p(rho_L) + v_L - xi,     v = v_L + p(rho_L) - p(rho),

a strictly monotone scalar equation handled by guarded Newton (this is where
the C^2 regularity of the law matters).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from ._rootfind import bracketed_newton
from .grid import PrimitiveState
from .errors import ParameterError

# Relative threshold below which a 1-wave is collapsed to a contact.
_DEGENERATE_RTOL = 1e-12


class WaveCase(Enum):
    CONSTANT = "constant"
    SHOCK_CONTACT = "shock-contact"
    RAREFACTION_CONTACT = "rarefaction-contact"
    RAREFACTION_VACUUM_CONTACT = "rarefaction-vacuum-contact"
    PURE_RAREFACTION = "pure-rarefaction"
    PURE_CONTACT = "pure-contact"


@dataclass(frozen=True)
class RiemannSolution:
    """Classified wave structure supporting self-similar sampling.

    ``fan_lo``/``fan_hi`` bound the rarefaction fan in xi = x/t where one is
    present; ``contact_speed`` is v_R for cases with a 2-contact.  ``star`` is
    the intermediate state (None for pure cases).
    """

    left: PrimitiveState
    right: PrimitiveState
    case: WaveCase
    law: object
    star: PrimitiveState | None = None
    shock_speed: float | None = None
    fan_lo: float | None = None
    fan_hi: float | None = None
    contact_speed: float | None = None


def _lambda1(rho: float, v: float, law) -> float:
    return v - rho * law.deriv(rho)


def solve(left: PrimitiveState, right: PrimitiveState, law) -> RiemannSolution:
    """Classify and solve the Riemann problem for (left, right) under ``law``."""
    vac = law.rho_vac
    lvac = left.rho < vac
    rvac = right.rho < vac

    if lvac and rvac:
        return RiemannSolution(left, right, WaveCase.CONSTANT, law)
    if lvac:
        # 2-contact only: vacuum, then (rho_R, v_R) moving at v_R
        return RiemannSolution(left, right, WaveCase.PURE_CONTACT, law,
                               contact_speed=right.v)
    if rvac:
        # 1-rarefaction from the left state down to vacuum
        w_l = left.v + law.value(left.rho)
        return RiemannSolution(left, right, WaveCase.PURE_RAREFACTION, law,
                               fan_lo=_lambda1(left.rho, left.v, law),
                               fan_hi=w_l)

    if left.rho == right.rho and left.v == right.v:
        return RiemannSolution(left, right, WaveCase.CONSTANT, law)

    p_l = law.value(left.rho)
    w_l = left.v + p_l

    if right.v <= left.v:
        # compression: 1-shock to (rho*, v_R), then contact
        if left.v - right.v <= _DEGENERATE_RTOL * max(1.0, abs(left.v)):
            return RiemannSolution(left, right, WaveCase.PURE_CONTACT, law,
                                   contact_speed=right.v)
        rho_star = law.invert(left.v - right.v + p_l)
        if abs(rho_star - left.rho) <= _DEGENERATE_RTOL * max(rho_star, left.rho):
            # zero-strength shock: the speed formula is 0/0, fall back to contact
            return RiemannSolution(left, right, WaveCase.PURE_CONTACT, law,
                                   contact_speed=right.v)
        star = PrimitiveState(rho_star, right.v)
        s = (rho_star * right.v - left.rho * left.v) / (rho_star - left.rho)
        return RiemannSolution(left, right, WaveCase.SHOCK_CONTACT, law,
                               star=star, shock_speed=s, contact_speed=right.v)

    if right.v <= w_l:
        # expansion without vacuum: fan down to (rho*, v_R), then contact
        rho_star = law.invert(w_l - right.v)
        star = PrimitiveState(rho_star, right.v)
        return RiemannSolution(left, right, WaveCase.RAREFACTION_CONTACT, law,
                               star=star,
                               fan_lo=_lambda1(left.rho, left.v, law),
                               fan_hi=_lambda1(rho_star, right.v, law),
                               contact_speed=right.v)

    # expansion strong enough to open a vacuum region on (w_l, v_R)
    return RiemannSolution(left, right, WaveCase.RAREFACTION_VACUUM_CONTACT, law,
                           star=PrimitiveState(0.0, w_l),
                           fan_lo=_lambda1(left.rho, left.v, law),
                           fan_hi=w_l,
                           contact_speed=right.v)


def _fan_state(sol: RiemannSolution, xi: float) -> PrimitiveState:
    """State inside the 1-rarefaction fan at similarity coordinate xi."""
    law = sol.law
    left = sol.left
    p_l = law.value(left.rho)
    target = p_l + left.v - xi  # = p(rho) + rho p'(rho) along the fan

    rho_end = sol.star.rho if sol.star is not None else 0.0
    # f is strictly increasing in rho (f' = 2 p' + rho p'' > 0 for rho > 0)
    def f(r: float) -> float:
        return law.value(r) + r * law.deriv(r) - target

    def df(r: float) -> float:
        return 2.0 * law.deriv(r) + r * law.deriv2(r)

    lo, hi = rho_end, left.rho
    span = sol.fan_hi - sol.fan_lo
    frac = (xi - sol.fan_lo) / span if span > 0.0 else 0.0
    x0 = left.rho + (rho_end - left.rho) * min(max(frac, 0.0), 1.0)
    rho = bracketed_newton(f, df, lo, hi, x0, what="rarefaction fan")
    return PrimitiveState(rho, left.v + p_l - law.value(rho))


def sample(sol: RiemannSolution, xi: float) -> PrimitiveState:
    """Evaluate the self-similar solution at xi = x/t.

    Sampling exactly at a shock or contact speed returns the right-limit
    state.  Inside vacuum regions the returned density is zero and the
    velocity slot carries the transport speed xi for diagnostics only.
    """
    case = sol.case
    if case is WaveCase.CONSTANT:
        return sol.left
    if case is WaveCase.PURE_CONTACT:
        return sol.left if xi < sol.contact_speed else sol.right
    if case is WaveCase.SHOCK_CONTACT:
        if xi < sol.shock_speed:
            return sol.left
        if xi < sol.contact_speed:
            return sol.star
        return sol.right
    # the remaining cases share the fan structure
    if xi < sol.fan_lo:
        return sol.left
    if case is WaveCase.RAREFACTION_CONTACT:
        if xi <= sol.fan_hi:
            return _fan_state(sol, xi)
        if xi < sol.contact_speed:
            return sol.star
        return sol.right
    if case is WaveCase.PURE_RAREFACTION:
        if xi <= sol.fan_hi:
            return _fan_state(sol, xi)
        return PrimitiveState(0.0, xi)
    # rarefaction-vacuum-contact
    if xi <= sol.fan_hi:
        return _fan_state(sol, xi)
    if xi < sol.contact_speed:
        return PrimitiveState(0.0, xi)
    return sol.right


def max_wave_speed(sol: RiemannSolution) -> float:
    """Largest |lambda| over the states appearing in the solution.

    Includes the shock speed for shock cases; vacuum regions contribute zero.
    """
    law = sol.law
    vac = law.rho_vac
    speeds = []
    for st in (sol.left, sol.right, sol.star):
        if st is None or st.rho < vac:
            continue
        speeds.append(abs(_lambda1(st.rho, st.v, law)))
        speeds.append(abs(st.v))
    if sol.fan_lo is not None:
        speeds.append(abs(sol.fan_lo))
        speeds.append(abs(sol.fan_hi))
    if sol.shock_speed is not None:
        speeds.append(abs(sol.shock_speed))
    if sol.contact_speed is not None:
        speeds.append(abs(sol.contact_speed))
    return max(speeds) if speeds else 0.0
