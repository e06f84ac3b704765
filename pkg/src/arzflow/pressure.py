"""Velocity-offset laws and their explicit/implicit splitting.

The offset p(rho) is the gap between the drivers' desired velocity w = v + p
and the actual velocity v; it stiffens as the density approaches the maximal
density rho_star so that congestion is enforced asymptotically.  Three laws
are provided:

* ``vo1`` -- singular law  p(rho) = eps * (rho_star*rho / (rho_star-rho))**gamma,
  defined on [0, rho_star) only; blows up at rho_star.
* ``vo2`` -- same law up to a transition density rho_tr = rho_star - eps,
  extended beyond by its second-order Taylor polynomial so that p is defined
  (and C^2) on [0, inf).
* ``vo3`` -- power law  p(rho) = v_ref * (rho/rho_star)**gamma with a large
  exponent; defined on [0, inf).

``SplitLaw`` decomposes any of them as p = p_exp + p_imp around a truncation
density rho_num: p_exp follows p up to rho_num and continues as the Taylor
quadratic (so its characteristic speeds stay O(1) as eps -> 0 or
gamma -> inf), and p_imp = p - p_exp carries the stiff remainder that the
time-splitting scheme treats implicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._rootfind import bracketed_newton
from .errors import ConvergenceError, DomainError, ParameterError

# Densities below this fraction of rho_star are treated as vacuum throughout
# the package (v undefined, y = 0).
VACUUM_FRACTION = 1e-12


class LawKind(str, Enum):
    VO1 = "vo1"
    VO2 = "vo2"
    VO3 = "vo3"


def _as_kind(kind: "LawKind | str") -> LawKind:
    return LawKind(kind.lower()) if isinstance(kind, str) else kind


@dataclass(frozen=True)
class PressureLaw:
    """One member of the velocity-offset family, immutable after construction.

    ``epsilon``/``gamma`` parameterise the singular laws (vo1, vo2);
    ``gamma``/``v_ref`` the power law (vo3).  For vo2 the transition density
    and the matching polynomial coefficients c0, c1, c2 are precomputed here.
    """

    kind: LawKind
    epsilon: float = 1e-3
    gamma: float = 2.0
    rho_star: float = 1.0
    v_ref: float = 1.0
    rho_tr: float = field(init=False, default=math.inf)
    c0: float = field(init=False, default=0.0)
    c1: float = field(init=False, default=0.0)
    c2: float = field(init=False, default=0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", _as_kind(self.kind))
        if self.rho_star <= 0.0:
            raise ParameterError("rho_star must be positive")
        if self.gamma < 1.0:
            raise ParameterError("gamma must be >= 1")
        if self.kind in (LawKind.VO1, LawKind.VO2) and self.epsilon <= 0.0:
            raise ParameterError("epsilon must be positive for the singular laws")
        if self.kind is LawKind.VO3 and self.v_ref <= 0.0:
            raise ParameterError("v_ref must be positive for the power law")
        if self.kind is LawKind.VO2:
            # Transition at rho_star - h(eps) with h(eps) = eps, fixed.
            if self.epsilon >= self.rho_star:
                raise ParameterError("epsilon must be below rho_star for vo2")
            rho_tr = self.rho_star - self.epsilon
            object.__setattr__(self, "rho_tr", rho_tr)
            object.__setattr__(self, "c0", self._sing_value(rho_tr))
            object.__setattr__(self, "c1", self._sing_deriv(rho_tr))
            object.__setattr__(self, "c2", self._sing_deriv2(rho_tr))

    # -- constructors -------------------------------------------------------

    @classmethod
    def vo1(cls, epsilon: float = 1e-3, gamma: float = 2.0,
            rho_star: float = 1.0) -> "PressureLaw":
        return cls(LawKind.VO1, epsilon=epsilon, gamma=gamma, rho_star=rho_star)

    @classmethod
    def vo2(cls, epsilon: float = 1e-3, gamma: float = 2.0,
            rho_star: float = 1.0) -> "PressureLaw":
        return cls(LawKind.VO2, epsilon=epsilon, gamma=gamma, rho_star=rho_star)

    @classmethod
    def vo3(cls, gamma: float = 4.0, rho_star: float = 1.0,
            v_ref: float = 1.0) -> "PressureLaw":
        return cls(LawKind.VO3, gamma=gamma, rho_star=rho_star, v_ref=v_ref)

    # -- domain -------------------------------------------------------------

    @property
    def rho_sup(self) -> float:
        """Upper end of the validity domain (rho_star for vo1, inf otherwise)."""
        return self.rho_star if self.kind is LawKind.VO1 else math.inf

    @property
    def rho_vac(self) -> float:
        return VACUUM_FRACTION * self.rho_star

    def _check_domain(self, rho) -> None:
        if np.ndim(rho) == 0:
            if rho < 0.0:
                raise DomainError(f"negative density {rho!r}")
            if self.kind is LawKind.VO1 and rho >= self.rho_star:
                raise DomainError(
                    f"density {rho!r} >= rho_star={self.rho_star!r} is outside "
                    "the singular law's domain (inadmissible state)")
        else:
            if np.any(rho < 0.0):
                raise DomainError("negative density in array input")
            if self.kind is LawKind.VO1 and np.any(rho >= self.rho_star):
                raise DomainError(
                    f"density >= rho_star={self.rho_star!r} in array input "
                    "(inadmissible state for the singular law)")

    # -- singular-branch formulas (shared by vo1 and vo2 below rho_tr) ------

    def _sing_value(self, rho):
        g = self.rho_star * rho / (self.rho_star - rho)
        return self.epsilon * g ** self.gamma

    def _sing_deriv(self, rho):
        s = self.rho_star - rho
        g = self.rho_star * rho / s
        gp = (self.rho_star / s) ** 2
        return self.epsilon * self.gamma * g ** (self.gamma - 1.0) * gp

    def _sing_deriv2(self, rho):
        s = self.rho_star - rho
        g = self.rho_star * rho / s
        gp = (self.rho_star / s) ** 2
        gpp = 2.0 * self.rho_star ** 2 / s ** 3
        if self.gamma == 1.0:
            return self.epsilon * gpp
        t1 = (self.gamma - 1.0) * g ** (self.gamma - 2.0) * gp * gp
        return self.epsilon * self.gamma * (t1 + g ** (self.gamma - 1.0) * gpp)

    # -- evaluation ---------------------------------------------------------

    def value(self, rho):
        """Offset p(rho); accepts scalars or numpy arrays."""
        self._check_domain(rho)
        if self.kind is LawKind.VO1:
            return self._sing_value(rho)
        if self.kind is LawKind.VO3:
            return self.v_ref * (rho / self.rho_star) ** self.gamma
        # vo2: singular branch up to rho_tr, matched quadratic beyond
        if np.ndim(rho) == 0:
            if rho <= self.rho_tr:
                return self._sing_value(rho)
            d = rho - self.rho_tr
            return self.c0 + self.c1 * d + 0.5 * self.c2 * d * d
        low = np.minimum(rho, self.rho_tr)
        d = np.maximum(rho - self.rho_tr, 0.0)
        return np.where(rho <= self.rho_tr,
                        self._sing_value(low),
                        self.c0 + self.c1 * d + 0.5 * self.c2 * d * d)

    def deriv(self, rho):
        """dp/drho."""
        self._check_domain(rho)
        if self.kind is LawKind.VO1:
            return self._sing_deriv(rho)
        if self.kind is LawKind.VO3:
            return (self.v_ref * self.gamma / self.rho_star) \
                * (rho / self.rho_star) ** (self.gamma - 1.0)
        if np.ndim(rho) == 0:
            if rho <= self.rho_tr:
                return self._sing_deriv(rho)
            return self.c1 + self.c2 * (rho - self.rho_tr)
        low = np.minimum(rho, self.rho_tr)
        d = np.maximum(rho - self.rho_tr, 0.0)
        return np.where(rho <= self.rho_tr,
                        self._sing_deriv(low),
                        self.c1 + self.c2 * d)

    def deriv2(self, rho):
        """d2p/drho2."""
        self._check_domain(rho)
        if self.kind is LawKind.VO1:
            return self._sing_deriv2(rho)
        if self.kind is LawKind.VO3:
            if self.gamma == 1.0:
                return np.zeros_like(rho) if np.ndim(rho) else 0.0
            return (self.v_ref * self.gamma * (self.gamma - 1.0)
                    / self.rho_star ** 2) * (rho / self.rho_star) ** (self.gamma - 2.0)
        if np.ndim(rho) == 0:
            return self._sing_deriv2(rho) if rho <= self.rho_tr else self.c2
        low = np.minimum(rho, self.rho_tr)
        return np.where(rho <= self.rho_tr, self._sing_deriv2(low), self.c2)

    # -- inversion ----------------------------------------------------------

    def _invert_guess(self, w: float) -> float:
        """Closed-form estimate of p^{-1}(w), used to seed the Newton solve."""
        if self.kind is LawKind.VO3:
            return self.rho_star * (w / self.v_ref) ** (1.0 / self.gamma)
        if self.kind is LawKind.VO2 and w > self.c0:
            # quadratic branch: c0 + c1 d + c2 d^2/2 = w, positive root
            disc = self.c1 * self.c1 + 2.0 * self.c2 * (w - self.c0)
            return self.rho_tr + (math.sqrt(disc) - self.c1) / self.c2
        g = (w / self.epsilon) ** (1.0 / self.gamma)
        return g * self.rho_star / (self.rho_star + g)

    def invert(self, w: float, max_iter: int = 100) -> float:
        """Solve p(rho) = w for rho >= 0 (bisection bracket refined by Newton).

        Newton alone can overshoot the vo1 singularity, so the iteration is
        kept inside a verified bracket.  Converges the root essentially to
        machine precision; raises ConvergenceError on budget exhaustion.
        """
        if w < 0.0:
            raise DomainError(f"offset value must be nonnegative, got {w!r}")
        if w == 0.0:
            return 0.0
        if self.kind is LawKind.VO1:
            # bracket [0, hi] with hi < rho_star and p(hi) >= w
            hi = self.rho_star * (1.0 - 2.0 ** -6)
            for _ in range(200):
                if self._sing_value(hi) >= w:
                    break
                hi = self.rho_star - (self.rho_star - hi) * 0.5
            else:
                raise ConvergenceError(f"could not bracket p^-1({w!r})")
        else:
            hi = self.rho_star
            for _ in range(200):
                if self.value(hi) >= w:
                    break
                hi *= 2.0
            else:
                raise ConvergenceError(f"could not bracket p^-1({w!r})")
        x0 = min(max(self._invert_guess(w), 0.0), hi)
        return bracketed_newton(
            lambda r: self.value(r) - w, self.deriv, 0.0, hi, x0,
            max_iter=max_iter, what=f"invert {self.kind.value}")


def default_rho_num(law: PressureLaw, prefactor: float = 0.2,
                    alpha: float = 0.5) -> float:
    """Truncation density making the explicit-part speeds O(1) in the stiff limit.

    Singular laws: rho_star * (1 - prefactor * eps**(1/(gamma+1))); the scaling
    analysis gives the exponent and the benchmark runs use prefactor 1/5.
    Power law: rho_star * (1 - gamma**(-alpha)) for any alpha in (0, 1);
    alpha = 1/2 is the midpoint default.  The benchmark runs instead fix
    rho_num = rho_star * (1 - 1e-2) for the power law; that override lives in
    the scenario defaults.
    """
    if law.kind is LawKind.VO3:
        if not 0.0 < alpha < 1.0:
            raise ParameterError("alpha must lie in (0, 1)")
        return law.rho_star * (1.0 - law.gamma ** -alpha)
    return law.rho_star * (1.0 - prefactor * law.epsilon ** (1.0 / (law.gamma + 1.0)))


@dataclass(frozen=True)
class SplitLaw:
    """Decomposition p = p_exp + p_imp around the truncation density rho_num.

    p_exp(rho) equals p(rho) up to rho_num and continues as the second-order
    Taylor polynomial of p at rho_num (a C^2 junction); p_imp is the exact
    difference, literal zero at and below rho_num.
    """

    full: PressureLaw
    rho_num: float
    p0: float = field(init=False, default=0.0)  # p(rho_num)
    p1: float = field(init=False, default=0.0)  # p'(rho_num)
    p2: float = field(init=False, default=0.0)  # p''(rho_num)

    def __post_init__(self) -> None:
        if not 0.0 < self.rho_num < self.full.rho_star:
            raise ParameterError(
                f"rho_num={self.rho_num!r} must lie in (0, rho_star)")
        if self.full.kind is LawKind.VO2 and self.rho_num >= self.full.rho_tr:
            raise ParameterError(
                f"rho_num={self.rho_num!r} must lie below the vo2 transition "
                f"density {self.full.rho_tr!r}")
        object.__setattr__(self, "p0", float(self.full.value(self.rho_num)))
        object.__setattr__(self, "p1", float(self.full.deriv(self.rho_num)))
        object.__setattr__(self, "p2", float(self.full.deriv2(self.rho_num)))

    @property
    def explicit(self) -> "ExplicitOffset":
        return ExplicitOffset(self)

    @property
    def implicit(self) -> "ImplicitOffset":
        return ImplicitOffset(self)

    # explicit part ---------------------------------------------------------

    def explicit_value(self, rho):
        if np.ndim(rho) == 0:
            if rho <= self.rho_num:
                return self.full.value(rho)
            d = rho - self.rho_num
            return self.p0 + self.p1 * d + 0.5 * self.p2 * d * d
        low = np.minimum(rho, self.rho_num)
        d = np.maximum(rho - self.rho_num, 0.0)
        return np.where(rho <= self.rho_num,
                        self.full.value(low),
                        self.p0 + self.p1 * d + 0.5 * self.p2 * d * d)

    def explicit_deriv(self, rho):
        if np.ndim(rho) == 0:
            if rho <= self.rho_num:
                return self.full.deriv(rho)
            return self.p1 + self.p2 * (rho - self.rho_num)
        low = np.minimum(rho, self.rho_num)
        d = np.maximum(rho - self.rho_num, 0.0)
        return np.where(rho <= self.rho_num,
                        self.full.deriv(low),
                        self.p1 + self.p2 * d)

    def explicit_deriv2(self, rho):
        if np.ndim(rho) == 0:
            return self.full.deriv2(rho) if rho <= self.rho_num else self.p2
        low = np.minimum(rho, self.rho_num)
        return np.where(rho <= self.rho_num, self.full.deriv2(low), self.p2)

    # implicit part ---------------------------------------------------------

    def implicit_value(self, rho):
        """p_imp = p - p_exp; exact zero at and below rho_num.

        Above rho_num both closed forms are evaluated and subtracted; the
        difference is clamped at zero to keep rounding noise from producing
        a negative stiff part (p_imp >= 0 since p is convex increasing).
        """
        if np.ndim(rho) == 0:
            if rho <= self.rho_num:
                return 0.0
            return max(self.full.value(rho) - self.explicit_value(rho), 0.0)
        diff = np.maximum(self.full.value(rho) - self.explicit_value(rho), 0.0)
        return np.where(rho <= self.rho_num, 0.0, diff)

    def implicit_deriv(self, rho):
        if np.ndim(rho) == 0:
            if rho <= self.rho_num:
                return 0.0
            return max(self.full.deriv(rho) - self.explicit_deriv(rho), 0.0)
        diff = np.maximum(self.full.deriv(rho) - self.explicit_deriv(rho), 0.0)
        return np.where(rho <= self.rho_num, 0.0, diff)


@dataclass(frozen=True)
class ExplicitOffset:
    """The bounded-speed part of a split law, usable wherever a law is expected.

    Defined on all of [0, inf) even when the underlying law is singular --
    that is the point of the truncation.
    """

    split: SplitLaw

    @property
    def kind(self) -> str:
        return f"{self.split.full.kind.value}-exp"

    @property
    def rho_star(self) -> float:
        return self.split.full.rho_star

    @property
    def rho_sup(self) -> float:
        return math.inf

    @property
    def rho_vac(self) -> float:
        return self.split.full.rho_vac

    def value(self, rho):
        return self.split.explicit_value(rho)

    def deriv(self, rho):
        return self.split.explicit_deriv(rho)

    def deriv2(self, rho):
        return self.split.explicit_deriv2(rho)

    def invert(self, w: float, max_iter: int = 100) -> float:
        if w < 0.0:
            raise DomainError(f"offset value must be nonnegative, got {w!r}")
        if w == 0.0:
            return 0.0
        s = self.split
        if w <= s.p0:
            return s.full.invert(w, max_iter=max_iter)
        # quadratic branch has the exact positive root
        disc = s.p1 * s.p1 + 2.0 * s.p2 * (w - s.p0)
        return s.rho_num + (math.sqrt(disc) - s.p1) / s.p2


@dataclass(frozen=True)
class ImplicitOffset:
    """The stiff remainder p_imp of a split law (value/deriv only)."""

    split: SplitLaw

    @property
    def rho_vac(self) -> float:
        return self.split.full.rho_vac

    def value(self, rho):
        return self.split.implicit_value(rho)

    def deriv(self, rho):
        return self.split.implicit_deriv(rho)
