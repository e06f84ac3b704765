"""Mesh, state representations, and primitive/conserved conversions.

States are carried either as (rho, v) primitives or as (rho, y) conserved
pairs with y = rho * (v + p(rho)) the generalized momentum of the chosen
offset law.  Fields store conserved cell averages on a uniform mesh with one
ghost cell per side; the ghost values are frozen at the initial boundary
states (Dirichlet-by-ghost), which keeps the inflow conditions constant and
reproduces pure Riemann dynamics until waves reach the boundary.  The outflow
side uses the same frozen-ghost treatment; see README for discussion.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NegativeVelocityError, ParameterError

# Rounding slack on v = y/rho - p(rho): values in [-CLAMP, 0) are clamped to
# zero; anything below -HARD is a genuine invariant-region violation.
_V_CLAMP = 1e-10
_V_HARD = 1e-8


@dataclass(frozen=True)
class PrimitiveState:
    """Cell state in (density, velocity) variables.

    The velocity is physically meaningless below the vacuum threshold of the
    governing law; such states carry v = 0 by convention.
    """
    rho: float
    v: float


@dataclass(frozen=True)
class ConservedState:
    """Cell state in (density, generalized momentum) variables."""
    rho: float
    y: float


VACUUM = PrimitiveState(0.0, 0.0)


def to_conserved(s: PrimitiveState, law) -> ConservedState:
    """Map (rho, v) to (rho, y); vacuum maps to y = 0."""
    if s.rho < law.rho_vac:
        return ConservedState(max(s.rho, 0.0), 0.0)
    return ConservedState(s.rho, s.rho * (s.v + law.value(s.rho)))


def to_primitive(c: ConservedState, law) -> PrimitiveState:
    """Map (rho, y) back to (rho, v), guarding rounding noise around v = 0."""
    if c.rho < law.rho_vac:
        return PrimitiveState(max(c.rho, 0.0), 0.0)
    v = c.y / c.rho - law.value(c.rho)
    if v < -_V_HARD:
        raise NegativeVelocityError(
            f"v = {v!r} at rho = {c.rho!r}: state left the invariant region")
    return PrimitiveState(c.rho, max(v, 0.0))


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh on [x_min, x_max] with one ghost cell per side."""

    x_min: float
    x_max: float
    n_cells: int
    ghost_width: int = 1

    def __post_init__(self) -> None:
        if self.n_cells < 1 or self.x_max <= self.x_min:
            raise ParameterError("grid needs x_max > x_min and n_cells >= 1")
        if self.ghost_width != 1:
            raise ParameterError("only ghost_width = 1 is supported")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def cell_centers(self) -> np.ndarray:
        """Centers of the interior cells, x_j = x_min + (j + 1/2) dx."""
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass
class SolutionField:
    """Conserved cell averages (interior plus ghosts) at one time level.

    ``rho`` and ``y`` have length n_cells + 2; index 0 and -1 are ghosts.
    Fields are treated as values: steps return new fields.
    """

    grid: Grid1D
    rho: np.ndarray
    y: np.ndarray
    time: float = 0.0

    def interior(self) -> tuple[np.ndarray, np.ndarray]:
        return self.rho[1:-1], self.y[1:-1]

    def copy(self) -> "SolutionField":
        return SolutionField(self.grid, self.rho.copy(), self.y.copy(), self.time)

    def mass(self) -> float:
        """Total interior mass, sum of rho_j * dx."""
        return float(np.sum(self.rho[1:-1])) * self.grid.dx


def make_field(grid: Grid1D, rho: np.ndarray, v: np.ndarray, law,
               time: float = 0.0) -> SolutionField:
    """Build a field from interior primitive arrays; ghosts copy the end cells."""
    if rho.shape != (grid.n_cells,) or v.shape != (grid.n_cells,):
        raise ParameterError("initial arrays must match the interior cell count")
    full_rho = np.empty(grid.n_cells + 2)
    full_v = np.empty(grid.n_cells + 2)
    full_rho[1:-1], full_v[1:-1] = rho, v
    full_rho[0], full_v[0] = rho[0], v[0]
    full_rho[-1], full_v[-1] = rho[-1], v[-1]
    vac = full_rho < law.rho_vac
    y = np.where(vac, 0.0,
                 full_rho * (full_v + law.value(np.where(vac, 0.0, full_rho))))
    return SolutionField(grid, full_rho, y, time)


def field_to_primitive(field: SolutionField, law) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized conversion of a whole field (ghosts included) to (rho, v)."""
    rho = field.rho
    vac = rho < law.rho_vac
    safe_rho = np.where(vac, 1.0, rho)
    p = law.value(np.where(vac, 0.0, rho))
    v = np.where(vac, 0.0, field.y / safe_rho - p)
    bad = np.min(v)
    if bad < -_V_HARD:
        j = int(np.argmin(v))
        raise NegativeVelocityError(
            f"v = {bad!r} in cell {j} (rho = {rho[j]!r}): state left the "
            "invariant region")
    return rho, np.maximum(v, 0.0)


def primitive_to_field(grid: Grid1D, rho: np.ndarray, v: np.ndarray, law,
                       time: float) -> SolutionField:
    """Inverse of :func:`field_to_primitive` for full (ghost-padded) arrays."""
    vac = rho < law.rho_vac
    y = np.where(vac, 0.0, rho * (v + law.value(np.where(vac, 0.0, rho))))
    return SolutionField(grid, rho.astype(float, copy=True), y, time)


@dataclass(frozen=True)
class BoundaryPolicy:
    """Ghost-cell states frozen at their t = 0 values (constant extension)."""

    left: ConservedState
    right: ConservedState

    @classmethod
    def from_field(cls, field: SolutionField) -> "BoundaryPolicy":
        return cls(ConservedState(float(field.rho[0]), float(field.y[0])),
                   ConservedState(float(field.rho[-1]), float(field.y[-1])))


def apply_boundary(field: SolutionField, policy: BoundaryPolicy) -> SolutionField:
    """Write the frozen ghost states into the field (in place) and return it."""
    field.rho[0], field.y[0] = policy.left.rho, policy.left.y
    field.rho[-1], field.y[-1] = policy.right.rho, policy.right.y
    return field
