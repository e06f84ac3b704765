"""Finite-volume solvers for the Aw-Rascle-Zhang traffic model with
congestion-enforcing velocity offsets: exact Riemann solver, Glimm
random-choice scheme, and an implicit-explicit splitting for the stiff
regimes, plus the benchmark scenario suite and a CLI driver."""

from .errors import (ArzFlowError, ConvergenceError, DomainError,
                     NegativeVelocityError, ParameterError, TimestepUnderflow,
                     UnknownScenario)
from .pressure import (LawKind, PressureLaw, SplitLaw, default_rho_num,
                       VACUUM_FRACTION)
from .grid import (BoundaryPolicy, ConservedState, Grid1D, PrimitiveState,
                   SolutionField, apply_boundary, make_field, to_conserved,
                   to_primitive)
from .riemann import RiemannSolution, WaveCase, max_wave_speed, sample, solve
from .glimm import CflConfig, cfl_dt, glimm_step, van_der_corput
from .imex import (ImexConfig, explicit_step, imex_step,
                   implicit_density_step, implicit_y_step)
from .scenarios import Scenario, build, error_l1, initial_field
from .driver import RunConfig, RunLog, RunResult, run, write_csv, write_log

__version__ = "0.1.0"

__all__ = [
    "ArzFlowError", "ConvergenceError", "DomainError", "NegativeVelocityError",
    "ParameterError", "TimestepUnderflow", "UnknownScenario",
    "LawKind", "PressureLaw", "SplitLaw", "default_rho_num", "VACUUM_FRACTION",
    "BoundaryPolicy", "ConservedState", "Grid1D", "PrimitiveState",
    "SolutionField", "apply_boundary", "make_field", "to_conserved",
    "to_primitive",
    "RiemannSolution", "WaveCase", "max_wave_speed", "sample", "solve",
    "CflConfig", "cfl_dt", "glimm_step", "van_der_corput",
    "ImexConfig", "explicit_step", "imex_step", "implicit_density_step",
    "implicit_y_step",
    "Scenario", "build", "error_l1", "initial_field",
    "RunConfig", "RunLog", "RunResult", "run", "write_csv", "write_log",
    "__version__",
]
