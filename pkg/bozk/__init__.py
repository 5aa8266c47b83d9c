"""
BO-ZK solitary-wave laboratory
Spectral computation and verification of solitary waves of the generalized
two-dimensional Benjamin-Ono-Zakharov-Kuznetsov equation

    u_t + u^p u_x + alpha H u_xx + eps u_xyy = 0.
"""

__version__ = "1.0.0"

from .base import (
    Axis, Verdict, DealiasRule, Params,
    BozkError, ContractError, RegimeError, NumericError, ConvergenceError,
    BlowUpError, FitError, FieldFileError
)
from .spectral import Grid2D, Field, Spectrum
from .functionals import FunctionalReport, PohojaevResiduals, SignMap
from .kernel import KernelSpec, KERNEL_CONSTANT
from .solver import Classification, SolitaryWave, SolverOptions, classify, petviashvili_solve
from .evolve import EvolveOptions, EvolveReport, orbital_distance, stability_experiment
from .fieldio import read_field, write_field

__all__ = [
    "Axis",
    "Verdict",
    "DealiasRule",
    "Params",
    "BozkError",
    "ContractError",
    "RegimeError",
    "NumericError",
    "ConvergenceError",
    "BlowUpError",
    "FitError",
    "FieldFileError",
    "Grid2D",
    "Field",
    "Spectrum",
    "FunctionalReport",
    "PohojaevResiduals",
    "SignMap",
    "KernelSpec",
    "KERNEL_CONSTANT",
    "Classification",
    "SolitaryWave",
    "SolverOptions",
    "classify",
    "petviashvili_solve",
    "EvolveOptions",
    "EvolveReport",
    "orbital_distance",
    "stability_experiment",
    "read_field",
    "write_field"
]
