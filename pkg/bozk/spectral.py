"""
Periodic spectral discretization of the plane
Grid, real fields, their Fourier coefficients and the Fourier-multiplier
operators (Hilbert transform, fractional and ordinary derivatives) used by
every other module.

Fourier normalization: the forward transform is the unnormalized sum
(numpy.fft.fft2), the inverse divides by nx*ny (numpy.fft.ifft2). With this
convention Parseval reads

    sum |f|^2 dx dy = sum |f_hat|^2 dx dy / (nx ny).
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from .base import Axis, ContractError

logger = logging.getLogger(__name__)

MAX_DERIVATIVE_ORDER = 4
# largest imaginary part of an inverse transform, relative to mean |coefficient|
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class Grid2D:
    """
    Periodic box [-lx, lx) x [-ly, ly) sampled on nx x ny points.

    Arrays living on the grid are shaped (nx, ny); x varies along axis 0.
    The origin sits at index (nx/2, ny/2).
    """

    nx: int
    ny: int
    lx: float
    ly: float

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or n % 2 != 0:
                raise ContractError(f"{name} must be an even integer >= 8, got {n}")
        if not (self.lx > 0 and self.ly > 0):
            raise ContractError(f"half-widths must be positive, got lx={self.lx}, ly={self.ly}")

        dx = 2.0 * self.lx / self.nx
        dy = 2.0 * self.ly / self.ny
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dy", dy)
        object.__setattr__(self, "x", -self.lx + dx * np.arange(self.nx))
        object.__setattr__(self, "y", -self.ly + dy * np.arange(self.ny))
        # 2*pi*j/(2*lx) with signed integer j, fftfreq ordering
        object.__setattr__(self, "kx", 2.0 * np.pi * np.fft.fftfreq(self.nx, d=dx))
        object.__setattr__(self, "ky", 2.0 * np.pi * np.fft.fftfreq(self.ny, d=dy))

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def area(self) -> float:
        return 4.0 * self.lx * self.ly

    @property
    def cell(self) -> float:
        return self.dx * self.dy

    @property
    def origin(self):
        return (self.nx // 2, self.ny // 2)

    def mesh(self):
        """Physical coordinates (X, Y), each shaped (nx, ny)."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def wavenumbers(self):
        """Broadcastable wavenumber arrays (KX of shape (nx, 1), KY of shape (1, ny))."""
        return self.kx[:, None], self.ky[None, :]

    def nyquist_mask(self, axis: Axis) -> np.ndarray:
        """Boolean mask that is False on the Nyquist line of the given axis."""
        mask = np.ones(self.shape, dtype=bool)
        if axis == Axis.X:
            mask[self.nx // 2, :] = False
        else:
            mask[:, self.ny // 2] = False
        return mask

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.shape))

    def to_dict(self):
        return {"nx": self.nx, "ny": self.ny, "lx": self.lx, "ly": self.ly}


@dataclass
class Field:
    """Real samples u(x_j, y_m) on a Grid2D."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ContractError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ContractError("field contains non-finite values")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values + _values(other))

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values - _values(other))

    def __mul__(self, other: Union["Field", float]) -> "Field":
        return Field(self.grid, self.values * _values(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass
class Spectrum:
    """Fourier coefficients of a real Field (Hermitian symmetric)."""

    grid: Grid2D
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != self.grid.shape:
            raise ContractError(
                f"spectrum shape {self.coeffs.shape} does not match grid {self.grid.shape}"
            )

    def hermitian_defect(self) -> float:
        """max |c(k) - conj c(-k)| relative to max |c|; zero for the spectrum of a real field."""
        scale = float(np.max(np.abs(self.coeffs)))
        if scale == 0:
            return 0.0
        mirrored = np.roll(self.coeffs[::-1, ::-1], (1, 1), axis=(0, 1))
        return float(np.max(np.abs(self.coeffs - np.conj(mirrored)))) / scale


def _values(other):
    return other.values if isinstance(other, Field) else other


def to_spectrum(f: Field) -> Spectrum:
    return Spectrum(f.grid, np.fft.fft2(f.values))


def to_field(s: Spectrum) -> Field:
    """Inverse transform; refuses spectra whose inverse is not real up to round-off."""
    values = np.fft.ifft2(s.coeffs)
    bound = float(np.sum(np.abs(s.coeffs))) / s.coeffs.size
    if float(np.max(np.abs(values.imag))) > HERMITIAN_TOL * bound:
        raise ContractError(
            f"spectrum is not Hermitian (defect {s.hermitian_defect():.2e}), its inverse is not a real field"
        )
    return Field(s.grid, values.real)


def apply_symbol(f: Field, symbol: np.ndarray) -> Field:
    """
    Multiply the spectrum of f by a symbol broadcastable to the grid shape.
    The symbol must satisfy m(-k) = conj m(k), Nyquist lines included.
    """
    s = to_spectrum(f)
    return to_field(Spectrum(f.grid, symbol * s.coeffs))


def hilbert_symbol(grid: Grid2D) -> np.ndarray:
    kx, _ = grid.wavenumbers()
    symbol = -1j * np.sign(kx) * np.ones((1, grid.ny))
    # sign of the Nyquist mode is ambiguous
    return symbol * grid.nyquist_mask(Axis.X)


def hilbert_x(f: Field) -> Field:
    """Hilbert transform in x, multiplier -i sgn(xi)."""
    return apply_symbol(f, hilbert_symbol(f.grid))


def hilbert_dx(f: Field) -> Field:
    """H d/dx, the multiplier |xi|."""
    kx, _ = f.grid.wavenumbers()
    return apply_symbol(f, np.abs(kx))


def dx_half(f: Field) -> Field:
    """Fractional derivative D_x^{1/2}, multiplier |xi|^{1/2}."""
    kx, _ = f.grid.wavenumbers()
    return apply_symbol(f, np.sqrt(np.abs(kx)))


def derivative_symbol(grid: Grid2D, axis: Axis, order: int) -> np.ndarray:
    if int(order) != order or not 1 <= order <= MAX_DERIVATIVE_ORDER:
        raise ContractError(
            f"derivative order must be an integer in [1, {MAX_DERIVATIVE_ORDER}], got {order}"
        )
    kx, ky = grid.wavenumbers()
    k = kx if axis == Axis.X else ky
    symbol = (1j * k) ** order * np.ones(grid.shape)
    if order % 2 == 1:
        symbol = symbol * grid.nyquist_mask(axis)
    return symbol


def deriv(f: Field, axis: Union[Axis, str], order: int = 1) -> Field:
    axis = Axis(axis) if isinstance(axis, str) else axis
    return apply_symbol(f, derivative_symbol(f.grid, axis, order))


def integrate(f: Union[Field, np.ndarray], grid: Grid2D = None) -> float:
    """Rectangle rule, spectrally accurate for periodic band-limited integrands."""
    if isinstance(f, Field):
        return float(np.sum(f.values) * f.grid.cell)
    return float(np.sum(f) * grid.cell)


def inner(f: Field, g: Field) -> float:
    return float(np.sum(f.values * g.values) * f.grid.cell)


def l2_norm(f: Field) -> float:
    return float(np.sqrt(inner(f, f)))


def translate(f: Field, sx: float, sy: float) -> Field:
    """f(x - sx, y - sy) by Fourier phase shift (exact for band-limited f)."""
    grid = f.grid
    return apply_symbol(f, _shift_factor(grid.kx, grid.nx, sx)[:, None] * _shift_factor(grid.ky, grid.ny, sy)[None, :])


def _shift_factor(k: np.ndarray, n: int, s: float) -> np.ndarray:
    factor = np.exp(-1j * k * s)
    # the Nyquist mode is its own partner; keep the real part of its phase
    factor[n // 2] = np.cos(k[n // 2] * s)
    return factor


def roll(f: Field, jx: int, jy: int) -> Field:
    """Circular shift by whole grid cells: f(x - jx dx, y - jy dy)."""
    return Field(f.grid, np.roll(f.values, (jx, jy), axis=(0, 1)))


def reflect(f: Field, axis: Union[Axis, str]) -> Field:
    """f(-x, y) or f(x, -y) about the origin index."""
    axis = Axis(axis) if isinstance(axis, str) else axis
    ax = 0 if axis == Axis.X else 1
    return Field(f.grid, np.roll(np.flip(f.values, axis=ax), 1, axis=ax))


def gaussian(grid: Grid2D, amplitude: float = 1.0, width: float = 1.0) -> Field:
    """amplitude * exp(-(x^2 + y^2) / width)"""
    X, Y = grid.mesh()
    return Field(grid, amplitude * np.exp(-(X ** 2 + Y ** 2) / width))
