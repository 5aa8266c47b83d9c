"""
Resolvent kernel of the stationary BO-ZK operator
K is the inverse Fourier transform of 1/(c - alpha|xi| + eps eta^2). It is
built two independent ways: spectrally on the periodic grid, and pointwise
from the subordination integral

    K(x, y) = C int_0^inf |alpha| sqrt(t) / (alpha^2 t^2 + x^2) exp(-c t - y^2/(4t)) dt

with C = 1/(2 pi^{3/2}) under the Fourier convention of bozk.spectral.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Sequence, Tuple, List

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .base import Params, RegimeError, ConvergenceError, FitError, ContractError
from .spectral import Grid2D, Field, apply_symbol, inner

logger = logging.getLogger(__name__)

KERNEL_CONSTANT = 1.0 / (2.0 * math.pi ** 1.5)

# log-substitution window t = e^s
S_MIN, S_MAX = -30.0, 30.0
FIT_FLOOR = 1e-12
NEAR_FIELD = 2.0


@dataclass(frozen=True)
class KernelSpec:
    """
    Kernel of the operator c - alpha H d_x - eps d_y^2.

    Mirrored parameters (eps=-1, c<0, alpha>0) are taken to the canonical
    branch, whose symbol is the negative of theirs; anything else has a
    symbol that changes sign and is rejected.
    """

    params: Params

    def __post_init__(self):
        p = self.params
        if p.epsilon == -1 and p.c < 0 and p.alpha > 0:
            p = Params(p=p.p, alpha=-p.alpha, epsilon=1, c=-p.c)
        if not (p.epsilon == 1 and p.c > 0 and p.alpha < 0):
            raise RegimeError(
                f"symbol c - alpha|xi| + eps eta^2 is not positive for {self.params.to_dict()}"
            )
        object.__setattr__(self, "canonical", p)

    @property
    def c(self) -> float:
        return self.canonical.c

    @property
    def alpha(self) -> float:
        return self.canonical.alpha

    def symbol(self, grid: Grid2D) -> np.ndarray:
        kx, ky = grid.wavenumbers()
        return self.c - self.alpha * np.abs(kx) + ky ** 2

    def minimum(self, grid: Grid2D) -> float:
        return float(np.min(self.symbol(grid)))


@dataclass
class KernelDecayFit:
    slope_y_exp: float
    slope_x_alg: float
    y_window: Tuple[float, float]
    x_window: Tuple[float, float]
    y_points: int
    x_points: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope_y_exp": self.slope_y_exp,
            "slope_x_alg": self.slope_x_alg,
            "y_window": list(self.y_window),
            "x_window": list(self.x_window),
            "y_points": self.y_points,
            "x_points": self.x_points
        }


@dataclass
class KernelConstantFit:
    """Least-squares constant between spectral and quadrature kernels."""

    constant: float
    cv: float
    ratios: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"constant": self.constant, "cv": self.cv, "ratios": self.ratios}


def stationary_symbol(params: Params, grid: Grid2D) -> np.ndarray:
    """Symbol c - alpha|xi| + eps eta^2 of L, for any parameter signs."""
    kx, ky = grid.wavenumbers()
    return params.c - params.alpha * np.abs(kx) + params.epsilon * ky ** 2


def apply_operator(w: Field, spec: KernelSpec) -> Field:
    """(c - alpha H d_x - eps d_y^2) w"""
    return apply_symbol(w, spec.symbol(w.grid))


def kernel_field(spec: KernelSpec, grid: Grid2D) -> Field:
    """
    K sampled on the grid with its singular point at the origin index.
    Normalized so that sum K dx dy = 1/c, i.e. convolution with K in the
    rectangle rule equals multiplication by the symbol.
    """

    symbol = spec.symbol(grid)
    if np.any(symbol <= 0):
        raise RegimeError("kernel symbol is not positive on the grid")
    values = np.fft.fftshift(np.fft.ifft2(1.0 / symbol).real) / grid.cell
    return Field(grid, values)


def convolve_kernel(g: Field, spec: KernelSpec) -> Field:
    """K * g, the solution w of (c - alpha H d_x - eps d_y^2) w = g."""
    return apply_symbol(g, 1.0 / spec.symbol(g.grid))


def quadratic_form(f: Field, spec: KernelSpec) -> float:
    """<f, K * f>"""
    return inner(f, convolve_kernel(f, spec))


def abs_value_gain(f: Field, spec: KernelSpec) -> float:
    """<|f|, K*|f|> - <f, K*f>, nonnegative because K > 0."""
    magnitude = Field(f.grid, np.abs(f.values))
    return quadratic_form(magnitude, spec) - quadratic_form(f, spec)


def kernel_l1(spec: KernelSpec) -> float:
    """int K = 1/c"""
    return 1.0 / spec.c


def kernel_line_l1(spec: KernelSpec, y: float) -> float:
    """||K(., y)||_{L^1_x} = exp(-sqrt(c)|y|) / (2 sqrt(c))"""
    root = math.sqrt(spec.c)
    return math.exp(-root * abs(y)) / (2.0 * root)


def _quad_log(integrand, tol: float, points: Sequence[float], what: str) -> float:
    hints = sorted(s for s in points if S_MIN < s < S_MAX)
    result = sp_integrate.quad(
        integrand, S_MIN, S_MAX,
        epsabs=0.0, epsrel=tol, limit=400,
        points=hints or None, full_output=1
    )
    if len(result) == 4:
        raise ConvergenceError(f"{what}: quadrature did not converge ({result[3]})")
    value = result[0]
    if not math.isfinite(value):
        raise ConvergenceError(f"{what}: quadrature returned a non-finite value")
    return value


def _free_kernel(x: float, y: float, c: float, a: float, tol: float) -> float:
    def integrand(s):
        t = math.exp(s)
        return a * t ** 1.5 / (a * a * t * t + x * x) * math.exp(-c * t - y * y / (4.0 * t))

    hints = [0.0]
    if x != 0:
        hints.append(math.log(abs(x) / a))
    if y != 0:
        hints.append(math.log(abs(y) / (2.0 * math.sqrt(c))))
    return _quad_log(integrand, tol, hints, f"K({x:g}, {y:g})")


def transverse_moment(y: float, params: Params, tol: float = 1e-10) -> float:
    """m(y) = int |alpha| sqrt(t) exp(-c t - y^2/(4t)) dt, far-field weight K ~ C m(y)/x^2."""
    c, a = abs(params.c), abs(params.alpha)

    def integrand(s):
        t = math.exp(s)
        return a * t ** 1.5 * math.exp(-c * t - y * y / (4.0 * t))

    return _quad_log(integrand, tol, [0.0], f"m({y:g})")


def kernel_quadrature(
    x: float,
    y: float,
    params: Params,
    tol: float = 1e-10,
    period: Optional[float] = None,
    images: int = 8
) -> float:
    """
    The t-integral of K at (x, y), without the constant C.

    With an x-period P the periodic image sum over n = -images..images is
    evaluated directly and the remaining images are replaced by their
    far-field form, summed in closed form with the trigamma function.
    """

    if x == 0 and y == 0:
        raise ContractError("kernel quadrature is singular at the origin")
    if not tol > 0:
        raise ContractError(f"quadrature tolerance must be positive, got {tol}")
    c, a = abs(params.c), abs(params.alpha)
    if period is None:
        return _free_kernel(x, y, c, a, tol)
    if not period > 0 or images < 0:
        raise ContractError("period must be positive and images nonnegative")

    total = sum(_free_kernel(x + n * period, y, c, a, tol) for n in range(-images, images + 1))
    shift = x / period
    tail = special.polygamma(1, images + 1 + shift) + special.polygamma(1, images + 1 - shift)
    return total + transverse_moment(y, params, tol) * float(tail) / period ** 2


def kernel_constant(
    spec: KernelSpec,
    grid: Grid2D,
    indices: Sequence[Tuple[int, int]],
    tol: float = 1e-10,
    images: int = 8
) -> KernelConstantFit:
    """Ratio of the spectral kernel to the periodized quadrature at grid points."""

    field_values = kernel_field(spec, grid).values
    ox, oy = grid.origin
    spectral, quadrature = [], []
    for i, j in indices:
        x, y = grid.x[i], grid.y[j]
        if i == ox and j == oy:
            raise ContractError("sample points must avoid the origin")
        spectral.append(field_values[i, j])
        quadrature.append(kernel_quadrature(x, y, spec.canonical, tol, period=2.0 * grid.lx, images=images))
    spectral = np.array(spectral)
    quadrature = np.array(quadrature)
    ratios = spectral / quadrature
    constant = float(np.dot(spectral, quadrature) / np.dot(quadrature, quadrature))
    cv = float(np.std(ratios) / abs(np.mean(ratios)))
    logger.info(f"kernel constant fit: C={constant:.8e} (analytic {KERNEL_CONSTANT:.8e}), cv={cv:.2e}")
    return KernelConstantFit(constant=constant, cv=cv, ratios=ratios.tolist())


def _window(coords: np.ndarray, half_width: float, min_points: int, what: str) -> np.ndarray:
    hi = half_width / 2.0
    mask = (coords >= NEAR_FIELD) & (coords <= hi)
    if np.count_nonzero(mask) < min_points:
        raise FitError(
            f"{what} fit window [{NEAR_FIELD}, {hi:g}] holds {np.count_nonzero(mask)} "
            f"samples, need at least {min_points}"
        )
    return mask


def fit_exponential(coords: np.ndarray, values: np.ndarray, peak: float, what: str) -> float:
    keep = values > FIT_FLOOR * peak
    if np.count_nonzero(keep) < 2:
        raise FitError(f"{what}: fewer than two samples above the round-off floor")
    slope, _ = np.polyfit(coords[keep], np.log(values[keep]), 1)
    return float(slope)


def fit_power_law(coords: np.ndarray, values: np.ndarray, peak: float, what: str) -> float:
    keep = values > FIT_FLOOR * peak
    if np.count_nonzero(keep) < 2:
        raise FitError(f"{what}: fewer than two samples above the round-off floor")
    slope, _ = np.polyfit(np.log(coords[keep]), np.log(values[keep]), 1)
    return float(slope)


def kernel_decay_fit(spec: KernelSpec, grid: Grid2D, min_points: int = 10) -> KernelDecayFit:
    """
    Transverse exponential rate of ||K(., y)||_{L^1_x} and algebraic exponent
    of K(x, 0), fitted over [2, L/2] in each direction.
    """

    K = kernel_field(spec, grid).values
    ox, oy = grid.origin

    y_mask = _window(grid.y, grid.ly, min_points, "transverse")
    line_l1 = np.sum(K, axis=0) * grid.dx
    # partial-sum error of the kinked transverse profile at grid points, ~ 2/(pi k^3 y^2)
    ky_max = math.pi / grid.dy
    floor = 10.0 * 2.0 / (math.pi * ky_max ** 3 * np.maximum(np.abs(grid.y), NEAR_FIELD) ** 2)
    y_mask &= line_l1 > floor
    if np.count_nonzero(y_mask) < 2:
        raise FitError("transverse kernel profile sinks below the truncation floor inside the window")
    slope_y = fit_exponential(grid.y[y_mask], line_l1[y_mask], float(np.max(line_l1)), "transverse")

    x_mask = _window(grid.x, grid.lx, min_points, "propagation")
    axis_values = K[:, oy]
    slope_x = fit_power_law(grid.x[x_mask], axis_values[x_mask], float(np.max(axis_values)), "propagation")

    logger.info(f"kernel decay: y-rate {slope_y:.4f} (expected {-math.sqrt(spec.c):.4f}), x-exponent {slope_x:.4f}")
    return KernelDecayFit(
        slope_y_exp=slope_y,
        slope_x_alg=slope_x,
        y_window=(NEAR_FIELD, grid.ly / 2.0),
        x_window=(NEAR_FIELD, grid.lx / 2.0),
        y_points=int(np.count_nonzero(y_mask)),
        x_points=int(np.count_nonzero(x_mask))
    )
