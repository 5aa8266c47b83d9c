"""
Time integration of the BO-ZK equation
    u_t + u^p u_x + alpha H u_xx + eps u_xyy = 0
by the integrating-factor (Lawson) fourth-order Runge-Kutta method, plus
the orbital-distance diagnostics of the stability experiments.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, List, Tuple, Dict, Any, Callable

import numpy as np

from .base import Params, DealiasRule, Axis, ContractError, BlowUpError, ConvergenceError
from .spectral import Grid2D, Field, roll, translate, reflect
from .functionals import mass, energy, znorm, z_weight

logger = logging.getLogger(__name__)

BLOWUP_FACTOR = 1e6
CFL_LIMIT = 0.5


@dataclass
class EvolveOptions:
    dealias: DealiasRule = DealiasRule.TWO_THIRDS
    direction: int = 1
    record_every: int = 10
    snapshot_every: Optional[int] = None
    skew: bool = True


@dataclass
class EvolveReport:
    times: List[float]
    mass_drift: List[float]
    energy_drift: List[float]
    final_field: Field
    dt: float
    steps: int
    dealias_rule: DealiasRule
    orbital_distance: Optional[List[float]] = None
    snapshots: List[Tuple[float, Field]] = field(default_factory=list)
    completed: bool = True

    CSV_COLUMNS = ("t", "mass_drift", "energy_drift", "orbital_distance")

    def rows(self):
        for n, t in enumerate(self.times):
            distance = self.orbital_distance[n] if self.orbital_distance else ""
            yield (t, self.mass_drift[n], self.energy_drift[n], distance)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(self.CSV_COLUMNS)
            for row in self.rows():
                writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dt": self.dt,
            "steps": self.steps,
            "dealias_rule": self.dealias_rule.value,
            "completed": self.completed,
            "t_final": self.times[-1] if self.times else 0.0,
            "max_mass_drift": max(self.mass_drift, default=0.0),
            "max_energy_drift": max(self.energy_drift, default=0.0),
            "max_orbital_distance": max(self.orbital_distance) if self.orbital_distance else None,
            "records": len(self.times),
            "snapshots": len(self.snapshots)
        }


def dispersion_frequency(grid: Grid2D, params: Params) -> np.ndarray:
    """
    omega(xi, eta) = alpha xi|xi| - eps xi eta^2, so that u_hat evolves by exp(-i omega t).
    Zero on the x-Nyquist line, where an odd symbol would break the Hermitian
    symmetry of a real field.
    """
    kx, ky = grid.wavenumbers()
    omega = params.alpha * kx * np.abs(kx) - params.epsilon * kx * ky ** 2
    return omega * grid.nyquist_mask(Axis.X)


def _two_thirds_mask(grid: Grid2D) -> np.ndarray:
    jx = np.abs(np.fft.fftfreq(grid.nx) * grid.nx)
    jy = np.abs(np.fft.fftfreq(grid.ny) * grid.ny)
    return (jx[:, None] <= grid.nx / 3.0) & (jy[None, :] <= grid.ny / 3.0)


def _pad(coeffs: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    nx, ny = coeffs.shape
    mx, my = shape
    centered = np.fft.fftshift(coeffs).copy()
    centered[0, :] = 0.0
    centered[:, 0] = 0.0
    out = np.zeros(shape, dtype=complex)
    ox, oy = (mx - nx) // 2, (my - ny) // 2
    out[ox:ox + nx, oy:oy + ny] = centered
    return np.fft.ifftshift(out) * (mx * my) / (nx * ny)


def _truncate(coeffs: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    mx, my = coeffs.shape
    nx, ny = shape
    centered = np.fft.fftshift(coeffs)
    ox, oy = (mx - nx) // 2, (my - ny) // 2
    out = centered[ox:ox + nx, oy:oy + ny].copy()
    out[0, :] = 0.0
    out[:, 0] = 0.0
    return np.fft.ifftshift(out) * (nx * ny) / (mx * my)


class NonlinearTerm:
    """
    Fourier transform of -u^p u_x.

    For integer p the skew-symmetric split [d_x(u^{p+1}) + u^p u_x]/(p+2)
    is used, whose discrete L^2 pairing with u vanishes; otherwise the
    conservative form d_x(u^{p+1})/(p+1).
    """

    def __init__(self, grid: Grid2D, params: Params, rule: DealiasRule, skew: bool = True, direction: int = 1):
        self.grid = grid
        self.params = params
        self.rule = rule
        self.direction = direction
        self.skew = skew and params.is_integer
        kx, _ = grid.wavenumbers()
        self.ikx = 1j * kx * grid.nyquist_mask(Axis.X)
        self.mask = _two_thirds_mask(grid) if rule == DealiasRule.TWO_THIRDS else None
        self.padded_shape = None
        if rule == DealiasRule.PAD:
            if not params.is_integer:
                raise ContractError("zero-padding dealiasing needs an integer p")
            factor = math.ceil((params.p + 2) / 2.0)
            self.padded_shape = (factor * grid.nx, factor * grid.ny)

    def _physical(self, coeffs: np.ndarray) -> np.ndarray:
        if self.padded_shape is not None:
            coeffs = _pad(coeffs, self.padded_shape)
        return np.fft.ifft2(coeffs).real

    def _spectral(self, values: np.ndarray) -> np.ndarray:
        coeffs = np.fft.fft2(values)
        if self.padded_shape is not None:
            coeffs = _truncate(coeffs, self.grid.shape)
        return coeffs

    def __call__(self, u_hat: np.ndarray) -> np.ndarray:
        p = self.params.p
        u = self._physical(u_hat)
        flux = self._spectral(self.params.power(u, 1))
        if self.skew:
            ux = self._physical(self.ikx * u_hat)
            advective = self._spectral(self.params.power(u) * ux)
            rhs = -(self.ikx * flux + advective) / (p + 2)
        else:
            rhs = -self.ikx * flux / (p + 1)
        if self.mask is not None:
            rhs = rhs * self.mask
        return self.direction * rhs


def _relative_drift(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value - reference)
    return abs(value - reference) / abs(reference)


def evolve(
    u0: Field,
    params: Params,
    dt: float,
    t_end: float,
    opts: Optional[EvolveOptions] = None,
    reference: Optional[Field] = None
) -> EvolveReport:
    """
    Advance u0 to t_end. The linear dispersive phase is applied exactly;
    the nonlinear term is integrated by classical RK4 in the rotating frame.

    With opts.direction = -1 the equation is run backwards in time (both the
    dispersion and the nonlinearity change sign). When a reference wave is
    given the orbital distance to it is recorded alongside the drifts.
    """

    opts = opts or EvolveOptions()
    if not dt > 0 or not t_end > 0:
        raise ContractError(f"dt and t_end must be positive, got dt={dt}, t_end={t_end}")
    if opts.direction not in (-1, 1):
        raise ContractError("direction must be +1 or -1")
    if opts.record_every < 1:
        raise ContractError("record_every must be at least 1")
    grid = u0.grid
    if not (params.is_integer or params.admits_signed_power):
        raise ContractError(f"p={params.p} is not admissible for signed data (need p = k/m with m odd)")

    peak0 = u0.peak
    advection = peak0 ** params.p
    if dt * advection > CFL_LIMIT * grid.dx:
        raise ContractError(
            f"dt={dt} violates dt * max|u|^p <= {CFL_LIMIT} dx ({dt * advection:.3e} > {CFL_LIMIT * grid.dx:.3e})"
        )

    steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    h = t_end / steps
    omega = opts.direction * dispersion_frequency(grid, params)
    E = np.exp(-1j * omega * h)
    Eh = np.exp(-0.5j * omega * h)
    nonlinear = NonlinearTerm(grid, params, opts.dealias, opts.skew, opts.direction)

    mass0 = mass(u0)
    energy0 = energy(u0, params)
    times, mass_drift, energy_drift = [0.0], [0.0], [0.0]
    distances = [orbital_distance(u0, reference)] if reference is not None else None
    snapshots = [(0.0, u0.copy())] if opts.snapshot_every else []

    def report(u_field: Field, completed: bool, n: int) -> EvolveReport:
        return EvolveReport(
            times=times, mass_drift=mass_drift, energy_drift=energy_drift,
            final_field=u_field, dt=h, steps=n, dealias_rule=opts.dealias,
            orbital_distance=distances, snapshots=snapshots, completed=completed
        )

    u_hat = np.fft.fft2(u0.values)
    last = u0
    for n in range(1, steps + 1):
        k1 = nonlinear(u_hat)
        k2 = nonlinear(Eh * (u_hat + 0.5 * h * k1))
        k3 = nonlinear(Eh * u_hat + 0.5 * h * k2)
        k4 = nonlinear(E * u_hat + h * Eh * k3)
        u_hat = E * u_hat + h / 6.0 * (E * k1 + 2.0 * Eh * (k2 + k3) + k4)

        t = n * h
        if n % opts.record_every == 0 or n == steps or (opts.snapshot_every and n % opts.snapshot_every == 0):
            values = np.fft.ifft2(u_hat).real
            current = float(np.max(np.abs(values))) if np.all(np.isfinite(values)) else math.inf
            if peak0 > 0 and current > BLOWUP_FACTOR * peak0:
                logger.error(f"blow-up detected at t={t:.6g}: max|u| = {current:.3e}")
                raise BlowUpError(
                    f"max|u| exceeded {BLOWUP_FACTOR:g} times its initial value at t={t:.6g}",
                    report=report(last, False, n)
                )
            last = Field(grid, values)
            if n % opts.record_every == 0 or n == steps:
                times.append(t)
                mass_drift.append(_relative_drift(mass(last), mass0))
                energy_drift.append(_relative_drift(energy(last, params), energy0))
                if distances is not None:
                    distances.append(orbital_distance(last, reference))
            if opts.snapshot_every and n % opts.snapshot_every == 0:
                snapshots.append((t, last.copy()))
                logger.info(f"t={t:.4f} mass drift {mass_drift[-1]:.2e} energy drift {energy_drift[-1]:.2e}")

    logger.info(
        f"evolved {steps} steps of dt={h:.3e} to t={t_end:g}: "
        f"max mass drift {max(mass_drift):.2e}, max energy drift {max(energy_drift):.2e}"
    )
    return report(last, True, steps)


def _refine_shift(G: np.ndarray, grid: Grid2D, r: np.ndarray, max_iter: int = 30) -> Optional[np.ndarray]:
    """
    Newton iteration for the maximizer of C(r) = Re sum G e^{i k.r}.
    Returns None when C is not locally concave at the start.
    """

    kx, ky = grid.wavenumbers()
    # Nyquist lines have no unambiguous sub-grid shift
    G = G * (grid.nyquist_mask(Axis.X) & grid.nyquist_mask(Axis.Y))
    cells = np.array([grid.dx, grid.dy])
    for _ in range(max_iter):
        phased = G * np.exp(1j * (kx * r[0] + ky * r[1]))
        gradient = np.array([-np.sum(kx * phased).imag, -np.sum(ky * phased).imag])
        hxx = -np.sum(kx ** 2 * phased).real
        hyy = -np.sum(ky ** 2 * phased).real
        hxy = -np.sum(kx * ky * phased).real
        if hxx >= 0 or hxx * hyy - hxy ** 2 <= 0:
            return None
        step = np.linalg.solve(np.array([[hxx, hxy], [hxy, hyy]]), gradient)
        step = np.clip(step, -cells, cells)
        r = r - step
        if np.all(np.abs(step) <= 1e-12 * cells):
            break
    return r


def orbital_distance(u: Field, phi: Field) -> float:
    """
    inf over translations r of ||u - phi(. - r)||_Z.

    The best whole-cell shift comes from the FFT cross-correlation under the
    Z weight; the continuous shift is then refined by Newton iteration on
    the Fourier series of that correlation, whose derivatives are exact.
    """

    if u.grid != phi.grid:
        raise ContractError("orbital distance needs fields on the same grid")
    grid = u.grid
    G = z_weight(u) * np.fft.fft2(u.values) * np.conj(np.fft.fft2(phi.values))
    correlation = np.fft.ifft2(G).real
    jx, jy = np.unravel_index(np.argmax(correlation), grid.shape)
    best = znorm(u - roll(phi, int(jx), int(jy)))
    if best == 0.0:
        return best

    nx, ny = grid.shape
    start = np.array([
        (jx if jx < nx // 2 else jx - nx) * grid.dx,
        (jy if jy < ny // 2 else jy - ny) * grid.dy
    ], dtype=float)
    r = _refine_shift(G, grid, start)
    if r is not None:
        best = min(best, znorm(u - translate(phi, float(r[0]), float(r[1]))))
    return best


def even_perturbation(grid: Grid2D, seed: int = 0, band: int = 8) -> Field:
    """Smooth random field, even in x and y, with max |h| = 1."""

    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(grid.shape)
    jx = np.abs(np.fft.fftfreq(grid.nx) * grid.nx)
    jy = np.abs(np.fft.fftfreq(grid.ny) * grid.ny)
    low = (jx[:, None] <= grid.nx / band) & (jy[None, :] <= grid.ny / band)
    h = Field(grid, np.fft.ifft2(np.fft.fft2(noise) * low).real)
    h = 0.25 * (h + reflect(h, Axis.X) + reflect(h, Axis.Y) + reflect(reflect(h, Axis.X), Axis.Y))
    return Field(grid, h.values / h.peak)


def stability_experiment(
    params: Params,
    perturbation_size: float,
    t_end: float,
    dt: float,
    wave: Any = None,
    grid: Optional[Grid2D] = None,
    solve_fn: Optional[Callable[[Params, Grid2D], Any]] = None,
    seed: int = 0,
    opts: Optional[EvolveOptions] = None
) -> EvolveReport:
    """
    Evolve phi (1 + delta h) for a fixed seeded even perturbation h and record
    the orbital distance to the unperturbed wave.
    """

    if not 0 <= perturbation_size <= 0.1:
        raise ContractError(f"perturbation size must lie in [0, 0.1], got {perturbation_size}")
    if wave is None:
        if grid is None or solve_fn is None:
            raise ContractError("stability experiment needs a wave or a grid and a solver")
        wave = solve_fn(params, grid)
    if not wave.converged:
        raise ConvergenceError("stability experiment needs a converged wave", diagnostics=wave, c=params.c)
    phi = wave.profile
    h = even_perturbation(phi.grid, seed)
    u0 = Field(phi.grid, phi.values * (1.0 + perturbation_size * h.values))
    logger.info(
        f"stability run p={params.p} delta={perturbation_size:g} seed={seed}: "
        f"initial orbital distance {orbital_distance(u0, phi):.3e}"
    )
    return evolve(u0, params, dt, t_end, opts, reference=phi)
