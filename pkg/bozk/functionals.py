"""
Scalar functionals of the BO-ZK equation
Conserved quantities, variational functionals, Pohojaev residuals,
the Z-norm and the action along the solitary-wave branch d(c).
"""

import logging
import math
from dataclasses import dataclass, field, asdict
from typing import Dict, Any, List, Tuple, Callable, Sequence

import numpy as np

from .base import Params, Axis, ContractError, RegimeError, NumericError, ConvergenceError
from .spectral import Field, deriv, hilbert_dx, dx_half, integrate, inner

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SignMap:
    """How a parameter tuple was brought to the canonical branch (eps=1, c>0, alpha<0)."""

    flip_u: bool = False
    flip_params: bool = False
    override: bool = False

    @property
    def description(self) -> str:
        if self.override:
            return "identity (regime override)"
        if self.flip_params:
            return "(c, alpha, eps, u) -> (-c, -alpha, -eps, -u)"
        return "identity"

    def to_dict(self) -> Dict[str, Any]:
        return {**asdict(self), "description": self.description}


@dataclass
class FunctionalReport:
    mass: float
    energy: float
    action: float
    I: float
    J: float
    K_func: float
    znorm: float
    params: Params
    sign_map: SignMap = field(default_factory=SignMap)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mass": self.mass,
            "energy": self.energy,
            "action": self.action,
            "I": self.I,
            "J": self.J,
            "K": self.K_func,
            "znorm": self.znorm,
            "params": self.params.to_dict(),
            "sign_map": self.sign_map.to_dict()
        }


@dataclass
class PohojaevResiduals:
    """Normalized residuals of the five integral identities satisfied by solitary waves."""

    phi_pairing: float
    x_dilation: float
    y_dilation: float
    speed_dispersion: float
    speed_transverse: float

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.phi_pairing, self.x_dilation, self.y_dilation,
                self.speed_dispersion, self.speed_transverse)

    @property
    def worst(self) -> float:
        return max(self.as_tuple())

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def in_canonical_branch(params: Params) -> bool:
    return params.epsilon == 1 and params.c > 0 and params.alpha < 0


def in_mirrored_branch(params: Params) -> bool:
    return params.epsilon == -1 and params.c < 0 and params.alpha > 0


def canonicalize(params: Params, override: bool = False) -> Tuple[Params, SignMap]:
    """
    Map admissible parameters onto the canonical branch.

    The mirrored branch (eps=-1, c<0, alpha>0) is taken to the canonical one by
    negating (c, alpha, eps) together with u. The nonlinearity keeps its sign
    under u -> -u only when the numerator of p is odd.
    """

    if in_canonical_branch(params):
        return params, SignMap()
    if in_mirrored_branch(params):
        if params.is_integer:
            odd_numerator = int(params.p) % 2 == 1
        else:
            odd_numerator = params.admits_signed_power and params.fraction.numerator % 2 == 1
        if odd_numerator:
            mapped = Params(p=params.p, alpha=-params.alpha, epsilon=1, c=-params.c)
            return mapped, SignMap(flip_u=True, flip_params=True)
        if not override:
            raise RegimeError(
                f"mirrored branch with p={params.p} has no sign-preserving map "
                "to the canonical branch (numerator of p is even)"
            )
    elif not override:
        raise RegimeError(
            f"parameters {params.to_dict()} are outside the solitary-wave existence branch"
        )
    return params, SignMap(override=True)


def apply_sign_map(u: Field, sign_map: SignMap) -> Field:
    return -u if sign_map.flip_u else u


def mass(u: Field) -> float:
    """F(u) = 1/2 int u^2"""
    return 0.5 * inner(u, u)


def hilbert_pairing(u: Field) -> float:
    """int u H u_x, nonnegative (symbol |xi|)."""
    return inner(u, hilbert_dx(u))


def transverse_pairing(u: Field) -> float:
    uy = deriv(u, Axis.Y, 1)
    return inner(uy, uy)


def J(u: Field, params: Params) -> float:
    return integrate(params.power(u.values, 2), u.grid)


def _check_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise NumericError(f"{what} evaluated to a non-finite value")
    return value


def energy(u: Field, params: Params) -> float:
    """E(u) = 1/2 int (eps u_y^2 - alpha u H u_x - 2/((p+1)(p+2)) u^(p+2))"""
    p = params.p
    value = 0.5 * (
        params.epsilon * transverse_pairing(u)
        - params.alpha * hilbert_pairing(u)
        - 2.0 / ((p + 1) * (p + 2)) * J(u, params)
    )
    return _check_finite(value, "energy")


def action(u: Field, params: Params) -> float:
    """S(u) = E(u) + c F(u)"""
    return energy(u, params) + params.c * mass(u)


def znorm(u: Field) -> float:
    """||u||_Z^2 = ||u||^2 + ||u_y||^2 + ||D_x^{1/2} u||^2"""
    half = dx_half(u)
    return math.sqrt(2.0 * mass(u) + transverse_pairing(u) + inner(half, half))


def z_weight(u: Field) -> np.ndarray:
    """Fourier weight 1 + |xi| + eta^2 of the Z inner product."""
    kx, ky = u.grid.wavenumbers()
    return 1.0 + np.abs(kx) + ky ** 2


def z_inner(u: Field, v: Field) -> float:
    grid = u.grid
    u_hat = np.fft.fft2(u.values)
    v_hat = np.fft.fft2(v.values)
    total = np.sum(z_weight(u) * u_hat * np.conj(v_hat)).real
    return float(total * grid.cell / (grid.nx * grid.ny))


def I_functional(u: Field, params: Params) -> float:
    """I(u) = 1/2 int (c u^2 - alpha u H u_x + eps u_y^2) = 1/2 <L u, u>"""
    return 0.5 * (
        params.c * inner(u, u)
        - params.alpha * hilbert_pairing(u)
        + params.epsilon * transverse_pairing(u)
    )


def K_functional(u: Field, params: Params) -> float:
    """K(u) = 1/2 int (c u^2 + eps u_y^2) - J(u)/((p+1)(p+2))"""
    p = params.p
    return (
        0.5 * (params.c * inner(u, u) + params.epsilon * transverse_pairing(u))
        - J(u, params) / ((p + 1) * (p + 2))
    )


def zk_functionals(phi: Field, params: Params, override: bool = False) -> FunctionalReport:
    """
    Full functional record of phi, evaluated in the canonical branch.

    Parameters outside the existence branch raise RegimeError unless
    override is set, in which case the formulas are evaluated as given.
    """

    canon, sign_map = canonicalize(params, override=override)
    u = apply_sign_map(phi, sign_map)
    m = mass(u)
    e = energy(u, canon)
    return FunctionalReport(
        mass=m,
        energy=e,
        action=e + canon.c * m,
        I=I_functional(u, canon),
        J=J(u, canon),
        K_func=K_functional(u, canon),
        znorm=znorm(u),
        params=canon,
        sign_map=sign_map
    )


def _relative(terms: Sequence[float], what: str) -> float:
    scale = sum(abs(t) for t in terms)
    if scale == 0 or not math.isfinite(scale):
        raise NumericError(f"{what}: identity terms vanish, normalization undefined")
    return abs(sum(terms)) / scale


def pohojaev_residuals(phi: Field, params: Params) -> PohojaevResiduals:
    """
    Residuals of the integral identities obtained by pairing the stationary
    equation with phi, x phi_x and y phi_y, and of the two identities derived
    from them by eliminating the nonlinear term. Each residual is
    |sum of terms| / sum |terms|.
    """

    if not np.any(phi.values):
        raise NumericError("pohojaev residuals of the zero field are undefined")
    p, c, alpha, eps = params.p, params.c, params.alpha, params.epsilon
    A = inner(phi, phi)
    B = hilbert_pairing(phi)
    C = transverse_pairing(phi)
    D = J(phi, params)
    q = (p + 1) * (p + 2)
    return PohojaevResiduals(
        phi_pairing=_relative([-c * A, alpha * B, -eps * C, D / (p + 1)], "phi pairing"),
        x_dilation=_relative([c * A, eps * C, -2.0 * D / q], "x dilation"),
        y_dilation=_relative([c * A, -alpha * B, -eps * C, -2.0 * D / q], "y dilation"),
        speed_dispersion=_relative([2 * p * c * A, alpha * (4 - p) * B], "speed/dispersion"),
        speed_transverse=_relative([p * c * A, eps * (p - 4) * C], "speed/transverse")
    )


def mass_ratio_check(phi: Field, params: Params) -> float:
    """Relative mismatch of J/((p+1)(p+2)) = 4c F/(4-p)."""
    p = params.p
    if p == 4:
        raise ContractError("mass ratio identity is singular at p = 4")
    lhs = J(phi, params) / ((p + 1) * (p + 2))
    rhs = 4.0 * params.c / (4.0 - p) * mass(phi)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0:
        raise NumericError("mass ratio of the zero field is undefined")
    return abs(lhs - rhs) / scale


def branch_action(phi: Field, params: Params) -> float:
    """d = p/(2(p+1)(p+2)) J(phi), the action of a solitary wave."""
    p = params.p
    return p / (2.0 * (p + 1) * (p + 2)) * J(phi, params)


def ground_state_relations(phi: Field, params: Params) -> Dict[str, float]:
    """
    Relative mismatches of the relations a ground state satisfies:
    S = -alpha/2 int phi H phi_x, J = 2(p+1) I and S = p/(2(p+1)(p+2)) J.
    """

    canon, sign_map = canonicalize(params)
    u = apply_sign_map(phi, sign_map)
    s = action(u, canon)
    pairing = -0.5 * canon.alpha * hilbert_pairing(u)
    j = J(u, canon)
    i = I_functional(u, canon)
    d = branch_action(u, canon)

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-300)

    return {
        "action_vs_pairing": rel(s, pairing),
        "constraint_level": rel(j, 2.0 * (canon.p + 1) * i),
        "branch_action": rel(s, d)
    }


def k_scan(phi: Field, params: Params, taus: Sequence[float]) -> List[float]:
    """K(tau phi) for each tau; positive for small tau and negative for large tau when J(phi) > 0."""
    return [K_functional(tau * phi, params) for tau in taus]


def d_of_c_curve(
    params_base: Params,
    c_values: Sequence[float],
    solve_fn: Callable[[Params], Any]
) -> List[Tuple[float, float]]:
    """Samples (c, d(c)) of the action along the solitary-wave branch."""

    bad = [c for c in c_values if not c > 0]
    if bad:
        raise ContractError(f"d(c) is sampled at positive speeds only, got c={bad[0]}")
    curve = []
    for c in c_values:
        params = params_base.with_speed(c)
        wave = solve_fn(params)
        if not wave.converged:
            raise ConvergenceError(
                f"solver did not converge at c={c}",
                diagnostics=wave,
                c=c
            )
        canon, sign_map = canonicalize(params)
        d = branch_action(apply_sign_map(wave.profile, sign_map), canon)
        logger.info(f"d(c={c:g}) = {d:.10e}")
        curve.append((float(c), float(d)))
    return curve


def loglog_slope(curve: Sequence[Tuple[float, float]]) -> float:
    c = np.array([point[0] for point in curve])
    d = np.array([point[1] for point in curve])
    slope, _ = np.polyfit(np.log(c), np.log(d), 1)
    return float(slope)


def second_difference(curve: Sequence[Tuple[float, float]], c: float) -> float:
    """Centered second difference of d at the sample c (neighbouring samples may be unevenly spaced)."""
    cs = [point[0] for point in curve]
    if c not in cs:
        raise ContractError(f"c={c} is not a sample of the curve")
    i = cs.index(c)
    if i == 0 or i == len(cs) - 1:
        raise ContractError("second difference needs samples on both sides")
    (c0, d0), (c1, d1), (c2, d2) = curve[i - 1], curve[i], curve[i + 1]
    h0, h1 = c1 - c0, c2 - c1
    return 2.0 * (h0 * d2 - (h0 + h1) * d1 + h1 * d0) / (h0 * h1 * (h0 + h1))
