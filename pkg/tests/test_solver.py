"""
Tests for the solitary-wave solver and its diagnostics.

Validates:
- The existence decision table
- Petviashvili convergence, positivity and symmetry of the computed waves
- Sign handling on the mirrored branch
- Rescaling across speeds and the d(c) scaling law
- Steiner symmetrization
- Decay reports
"""

from itertools import product

import numpy as np
import pytest

from bozk.base import Params, Verdict, Axis, ContractError, RegimeError, FitError
from bozk.spectral import Grid2D, Field, gaussian, roll, translate, l2_norm
from bozk.functionals import mass, branch_action, d_of_c_curve, loglog_slope, second_difference
from bozk.solver import (
    SolitaryWave,
    SolverOptions,
    classify,
    petviashvili_solve,
    equation_residual,
    center_profile,
    rescale_wave,
    steiner_symmetrize,
    symmetry_report,
    wave_decay_report,
    spectral_tail,
)

P1 = Params(p=1, alpha=-1.0, epsilon=1, c=1.0)

# (p, eps, c, alpha) -> (verdict, case); every other cell has no solitary wave
DECISION_TABLE = {
    (2, 1, 1, -1): ("Exists", "(i)"),
    (2, -1, -1, 1): ("Exists", "(ii)"),
    (5, 1, -1, -1): ("Unknown", "(iii)"),
    (5, -1, 1, 1): ("Unknown", "(iv)"),
    (4, 1, 1, -1): ("NoSolitaryWave", "p=4"),
    (4, -1, -1, 1): ("NoSolitaryWave", "p=4"),
}


class TestClassify:
    """Existence regimes."""

    @pytest.mark.parametrize("p,eps,c,alpha", list(product([2, 4, 5], [1, -1], [1, -1], [1, -1])))
    def test_decision_table(self, p, eps, c, alpha):
        verdict, case = DECISION_TABLE.get((p, eps, c, alpha), ("NoSolitaryWave", "none"))
        result = classify(Params(p=p, alpha=float(alpha), epsilon=eps, c=float(c)))
        assert result.verdict.value == verdict
        assert result.matched_case == case

    @pytest.mark.parametrize("params,expected", [
        (Params(p=2, alpha=-1.0, epsilon=1, c=1.0), {"verdict": "Exists", "matched_case": "(i)"}),
        (Params(p=2, alpha=1.0, epsilon=-1, c=-1.0), {"verdict": "Exists", "matched_case": "(ii)"}),
        (Params(p=5, alpha=-1.0, epsilon=1, c=-1.0), {"verdict": "Unknown", "matched_case": "(iii)"}),
        (Params(p=4, alpha=-1.0, epsilon=1, c=1.0), {"verdict": "NoSolitaryWave", "matched_case": "p=4"}),
    ])
    def test_named_cases(self, params, expected):
        assert classify(params).to_dict() == expected

    def test_fractional_subcritical_power(self):
        assert classify(Params(p=7 / 3, alpha=-2.0, epsilon=1, c=0.5)).verdict == Verdict.EXISTS


class TestPetviashvili:
    """Convergence of the stabilized iteration on the canonical branch."""

    @pytest.mark.parametrize("name", ["wave_p1", "wave_p2", "wave_p3"])
    def test_converges(self, name, request):
        wave = request.getfixturevalue(name)
        assert wave.converged
        assert wave.iterations <= 500
        assert wave.eq_residual_inf <= 1e-10
        assert abs(wave.stabilizer_history[-1] - 1.0) <= 1e-8
        assert equation_residual(wave.profile, wave.params) <= 1e-8

    def test_stabilizer_settles_monotonically(self, wave_p1):
        tail = [abs(m - 1.0) for m in wave_p1.stabilizer_history[-10:]]
        for before, after in zip(tail, tail[1:]):
            assert after <= before + 1e-12

    @pytest.mark.parametrize("name", ["wave_p2", "wave_p3"])
    def test_wave_is_resolved(self, name, request):
        wave = request.getfixturevalue(name)
        assert wave.resolved
        assert wave.spectral_tail <= 1e-5
        assert wave.to_dict()["resolved"] is True

    @pytest.mark.slow
    def test_coarse_x_spacing_is_flagged(self, wide_grid, caplog):
        # dx = pi/32 leaves the p = 2 spectrum cut off near Nyquist
        wave = petviashvili_solve(Params(p=2, alpha=-1.0, epsilon=1, c=1.0), wide_grid, SolverOptions(tol=1e-10))
        assert wave.converged
        assert not wave.resolved
        assert wave.spectral_tail > 1e-5
        assert "under-resolved" in caplog.text

    def test_wave_is_positive(self, wave_p2):
        values = wave_p2.profile.values
        assert values.min() >= -1e-8 * values.max()

    def test_fractional_power_with_even_denominator(self, small_grid):
        wave = petviashvili_solve(Params(p=1.5, alpha=-1.0, epsilon=1, c=1.0), small_grid, SolverOptions(tol=1e-10))
        assert wave.converged
        assert wave.profile.values.min() >= -1e-6 * wave.profile.peak

    def test_wave_is_centered_and_even(self, wave_p1):
        grid = wave_p1.grid
        assert np.unravel_index(np.argmax(wave_p1.profile.values), grid.shape) == grid.origin
        report = symmetry_report(wave_p1)
        assert report["x_asym"] <= 1e-6
        assert report["y_asym"] <= 1e-6

    def test_boundary_contamination_is_small(self, wave_p1):
        assert wave_p1.boundary_contamination <= 1e-3

    def test_attached_reports(self, wave_p1):
        summary = wave_p1.to_dict()
        assert summary["converged"] is True
        assert summary["functionals"]["J"] > 0
        assert set(summary["pohojaev"]) == {
            "phi_pairing", "x_dilation", "y_dilation", "speed_dispersion", "speed_transverse"
        }

    def test_zero_guess_is_degenerate(self, small_grid):
        with pytest.raises(ContractError, match="degenerate"):
            petviashvili_solve(P1, small_grid, SolverOptions(initial_guess=small_grid.zeros()))

    def test_guess_on_other_grid(self, small_grid):
        other = Grid2D(64, 64, 4.0, 4.0)
        with pytest.raises(ContractError, match="different grid"):
            petviashvili_solve(P1, small_grid, SolverOptions(initial_guess=gaussian(other)))

    def test_regime_gate(self, small_grid):
        with pytest.raises(RegimeError, match="no solitary wave"):
            petviashvili_solve(Params(p=5, alpha=-1.0, epsilon=1, c=1.0), small_grid)

    def test_iteration_budget(self, small_grid):
        wave = petviashvili_solve(P1, small_grid, SolverOptions(max_iter=2))
        assert not wave.converged
        assert wave.functional_report is None
        assert len(wave.stabilizer_history) == 3


class TestSpectralTail:
    """Relative Fourier amplitude near Nyquist."""

    def test_wide_gaussian_is_resolved(self):
        grid = Grid2D(128, 128, 4 * np.pi, 4 * np.pi)
        # |g_hat| ~ exp(-k^2 / 4) and the band starts at k = 0.9 * 16
        assert spectral_tail(gaussian(grid)) <= 1e-13

    def test_noise_is_not(self):
        grid = Grid2D(64, 64, 4.0, 4.0)
        rng = np.random.default_rng(3)
        f = Field(grid, rng.standard_normal(grid.shape))
        assert spectral_tail(f) >= 0.1

    def test_zero_field(self):
        assert spectral_tail(Grid2D(16, 16, 1.0, 1.0).zeros()) == 0.0


class TestMirroredBranch:
    """eps = -1, c < 0, alpha > 0."""

    def test_odd_power_gives_negative_wave(self, small_grid, small_wave):
        mirrored = Params(p=1, alpha=1.0, epsilon=-1, c=-1.0)
        wave = petviashvili_solve(mirrored, small_grid)
        assert wave.converged
        assert wave.sign_map.flip_u
        assert np.allclose(wave.profile.values, -small_wave.profile.values, atol=1e-12 * small_wave.profile.peak)
        assert equation_residual(wave.profile, mirrored) <= 1e-8

    def test_even_power_is_rejected(self, small_grid):
        with pytest.raises(RegimeError, match="numerator of p is even"):
            petviashvili_solve(Params(p=2, alpha=1.0, epsilon=-1, c=-1.0), small_grid)


class TestCentering:
    """Peak alignment to the origin index."""

    def test_recovers_shifted_wave(self, small_wave):
        phi = small_wave.profile
        moved = translate(roll(phi, 5, -3), 0.3 * phi.grid.dx, 0.0)
        assert symmetry_report(moved)["x_asym"] >= 1e-2
        centered = center_profile(moved)
        assert np.allclose(centered.values, phi.values, atol=1e-8 * phi.peak)


class TestRescale:
    """phi_c(x, y) = c^{1/p} phi_1(c x, sqrt(c) y)."""

    def test_same_speed_is_a_copy(self, small_wave):
        out = rescale_wave(small_wave, small_wave.params.c)
        assert np.array_equal(out.values, small_wave.profile.values)
        assert out is not small_wave.profile

    def test_guards(self, small_wave):
        with pytest.raises(ContractError, match="too narrow"):
            rescale_wave(small_wave, 100.0)
        with pytest.raises(ContractError, match="too wide"):
            rescale_wave(small_wave, 0.01)
        with pytest.raises(ContractError, match="sign regime"):
            rescale_wave(small_wave, -1.0)

    def test_mass_scaling(self, wave_p1):
        faster = rescale_wave(wave_p1, 1.44)
        # F(phi_c) = c^{2/p - 3/2} F(phi_1)
        assert mass(faster) == pytest.approx(1.2 * mass(wave_p1.profile), rel=1e-5)

    def test_round_trip(self, wave_p1):
        faster = rescale_wave(wave_p1, 1.2)
        intermediate = SolitaryWave(
            profile=faster, params=P1.with_speed(1.2), iterations=0, converged=True, eq_residual_inf=0.0
        )
        back = rescale_wave(intermediate, 1.0)
        error = l2_norm(back - wave_p1.profile) / l2_norm(wave_p1.profile)
        assert error <= 1e-5

    @pytest.mark.slow
    def test_matches_direct_solve(self, wave_p1, wide_grid):
        direct = petviashvili_solve(P1.with_speed(1.44), wide_grid)
        rescaled = rescale_wave(wave_p1, 1.44)
        assert l2_norm(rescaled - direct.profile) / l2_norm(direct.profile) <= 1e-3
        assert equation_residual(rescaled, P1.with_speed(1.44)) <= 1e-3


class TestActionAlongBranch:
    """d(c) = d(1) c^{2/p - 1/2} from direct solves."""

    SPEEDS = [0.5, 0.75, 1.0, 1.5, 2.0]

    def curve(self, p, grid):
        base = Params(p=p, alpha=-1.0, epsilon=1, c=1.0)
        return d_of_c_curve(base, self.SPEEDS, lambda params: petviashvili_solve(params, grid))

    @pytest.mark.slow
    def test_p1_slope_and_convexity(self, sweep_grid):
        curve = self.curve(1, sweep_grid)
        assert loglog_slope(curve) == pytest.approx(1.5, rel=0.02)
        for c in self.SPEEDS[1:-1]:
            assert second_difference(curve, c) > 0

    @pytest.mark.slow
    def test_p2_slope_and_concavity(self, fine_sweep_grid):
        curve = self.curve(2, fine_sweep_grid)
        assert loglog_slope(curve) == pytest.approx(0.5, rel=0.02)
        for c in self.SPEEDS[1:-1]:
            assert second_difference(curve, c) < 0

    def test_rescaled_waves_follow_the_law(self, wave_p1):
        for c in (1.2, 1.5):
            d = branch_action(rescale_wave(wave_p1, c), P1.with_speed(c))
            assert d == pytest.approx(branch_action(wave_p1.profile, P1) * c ** 1.5, rel=1e-5)


class TestSteiner:
    """Symmetric decreasing rearrangement along lines."""

    @pytest.mark.parametrize("axis", [Axis.X, Axis.Y])
    def test_computed_wave_stays_even(self, small_wave, axis):
        out = steiner_symmetrize(small_wave.profile, axis)
        report = symmetry_report(out)
        assert report["x_asym"] <= 1e-12
        assert report["y_asym"] <= 1e-12
        # the wave is already symmetric decreasing along both axes
        assert l2_norm(out - small_wave.profile) <= 1e-10 * l2_norm(small_wave.profile)

    def test_gaussian_is_a_fixed_point(self):
        grid = Grid2D(64, 48, 8.0, 6.0)
        g = gaussian(grid)
        for axis in (Axis.X, Axis.Y):
            assert np.allclose(steiner_symmetrize(g, axis).values, g.values, rtol=0.0, atol=1e-15)

    def test_preserves_line_multisets(self):
        grid = Grid2D(32, 16, 3.0, 2.0)
        rng = np.random.default_rng(11)
        f = Field(grid, rng.standard_normal(grid.shape))
        out = steiner_symmetrize(f, "x")
        assert np.array_equal(np.sort(out.values, axis=0), np.sort(np.abs(f.values), axis=0))
        assert l2_norm(out) == pytest.approx(l2_norm(f), rel=1e-14)

    def test_twice_symmetrized_bump_is_even(self):
        grid = Grid2D(32, 16, 3.0, 2.0)
        # circular index distances to an off-centre point pair up exactly
        i = np.arange(grid.nx)[:, None] - 21
        j = np.arange(grid.ny)[None, :] - 5
        di = np.minimum(np.abs(i), grid.nx - np.abs(i))
        dj = np.minimum(np.abs(j), grid.ny - np.abs(j))
        moved = Field(grid, np.exp(-(di ** 2 + 2.0 * dj ** 2) / 10.0))
        out = steiner_symmetrize(steiner_symmetrize(moved, Axis.X), Axis.Y)
        report = symmetry_report(out)
        assert report["x_asym"] <= 1e-12
        assert report["y_asym"] <= 1e-12


class TestDecayReport:
    """Transverse exponential, longitudinal algebraic and Fourier decay of the wave."""

    def test_p1_rates(self, wave_p1):
        report = wave_decay_report(wave_p1)
        assert report.y_rate <= -0.8
        assert -2.5 <= report.x_exponent <= -1.5
        assert report.fourier_strip > 0
        assert report.sigma_low > 0

    def test_needs_converged_wave(self, small_grid):
        wave = petviashvili_solve(P1, small_grid, SolverOptions(max_iter=1))
        with pytest.raises(ContractError, match="converged"):
            wave_decay_report(wave)

    def test_contamination_threshold(self, wave_p1):
        with pytest.raises(FitError, match="contamination"):
            wave_decay_report(wave_p1, contamination_threshold=1e-12)
