import math
import warnings

import numpy as np
import pytest

from neelwalls import micromag as mm
from neelwalls import potentials as pt
from neelwalls.errors import DomainError
from neelwalls.geometry import CONFINED, UNCONFINED, WallConfig


def wide_grid(n=2048, half=20.0):
    return mm.Grid1D(-half, half, n)


class TestGridAndTypes:
    def test_spacing(self):
        grid = mm.Grid1D(0.0, 1.0, 101)
        assert grid.h == pytest.approx(0.01)
        assert grid.nodes()[0] == 0.0 and grid.nodes()[-1] == 1.0

    def test_minimum_size(self):
        with pytest.raises(DomainError):
            mm.Grid1D(0.0, 1.0, 8)

    def test_params_delta(self):
        params = mm.SimulationParams(epsilon=1e-3)
        assert params.delta == pytest.approx(1e-3 * math.log(1e3), rel=1e-14)

    def test_params_validation(self):
        with pytest.raises(DomainError):
            mm.SimulationParams(epsilon=0.0)
        with pytest.raises(DomainError):
            mm.SimulationParams(epsilon=0.5, model="bogus")

    def test_unit_length_by_construction(self):
        grid = wide_grid(64)
        profile = mm.MagnetizationProfile(grid, np.linspace(0, 7, 64))
        assert np.allclose(profile.m1**2 + profile.m2**2, 1.0)

    def test_breakdown_total(self):
        b = mm.EnergyBreakdown(1.0, 0.5, 0.25)
        assert b.total == 1.75
        with pytest.raises(DomainError):
            mm.EnergyBreakdown(-0.1, 0.0, 0.0)


class TestExchangeEnergy:
    def test_constant_profile(self):
        grid = wide_grid(128)
        profile = mm.MagnetizationProfile(grid, np.full(128, 0.3))
        assert mm.exchange_energy(profile, 1e-2) == 0.0

    def test_linear_ramp(self):
        grid = mm.Grid1D(0.0, 2.0, 201)
        rise = 1.5
        profile = mm.MagnetizationProfile(grid, rise * grid.nodes() / 2.0)
        expected = 0.5 * 1e-2 * rise**2 / 2.0
        assert mm.exchange_energy(profile, 1e-2) == pytest.approx(expected, rel=1e-12)

    def test_refinement_converges_quadratically(self):
        values = []
        for n in [256, 512, 1024]:
            grid = mm.Grid1D(-8.0, 8.0, n)
            profile = mm.MagnetizationProfile(grid, np.tanh(grid.nodes()))
            values.append(mm.exchange_energy(profile, 1.0))
        err1 = abs(values[0] - values[2])
        err2 = abs(values[1] - values[2])
        assert err2 < err1 / 2.0


class TestAnisotropyEnergy:
    def test_ground_state(self):
        grid = wide_grid(128)
        alpha = 1.1
        profile = mm.MagnetizationProfile(grid, np.full(128, alpha))
        assert mm.anisotropy_energy(profile, alpha) == pytest.approx(0.0)

    def test_bump(self):
        # m1 - cos(alpha) = indicator-like bump of height 1 and width w
        grid = mm.Grid1D(-10.0, 10.0, 4001)
        alpha = math.pi / 2
        w = 2.0
        phi = np.where(np.abs(grid.nodes()) < w / 2, 0.0, alpha)
        profile = mm.MagnetizationProfile(grid, phi)
        assert mm.anisotropy_energy(profile, alpha) == pytest.approx(w / 2, rel=0.01)

    def test_rejected_for_confined(self):
        grid = wide_grid(64)
        profile = mm.MagnetizationProfile(grid, np.zeros(64))
        with pytest.raises(DomainError):
            mm.anisotropy_energy(profile, 1.0, model=CONFINED)


class TestStrayEvaluators:
    def test_zero_data(self):
        grid = wide_grid(256)
        assert mm.stray_energy_spectral(np.zeros(256), grid.h) == 0.0
        assert mm.stray_energy_double_integral(np.zeros(256), grid.nodes()) == 0.0

    def test_exponential_profile_both_routes(self):
        grid = mm.Grid1D(-30.0, 30.0, 4096)
        f = np.exp(-np.abs(grid.nodes()))
        spectral = mm.stray_energy_spectral(f, grid.h, 4)
        double = mm.stray_energy_double_integral(f, grid.nodes())
        assert spectral == pytest.approx(1.0 / math.pi, rel=0.01)
        assert double == pytest.approx(1.0 / math.pi, rel=0.01)

    def test_gaussian_analytic(self):
        # ||e^{-x^2}||^2 = 1, energy 1/2
        grid = wide_grid(2048)
        f = np.exp(-grid.nodes() ** 2)
        assert mm.stray_energy_double_integral(f, grid.nodes()) == pytest.approx(
            0.5, rel=0.01
        )

    def test_oracle_equivalence_on_random_smooth_profiles(self):
        rng = np.random.default_rng(42)
        grid = wide_grid(2048)
        x = grid.nodes()
        for _ in range(20):
            f = np.zeros_like(x)
            for _ in range(int(rng.integers(1, 4))):
                centre = rng.uniform(-5, 5)
                width = rng.uniform(0.5, 2.0)
                f += rng.uniform(0.3, 1.5) * np.exp(-(((x - centre) / width) ** 2))
            spectral = mm.stray_energy_spectral(f, grid.h, 4)
            double = mm.stray_energy_double_integral(f, x)
            assert abs(spectral - double) / spectral < 0.01

    def test_symmetries_of_double_integral(self):
        grid = wide_grid(512)
        x = grid.nodes()
        f = np.exp(-((x - 1.0) ** 2))
        value = mm.stray_energy_double_integral(f, x)
        assert mm.stray_energy_double_integral(-f, x) == pytest.approx(value)
        assert mm.stray_energy_double_integral(f[::-1], x) == pytest.approx(value)

    def test_truncation_warning(self):
        grid = wide_grid(256, half=2.0)
        f = np.exp(-np.abs(grid.nodes()))  # e^{-2} at the ends: not decayed
        with pytest.warns(RuntimeWarning):
            mm.stray_energy_spectral(f, grid.h)


class TestStrayPotentialSolve:
    def test_dirichlet_energy_matches_seminorm(self):
        grid = mm.Grid1D(-40.0, 40.0, 4096)
        x = grid.nodes()
        f = np.exp(-np.abs(x))
        heights = np.linspace(0.0, 15.0, 1501)
        v, u = mm.stray_potential_solve(f, grid.h, heights, pad_factor=4)
        dx2 = heights[1] - heights[0]
        vx = np.gradient(v, grid.h, axis=1)
        vy = np.gradient(v, dx2, axis=0)
        energy = np.trapezoid(np.sum(vx**2 + vy**2, axis=1) * grid.h, dx=dx2)
        assert energy == pytest.approx(2.0 / math.pi, rel=0.02)

    def test_boundary_row_reproduces_data(self):
        grid = wide_grid(1024)
        f = np.exp(-(grid.nodes() ** 2))
        v, _ = mm.stray_potential_solve(f, grid.h, np.array([0.0]))
        assert np.max(np.abs(v[0] - f)) < 1e-10

    def test_slice_norms_decay(self):
        grid = wide_grid(1024)
        f = np.exp(-(grid.nodes() ** 2))
        heights = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
        v, _ = mm.stray_potential_solve(f, grid.h, heights)
        norms = np.linalg.norm(v, axis=1)
        assert np.all(np.diff(norms) < 0)

    def test_extension_is_harmonic(self):
        grid = mm.Grid1D(-40.0, 40.0, 8192)
        f = np.exp(-(grid.nodes() ** 2))
        h2 = 4 * grid.h
        heights = np.array([1.0 - h2, 1.0, 1.0 + h2])
        v, _ = mm.stray_potential_solve(f, grid.h, heights)
        mid = slice(2048, 8192 - 2048)
        d2x = (v[1, 2:] - 2 * v[1, 1:-1] + v[1, :-2])[mid] / grid.h**2
        d2y = ((v[0] - 2 * v[1] + v[2])[1:-1])[mid] / h2**2
        scale = np.max(np.abs(d2x)) + np.max(np.abs(d2y))
        assert np.max(np.abs(d2x + d2y)) / scale < 1e-2


class TestTotalEnergy:
    def test_confined_ground_state(self):
        params = mm.SimulationParams(epsilon=1e-2, model=CONFINED, n_nodes=256)
        grid = mm.Grid1D(-1.0, 1.0, 256)
        alpha = 1.0
        profile = mm.MagnetizationProfile(grid, np.full(256, alpha))
        breakdown = mm.total_energy(profile, params, alpha)
        assert breakdown.total == pytest.approx(0.0, abs=1e-15)

    def test_unconfined_ground_state(self):
        params = mm.SimulationParams(
            epsilon=1e-2, model=UNCONFINED, n_nodes=256, truncation_halfwidth=10.0
        )
        grid = mm.Grid1D(-10.0, 10.0, 256)
        alpha = 0.8
        profile = mm.MagnetizationProfile(grid, np.full(256, -alpha))
        breakdown = mm.total_energy(profile, params, alpha)
        assert breakdown.total == pytest.approx(0.0, abs=1e-15)

    def test_single_wall_dominated_by_stray(self):
        cfg = WallConfig(CONFINED, [0.0], [1], math.pi / 2)
        params = mm.SimulationParams(
            epsilon=1e-3, model=CONFINED, n_nodes=2**12, max_iter=4000, grad_tol=1e-8
        )
        report = mm.minimize_energy(cfg, params, record_trace=False)
        assert report.breakdown.total > 0
        ratio = report.breakdown.stray / report.breakdown.exchange
        assert ratio > 0.3 * math.log(1.0 / params.epsilon)


class TestMinimizeEnergy:
    def test_monotone_descent_and_pinning(self):
        cfg = WallConfig(CONFINED, [0.0], [1], math.pi / 2)
        params = mm.SimulationParams(
            epsilon=3e-3, model=CONFINED, n_nodes=2**11, max_iter=2000, grad_tol=1e-8
        )
        init, pinned = mm.initial_profile(cfg, params)
        report = mm.minimize_energy(cfg, params, init, pinned)
        totals = report.trace[:, 4]
        assert np.all(np.diff(totals) <= 1e-14)
        node = int(round((0.0 - init.grid.left) / init.grid.h))
        assert report.profile.phi[node] == init.phi[node]
        assert math.cos(report.profile.phi[node]) == pytest.approx(1.0)

    def test_leading_order_single_wall(self):
        cfg = WallConfig(CONFINED, [0.0], [1], math.pi / 2)
        params = mm.SimulationParams(
            epsilon=1e-3, model=CONFINED, n_nodes=2**12, max_iter=8000, grad_tol=3e-9
        )
        report = mm.minimize_energy(cfg, params, record_trace=False)
        level = report.breakdown.total * math.log(1.0 / params.delta)
        assert abs(level - math.pi / 2) / (math.pi / 2) < 0.25

    def test_attraction_and_repulsion_at_fixed_epsilon(self):
        params = mm.SimulationParams(
            epsilon=1e-3, model=CONFINED, n_nodes=2**12, max_iter=6000, grad_tol=3e-9
        )

        def minimum(positions, signs):
            cfg = WallConfig(CONFINED, positions, signs, math.pi / 2)
            return mm.minimize_energy(cfg, params, record_trace=False).breakdown.total

        assert minimum([-0.05, 0.05], [1, 1]) < minimum([-0.2, 0.2], [1, 1])
        assert minimum([-0.05, 0.05], [1, -1]) > minimum([-0.2, 0.2], [1, -1])

    def test_reflection_symmetry_of_components(self):
        params = mm.SimulationParams(
            epsilon=3e-3, model=UNCONFINED, n_nodes=2**11, truncation_halfwidth=10.0
        )
        cfg = WallConfig(UNCONFINED, [-0.5], [1], 1.2)
        mirrored = cfg.reflected()
        init_a, _ = mm.initial_profile(cfg, params)
        init_b, _ = mm.initial_profile(mirrored, params)
        alpha = cfg.alpha
        e_a = mm.total_energy(init_a, params, alpha)
        e_b = mm.total_energy(init_b, params, alpha)
        assert e_a.exchange == pytest.approx(e_b.exchange, rel=1e-10)
        assert e_a.anisotropy == pytest.approx(e_b.anisotropy, rel=1e-10)
        assert e_a.stray == pytest.approx(e_b.stray, rel=1e-10)

    def test_walls_too_close_rejected(self):
        cfg = WallConfig(CONFINED, [0.0, 1e-4], [1, -1], math.pi / 2)
        params = mm.SimulationParams(epsilon=1e-3, model=CONFINED, n_nodes=256)
        with pytest.raises(DomainError):
            mm.initial_profile(cfg, params)

    def test_model_mismatch_rejected(self):
        cfg = WallConfig(UNCONFINED, [0.0], [1], 1.0)
        params = mm.SimulationParams(epsilon=1e-3, model=CONFINED, n_nodes=256)
        with pytest.raises(DomainError):
            mm.initial_profile(cfg, params)


class TestDilationProperty:
    def test_scaling_lowers_exchange_keeps_stray(self):
        # x -> lambda x with lambda < 1: exchange strictly decreases,
        # the fractional seminorm is scale invariant
        grid = mm.Grid1D(-10.0, 10.0, 2048)
        phi = np.arctan(grid.nodes() / 0.05)
        profile = mm.MagnetizationProfile(grid, phi)
        stretched = mm.MagnetizationProfile(mm.Grid1D(-20.0, 20.0, 2048), phi)
        assert mm.exchange_energy(stretched, 1e-3) < mm.exchange_energy(profile, 1e-3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            s1 = mm.stray_energy_spectral(profile.m1, grid.h, 4)
            s2 = mm.stray_energy_spectral(stretched.m1, stretched.grid.h, 4)
        assert s2 == pytest.approx(s1, rel=1e-12)


class TestExpansionFit:
    def test_leading_coefficient_small_scale(self):
        # coarse, fast variant of the production fit: A within 20% here
        cfg = WallConfig(CONFINED, [0.0], [1], math.pi / 2)
        template = mm.SimulationParams(
            epsilon=1e-2, model=CONFINED, n_nodes=2**12, max_iter=8000, grad_tol=3e-9
        )
        fit = mm.expansion_fit(cfg, [1e-2, 3e-3, 1e-3, 3e-4], template)
        assert abs(fit.leading - math.pi / 2) / (math.pi / 2) < 0.2

    def test_needs_enough_epsilons(self):
        cfg = WallConfig(CONFINED, [0.0], [1], math.pi / 2)
        template = mm.SimulationParams(epsilon=1e-2, model=CONFINED, n_nodes=256)
        with pytest.raises(DomainError):
            mm.expansion_fit(cfg, [1e-2, 1e-3], template)


class TestCsv:
    def test_round_trip_files(self, tmp_path):
        grid = mm.Grid1D(-1.0, 1.0, 32)
        profile = mm.MagnetizationProfile(grid, np.linspace(-1, 1, 32))
        path = tmp_path / "profile.csv"
        mm.profile_to_csv(profile, path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "x,phi,m1,m2"
        assert len(rows) == 33
        trace = np.array([[0, 1.0, 0.0, 2.0, 3.0], [1, 0.5, 0.0, 1.0, 1.5]])
        tpath = tmp_path / "trace.csv"
        mm.trace_to_csv(trace, tpath)
        assert tpath.read_text().startswith("iteration,exchange")
