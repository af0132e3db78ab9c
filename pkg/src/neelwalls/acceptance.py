"""Acceptance suite: quantitative desk-scale reproductions and property
checks, each with a pinned tolerance.

Every criterion returns a list of named check records; the CLI ``verify``
command prints one pass/fail line per record (measured value next to the
expected value and tolerance) and exits nonzero if anything fails.  The
pytest acceptance module runs the same records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import micromag as mm
from . import potentials as pt
from . import profiles as pf
from . import renorm as rn
from . import specfun as sf
from .geometry import CONFINED, UNCONFINED, WallConfig, wall_charges

__all__ = ["CheckRecord", "SUITES", "run_suite", "run_all"]


@dataclass(frozen=True)
class CheckRecord:
    criterion: str
    name: str
    passed: bool
    measured: float
    expected: float
    tolerance: str

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.criterion} :: {self.name}: "
            f"measured={self.measured:.10g} expected={self.expected:.10g} "
            f"tol={self.tolerance}"
        )


def _record(criterion, name, passed, measured, expected, tolerance) -> CheckRecord:
    return CheckRecord(
        criterion, name, bool(passed), float(measured), float(expected), tolerance
    )


# ---------------------------------------------------------------------------
# 1. special-function suite


def check_specfun() -> list:
    records = []
    offset = sf.kernel_offset()
    records.append(
        _record(
            "specfun",
            "kernel offset equals minus Euler-Mascheroni",
            abs(offset.value + 0.5772156649) <= 1e-8,
            offset.value,
            -0.5772156649,
            "abs 1e-8",
        )
    )
    worst_low, worst_high = 0.0, 0.0
    for t in np.logspace(-4, 1, 40):
        value = sf.kernel(t)
        gap = value.value + math.log(t) - sf.KERNEL_OFFSET
        worst_low = min(worst_low, gap + value.error)
        worst_high = max(worst_high, gap - math.pi * t / 2 - value.error)
    records.append(
        _record(
            "specfun",
            "sandwich lower bound on 40 log-spaced points",
            worst_low >= -1e-12,
            worst_low,
            0.0,
            ">= 0 (quadrature error allowed)",
        )
    )
    records.append(
        _record(
            "specfun",
            "sandwich upper bound on 40 log-spaced points",
            worst_high <= 1e-12,
            worst_high,
            0.0,
            "<= pi t / 2",
        )
    )
    decay = max(
        sf.kernel(t).value - 1.0 / (t * t)
        for t in np.logspace(math.log10(0.1), 2, 25)
    )
    records.append(
        _record(
            "specfun",
            "quadratic decay bound on [0.1, 100]",
            decay <= 1e-12,
            decay,
            0.0,
            "kernel <= 1/t^2",
        )
    )
    worst = max(
        abs(sf.kernel_cosine_form(t).value - sf.kernel(t).value)
        for t in (0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
    )
    records.append(
        _record(
            "specfun",
            "oscillatory representation agreement at 7 points",
            worst <= 1e-6,
            worst,
            0.0,
            "abs 1e-6",
        )
    )
    return records


# ---------------------------------------------------------------------------
# 2. derivative-ratio lemma


def check_ratio() -> list:
    records = []
    ts = np.logspace(-3, 3, 25)
    ratios = [sf.kernel_deriv(2 * t).value / sf.kernel_deriv(t).value for t in ts]
    records.append(
        _record(
            "ratio",
            "ratio strictly decreasing on [1e-3, 1e3]",
            all(a > b for a, b in zip(ratios, ratios[1:])),
            float(np.min(np.diff(ratios))),
            0.0,
            "monotone",
        )
    )
    records.append(
        _record(
            "ratio",
            "limit 1/2 at small argument",
            abs(ratios[0] - 0.5) <= 0.01,
            ratios[0],
            0.5,
            "rel 2%",
        )
    )
    records.append(
        _record(
            "ratio",
            "limit 1/8 at large argument",
            abs(ratios[-1] - 0.125) <= 0.0025,
            ratios[-1],
            0.125,
            "rel 2%",
        )
    )
    worst = 0.0
    for t in (0.05, 0.3, 1.0, 4.0, 20.0):
        q = sf.kernel_deriv(2 * t).value / sf.kernel_deriv(t).value
        t_back = sf.deriv_ratio_root(q)
        worst = max(worst, abs(t_back - t) / t)
    records.append(
        _record(
            "ratio",
            "root-find round trip",
            worst <= 1e-6,
            worst,
            0.0,
            "rel 1e-6",
        )
    )
    return records


# ---------------------------------------------------------------------------
# 3. cross-term identity


def check_crossterm() -> list:
    records = []
    for b in (0.25, 0.5, 1.0, 2.0, 5.0, 10.0):
        total = pt.cross_term(b)
        reference = math.pi * sf.kernel(b).value
        rel = abs(total - reference) / abs(reference)
        records.append(
            _record(
                "crossterm",
                f"gradient + boundary = pi K(b) at b={b}",
                rel <= 1e-5,
                total,
                reference,
                "rel 1e-5",
            )
        )
    return records


# ---------------------------------------------------------------------------
# 4. near-wall energy


def check_nearwall() -> list:
    records = []
    boundary = pt.boundary_trace_square_integral()
    records.append(
        _record(
            "nearwall",
            "boundary trace square integral",
            abs(boundary - math.pi) <= 1e-4,
            boundary,
            math.pi,
            "abs 1e-4",
        )
    )
    target = math.pi * sf.KERNEL_OFFSET
    value = pt.near_wall_energy([0.2, 0.1, 0.05])
    records.append(
        _record(
            "nearwall",
            "extrapolated excision limit",
            abs(value - target) / abs(target) <= 0.05,
            value,
            target,
            "rel 5%",
        )
    )
    return records


# ---------------------------------------------------------------------------
# 5. sign relation between tail energy and renormalised energy


def check_signrelation() -> list:
    records = []
    configs = [
        WallConfig(UNCONFINED, [0.0], [1], math.pi / 2),
        WallConfig(UNCONFINED, [0.0, 1.0], [1, -1], math.pi / 2),
    ]
    radii = [0.05, 0.02, 0.01, 0.005]
    for config in configs:
        numeric = pt.tail_energy_unconfined(config, radii)
        expected = -rn.energy_unconfined(config).total
        rel = abs(numeric - expected) / abs(expected)
        records.append(
            _record(
                "signrelation",
                f"tail energy = -W for N={config.n_walls}",
                rel <= 0.05,
                numeric,
                expected,
                "rel 5%",
            )
        )
    return records


# ---------------------------------------------------------------------------
# 6. renormalised-energy landscape


def check_landscape() -> list:
    records = []
    for n, positions in ((2, [-0.3, 0.6]), (3, [-0.5, 0.1, 0.6])):
        config = WallConfig(
            CONFINED, positions, pf.alternating_signs(n, 1), math.pi / 2
        )
        report = rn.minimise(config)
        records.append(
            _record(
                "landscape",
                f"confined N={n} interior minimum",
                report.status == "converged" and report.grad_norm <= 1e-8,
                report.grad_norm,
                0.0,
                "grad <= 1e-8",
            )
        )
    # small transition angle, leading sign -1: unbounded below
    config = WallConfig(CONFINED, [-0.5, 0.0, 0.5], [-1, 1, -1], 0.2)
    report = rn.minimise(config)
    rows = rn.scan_path(
        config, rn.block_collapse_path(config.a, 1, 3), np.logspace(0, -9, 10)
    )
    values = [w for _, w in rows]
    monotone_down = all(a > b for a, b in zip(values, values[1:]))
    records.append(
        _record(
            "landscape",
            "confined N=3 alpha=0.2 diverges along collapse path",
            report.status == "diverging-to--inf" and monotone_down,
            values[-1],
            -math.inf,
            "status + monotone decrease",
        )
    )
    # unique equidistant critical point of the three-wall unconfined model
    alpha = math.acos(-0.5)
    found = rn.equidistant_critical_point(alpha, [1, -1, 1])
    grad_norm = float(np.max(np.abs(found[2].gradient))) if found else math.inf
    records.append(
        _record(
            "landscape",
            "unconfined N=3 equidistant critical point",
            found is not None and grad_norm <= 1e-6,
            grad_norm,
            0.0,
            "grad <= 1e-6",
        )
    )
    reports = rn.minimise_multistart(
        WallConfig(UNCONFINED, [0.0, 1.0, 2.0], [1, -1, 1], alpha),
        n_starts=8,
        seed=7,
    )
    records.append(
        _record(
            "landscape",
            "unconfined N=3 multi-start never converges",
            all(r.status != "converged" for r in reports),
            sum(r.status == "converged" for r in reports),
            0.0,
            "no converged runs",
        )
    )
    # even wall count: walls spread, no stationary point
    even = WallConfig(
        UNCONFINED, [0.0, 1.0, 2.0, 3.0], pf.alternating_signs(4, 1), math.pi / 2
    )
    report = rn.minimise(even)
    centred = even.a - even.a.mean()
    rows = rn.scan_path(even, rn.dilation_path(centred), [1.0, 2.0, 4.0, 8.0, 16.0])
    values = [w for _, w in rows]
    records.append(
        _record(
            "landscape",
            "unconfined even N spreads monotonically",
            report.status == "no-critical-point"
            and all(a > b for a, b in zip(values, values[1:])),
            values[-1] - values[0],
            0.0,
            "monotone decrease, no critical point",
        )
    )
    return records


# ---------------------------------------------------------------------------
# 7. attraction / repulsion signs


def check_signs() -> list:
    records = []
    base = np.array([-0.3, 0.1, 0.45])
    for model in (CONFINED, UNCONFINED):
        alternating = WallConfig(model, base, [1, -1, 1], 1.4)
        shrunk = WallConfig(model, rn.shrink_gap(base, 1, 0.5), [1, -1, 1], 1.4)
        delta_repulsive = (
            rn.renormalised_energy(shrunk).total
            - rn.renormalised_energy(alternating).total
        )
        records.append(
            _record(
                "signs",
                f"{model}: opposite-sign gap halved raises W",
                delta_repulsive > 0,
                delta_repulsive,
                0.0,
                "> 0",
            )
        )
        same = WallConfig(model, base, [1, 1, -1], 1.4)
        shrunk_same = WallConfig(model, rn.shrink_gap(base, 0, 0.5), [1, 1, -1], 1.4)
        delta_attractive = (
            rn.renormalised_energy(shrunk_same).total
            - rn.renormalised_energy(same).total
        )
        records.append(
            _record(
                "signs",
                f"{model}: same-sign gap halved lowers W",
                delta_attractive < 0,
                delta_attractive,
                0.0,
                "< 0",
            )
        )
    return records


# ---------------------------------------------------------------------------
# 8. stray-energy oracle equivalence


def check_oracle() -> list:
    records = []
    rng = np.random.default_rng(2024)
    grid = mm.Grid1D(-20.0, 20.0, 2048)
    x = grid.nodes()
    worst = 0.0
    for _ in range(20):
        f = np.zeros_like(x)
        for _ in range(int(rng.integers(1, 4))):
            centre = rng.uniform(-5, 5)
            width = rng.uniform(0.5, 2.0)
            f += rng.uniform(0.3, 1.5) * np.exp(-(((x - centre) / width) ** 2))
        spectral = mm.stray_energy_spectral(f, grid.h, 4)
        double = mm.stray_energy_double_integral(f, x)
        worst = max(worst, abs(spectral - double) / spectral)
    records.append(
        _record(
            "oracle",
            "spectral vs double integral on 20 smooth profiles",
            worst <= 0.01,
            worst,
            0.0,
            "rel 1%",
        )
    )
    wide = mm.Grid1D(-30.0, 30.0, 4096)
    f = np.exp(-np.abs(wide.nodes()))
    for label, value in (
        ("spectral", mm.stray_energy_spectral(f, wide.h, 4)),
        ("double integral", mm.stray_energy_double_integral(f, wide.nodes())),
    ):
        records.append(
            _record(
                "oracle",
                f"exp(-|x|) seminorm^2 = 2/pi ({label})",
                abs(2.0 * value - 2.0 / math.pi) / (2.0 / math.pi) <= 0.01,
                2.0 * value,
                2.0 / math.pi,
                "rel 1%",
            )
        )
    return records


# ---------------------------------------------------------------------------
# 9. full-energy expansion (slow: minutes at production resolution)


def check_expansion(n_nodes: int = 2**14, max_iter: int = 12000) -> list:
    records = []
    eps_list = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
    template = mm.SimulationParams(
        epsilon=1e-2,
        model=CONFINED,
        n_nodes=n_nodes,
        grad_tol=3e-9,
        max_iter=max_iter,
    )
    fits = {}
    for position in (0.0, 0.5):
        config = WallConfig(CONFINED, [position], [1], math.pi / 2)
        fits[position] = mm.expansion_fit(config, eps_list, template)
    leading = fits[0.0].leading
    records.append(
        _record(
            "expansion",
            "leading coefficient vs pi/2",
            abs(leading - math.pi / 2) / (math.pi / 2) <= 0.15,
            leading,
            math.pi / 2,
            "rel 15%",
        )
    )
    records.append(
        _record(
            "expansion",
            "leading coefficient independent of position",
            abs(fits[0.5].leading - leading) / (math.pi / 2) <= 0.05,
            fits[0.5].leading,
            leading,
            "rel 5% of pi/2",
        )
    )
    w_diff = (
        rn.energy_confined(WallConfig(CONFINED, [0.0], [1], math.pi / 2)).total
        - rn.energy_confined(WallConfig(CONFINED, [0.5], [1], math.pi / 2)).total
    )
    b_diff = fits[0.0].second - fits[0.5].second
    records.append(
        _record(
            "expansion",
            "second-coefficient difference vs W difference",
            abs(b_diff - w_diff) / abs(w_diff) <= 0.30,
            b_diff,
            w_diff,
            "rel 30%",
        )
    )
    return records


# ---------------------------------------------------------------------------
# 10. step-function profiles


def check_profiles() -> list:
    records = []
    alpha = math.pi / 4
    step = pf.StepFunction(alpha, -alpha, [0.0], [2 * math.pi])
    records.append(
        _record(
            "profiles",
            "full-turn jump decomposes into two atoms",
            pf.wall_count(step) == 2,
            pf.wall_count(step),
            2,
            "exact",
        )
    )
    expected = 1.5 * math.pi
    records.append(
        _record(
            "profiles",
            "full-turn limit energy at alpha=pi/4",
            abs(pf.limit_energy(step) - expected) <= 1e-12,
            pf.limit_energy(step),
            expected,
            "abs 1e-12",
        )
    )
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 6))
        alpha = float(rng.uniform(0.05, math.pi - 0.05))
        locations = np.sort(rng.uniform(-1, 1, size=n))
        while np.any(np.diff(locations) <= 1e-6):
            locations = np.sort(rng.uniform(-1, 1, size=n))
        signs = rng.choice([-1, 1], size=n)
        value = -alpha
        sizes = []
        for sign in signs:
            on_minus = abs(math.remainder(value + alpha, 2 * math.pi)) < 1e-9
            if sign == 1:
                size = 2 * alpha if on_minus else -2 * alpha
            else:
                size = 2 * (math.pi - alpha) if not on_minus else -2 * (math.pi - alpha)
            sizes.append(size)
            value += size
        step = pf.StepFunction(alpha, -alpha, locations, np.asarray(sizes))
        profile = pf.transition_profile(step)
        config = WallConfig(UNCONFINED, profile.a, profile.d, alpha)
        target = 0.5 * math.pi * wall_charges(config).total_square
        worst = max(worst, abs(pf.limit_energy(step) - target))
    records.append(
        _record(
            "profiles",
            "limit energy equals (pi/2) sum of squared charges (100 random)",
            worst <= 1e-12,
            worst,
            0.0,
            "abs 1e-12",
        )
    )
    return records


# ---------------------------------------------------------------------------
# 11. potentials validity


def check_potentials() -> list:
    records = []
    v_field = lambda x1, x2: pt._G(x1 + 1j * x2).real
    u_field = lambda x1, x2: -pt._G(x1 + 1j * x2).imag
    u_conf = lambda x1, x2: math.pi / 2 - pt._conf_w(x1 + 1j * x2).imag
    residuals = {
        "harmonicity of v (unconfined)": pt.harmonicity_residual(
            v_field, (0.5, 2.0), (0.5, 2.0), 1e-3
        ),
        "harmonicity of u (unconfined)": pt.harmonicity_residual(
            u_field, (0.5, 2.0), (0.5, 2.0), 1e-3
        ),
        "harmonicity of u (confined)": pt.harmonicity_residual(
            u_conf, (0.2, 0.7), (0.2, 0.7), 1e-3
        ),
        "conjugacy of the unconfined pair": pt.conjugacy_residual(
            u_field, v_field, (0.5, 2.0), (0.5, 2.0), 1e-3
        ),
    }
    for name, value in residuals.items():
        records.append(
            _record("potentials", name, value <= 1e-3, value, 0.0, "<= 1e-3")
        )
    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(100):
        x1 = rng.uniform(-3, 3)
        x2 = rng.uniform(1e-3, 3)
        worst = max(worst, abs(pt.stray_potential(x1, x2).value))
        worst = max(worst, abs(pt.stray_potential_confined(x1, x2).value))
    records.append(
        _record(
            "potentials",
            "stray potentials bounded by pi/2",
            worst <= math.pi / 2 + 1e-12,
            worst,
            math.pi / 2,
            "<= pi/2",
        )
    )
    offsets = []
    for r in (0.1, 0.03, 0.01):
        value = pt.dirichlet_annulus(CONFINED, 0.0, r, 1.0)
        leading = math.pi * math.log(1.0 / r)
        upper_ok = value <= leading + 0.5 * math.pi * math.log(76.0)
        offsets.append(value - leading)
        records.append(
            _record(
                "potentials",
                f"confined annulus band at r={r}",
                upper_ok,
                value,
                leading,
                "within [leading - C, leading + (pi/2) log 76]",
            )
        )
    records.append(
        _record(
            "potentials",
            "confined annulus additive constant stable",
            max(offsets) - min(offsets) <= 0.2,
            max(offsets) - min(offsets),
            0.0,
            "drift <= 0.2",
        )
    )
    return records


SUITES: dict = {
    "specfun": check_specfun,
    "ratio": check_ratio,
    "crossterm": check_crossterm,
    "nearwall": check_nearwall,
    "signrelation": check_signrelation,
    "landscape": check_landscape,
    "signs": check_signs,
    "oracle": check_oracle,
    "expansion": check_expansion,
    "profiles": check_profiles,
    "potentials": check_potentials,
}


def run_suite(name: str, **kwargs) -> list:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kwargs)


def run_all(skip: Optional[set] = None, printer: Optional[Callable] = None) -> list:
    records = []
    for name, check in SUITES.items():
        if skip and name in skip:
            continue
        for record in check():
            records.append(record)
            if printer:
                printer(record.line())
    return records
