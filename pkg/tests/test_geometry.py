import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neelwalls import geometry as geo
from neelwalls.errors import DomainError

interior = st.floats(min_value=-0.999, max_value=0.999)


def confined(a, d, alpha=math.pi / 2):
    return geo.WallConfig(geo.CONFINED, np.asarray(a), np.asarray(d), alpha)


def unconfined(a, d, alpha=math.pi / 2):
    return geo.WallConfig(geo.UNCONFINED, np.asarray(a), np.asarray(d), alpha)


class TestPseudoDistance:
    def test_zero_first_argument(self):
        for b in [-0.9, -0.2, 0.0, 0.4, 0.99]:
            assert geo.pseudo_distance(0.0, b) == pytest.approx(abs(b))

    def test_coincidence(self):
        assert geo.pseudo_distance(0.37, 0.37) == 0.0

    @given(interior, interior)
    def test_symmetric_and_in_range(self, b, c):
        r = geo.pseudo_distance(b, c)
        assert 0.0 <= r < 1.0
        assert r == pytest.approx(geo.pseudo_distance(c, b))

    @given(interior, interior, interior)
    @settings(max_examples=200)
    def test_mobius_invariance(self, x, y, c):
        lhs = geo.pseudo_distance(geo.mobius(c, x), geo.mobius(c, y))
        assert lhs == pytest.approx(geo.pseudo_distance(x, y), abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            geo.pseudo_distance(1.0, 0.0)
        with pytest.raises(DomainError):
            geo.pseudo_distance(0.0, -1.5)


class TestMobius:
    def test_identity_at_zero(self):
        for z in [0.3, -0.7, 0.1 + 0.4j]:
            assert geo.mobius(0.0, z) == pytest.approx(z)

    def test_sends_minus_b_to_zero(self):
        assert geo.mobius(0.6, -0.6) == pytest.approx(0.0)

    @given(interior, interior, st.floats(min_value=0.0, max_value=10.0))
    @settings(max_examples=200)
    def test_inverse_is_negated_parameter(self, b, x, y):
        z = complex(x, y)
        back = geo.mobius(-b, geo.mobius(b, z))
        assert back == pytest.approx(z, abs=1e-11)

    @given(interior, interior, st.floats(min_value=1e-9, max_value=10.0))
    def test_preserves_upper_half_plane(self, b, x, y):
        assert geo.mobius(b, complex(x, y)).imag > 0

    def test_real_axis_to_real_axis(self):
        assert isinstance(geo.mobius(0.5, 0.25), float)

    def test_pole_rejected(self):
        with pytest.raises(DomainError):
            geo.mobius(0.5, -2.0)


class TestHalfMinGap:
    def test_confined_single_centre_wall(self):
        assert geo.half_min_gap(confined([0.0], [1])) == pytest.approx(1.0)

    def test_confined_two_walls(self):
        assert geo.half_min_gap(confined([-0.5, 0.5], [1, -1])) == pytest.approx(0.5)

    def test_unconfined_three_walls(self):
        assert geo.half_min_gap(unconfined([0.0, 3.0, 4.0], [1, -1, 1])) == 0.5

    def test_unconfined_sentinels(self):
        assert geo.half_min_gap(unconfined([2.0], [1])) == math.inf

    def test_confined_no_walls(self):
        assert geo.half_min_gap(confined([], [])) == math.inf

    def test_appending_far_wall_keeps_gap(self):
        base = unconfined([0.0, 1.0], [1, -1])
        extended = unconfined([0.0, 1.0, 50.0], [1, -1, 1])
        assert geo.half_min_gap(extended) == geo.half_min_gap(base)

    def test_appending_near_wall_shrinks_gap(self):
        extended = unconfined([0.0, 1.0, 1.2], [1, -1, 1])
        assert geo.half_min_gap(extended) == pytest.approx(0.1)


class TestWallCharges:
    def test_right_angle(self):
        ch = geo.wall_charges(confined([-0.2, 0.2], [1, -1], alpha=math.pi / 2))
        assert np.allclose(ch.values, [1.0, -1.0])
        assert ch.total_square == pytest.approx(2.0)

    def test_sixty_degrees(self):
        ch = geo.wall_charges(unconfined([0.0], [1], alpha=math.pi / 3))
        assert np.allclose(ch.values, [0.5])
        assert ch.total_square == pytest.approx(0.25)

    def test_obtuse(self):
        ch = geo.wall_charges(unconfined([0.0], [-1], alpha=2 * math.pi / 3))
        assert np.allclose(ch.values, [-0.5])
        assert ch.total_square == pytest.approx(0.25)

    def test_empty(self):
        ch = geo.wall_charges(confined([], []))
        assert ch.values.size == 0
        assert ch.total_square == 0.0


class TestWallConfigValidation:
    def test_rejects_unsorted(self):
        with pytest.raises(DomainError):
            confined([0.5, -0.5], [1, -1])

    def test_rejects_duplicates(self):
        with pytest.raises(DomainError):
            unconfined([0.0, 0.0], [1, -1])

    def test_rejects_outside_interval(self):
        with pytest.raises(DomainError):
            confined([-1.0, 0.5], [1, -1])

    def test_rejects_bad_signs(self):
        with pytest.raises(DomainError):
            unconfined([0.0], [2])

    def test_rejects_bad_alpha(self):
        with pytest.raises(DomainError):
            confined([0.0], [1], alpha=0.0)
        with pytest.raises(DomainError):
            confined([0.0], [1], alpha=math.pi)

    def test_unconfined_positions_unrestricted(self):
        cfg = unconfined([-5.0, 7.0], [1, -1])
        assert cfg.n_walls == 2

    def test_reflection(self):
        cfg = unconfined([-1.0, 2.0, 3.0], [1, -1, -1])
        r = cfg.reflected()
        assert np.allclose(r.a, [-3.0, -2.0, 1.0])
        assert np.array_equal(r.d, [-1, -1, 1])
