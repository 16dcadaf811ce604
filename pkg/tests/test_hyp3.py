from __future__ import annotations

import math
import random

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from diambound import hyp3
from diambound.hyp3 import HPoint, MargulisConfig, TubeGeometry


def test_distance_examples():
    assert hyp3.distance(HPoint(0, 0, 1), HPoint(0, 0, math.e)) == pytest.approx(1.0, abs=1e-14)
    p = HPoint(0.3, -2, 0.7)
    assert hyp3.distance(p, p) == 0
    assert hyp3.distance(HPoint(0, 0, 1), HPoint(1, 0, 1)) == pytest.approx(math.acosh(1.5), abs=1e-14)


def test_nonpositive_height():
    with pytest.raises(ValueError):
        HPoint(0, 0, 0)


def test_distance_metric_axioms():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        pts = [HPoint(*rng.uniform(-3, 3, 2), rng.uniform(0.05, 5)) for _ in range(3)]
        p, q, r = pts
        dpq = hyp3.distance(p, q)
        assert dpq == pytest.approx(hyp3.distance(q, p), abs=1e-9)
        assert dpq <= hyp3.distance(p, r) + hyp3.distance(r, q) + 1e-9


def _law_of_cosines_angle(opp, s1, s2):
    return math.acos((math.cosh(s1) * math.cosh(s2) - math.cosh(opp)) / (math.sinh(s1) * math.sinh(s2)))


def test_triangle_areas():
    assert hyp3.ideal_triangle_area((0, 0, 0)) == pytest.approx(math.pi)
    d = 0.01
    third = math.pi / 3
    assert hyp3.ideal_triangle_area((third, third, third - d)) == pytest.approx(d, abs=1e-12)
    A = _law_of_cosines_angle(1, 1, 1)
    assert hyp3.ideal_triangle_area(hyp3.triangle_angles(1, 1, 1)) == pytest.approx(math.pi - 3 * A, abs=1e-12)
    assert math.pi - 3 * A == pytest.approx(0.3852, abs=1e-4)


def test_triangle_area_errors():
    with pytest.raises(ValueError):
        hyp3.ideal_triangle_area((1, 1, 1.2))


def test_straight_complex_area_bound():
    assert hyp3.straight_complex_area_bound(6) == pytest.approx(2 * math.pi)


def test_ball_volume():
    assert hyp3.ball_volume(1) == pytest.approx(math.pi * (math.sinh(2) - 2))
    assert hyp3.ball_volume(1) == pytest.approx(5.1109, abs=1e-4)
    assert hyp3.ball_volume(0.026) == pytest.approx(7.36e-5, rel=1e-3)
    r = 1e-3
    assert hyp3.ball_volume(r) / (4 / 3 * math.pi * r**3) == pytest.approx(1, abs=1e-4)
    with pytest.raises(ValueError):
        hyp3.ball_volume(0)


def test_ball_volume_against_quadrature():
    from scipy.integrate import quad

    for r in (0.1, 0.5, 2.0):
        val, _ = quad(lambda s: 4 * math.pi * math.sinh(s) ** 2, 0, r)
        assert hyp3.ball_volume(r) == pytest.approx(val, rel=1e-12)


@given(st.floats(0.01, 5), st.floats(0.01, 5))
def test_ball_volume_increasing(a, b):
    if a < b:
        assert hyp3.ball_volume(a) < hyp3.ball_volume(b)


def test_c1():
    cfg = MargulisConfig()
    c1 = hyp3.c1(cfg)
    assert c1 == pytest.approx(2 * 0.104 * (math.pi + 2) / hyp3.ball_volume(0.026))
    assert c1 * hyp3.ball_volume(0.026) == pytest.approx(2 * 0.104 * (math.pi + 2), rel=1e-14)
    assert hyp3.c1(MargulisConfig(0.208)) < c1
    assert hyp3.c1_tight(cfg) == pytest.approx(c1 / 4)


def test_margulis_range():
    with pytest.raises(ValueError):
        MargulisConfig(0.8)
    with pytest.raises(ValueError):
        MargulisConfig(0)


def test_deep_tube():
    assert hyp3.deep_tube_bound(3, 10, c1_value=1.5) == 10
    c1 = hyp3.c1(MargulisConfig())
    assert hyp3.deep_tube_bound(c1 + 1 + 1e-6, 1, c1) > 0
    with pytest.raises(ValueError):
        hyp3.deep_tube_bound(c1, 1, c1)
    assert hyp3.deep_tube_bound_from_volume(10, 2, 1.5) == pytest.approx(3.5)


def test_meridian():
    assert hyp3.meridian_lower_bound(2, 1) == pytest.approx(2 * math.pi * math.sinh(1))
    assert hyp3.meridian_lower_bound(2, 1) == pytest.approx(7.384, abs=1e-3)
    assert hyp3.meridian_lower_bound(1, 1e-9) < 1e-8
    assert hyp3.meridian_lower_bound(100, 100) == math.inf


def test_meridian_predicate_for_c3():
    from diambound.pipeline import solve_R

    c3 = solve_R(bound="closed-form").value("c3")
    assert all(hyp3.meridian_exceeds_short_boundary(c3, ell) for ell in range(1, 10_001))
    assert not hyp3.meridian_exceeds_short_boundary(0.1, 1)


def test_tube_ratio():
    assert hyp3.tube_area_volume_ratio(1) == pytest.approx(2.6260, abs=1e-4)
    assert hyp3.tube_area_volume_ratio(30) == pytest.approx(2, abs=1e-12)
    with pytest.raises(ValueError):
        hyp3.tube_area_volume_ratio(0)


def test_tube_ratio_symbolic():
    s, c, ell = sp.symbols("s c ell", positive=True)
    area = 2 * sp.pi * s * c * ell
    volume = sp.pi * s**2 * ell
    assert sp.simplify(area / volume - 2 * c / s) == 0
    # rational surrogate: cosh^2 - sinh^2 = 1 holds for s = 3/4, c = 5/4
    S, Cc = sp.Rational(3, 4), sp.Rational(5, 4)
    assert Cc**2 - S**2 == 1
    assert (area / volume).subs({s: S, c: Cc}) == 2 * Cc / S


@given(st.floats(0.05, 15), st.floats(0.01, 100))
def test_tube_ratio_random(L, core):
    T = TubeGeometry(L, core)
    assert hyp3.tube_area_volume_ratio(L) * T.volume == pytest.approx(T.boundary_area, rel=1e-12)


def test_find_short_level():
    assert 0 < hyp3.find_short_level([0.5] * 10, 1.0) < 1
    prof = [0.0] * 6 + [2.0] * 4
    s0 = hyp3.find_short_level(prof, 1.0)
    assert s0 < 0.6
    with pytest.raises(ValueError):
        hyp3.find_short_level([3.0] * 5, 1.0)


def test_find_short_level_random_profile():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 40)
        raw = [rng.random() for _ in range(n)]
        A = rng.uniform(0.5, 10)
        prof = [x * 0.9 * A * n / sum(raw) for x in raw]
        s0 = hyp3.find_short_level(prof, A)
        assert prof[int(s0 * n)] < A


def test_whole_ball_quadrature():
    for rho in (0.052, 0.5):
        assert hyp3._ball_volume_in_cone(rho, None) == pytest.approx(hyp3.ball_volume(rho), rel=1e-9)


def test_half_ball_slack_shrinks():
    rho = 0.052
    limit = 0.25 * hyp3.ball_volume(rho)
    shallow, deep, deeper = (hyp3.half_ball_slack(rho, L) for L in (0.5, 5, 40))
    assert 0 < deeper < shallow
    assert deep == pytest.approx(deeper, rel=1e-5)
    assert deeper <= limit
    # at shallow radii the ball sticks far out of the thin cone
    assert hyp3.half_ball_slack(rho, 0.01) > limit
