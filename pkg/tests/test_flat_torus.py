from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diambound import flat_torus as ft
from diambound.suites import random_torus

SQ = ft.FlatTorus((1, 0), (0, 1))
HEX = ft.FlatTorus((1, 0), (0.5, math.sqrt(3) / 2))


def _brute_systole(T, r=20):
    return min(T.length((a, b)) for a in range(-r, r + 1) for b in range(-r, r + 1) if (a, b) != (0, 0))


def test_systole_examples():
    assert ft.systole(SQ) == 1
    assert ft.systole(HEX) == pytest.approx(1)
    assert ft.systole(ft.FlatTorus((10, 0), (0, 0.1))) == pytest.approx(0.1)


def test_degenerate():
    with pytest.raises(ft.DegenerateTorus):
        ft.FlatTorus((1, 2), (2, 4))


def test_short_basis_square():
    B = ft.short_basis(SQ)
    assert (B.X, B.Y, B.y_length) == ((1, 0), (0, 1), 1)
    assert B.y_bound == pytest.approx(2 / math.sqrt(3))


def test_short_basis_hexagonal_tight():
    B = ft.short_basis(HEX)
    assert B.y_length == pytest.approx(1)
    assert B.y_bound == pytest.approx(1)
    assert B.y_length <= B.y_bound + 1e-9


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_short_basis_random(seed):
    T = random_torus(random.Random(seed))
    B = ft.short_basis(T)
    assert abs(ft.intersection(B.X, B.Y)) == 1
    assert B.systole == pytest.approx(_brute_systole(T), rel=1e-9)
    assert B.y_length <= B.y_bound + 1e-9
    assert ft.line_spacing(T) >= math.sqrt(3) / 2 * B.systole - 1e-9


def test_class_coefficients_examples():
    B = ft.short_basis(SQ)
    c = ft.class_coefficients(SQ, B, B.X)
    assert (c.a, c.b) == (1, 0) and c.holds
    c = ft.class_coefficients(SQ, B, (3, 4))
    assert (c.a, c.b) == (3, 4)
    assert c.bound == pytest.approx(10 / math.sqrt(3))
    assert c.holds
    with pytest.raises(ValueError):
        ft.class_coefficients(SQ, B, (0, 0))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32), st.integers(-30, 30), st.integers(-30, 30))
def test_class_coefficients_random(seed, p, q):
    if math.gcd(p, q) != 1:
        return
    T = random_torus(random.Random(seed))
    B = ft.short_basis(T)
    c = ft.class_coefficients(T, B, (p, q))
    assert (c.a * B.X[0] + c.b * B.Y[0], c.a * B.X[1] + c.b * B.Y[1]) == (p, q)
    assert c.holds


def test_intersection_inequality_examples():
    c = ft.intersection_inequality(SQ, (1, 0), (0, 1), (0, 1))
    assert (c.lhs, c.rhs, c.holds) == (0.25, 1, True)
    c = ft.intersection_inequality(HEX, (1, 0), (0, 1), (1, 0))
    assert c.lhs <= 0.5 and c.rhs >= 1
    with pytest.raises(ValueError):
        ft.intersection_inequality(SQ, (1, 0), (2, 0), (0, 1))


def test_covering_index():
    assert ft.covering_index(SQ, (1, 0), (0, 1), 3).index == 1
    c = ft.covering_index(SQ, (2, 0), (0, 3), 6)
    assert c.index == 6 and c.bound == pytest.approx(8 * 36 / 3) and c.holds
    with pytest.raises(ValueError):
        ft.covering_index(SQ, (1, 0), (2, 0), 10)
    with pytest.raises(ValueError):
        ft.covering_index(SQ, (2, 0), (0, 3), 4)


def test_covering_index_random():
    rng = random.Random(4)
    for _ in range(300):
        T = random_torus(rng)
        a = (rng.randint(-5, 5), rng.randint(-5, 5))
        b = (rng.randint(-5, 5), rng.randint(-5, 5))
        if ft.intersection(a, b) == 0:
            continue
        R = T.length(a) + T.length(b) + 1e-6
        c = ft.covering_index(T, a, b, R)
        assert c.index == abs(ft.intersection(a, b))
        assert c.holds


def test_kernel_examples():
    assert ft.kernel_basis([[1, 0, 0], [0, 1, 0]]).vectors == ((0, 0, 1),)
    K = ft.kernel_basis([[1, 0, 1], [0, 1, 1]])
    assert K.vectors in (((1, 1, -1),), ((-1, -1, 1),))
    assert K.bound == 2 and K.holds
    with pytest.raises(ValueError):
        ft.kernel_basis([[1, 2, 3], [2, 4, 6]])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=5, max_size=5), st.lists(st.integers(-9, 9), min_size=5, max_size=5))
def test_kernel_random_2x5(r1, r2):
    g = [r1, r2]
    if all(r1[i] * r2[j] - r1[j] * r2[i] == 0 for i in range(5) for j in range(5)):
        return
    K = ft.kernel_basis(g)
    m = max(map(abs, r1 + r2))
    assert len(K.vectors) == 3
    for s in K.vectors:
        assert sum(a * b for a, b in zip(r1, s)) == 0 == sum(a * b for a, b in zip(r2, s))
        assert max(map(abs, s)) <= 2 * m * m
