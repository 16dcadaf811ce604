"""Lattice toolkit for flat (Euclidean) tori.

A torus is the plane modulo the lattice spanned by ``u`` and ``v``.  Classes
are integer coefficient pairs in that declared basis, and the algebraic
intersection number of two classes is their 2x2 determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

Vec = tuple[float, float]
Cls = tuple[int, int]

_REL_TOL = 1e-12


class DegenerateTorus(ValueError):
    pass


@dataclass(frozen=True)
class FlatTorus:
    u: Vec
    v: Vec

    def __post_init__(self):
        if self.area <= 0 or not math.isfinite(self.area):
            raise DegenerateTorus("basis vectors are parallel")

    @property
    def area(self) -> float:
        return abs(self.u[0] * self.v[1] - self.u[1] * self.v[0])

    def vector(self, c: Sequence[int]) -> Vec:
        a, b = c
        return (a * self.u[0] + b * self.v[0], a * self.u[1] + b * self.v[1])

    def length(self, c: Sequence[int]) -> float:
        return math.hypot(*self.vector(c))


def intersection(x: Sequence[int], y: Sequence[int]) -> int:
    return x[0] * y[1] - x[1] * y[0]


def _dot(p: Vec, q: Vec) -> float:
    return p[0] * q[0] + p[1] * q[1]


def _lagrange_reduce(T: FlatTorus) -> tuple[Cls, Cls]:
    """Gauss-Lagrange reduction; returns coefficient pairs of a reduced basis."""
    b1, b2 = (1, 0), (0, 1)
    if T.length(b1) > T.length(b2):
        b1, b2 = b2, b1
    while True:
        v1, v2 = T.vector(b1), T.vector(b2)
        q = round(_dot(v1, v2) / _dot(v1, v1))
        b2 = (b2[0] - q * b1[0], b2[1] - q * b1[1])
        if T.length(b2) < T.length(b1) * (1 - _REL_TOL):
            b1, b2 = b2, b1
        else:
            return b1, b2


def _sign_normalize(c: Cls) -> Cls:
    a, b = c
    if a < 0 or (a == 0 and b < 0):
        return (-a, -b)
    return c


def _tie_key(c: Cls) -> tuple[int, int, int, int]:
    return (abs(c[1]), abs(c[0]), c[1], c[0])


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= _REL_TOL * max(abs(x), abs(y))


def shortest_vectors(T: FlatTorus) -> list[Cls]:
    """All shortest nonzero classes up to sign, sign-normalized."""
    b1, b2 = _lagrange_reduce(T)
    sys = T.length(b1)
    # in a reduced basis every shortest vector is +-b1, +-b2 or +-(b1 +- b2)
    cands = [b1, b2, (b1[0] + b2[0], b1[1] + b2[1]), (b1[0] - b2[0], b1[1] - b2[1])]
    return sorted({_sign_normalize(c) for c in cands if _close(T.length(c), sys)}, key=_tie_key)


def systole(T: FlatTorus) -> float:
    b1, _ = _lagrange_reduce(T)
    return T.length(b1)


def line_spacing(T: FlatTorus) -> float:
    """Distance between adjacent lifts of the systolic geodesic."""
    return T.area / systole(T)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass(frozen=True)
class ShortBasis:
    X: Cls
    Y: Cls
    systole: float
    y_length: float
    area: float

    @property
    def y_bound(self) -> float:
        return 2 * self.area / (math.sqrt(3) * self.systole)


def short_basis(T: FlatTorus) -> ShortBasis:
    """Systolic class ``X`` and the shortest ``Y`` with ``intersection(X, Y) == 1``.

    ``Y`` is the nearest lattice point on the line adjacent to the lift of
    ``X`` through the origin.  Ties go to the smaller ``(|b|, |a|)``.
    """
    X = shortest_vectors(T)[0]
    a, b = X
    g, s, t = _ext_gcd(a, b)
    assert g == 1
    # a*s + b*t = 1  =>  intersection((a, b), (-t, s)) = 1
    Y0 = (-t, s)
    vx, vy0 = T.vector(X), T.vector(Y0)
    q0 = -_dot(vy0, vx) / _dot(vx, vx)
    best = None
    for q in {math.floor(q0), math.ceil(q0)}:
        Y = (Y0[0] + q * a, Y0[1] + q * b)
        key = (T.length(Y), _tie_key(Y))
        if best is None or key[0] < best[0][0] * (1 - _REL_TOL) or (
            _close(key[0], best[0][0]) and key[1] < best[0][1]
        ):
            best = (key, Y)
    Y = best[1]
    return ShortBasis(X, Y, T.length(X), T.length(Y), T.area)


def to_basis(c: Sequence[int], B: ShortBasis) -> Cls:
    """Coefficients ``(a, b)`` with ``c = a*X + b*Y`` (exact integer change of basis)."""
    det = intersection(B.X, B.Y)
    a = intersection(c, B.Y) // det
    b = intersection(B.X, c) // det
    assert (a * B.X[0] + b * B.Y[0], a * B.X[1] + b * B.Y[1]) == tuple(c)
    return a, b


@dataclass(frozen=True)
class CoefficientCertificate:
    a: int
    b: int
    bound: float

    @property
    def holds(self) -> bool:
        return max(abs(self.a), abs(self.b)) <= self.bound * (1 + 1e-12)


def class_coefficients(
    T: FlatTorus, B: ShortBasis, L: Sequence[int], L_length: float | None = None
) -> CoefficientCertificate:
    if tuple(L) == (0, 0):
        raise ValueError("the zero class is not essential")
    if L_length is None:
        L_length = T.length(L)
    a, b = to_basis(L, B)
    return CoefficientCertificate(a, b, 2 * L_length / (math.sqrt(3) * B.systole))


@dataclass(frozen=True)
class InequalityCertificate:
    lhs: float
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-9


def intersection_inequality(
    T: FlatTorus,
    A: Sequence[int],
    B: Sequence[int],
    mu: Sequence[int],
    lengths: tuple[float, float, float] | None = None,
) -> InequalityCertificate:
    """``mu/(2 (A + B)) <= max(|D(mu, A)|, |D(mu, B)|)`` for geodesic lengths."""
    if intersection(A, B) == 0:
        raise ValueError("A and B must intersect")
    lA, lB, lmu = lengths or (T.length(A), T.length(B), T.length(mu))
    lhs = 0.5 * lmu / (lA + lB)
    rhs = max(abs(intersection(mu, A)), abs(intersection(mu, B)))
    return InequalityCertificate(lhs, rhs)


@dataclass(frozen=True)
class CoveringCertificate:
    index: int
    bound: float

    @property
    def holds(self) -> bool:
        return self.index <= self.bound


def covering_index(
    T: FlatTorus, alpha: Sequence[int], beta: Sequence[int], bound_R: float
) -> CoveringCertificate:
    """Index of the cover in which the lifts of ``alpha`` and ``beta`` generate.

    The index is ``|ad - bc|`` in short-basis coordinates and is certified
    against ``8 R^2 / (3 sys^2)``.
    """
    if intersection(alpha, beta) == 0:
        raise ValueError("alpha and beta are parallel")
    if not T.length(alpha) + T.length(beta) < bound_R:
        raise ValueError("alpha and beta exceed the length budget")
    B = short_basis(T)
    a, b = to_basis(alpha, B)
    c, d = to_basis(beta, B)
    n = abs(a * d - b * c)
    return CoveringCertificate(n, 8 * bound_R**2 / (3 * B.systole**2))


@dataclass(frozen=True)
class KernelBasis:
    vectors: tuple[tuple[int, ...], ...]
    pivot: tuple[int, int]
    bound: int

    @property
    def holds(self) -> bool:
        return all(abs(c) <= self.bound for v in self.vectors for c in v)


def kernel_basis(g: Sequence[Sequence[int]], entry_bound: int | None = None) -> KernelBasis:
    """Kernel vectors of a rank-2 integer ``2 x n`` matrix from column cross products.

    With pivot columns ``i < j`` (the first pair with a nonzero minor), column
    ``k`` contributes the cross product of ``(g[0][i], g[0][j], g[0][k])`` and
    ``(g[1][i], g[1][j], g[1][k])`` placed at positions ``i, j, k``.  The
    ``n - 2`` vectors span the kernel over the rationals; they form an
    integral basis when the pivot minor is a unit.
    """
    if len(g) != 2 or len(g[0]) != len(g[1]):
        raise ValueError("need a 2 x n matrix")
    r1, r2 = [int(x) for x in g[0]], [int(x) for x in g[1]]
    n = len(r1)
    pivot = next(
        ((i, j) for i in range(n) for j in range(i + 1, n) if r1[i] * r2[j] - r1[j] * r2[i]),
        None,
    )
    if pivot is None:
        raise ValueError("every 2x2 minor vanishes; not onto a rank-2 lattice")
    i, j = pivot
    vectors = []
    for k in range(n):
        if k in pivot:
            continue
        s = [0] * n
        s[i] = r1[j] * r2[k] - r1[k] * r2[j]
        s[j] = r1[k] * r2[i] - r1[i] * r2[k]
        s[k] = r1[i] * r2[j] - r1[j] * r2[i]
        vectors.append(tuple(s))
    m = max(abs(x) for x in r1 + r2)
    if entry_bound is not None:
        if m > entry_bound:
            raise ValueError(f"entry {m} exceeds the stated bound {entry_bound}")
        m = entry_bound
    return KernelBasis(tuple(vectors), pivot, 2 * m * m)
