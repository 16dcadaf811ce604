"""Randomized property suites checked against brute-force oracles.

Each suite returns a :class:`SuiteResult`; the ``oracle`` CLI subcommand
and the acceptance tests run them with fixed seeds.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import abelian_bound as ab
from . import flat_torus as ft
from . import hyp3
from . import metric_graph as mg
from . import presentation as pres
from . import scenarios
from .handle_complex import boundary_certificate, make_good, strips, zero_handle_loops


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str) -> None:
        if len(self.failures) < 20:
            self.failures.append(msg)

    def line(self, timing: bool = True) -> str:
        status = "PASS" if self.passed else "FAIL"
        when = f" in {self.seconds:.2f}s" if timing else ""
        tail = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"{status} {self.name}: {self.cases} cases{when}{tail}"


def _timed(fn: Callable[[SuiteResult], None], name: str) -> SuiteResult:
    res = SuiteResult(name)
    t = time.perf_counter()
    fn(res)
    res.seconds = time.perf_counter() - t
    return res


# -- presentations ------------------------------------------------------------


def random_presentation(rng: random.Random, max_gens: int = 5, max_len: int = 12) -> pres.Presentation:
    n = rng.randint(1, max_gens)
    names = tuple("abcde"[:n])
    rels = []
    for _ in range(rng.randint(0, 4)):
        w = pres.free_reduce((rng.randrange(n), rng.choice((1, -1))) for _ in range(rng.randint(1, max_len)))
        if w:
            rels.append(w)
    return pres.Presentation(names, tuple(rels))


def triangularization_suite(count: int = 200, seed: int = 0) -> SuiteResult:
    rng = random.Random(seed)

    def body(res):
        for _ in range(count):
            P = random_presentation(rng)
            Q = pres.triangularize(P)
            res.cases += 1
            if not Q.is_triangular():
                res.fail(f"{P} -> {Q} is not triangular")
            if Q.length > 3 * P.length:
                res.fail(f"{P}: length {Q.length} > 3 * {P.length}")
            before = ab.presented_group(pres.abelianization_matrix(P), P.generator_count)
            after = ab.presented_group(pres.abelianization_matrix(Q), Q.generator_count)
            if before != after:
                res.fail(f"{P}: abelianization {before} became {after}")

    return _timed(body, "triangularization")


# -- flat tori ----------------------------------------------------------------


def random_torus(rng: random.Random, max_condition: float = 50.0) -> ft.FlatTorus:
    while True:
        u = (rng.uniform(-3, 3), rng.uniform(-3, 3))
        v = (rng.uniform(-3, 3), rng.uniform(-3, 3))
        M = np.array([u, v])
        if abs(np.linalg.det(M)) < 1e-6:
            continue
        if np.linalg.cond(M) <= max_condition:
            return ft.FlatTorus(u, v)


_R = 50
_GRID = np.stack(np.meshgrid(np.arange(-_R, _R + 1), np.arange(-_R, _R + 1), indexing="ij"), -1).reshape(-1, 2)
_GRID = _GRID[(_GRID != 0).any(axis=1)]


def _grid_lengths(T: ft.FlatTorus) -> np.ndarray:
    B = np.array([T.u, T.v], dtype=float)
    return np.linalg.norm(_GRID @ B, axis=1)


def short_basis_suite(count: int = 1000, seed: int = 1) -> SuiteResult:
    rng = random.Random(seed)

    def body(res):
        for _ in range(count):
            T = random_torus(rng)
            B = ft.short_basis(T)
            lengths = _grid_lengths(T)
            res.cases += 1
            if abs(ft.intersection(B.X, B.Y)) != 1:
                res.fail(f"{T}: |D(X, Y)| != 1")
            sys_brute = lengths.min()
            if abs(B.systole - sys_brute) > 1e-9 * sys_brute:
                res.fail(f"{T}: systole {B.systole} vs enumeration {sys_brute}")
            if B.y_length > B.y_bound + 1e-9:
                res.fail(f"{T}: |Y| = {B.y_length} > {B.y_bound}")
            dets = np.abs(B.X[0] * _GRID[:, 1] - B.X[1] * _GRID[:, 0])
            y_brute = lengths[dets == 1].min()
            if abs(B.y_length - y_brute) > 1e-9 * y_brute:
                res.fail(f"{T}: |Y| = {B.y_length} but enumeration finds {y_brute}")
            if ft.line_spacing(T) < math.sqrt(3) / 2 * B.systole - 1e-9:
                res.fail(f"{T}: adjacent lines closer than sqrt(3)/2 * systole")

    return _timed(body, "short basis")


def _random_primitive(rng: random.Random, r: int = 20) -> tuple[int, int]:
    while True:
        a, b = rng.randint(-r, r), rng.randint(-r, r)
        if math.gcd(a, b) == 1:
            return a, b


def coefficient_suite(count: int = 1000, seed: int = 2) -> SuiteResult:
    rng = random.Random(seed)

    def body(res):
        for _ in range(count):
            T = random_torus(rng)
            B = ft.short_basis(T)
            L = _random_primitive(rng)
            cert = ft.class_coefficients(T, B, L)
            res.cases += 1
            back = (cert.a * B.X[0] + cert.b * B.Y[0], cert.a * B.X[1] + cert.b * B.Y[1])
            if back != L:
                res.fail(f"{L}: a X + b Y = {back}")
            if max(abs(cert.a), abs(cert.b)) > cert.bound + 1e-9:
                res.fail(f"{L}: coefficients ({cert.a}, {cert.b}) exceed {cert.bound}")

    return _timed(body, "class coefficients")


def inequality_suite(count: int = 1000, seed: int = 3) -> SuiteResult:
    rng = random.Random(seed)

    def body(res):
        while res.cases < count:
            T = random_torus(rng)
            A = (rng.randint(-10, 10), rng.randint(-10, 10))
            Bc = (rng.randint(-10, 10), rng.randint(-10, 10))
            mu = (rng.randint(-10, 10), rng.randint(-10, 10))
            if ft.intersection(A, Bc) == 0 or mu == (0, 0):
                continue
            res.cases += 1
            lhs = 0.5 * T.length(mu) / (T.length(A) + T.length(Bc))
            rhs = max(abs(mu[0] * A[1] - mu[1] * A[0]), abs(mu[0] * Bc[1] - mu[1] * Bc[0]))
            cert = ft.intersection_inequality(T, A, Bc, mu)
            if abs(cert.lhs - lhs) > 1e-12 or cert.rhs != rhs:
                res.fail(f"{A}, {Bc}, {mu}: certificate sides disagree with direct evaluation")
            if lhs > rhs + 1e-9:
                res.fail(f"{A}, {Bc}, {mu}: {lhs} > {rhs}")

    return _timed(body, "intersection inequality")


def kernel_suite(count: int = 500, seed: int = 10) -> SuiteResult:
    import sympy as sp

    rng = random.Random(seed)

    def body(res):
        while res.cases < count:
            n = rng.randint(2, 6)
            g = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(2)]
            if sp.Matrix(g).rank() < 2:
                continue
            res.cases += 1
            K = ft.kernel_basis(g)
            m = max(abs(x) for row in g for x in row)
            if len(K.vectors) != n - 2:
                res.fail(f"{g}: {len(K.vectors)} vectors, expected {n - 2}")
            for s in K.vectors:
                if any(sum(r[k] * s[k] for k in range(n)) for r in g):
                    res.fail(f"{g}: g * {s} != 0")
                if max(map(abs, s)) > 2 * m * m:
                    res.fail(f"{g}: {s} exceeds 2 * {m}^2")
            if K.vectors and sp.Matrix(K.vectors).rank() != n - 2:
                res.fail(f"{g}: kernel vectors are dependent")

    return _timed(body, "kernel basis")


# -- graphs -------------------------------------------------------------------


def brute_force_girth(G: mg.MetricGraph):
    """Shortest simple cycle by enumerating edge subsets (at most ~12 edges)."""
    best = math.inf
    m = G.edge_count
    for mask in range(1, 1 << m):
        sub = [G.edges[k] for k in range(m) if mask >> k & 1]
        deg: dict[int, int] = {}
        for u, v, _ in sub:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        if any(d != 2 for d in deg.values()):
            continue
        verts = sorted(deg)
        index = {v: i for i, v in enumerate(verts)}
        H = mg.MetricGraph(len(verts), tuple((index[u], index[v], ln) for u, v, ln in sub))
        if mg.is_connected(H):
            best = min(best, sum(e[2] for e in sub))
    return best


def graph_rank_suite(count: int = 500, closed_count: int = 200, seed: int = 5) -> SuiteResult:
    rng = random.Random(seed)

    def body(res):
        for i in range(count):
            G = mg.random_graph(rng, max_vertices=6, max_edges=10)
            g = mg.girth(G)
            if i % 5 == 0 and g != brute_force_girth(G):
                res.fail(f"girth {g} disagrees with enumeration {brute_force_girth(G)}")
            eps = Fraction(rng.randint(1, 5), rng.randint(1, 3))
            if g != math.inf:
                G = mg.MetricGraph(G.vertex_count, tuple((u, v, ln * eps / g) for u, v, ln in G.edges))
            N = mg.total_length(G) + Fraction(rng.randint(1, 10), 7)
            cert = mg.rank_bound_certificate(G, N, eps)
            res.cases += 1
            if not cert.rank <= cert.bound:
                res.fail(f"rank {cert.rank} > {cert.bound}")
            pruned = mg.good_subgraph(G)
            if mg.cycle_rank(pruned) != mg.cycle_rank(G) or mg.total_length(pruned) > mg.total_length(G):
                res.fail("leaf pruning changed the rank or grew the length")
        for _ in range(closed_count):
            G = mg.random_closed_connected_graph(rng)
            H = mg.coarse_subdivision(G)
            R = mg.cycle_rank(G)
            res.cases += 1
            if H.edge_count > 3 * (R - 1):
                res.fail(f"{H.edge_count} edges > 3 ({R} - 1)")
            if mg.cycle_rank(H) != R or mg.total_length(H) != mg.total_length(G):
                res.fail("amalgamation changed rank or length")
            if 3 * H.vertex_count > 2 * H.edge_count:
                res.fail("a vertex of valence below 3 survived")

    return _timed(body, "graph rank")


# -- abelian bound ------------------------------------------------------------


def zn_suite(n_max: int = 200, max_k: int = 2, max_entry: int = 12) -> SuiteResult:
    def body(res):
        table = ab.min_length_table(max_k, max_entry)
        rng = random.Random(6)
        for N in range(2, n_max + 1):
            res.cases += 1
            m = table.get(N, math.inf)
            if m is math.inf:
                continue
            if not ab.length_meets_bound(N, m):
                res.fail(f"N={N}: oracle length {m} is below the bound {ab.zn_length_lower_bound(N).primary}")
            if m < ab.zn_length_lower_bound(N).primary - 1e-9:
                res.fail(f"N={N}: float comparison disagrees")
        # the table's minor-gcd test agrees with Smith normal form on samples
        for A in ab._all_matrices(2, 3)[rng.sample(range(7**4), 200)]:
            det = int(round(np.linalg.det(A)))
            g = math.gcd(*map(int, A.ravel()))
            expect = det != 0 and g == 1
            if expect != ab.presents_zn(A.tolist(), abs(det)):
                res.fail(f"{A.tolist()}: minor test and SNF disagree")
        if not ab.zn_length_lower_bound(2).paper_variant > table[2] == 2:
            res.fail("closed form does not exceed the N=2 oracle")

    return _timed(body, "Z_N length bound")


# -- tubes ----------------------------------------------------------------------


def tube_suite() -> SuiteResult:
    def body(res):
        rng = random.Random(7)
        for i in range(1, 101):
            L = i / 10
            core = rng.uniform(0.01, 5)
            T = hyp3.TubeGeometry(L, core)
            expect = 2 * math.cosh(L) / math.sinh(L)
            res.cases += 1
            for got in (hyp3.tube_area_volume_ratio(L), T.boundary_area / T.volume):
                if abs(got - expect) > 1e-12 * expect:
                    res.fail(f"L={L}: ratio {got} vs {expect}")
        for C, ell in ((2.0, 1.0), (3.0, 3.0), (10.0, 6.0), (0.5, 0.2)):
            res.cases += 1
            T = hyp3.TubeGeometry(0.5 * C * ell, 1.0)
            m = hyp3.meridian_lower_bound(C, ell)
            if abs(T.meridian_length - m) > 1e-12 * m:
                res.fail(f"C={C}, l={ell}: meridian {T.meridian_length} vs {m}")

    return _timed(body, "tube geometry")


# -- surgery ------------------------------------------------------------------


def surgery_suite(count: int = 100, seed: int = 8) -> SuiteResult:
    rng = random.Random(seed)
    fixed = [
        scenarios.scripted(),
        scenarios.band(4),
        scenarios.band(3, mobius=True),
        scenarios.band(2, mark="essential"),
        scenarios.h0_pair(),
    ]

    def body(res):
        cases = fixed + [scenarios.random_complex(rng) for _ in range(count - len(fixed))]
        for C in cases:
            res.cases += 1
            D, cert = make_good(C)
            for name, ok in cert.checks().items():
                if not ok:
                    res.fail(f"{name} failed: {cert}")
            if any(D.annotations.get(s.id) != "essential" for s in strips(D)):
                res.fail("an inessential strip survived")
            h0 = {h.id for h in D.of_kind("H0")}
            if any(hid in h0 for loop in zero_handle_loops(D) for hid, _ in loop):
                res.fail("a boundary loop still has a 0-handle edge")
            if not boundary_certificate(D).holds:
                res.fail(f"boundary certificate failed: {boundary_certificate(D)}")

    return _timed(body, "surgery")


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "triangularize": triangularization_suite,
    "short-basis": short_basis_suite,
    "coefficients": coefficient_suite,
    "inequality": inequality_suite,
    "graph": graph_rank_suite,
    "zn": zn_suite,
    "tube": tube_suite,
    "surgery": surgery_suite,
    "kernel": kernel_suite,
}
