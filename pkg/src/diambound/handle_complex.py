"""Combinatorial handle complexes: the part of a triangulated 2-complex inside a tube.

Each handle sits in one triangle and touches 1, 2 or 3 of its sides
(``H0``, ``H1``, ``Monkey``).  Every touched side is a short interval with
ends 0 and 1.  Handles are glued side to side, either straight (end ``e``
to end ``e``) or twisted (end ``e`` to end ``1 - e``).

Boundary arcs of a handle run between side ends:

* ``H0`` with side ``s``: arc 0 joins ``(s, 0)`` and ``(s, 1)``.
* ``H1`` with sides ``s0, s1``: arc ``e`` joins ``(s0, e)`` and ``(s1, e)``.
* ``Monkey`` with sides ``s0, s1, s2``: arc ``i`` joins ``(s_i, 1)`` and
  ``(s_{i+1}, 0)``.

All lengths are ``Fraction``s so length bookkeeping is exact.

File format, one record per line (``#`` starts a comment)::

    T 4
    P 12                 # optional ambient presentation length, default 3*T
    H 0 H1 0 0 1
    A 0 0 1/2
    A 0 1 3/4
    G 0,1 1,0 twist      # 'twist' is optional
    S 0 inessential
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .metric_graph import MetricGraph, cycle_rank

KINDS = {"H0": 1, "H1": 2, "Monkey": 3}

Side = tuple[int, int]  # (handle id, triangle side)
Endpoint = tuple[int, int, int]  # (handle id, slot, end)


class MalformedComplex(ValueError):
    pass


class ComplexFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SurgeryError(ValueError):
    pass


class MissingAnnotation(ValueError):
    pass


@dataclass(frozen=True)
class Handle:
    id: int
    kind: str
    triangle: int
    sides: tuple[int, ...]
    arcs: tuple[Fraction, ...]

    def slot(self, side: int) -> int:
        try:
            return self.sides.index(side)
        except ValueError:
            raise MalformedComplex(f"handle {self.id} is not attached to side {side}") from None

    def arc_endpoints(self, k: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """``(slot, end)`` pairs joined by arc ``k``."""
        if self.kind == "H0":
            return (0, 0), (0, 1)
        if self.kind == "H1":
            return (0, k), (1, k)
        return (k, 1), ((k + 1) % 3, 0)


@dataclass(frozen=True)
class Gluing:
    a: Side
    b: Side
    twisted: bool = False


@dataclass(frozen=True)
class HandleComplex:
    triangle_count: int
    handles: tuple[Handle, ...]
    gluings: tuple[Gluing, ...] = ()
    annotations: dict[int, str] = field(default_factory=dict)
    ell_p: int | None = None

    def __post_init__(self):
        _validate(self)

    @property
    def ellP(self) -> int:
        return self.ell_p if self.ell_p is not None else 3 * self.triangle_count

    def handle(self, hid: int) -> Handle:
        for h in self.handles:
            if h.id == hid:
                return h
        raise KeyError(hid)

    def of_kind(self, kind: str) -> list[Handle]:
        return [h for h in self.handles if h.kind == kind]


def _validate(C: HandleComplex) -> None:
    if C.triangle_count < 0:
        raise MalformedComplex("negative triangle count")
    ids = [h.id for h in C.handles]
    if len(set(ids)) != len(ids):
        raise MalformedComplex("duplicate handle id")
    by_id = {h.id: h for h in C.handles}
    for h in C.handles:
        if h.kind not in KINDS:
            raise MalformedComplex(f"handle {h.id}: unknown kind {h.kind!r}")
        n = KINDS[h.kind]
        if len(h.sides) != n or len(set(h.sides)) != n or any(s not in (0, 1, 2) for s in h.sides):
            raise MalformedComplex(f"handle {h.id}: a {h.kind} needs {n} distinct sides in 0..2")
        if len(h.arcs) != n:
            raise MalformedComplex(f"handle {h.id}: a {h.kind} has {n} boundary arcs, got {len(h.arcs)}")
        if any(not a > 0 for a in h.arcs):
            raise MalformedComplex(f"handle {h.id}: arc lengths must be positive")
        if not 0 <= h.triangle < C.triangle_count:
            raise MalformedComplex(f"handle {h.id}: triangle {h.triangle} out of range")
    monkey_tris = [h.triangle for h in C.handles if h.kind == "Monkey"]
    if len(set(monkey_tris)) != len(monkey_tris):
        raise MalformedComplex("a triangle holds at most one monkey handle")
    used: set[Side] = set()
    for g in C.gluings:
        for hid, s in (g.a, g.b):
            if hid not in by_id:
                raise MalformedComplex(f"gluing names unknown handle {hid}")
            by_id[hid].slot(s)
        if g.a == g.b:
            raise MalformedComplex(f"side {g.a} glued to itself")
        for sd in (g.a, g.b):
            if sd in used:
                raise MalformedComplex(f"side {sd} used twice")
            used.add(sd)
    for sid, mark in C.annotations.items():
        if mark not in ("essential", "inessential"):
            raise MalformedComplex(f"strip {sid}: bad annotation {mark!r}")


# -- structure -----------------------------------------------------------------


def partners(C: HandleComplex) -> dict[Side, tuple[Side, bool]]:
    out: dict[Side, tuple[Side, bool]] = {}
    for g in C.gluings:
        out[g.a] = (g.b, g.twisted)
        out[g.b] = (g.a, g.twisted)
    return out


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


@dataclass(frozen=True)
class Strip:
    id: int
    handles: tuple[int, ...]
    mobius: bool
    boundary_length: Fraction

    @property
    def kind(self) -> str:
        return "mobius" if self.mobius else "annulus"


def strips(C: HandleComplex) -> list[Strip]:
    """Closed chains of 1-handles, in cyclic order from the smallest id.

    A chain is a Mobius band when it contains an odd number of twisted gluings.
    """
    part = partners(C)
    h1 = {h.id: h for h in C.of_kind("H1")}
    seen: set[int] = set()
    out = []
    for start in sorted(h1):
        if start in seen:
            continue
        chain, twists = [start], 0
        cur, exit_slot = start, 1
        closed = False
        while True:
            here = h1[cur]
            nxt = part.get((cur, here.sides[exit_slot]))
            if nxt is None or nxt[0][0] not in h1:
                break
            (nid, nside), tw = nxt
            twists += tw
            entry = h1[nid].slot(nside)
            if nid == start and entry == 0:
                closed = True
                break
            if nid in chain:
                break
            chain.append(nid)
            cur, exit_slot = nid, 1 - entry
        if not closed:
            continue
        seen.update(chain)
        length = sum((a for hid in chain for a in h1[hid].arcs), start=Fraction(0))
        out.append(Strip(min(chain), tuple(chain), twists % 2 == 1, length))
    return out


def strip_containing(C: HandleComplex, hid: int) -> Strip | None:
    return next((s for s in strips(C) if hid in s.handles), None)


def _side_classes(C: HandleComplex, kinds: Iterable[str] | None = None) -> dict[Side, Side]:
    keep = {h.id for h in C.handles if kinds is None or h.kind in kinds}
    uf = _UnionFind()
    for h in C.handles:
        if h.id in keep:
            for s in h.sides:
                uf.find((h.id, s))
    for g in C.gluings:
        if g.a[0] in keep and g.b[0] in keep:
            uf.union(g.a, g.b)
    return {x: uf.find(x) for x in uf.parent}


def spine(C: HandleComplex, include_monkeys: bool = True) -> MetricGraph:
    """Deformation-retract spine: a node per glued side pair, an edge per 1-handle.

    An ``H1`` edge has the length of its shorter arc.  A monkey becomes a
    trivalent centre joined to its three side nodes by edges of half the
    shorter adjacent arc.  A 0-handle collapses onto its side node.
    """
    kinds = None if include_monkeys else ("H0", "H1")
    cls = _side_classes(C, kinds)
    nodes = {r: i for i, r in enumerate(sorted(set(cls.values())))}
    edges = []
    n = len(nodes)
    for h in C.handles:
        if h.kind == "H1":
            edges.append((nodes[cls[(h.id, h.sides[0])]], nodes[cls[(h.id, h.sides[1])]], min(h.arcs)))
        elif h.kind == "Monkey" and include_monkeys:
            centre = n
            n += 1
            for i, s in enumerate(h.sides):
                edges.append((centre, nodes[cls[(h.id, s)]], min(h.arcs[i - 1], h.arcs[i]) / 2))
    return MetricGraph(n, tuple(edges))


def subcomplex(C: HandleComplex, kinds: Sequence[str]) -> HandleComplex:
    keep = {h.id for h in C.handles if h.kind in kinds}
    return HandleComplex(
        C.triangle_count,
        tuple(h for h in C.handles if h.id in keep),
        tuple(g for g in C.gluings if g.a[0] in keep and g.b[0] in keep),
        {},
        C.ell_p,
    )


@dataclass(frozen=True)
class Boundary:
    graph: MetricGraph
    labels: tuple[tuple[int, int], ...]  # edge index -> (handle id, arc index)
    vertex_of: dict[Endpoint, int]


def _boundary(C: HandleComplex) -> Boundary:
    uf = _UnionFind()
    for h in C.handles:
        for slot in range(len(h.sides)):
            for e in (0, 1):
                uf.find((h.id, slot, e))
    by_id = {h.id: h for h in C.handles}
    for g in C.gluings:
        ha, hb = by_id[g.a[0]], by_id[g.b[0]]
        sa, sb = ha.slot(g.a[1]), hb.slot(g.b[1])
        for e in (0, 1):
            uf.union((ha.id, sa, e), (hb.id, sb, 1 - e if g.twisted else e))
    roots = sorted({uf.find(x) for x in list(uf.parent)})
    index = {r: i for i, r in enumerate(roots)}
    vertex_of = {x: index[uf.find(x)] for x in list(uf.parent)}
    edges, labels = [], []
    for h in C.handles:
        for k, length in enumerate(h.arcs):
            (s0, e0), (s1, e1) = h.arc_endpoints(k)
            edges.append((vertex_of[(h.id, s0, e0)], vertex_of[(h.id, s1, e1)], length))
            labels.append((h.id, k))
    return Boundary(MetricGraph(len(roots), tuple(edges)), tuple(labels), vertex_of)


def boundary_graph(C: HandleComplex) -> MetricGraph:
    """The pull-back boundary: one edge per boundary arc, vertices at identified side ends."""
    return _boundary(C).graph


def boundary_length(C: HandleComplex) -> Fraction:
    return sum((a for h in C.handles for a in h.arcs), start=Fraction(0))


def boundary_cycles(C: HandleComplex) -> list[tuple[tuple[int, int], ...]]:
    """Closed components of the boundary, each as a tuple of ``(handle, arc)`` labels.

    Every boundary vertex has valence at most 2, so a component is a simple
    loop exactly when it has as many edges as vertices.
    """
    B = _boundary(C)
    uf = _UnionFind()
    for v in range(B.graph.vertex_count):
        uf.find(v)
    for u, v, _ in B.graph.edges:
        uf.union(u, v)
    comp_edges: dict[int, list[int]] = {}
    comp_verts: dict[int, int] = {}
    for v in range(B.graph.vertex_count):
        r = uf.find(v)
        comp_verts[r] = comp_verts.get(r, 0) + 1
    for k, (u, _, _) in enumerate(B.graph.edges):
        comp_edges.setdefault(uf.find(u), []).append(k)
    out = []
    for r, ks in sorted(comp_edges.items()):
        if len(ks) == comp_verts[r]:
            out.append(tuple(B.labels[k] for k in ks))
    return out


def zero_handle_loops(C: HandleComplex) -> list[tuple[tuple[int, int], ...]]:
    h0 = {h.id for h in C.of_kind("H0")}
    return [c for c in boundary_cycles(C) if any(hid in h0 for hid, _ in c)]


# -- classification ---------------------------------------------------------------


@dataclass(frozen=True)
class IBundleComponent:
    handles: tuple[int, ...]
    closed: bool  # circle-fibred base (a strip) rather than an interval chain


@dataclass(frozen=True)
class Decomposition:
    h0: tuple[int, ...]
    h1: tuple[int, ...]
    monkeys: tuple[int, ...]
    triangle_count: int
    components: tuple[IBundleComponent, ...]
    base_graph: MetricGraph
    monkey_rank_steps: tuple[int, ...]

    @property
    def monkey_bound_holds(self) -> bool:
        return len(self.monkeys) <= self.triangle_count

    @property
    def monkey_steps_hold(self) -> bool:
        return all(step <= 3 for step in self.monkey_rank_steps)


def classify_handles(C: HandleComplex) -> Decomposition:
    """Partition handles and describe the I-bundle part and its base graph.

    Also adds the monkeys to the I-bundle spine one at a time and records the
    rank increase of each insertion.
    """
    part = partners(C)
    non_monkey = {h.id: h for h in C.handles if h.kind != "Monkey"}
    uf = _UnionFind()
    for hid in non_monkey:
        uf.find(hid)
    for g in C.gluings:
        if g.a[0] in non_monkey and g.b[0] in non_monkey:
            uf.union(g.a[0], g.b[0])
    groups: dict[int, list[int]] = {}
    for hid in sorted(non_monkey):
        groups.setdefault(uf.find(hid), []).append(hid)
    comps = []
    for members in groups.values():
        closed = all(
            non_monkey[m].kind == "H1"
            and all(part.get((m, s), ((None, None), 0))[0][0] in non_monkey for s in non_monkey[m].sides)
            for m in members
        )
        comps.append(IBundleComponent(tuple(members), closed))

    steps = []
    monkeys = sorted(h.id for h in C.of_kind("Monkey"))
    current = subcomplex(C, ("H0", "H1"))
    rank = cycle_rank(spine(current))
    for m in monkeys:
        keep = {h.id for h in current.handles} | {m}
        current = HandleComplex(
            C.triangle_count,
            tuple(h for h in C.handles if h.id in keep),
            tuple(g for g in C.gluings if g.a[0] in keep and g.b[0] in keep),
            {},
            C.ell_p,
        )
        new_rank = cycle_rank(spine(current))
        steps.append(new_rank - rank)
        rank = new_rank
    return Decomposition(
        tuple(h.id for h in C.of_kind("H0")),
        tuple(h.id for h in C.of_kind("H1")),
        tuple(monkeys),
        C.triangle_count,
        tuple(comps),
        spine(C, include_monkeys=False),
        tuple(steps),
    )


@dataclass(frozen=True)
class BoundaryCertificate:
    k1_spine_edges: int
    k1_spine_vertices: int
    k1_boundary_edges: int
    k1_boundary_vertices: int
    attached_edges: int
    attached_bound: int
    boundary_rank: int
    spine_rank: int
    ellP: int

    @property
    def doubling_holds(self) -> bool:
        return (
            self.k1_boundary_edges == 2 * self.k1_spine_edges
            and self.k1_boundary_vertices == 2 * self.k1_spine_vertices
        )

    @property
    def rank_holds(self) -> bool:
        return self.boundary_rank <= self.spine_rank + 6 * self.ellP

    @property
    def holds(self) -> bool:
        return self.doubling_holds and self.attached_edges <= self.attached_bound and self.rank_holds


def boundary_certificate(C: HandleComplex) -> BoundaryCertificate:
    K1 = subcomplex(C, ("H1",))
    S1, B1 = spine(K1), boundary_graph(K1)
    attached = len(C.of_kind("H0")) + 3 * len(C.of_kind("Monkey"))
    return BoundaryCertificate(
        S1.edge_count,
        S1.vertex_count,
        B1.edge_count,
        B1.vertex_count,
        attached,
        6 * C.ellP,
        cycle_rank(boundary_graph(C)),
        cycle_rank(spine(C, include_monkeys=False)),
        C.ellP,
    )


# -- surgeries ----------------------------------------------------------------


def _without(C: HandleComplex, hid: int, annotations: dict[int, str]) -> HandleComplex:
    return replace(
        C,
        handles=tuple(h for h in C.handles if h.id != hid),
        gluings=tuple(g for g in C.gluings if hid not in (g.a[0], g.b[0])),
        annotations=annotations,
    )


def _resolve_strip(C: HandleComplex, strip: int | Strip, h1: int) -> Strip:
    sid = strip.id if isinstance(strip, Strip) else strip
    found = strip_containing(C, sid)
    if found is None:
        raise SurgeryError(f"no strip through handle {sid}")
    if h1 not in found.handles:
        raise SurgeryError(f"handle {h1} is not in strip {found.id}")
    mark = C.annotations.get(found.id)
    if mark is None:
        raise MissingAnnotation(f"strip {found.id} is not annotated")
    if mark == "essential":
        raise SurgeryError(f"strip {found.id} is essential")
    return found


def surgery_annulus(C: HandleComplex, strip: int | Strip, h1: int) -> HandleComplex:
    """Cut an inessential annulus by deleting one of its 1-handles."""
    S = _resolve_strip(C, strip, h1)
    if S.mobius:
        raise SurgeryError(f"strip {S.id} is a Mobius band")
    marks = {k: v for k, v in C.annotations.items() if k != S.id}
    return _without(C, h1, marks)


def _cycle_distance(B: Boundary, v0: int, v1: int) -> tuple[Fraction, Fraction]:
    """Lengths of the two arcs of the boundary loop through ``v0`` and ``v1``."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for k, (u, v, _) in enumerate(B.graph.edges):
        adj.setdefault(u, []).append((k, v))
        adj.setdefault(v, []).append((k, u))
    total, dist = Fraction(0), None
    prev_edge, x = None, v0
    while True:
        k, y = next((k, y) for k, y in adj[x] if k != prev_edge)
        total += B.graph.edges[k][2]
        prev_edge, x = k, y
        if x == v1 and dist is None:
            dist = total
        if x == v0:
            break
    return dist, total


def surgery_mobius(C: HandleComplex, strip: int | Strip, h1: int) -> HandleComplex:
    """Cut an inessential Mobius band at ``h1`` and cap the cut with a new 0-handle.

    The cap is glued to the side that ``h1`` left free on its successor.  Its
    arc is the shorter of the two ways round the band's boundary between the
    ends of that side, so the boundary grows by at most half of it.
    """
    S = _resolve_strip(C, strip, h1)
    if not S.mobius:
        raise SurgeryError(f"strip {S.id} is an annulus")
    part = partners(C)
    h = C.handle(h1)
    (nid, nside), _ = part[(h1, h.sides[1])]
    B = _boundary(C)
    nh = C.handle(nid)
    v0 = B.vertex_of[(nid, nh.slot(nside), 0)]
    v1 = B.vertex_of[(nid, nh.slot(nside), 1)]
    p, lam = _cycle_distance(B, v0, v1)
    cap_len = min(p, lam - p)
    marks = {k: v for k, v in C.annotations.items() if k != S.id}
    D = _without(C, h1, marks)
    new_id = max(x.id for x in C.handles) + 1
    cap = Handle(new_id, "H0", h.triangle, (nside if nid != h1 else 0,), (cap_len,))
    glue = (Gluing((nid, nside), (new_id, nside)),) if nid != h1 else ()
    return replace(D, handles=D.handles + (cap,), gluings=D.gluings + glue)


def surgery_0handle(
    C: HandleComplex, h0: int, loop: Sequence[tuple[int, int]] | None = None
) -> HandleComplex:
    """Delete a 0-handle whose boundary arc lies on a simple boundary loop."""
    if C.handle(h0).kind != "H0":
        raise SurgeryError(f"handle {h0} is not a 0-handle")
    loops = [c for c in boundary_cycles(C) if (h0, 0) in c]
    if not loops:
        raise SurgeryError(f"0-handle {h0} lies on no boundary loop")
    if loop is not None and set(map(tuple, loop)) != set(loops[0]):
        raise SurgeryError("given loop is not the boundary loop through the 0-handle")
    return _without(C, h0, dict(C.annotations))


# -- good complex -------------------------------------------------------------


@dataclass(frozen=True)
class GoodCertificate:
    length_original: Fraction
    length_after_annuli: Fraction
    length_after_mobius: Fraction
    length_final: Fraction
    inessential_remaining: int
    zero_handle_loops: int
    zero_handle_edges: int
    ellP: int
    monkeys_before: int
    monkeys_after: int
    spine_rank: int
    rank_bound: float
    surgeries: tuple[str, ...]

    def checks(self) -> dict[str, bool]:
        return {
            "no inessential strips": self.inessential_remaining == 0,
            "no 0-handle edge on a boundary loop": self.zero_handle_loops == 0,
            "0-handle edges <= 3 ellP": self.zero_handle_edges <= 3 * self.ellP,
            "mobius pass <= 2x": self.length_after_mobius <= 2 * self.length_after_annuli,
            "0-handle pass <= 2x": self.length_final <= 2 * self.length_after_mobius,
            "final <= 4x original": self.length_final <= 4 * self.length_original,
            "monkey count unchanged": self.monkeys_before == self.monkeys_after,
            "spine rank <= B1 ellP^2": self.spine_rank <= self.rank_bound,
        }

    @property
    def holds(self) -> bool:
        return all(self.checks().values())


def make_good(C: HandleComplex, b1: float | None = None) -> tuple[HandleComplex, GoodCertificate]:
    """Cut inessential annuli, then inessential Mobius bands, then redundant 0-handles."""
    if b1 is None:
        from .hyp3 import DEFAULT_EPSILON

        b1 = 512 * math.pi**2 / DEFAULT_EPSILON**2 + 3
    missing = [s.id for s in strips(C) if s.id not in C.annotations]
    if missing:
        raise MissingAnnotation(f"strips without annotation: {missing}")
    log = []
    L0 = boundary_length(C)
    monkeys = len(C.of_kind("Monkey"))

    cur = C
    for S in strips(C):
        if not S.mobius and C.annotations[S.id] == "inessential":
            cur = surgery_annulus(cur, S.id, S.id)
            log.append(f"annulus {S.id}")
    L1 = boundary_length(cur)
    for S in strips(cur):
        if S.mobius and cur.annotations[S.id] == "inessential":
            cur = surgery_mobius(cur, S.id, S.id)
            log.append(f"mobius {S.id}")
    L2 = boundary_length(cur)
    while True:
        bad = sorted({hid for c in zero_handle_loops(cur) for hid, _ in c if cur.handle(hid).kind == "H0"})
        if not bad:
            break
        cur = surgery_0handle(cur, bad[0])
        log.append(f"0-handle {bad[0]}")

    inessential = sum(1 for s in strips(cur) if cur.annotations.get(s.id) != "essential")
    cert = GoodCertificate(
        L0,
        L1,
        L2,
        boundary_length(cur),
        inessential,
        len(zero_handle_loops(cur)),
        len(cur.of_kind("H0")),
        C.ellP,
        monkeys,
        len(cur.of_kind("Monkey")),
        cycle_rank(spine(cur)),
        b1 * C.ellP**2,
        tuple(log),
    )
    return cur, cert


# -- text format -------------------------------------------------------------


def _side_token(tok: str, lineno: int) -> Side:
    try:
        h, s = tok.split(",")
        return int(h), int(s)
    except ValueError:
        raise ComplexFormatError(f"bad side reference {tok!r}, expected <handle>,<side>", lineno) from None


def parse_complex(text: str) -> HandleComplex:
    T = None
    ell_p = None
    heads: dict[int, tuple[str, int, tuple[int, ...]]] = {}
    arcs: dict[int, dict[int, Fraction]] = {}
    glue: list[Gluing] = []
    marks: list[tuple[int, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        p = line.split()
        try:
            if p[0] == "T" and len(p) == 2:
                T = int(p[1])
            elif p[0] == "P" and len(p) == 2:
                ell_p = int(p[1])
            elif p[0] == "H" and len(p) >= 5:
                hid = int(p[1])
                if hid in heads:
                    raise ComplexFormatError(f"handle {hid} declared twice", lineno)
                if p[2] not in KINDS:
                    raise ComplexFormatError(f"unknown handle kind {p[2]!r}", lineno)
                heads[hid] = (p[2], int(p[3]), tuple(int(x) for x in p[4:]))
            elif p[0] == "A" and len(p) == 4:
                hid, k = int(p[1]), int(p[2])
                if k in arcs.setdefault(hid, {}):
                    raise ComplexFormatError(f"arc {k} of handle {hid} given twice", lineno)
                arcs[hid][k] = Fraction(p[3])
            elif p[0] == "G" and len(p) in (3, 4):
                if len(p) == 4 and p[3] != "twist":
                    raise ComplexFormatError(f"expected 'twist', got {p[3]!r}", lineno)
                glue.append(Gluing(_side_token(p[1], lineno), _side_token(p[2], lineno), len(p) == 4))
            elif p[0] == "S" and len(p) == 3:
                marks.append((int(p[1]), p[2], lineno))
            else:
                raise ComplexFormatError(f"unrecognized line {line!r}", lineno)
        except ComplexFormatError:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            raise ComplexFormatError(str(exc), lineno) from None
    if T is None:
        raise ComplexFormatError("missing T line", 0)
    handles = []
    for hid, (kind, tri, sides) in sorted(heads.items()):
        got = arcs.get(hid, {})
        if sorted(got) != list(range(KINDS[kind])):
            raise ComplexFormatError(f"handle {hid} needs arcs 0..{KINDS[kind] - 1}", 0)
        handles.append(Handle(hid, kind, tri, sides, tuple(got[k] for k in sorted(got))))
    extra = set(arcs) - set(heads)
    if extra:
        raise ComplexFormatError(f"arcs for undeclared handles {sorted(extra)}", 0)
    try:
        C = HandleComplex(T, tuple(handles), tuple(glue), {}, ell_p)
    except MalformedComplex as exc:
        raise ComplexFormatError(str(exc), 0) from None
    annotations = {}
    for sid, mark, lineno in marks:
        S = strip_containing(C, sid)
        if S is None:
            raise ComplexFormatError(f"handle {sid} is on no strip", lineno)
        annotations[S.id] = mark
    try:
        return replace(C, annotations=annotations)
    except MalformedComplex as exc:
        raise ComplexFormatError(str(exc), 0) from None


def format_complex(C: HandleComplex) -> str:
    lines = [f"T {C.triangle_count}"]
    if C.ell_p is not None:
        lines.append(f"P {C.ell_p}")
    for h in C.handles:
        lines.append(f"H {h.id} {h.kind} {h.triangle} " + " ".join(map(str, h.sides)))
        lines += [f"A {h.id} {k} {a}" for k, a in enumerate(h.arcs)]
    for g in C.gluings:
        lines.append(f"G {g.a[0]},{g.a[1]} {g.b[0]},{g.b[1]}" + (" twist" if g.twisted else ""))
    for sid, mark in sorted(C.annotations.items()):
        lines.append(f"S {sid} {mark}")
    return "\n".join(lines) + "\n"
