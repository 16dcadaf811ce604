"""Builders for handle complexes used in tests and the CLI oracle suite.

Every handle gets its own triangle, so monkey counts never exceed the
triangle count and the default ``ellP = 3 * triangles`` is honest.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .handle_complex import Gluing, Handle, HandleComplex


class Builder:
    def __init__(self):
        self.handles: list[Handle] = []
        self.gluings: list[Gluing] = []
        self.annotations: dict[int, str] = {}

    def _add(self, kind: str, sides: tuple[int, ...], arcs) -> int:
        hid = len(self.handles)
        self.handles.append(Handle(hid, kind, hid, sides, tuple(Fraction(a) for a in arcs)))
        return hid

    def h0(self, length=1) -> int:
        return self._add("H0", (0,), (length,))

    def h1(self, a=1, b=1) -> int:
        return self._add("H1", (0, 1), (a, b))

    def monkey(self, a=1, b=1, c=1) -> int:
        return self._add("Monkey", (0, 1, 2), (a, b, c))

    def glue(self, x: tuple[int, int], y: tuple[int, int], twisted: bool = False) -> None:
        self.gluings.append(Gluing(x, y, twisted))

    def chain(self, lengths) -> list[int]:
        """Open chain of 1-handles glued side 1 to side 0."""
        ids = [self.h1(a, b) for a, b in lengths]
        for x, y in zip(ids, ids[1:]):
            self.glue((x, 1), (y, 0))
        return ids

    def strip(self, lengths, mobius: bool = False, mark: str | None = None) -> list[int]:
        ids = self.chain(lengths)
        self.glue((ids[-1], 1), (ids[0], 0), twisted=mobius)
        if mark is not None:
            self.annotations[min(ids)] = mark
        return ids

    def build(self, ell_p: int | None = None) -> HandleComplex:
        return HandleComplex(
            len(self.handles), tuple(self.handles), tuple(self.gluings), dict(self.annotations), ell_p
        )


def band(k: int, mobius: bool = False, mark: str | None = "inessential", length=1) -> HandleComplex:
    b = Builder()
    b.strip([(length, length)] * k, mobius, mark)
    return b.build()


def h0_pair(a=1, b=1) -> HandleComplex:
    """Two 0-handles glued along their sides: one boundary loop with two 0-handle edges."""
    bld = Builder()
    x, y = bld.h0(a), bld.h0(b)
    bld.glue((x, 0), (y, 0))
    return bld.build()


def scripted() -> HandleComplex:
    """One inessential annulus, one inessential Mobius band, a redundant 0-handle pair,
    an essential annulus and a monkey with three capped legs."""
    b = Builder()
    b.strip([(2, 3), (1, 1), (Fraction(1, 2), 4), (1, 2)], mark="inessential")
    b.strip([(1, 2), (3, 1), (2, 2)], mobius=True, mark="inessential")
    x, y = b.h0(Fraction(3, 2)), b.h0(Fraction(1, 3))
    b.glue((x, 0), (y, 0))
    b.strip([(5, 5), (5, 5)], mark="essential")
    m = b.monkey(2, 3, 4)
    for side in range(3):
        leg = b.chain([(1, 1), (2, 1)])
        b.glue((m, side), (leg[0], 0))
        cap = b.h0(1)
        b.glue((leg[-1], 1), (cap, 0))
    return b.build()


def random_complex(rng: random.Random) -> HandleComplex:
    """Random mix of strips, 0-handle pairs, capped chains and monkeys."""
    b = Builder()

    def length():
        return Fraction(rng.randint(1, 12), rng.randint(1, 4))

    def lengths(k):
        return [(length(), length()) for _ in range(k)]

    def end_of(side_ref):
        kind = rng.choice(["cap", "free", "free"])
        if kind == "cap":
            b.glue(side_ref, (b.h0(length()), 0))

    for _ in range(rng.randint(0, 3)):
        b.strip(lengths(rng.randint(1, 5)), rng.random() < 0.5, rng.choice(["essential", "inessential"]))
    for _ in range(rng.randint(0, 2)):
        x, y = b.h0(length()), b.h0(length())
        b.glue((x, 0), (y, 0))
    for _ in range(rng.randint(0, 3)):
        ids = b.chain(lengths(rng.randint(1, 4)))
        end_of((ids[0], 0))
        end_of((ids[-1], 1))
    monkeys = [b.monkey(length(), length(), length()) for _ in range(rng.randint(0, 3))]
    free = [(m, s) for m in monkeys for s in range(3)]
    rng.shuffle(free)
    while free:
        a = free.pop()
        ids = b.chain(lengths(rng.randint(1, 3)))
        b.glue(a, (ids[0], 0))
        if free and rng.random() < 0.5:
            b.glue((ids[-1], 1), free.pop(), twisted=rng.random() < 0.5)
        else:
            end_of((ids[-1], 1))
    return b.build()
