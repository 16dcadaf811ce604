"""Finite group presentations: parsing, length, triangularization.

A word is a tuple of ``(generator_index, sign)`` letters with ``sign`` in
``{+1, -1}``.  Presentations keep their generator names so they can be
printed back in the same grammar they were parsed from::

    <a,b | abAB>
    <x1,x2 | x1 x2 x1^-1 x2^-1>
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

Letter = tuple[int, int]
Word = tuple[Letter, ...]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class PresentationSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownGeneratorError(ValueError):
    pass


class EmptyRelatorError(ValueError):
    def __init__(self, index: int):
        super().__init__(f"relator {index} is empty after free reduction")
        self.index = index


def free_reduce(word: Iterable[Letter]) -> Word:
    out: list[Letter] = []
    for gen, sign in word:
        if out and out[-1][0] == gen and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((gen, sign))
    return tuple(out)


def invert(word: Sequence[Letter]) -> Word:
    return tuple((g, -s) for g, s in reversed(word))


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        n = len(self.generators)
        if len(set(self.generators)) != n:
            raise ValueError("duplicate generator names")
        for r in self.relators:
            for g, s in r:
                if not 0 <= g < n or s not in (1, -1):
                    raise ValueError(f"bad letter {(g, s)} for {n} generators")

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    @property
    def length(self) -> int:
        return length(self)

    def is_triangular(self) -> bool:
        return all(len(free_reduce(r)) == 3 == len(r) for r in self.relators)

    def __str__(self) -> str:
        return format_presentation(self)


def length(P: Presentation) -> int:
    """Sum of freely reduced relator lengths."""
    return sum(len(free_reduce(r)) for r in P.relators)


# -- parsing / printing -----------------------------------------------------


def _tokenize_word(text: str, offset: int, names: Sequence[str]) -> list[tuple[str, int, int]]:
    """Split one relator into ``(name, exponent, position)`` tokens.

    Whitespace separates tokens but is otherwise ignored.  Inside a chunk the
    longest declared generator name wins; a capital letter whose lower case is
    a one-letter generator denotes that generator's inverse.
    """
    by_len = sorted(names, key=len, reverse=True)
    nameset = set(names)
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        pos = offset + i
        match = next((n for n in by_len if text.startswith(n, i)), None)
        if match is not None:
            name, sign = match, 1
            i += len(match)
        elif len(ch) == 1 and ch.isupper() and ch.lower() in nameset:
            name, sign = ch.lower(), -1
            i += 1
        elif ch.isalpha() or ch == "_":
            m = _IDENT.match(text, i)
            raise UnknownGeneratorError(f"unknown generator {m.group(0)!r} at position {pos}")
        else:
            raise PresentationSyntaxError(f"unexpected character {ch!r}", pos)
        exp = 1
        if i < len(text) and text[i] == "^":
            m = re.compile(r"\^\s*([+-]?\d+)").match(text, i)
            if not m:
                raise PresentationSyntaxError("malformed exponent", offset + i)
            exp = int(m.group(1))
            i = m.end()
        tokens.append((name, sign * exp, pos))
    return tokens


def parse(text: str) -> Presentation:
    """Parse ``<g1,g2,... | w1, w2, ...>`` into a :class:`Presentation`.

    Relators are freely reduced.  Exponents ``x^k`` expand to ``|k|`` letters.
    """
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    if not s.startswith("<"):
        raise PresentationSyntaxError("expected '<'", lead)
    if not s.endswith(">"):
        raise PresentationSyntaxError("expected '>'", lead + len(s) - 1)
    body = s[1:-1]
    bar = body.find("|")
    if bar < 0:
        raise PresentationSyntaxError("expected '|'", lead + 1 + len(body))
    gen_part, rel_part = body[:bar], body[bar + 1 :]

    names: list[str] = []
    if gen_part.strip():
        pos = lead + 1
        for chunk in gen_part.split(","):
            name = chunk.strip()
            if not _IDENT.fullmatch(name):
                raise PresentationSyntaxError(f"invalid generator name {name!r}", pos)
            if name in names:
                raise PresentationSyntaxError(f"duplicate generator {name!r}", pos)
            names.append(name)
            pos += len(chunk) + 1
    index = {n: k for k, n in enumerate(names)}

    relators: list[Word] = []
    if rel_part.strip():
        pos = lead + 1 + bar + 1
        for chunk in rel_part.split(","):
            if not chunk.strip():
                raise PresentationSyntaxError("empty relator", pos)
            letters: list[Letter] = []
            for name, exp, _ in _tokenize_word(chunk, pos, names):
                sign = 1 if exp > 0 else -1
                letters.extend([(index[name], sign)] * abs(exp))
            relators.append(free_reduce(letters))
            pos += len(chunk) + 1
    return Presentation(tuple(names), tuple(relators))


def format_word(word: Sequence[Letter], names: Sequence[str]) -> str:
    simple = all(len(n) == 1 and n.islower() for n in names)
    parts = []
    for g, s in word:
        n = names[g]
        if simple:
            parts.append(n if s > 0 else n.upper())
        else:
            parts.append(n if s > 0 else f"{n}^-1")
    return ("" if simple else " ").join(parts)


def format_presentation(P: Presentation) -> str:
    rels = ", ".join(format_word(r, P.generators) for r in P.relators)
    return f"<{','.join(P.generators)} | {rels}>"


# -- triangularization ------------------------------------------------------


def _fresh_name(used: set[str]) -> str:
    for ch in string.ascii_lowercase:
        if ch not in used:
            return ch
    k = 1
    while f"x{k}" in used:
        k += 1
    return f"x{k}"


def _substitute(word: Word, gen: int, image: Word) -> Word:
    out: list[Letter] = []
    for g, s in word:
        if g == gen:
            out.extend(image if s > 0 else invert(image))
        else:
            out.append((g, s))
    return free_reduce(out)


def _drop_generator(names: list[str], relators: list[Word], gen: int) -> None:
    del names[gen]
    for k, r in enumerate(relators):
        relators[k] = tuple((g - (g > gen), s) for g, s in r)


def triangularize(P: Presentation) -> Presentation:
    """Return a triangular presentation of the same group with length at most 3 * length(P).

    Short relators are eliminated first (``a = 1`` and ``a = b^{+-1}`` by
    Tietze substitution), squares ``xx`` become ``xxb, xbX`` and longer
    relators ``x1 x2 ... xk`` are split left to right into ``x1 x2 b`` and
    ``B x3 ... xk``.
    """
    names = list(P.generators)
    relators: list[Word] = []
    for k, r in enumerate(P.relators):
        w = free_reduce(r)
        if not w:
            raise EmptyRelatorError(k)
        relators.append(w)

    changed = True
    while changed:
        changed = False
        relators = [r for r in relators if r]
        for k, r in enumerate(relators):
            if len(r) == 1:
                gen = r[0][0]
                image: Word = ()
            elif len(r) == 2 and r[0][0] != r[1][0]:
                # x y = 1  =>  y = x^-1
                gen = r[1][0]
                image = ((r[0][0], -r[0][1] * r[1][1]),)
            else:
                continue
            del relators[k]
            relators = [_substitute(w, gen, image) for w in relators]
            _drop_generator(names, relators, gen)
            changed = True
            break

    out: list[Word] = []
    used = set(names)
    for r in relators:
        if not r:
            continue
        if len(r) == 2:
            b = len(names)
            fresh = _fresh_name(used)
            names.append(fresh)
            used.add(fresh)
            x = r[0]
            out.append((x, x, (b, 1)))
            out.append((x, (b, 1), (x[0], -x[1])))
            continue
        while len(r) > 3:
            b = len(names)
            fresh = _fresh_name(used)
            names.append(fresh)
            used.add(fresh)
            out.append((r[0], r[1], (b, 1)))
            r = ((b, -1),) + r[2:]
        out.append(r)
    return Presentation(tuple(names), tuple(out))


def abelianization_matrix(P: Presentation) -> list[list[int]]:
    """Rows are relators, columns generators; entries are exponent sums."""
    rows = []
    for r in P.relators:
        row = [0] * P.generator_count
        for g, s in r:
            row[g] += s
        rows.append(row)
    return rows
