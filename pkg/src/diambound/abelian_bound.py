"""Integer presentation matrices of finite cyclic groups.

Rows of a matrix are relations and columns are generators, so an ``m x n``
matrix ``A`` presents ``Z^n / rowspace(A)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

IntMatrix = Sequence[Sequence[int]]


class SearchSpaceTooLarge(ValueError):
    pass


def l1_length(A: IntMatrix) -> int:
    return sum(abs(int(x)) for row in A for x in row)


def smith_normal_form(A: IntMatrix) -> list[int]:
    """Invariant factors ``d1 | d2 | ...`` of ``A`` (``min(m, n)`` of them, zeros last)."""
    M = [[int(x) for x in row] for row in A]
    m = len(M)
    n = len(M[0]) if m else 0
    diag: list[int] = []
    t = 0
    while t < min(m, n):
        nz = [(abs(M[i][j]), i, j) for i in range(t, m) for j in range(t, n) if M[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        M[t], M[pi] = M[pi], M[t]
        for row in M:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = M[t][t]
            done = True
            for i in range(t + 1, m):
                q = M[i][t] // p
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                if M[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = M[t][j] // p
                if q:
                    for row in M:
                        row[j] -= q * row[t]
                if M[t][j]:
                    done = False
            if done:
                # pivot must divide the remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                M[t] = [a + b for a, b in zip(M[t], M[bad[0]])]
                continue
            # move the smallest nonzero entry of row/column t to the pivot
            cand = [(abs(M[i][t]), i, t) for i in range(t, m) if M[i][t]]
            cand += [(abs(M[t][j]), t, j) for j in range(t, n) if M[t][j]]
            _, ci, cj = min(cand)
            M[t], M[ci] = M[ci], M[t]
            for row in M:
                row[t], row[cj] = row[cj], row[t]
        diag.append(abs(M[t][t]))
        t += 1
    return diag + [0] * (min(m, n) - len(diag))


@dataclass(frozen=True)
class AbelianGroup:
    free_rank: int
    torsion: tuple[int, ...]

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z_{d}" for d in self.torsion]
        return "+".join(parts) if parts else "0"


def presented_group(A: IntMatrix, columns: int | None = None) -> AbelianGroup:
    """Abelian group presented by the rows of ``A``.

    ``columns`` is needed when ``A`` has no rows.
    """
    n = len(A[0]) if len(A) else (columns or 0)
    if columns is not None and len(A) and columns != n:
        raise ValueError("column count mismatch")
    factors = smith_normal_form(A) if len(A) and n else []
    nonzero = [d for d in factors if d]
    return AbelianGroup(n - len(nonzero), tuple(d for d in nonzero if d > 1))


def presents_zn(A: IntMatrix, N: int) -> bool:
    G = presented_group(A)
    if G.free_rank:
        return False
    return G.torsion == ((N,) if N > 1 else ())


# -- length bounds ---------------------------------------------------------


def _h(N: int, k: int) -> float:
    if N < 2**1000:
        return N ** (1.0 / k) + k - 1
    return math.exp(math.log(N) / k) + k - 1


@dataclass(frozen=True)
class ZnBound:
    N: int
    primary: float
    minimizer: int
    paper_variant: float

    @property
    def closed_form_exceeds_primary(self) -> bool:
        """True where the closed form overstates the certified bound."""
        return self.paper_variant > self.primary


def zn_length_lower_bound(N: int) -> ZnBound:
    """Lower bound on the L1 length of any integer matrix presenting ``Z_N``.

    ``primary`` is ``min_k N**(1/k) + k - 1`` over integers ``1 <= k <= N``;
    the function is convex in ``k`` so the scan stops at the first increase.
    ``paper_variant`` is the closed form ``N**(1/sqrt(ln N)) + sqrt(ln N) - 1``.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    best, arg = _h(N, 1), 1
    for k in range(2, N + 1):
        v = _h(N, k)
        if v >= best:
            break
        best, arg = v, k
    s = math.sqrt(math.log(N))
    return ZnBound(N, best, arg, math.exp(math.log(N) / s) + s - 1)


def length_meets_bound(N: int, m: int) -> bool:
    """Exact test of ``m >= min_k N**(1/k) + k - 1`` in integer arithmetic."""
    for k in range(1, N + 1):
        base = m - k + 1
        if base < 1:
            return False
        if base**k >= N:
            return True
    return False


def _optimal_real_k(log_n: float) -> float:
    # stationary point of exp(x/k) + k: x/k = ln(k^2/x)
    x = log_n
    lo, hi = 1e-12, max(2.0, x)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if x / mid - 2.0 * math.log(mid) + math.log(x) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def log_zn_bound(log_n: float) -> float:
    """Natural log of the primary bound, given ``ln N``; usable for huge ``N``."""
    if log_n < math.log(2):
        raise ValueError("N must be at least 2")
    k_real = _optimal_real_k(log_n)
    cands = {1, max(1, math.floor(k_real)), math.floor(k_real) + 1}
    best = math.inf
    for k in cands:
        e = log_n / k
        # ln(exp(e) + k - 1)
        val = e + math.log1p((k - 1) * math.exp(-e)) if e > 0 else math.log(k)
        best = min(best, val)
    return best


def log_zn_closed_form_bound(log_n: float) -> float:
    s = math.sqrt(log_n)
    e = log_n / s
    return e + math.log1p((s - 1) * math.exp(-e))


# -- brute force oracle ----------------------------------------------------


def _all_matrices(k: int, max_entry: int) -> np.ndarray:
    vals = np.arange(-max_entry, max_entry + 1, dtype=np.int64)
    grids = np.meshgrid(*([vals] * (k * k)), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).reshape(-1, k, k)


def _minor_gcd_and_det(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = mats.shape[1]
    if k == 1:
        det = mats[:, 0, 0]
        return np.ones_like(det), det
    if k == 2:
        a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
        g = np.gcd.reduce(np.stack([a, b, c, d]), axis=0)
        return g, a * d - b * c
    if k == 3:
        minors = []
        for r in itertools.combinations(range(3), 2):
            for c in itertools.combinations(range(3), 2):
                sub = mats[:, r][:, :, c]
                minors.append(sub[:, 0, 0] * sub[:, 1, 1] - sub[:, 0, 1] * sub[:, 1, 0])
        m = mats
        det = (
            m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
            - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
            + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0])
        )
        return np.gcd.reduce(np.stack(minors), axis=0), det
    raise SearchSpaceTooLarge("matrices larger than 3x3 are not enumerated")


@lru_cache(maxsize=None)
def min_length_table(max_k: int, max_entry: int, cap: int = 5_000_000) -> dict[int, int]:
    """Map ``N -> minimal L1 length`` over all ``k x k`` matrices, ``k <= max_k``.

    A square nonsingular matrix presents ``Z_N`` exactly when ``|det| = N``
    and the gcd of its ``(k-1)``-minors is 1.  Enumerates
    ``(2*max_entry + 1)**(k*k)`` matrices per ``k``.
    """
    table: dict[int, int] = {}
    for k in range(1, max_k + 1):
        size = (2 * max_entry + 1) ** (k * k)
        if size > cap:
            raise SearchSpaceTooLarge(f"{size} matrices for k={k} exceeds cap {cap}")
        mats = _all_matrices(k, max_entry)
        g, det = _minor_gcd_and_det(mats)
        lengths = np.abs(mats).sum(axis=(1, 2))
        ok = (g == 1) & (det != 0)
        dets, lens = np.abs(det[ok]), lengths[ok]
        order = np.lexsort((lens, dets))
        dets, lens = dets[order], lens[order]
        first = np.ones(len(dets), dtype=bool)
        first[1:] = dets[1:] != dets[:-1]
        for N, L in zip(dets[first].tolist(), lens[first].tolist()):
            if N not in table or L < table[N]:
                table[N] = L
    return table


def brute_force_min_length(N: int, max_k: int, max_entry: int, cap: int = 5_000_000) -> float:
    """Smallest L1 length of a ``k x k`` matrix (``k <= max_k``, ``|a_ij| <= max_entry``) presenting ``Z_N``.

    Returns ``inf`` when no matrix in range presents ``Z_N``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    return min_length_table(max_k, max_entry, cap).get(N, math.inf)
