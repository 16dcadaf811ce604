"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time

import pytest

from diambound import suites
from diambound.hyp3 import MargulisConfig
from diambound.pipeline import NoFiniteRadius, solve_R

try:
    from conftest import SNAPSHOTS
except ImportError:  # run as a script from elsewhere
    from pathlib import Path

    SNAPSHOTS = Path(__file__).parent / "snapshots"


def _emit(capsys, n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def _suite(capsys, n: int, res: suites.SuiteResult, limit: float | None = None) -> None:
    ok = res.passed and (limit is None or res.seconds < limit)
    budget = f" (limit {limit:g}s)" if limit is not None else ""
    _emit(capsys, n, ok, res.line().split(" ", 1)[1] + budget)
    assert res.passed, res.failures
    if limit is not None:
        assert res.seconds < limit


def test_criterion_1_triangularization(capsys):
    _suite(capsys, 1, suites.triangularization_suite(200), limit=5)


def test_criterion_2_short_basis(capsys):
    _suite(capsys, 2, suites.short_basis_suite(1000), limit=10)


def test_criterion_3_coefficients(capsys):
    _suite(capsys, 3, suites.coefficient_suite(1000))


def test_criterion_4_intersection_inequality(capsys):
    _suite(capsys, 4, suites.inequality_suite(1000))


def test_criterion_5_graph_rank(capsys):
    _suite(capsys, 5, suites.graph_rank_suite(500, 200))


def test_criterion_6_zn_bound(capsys):
    _suite(capsys, 6, suites.zn_suite(200, 2, 12), limit=60)


def test_criterion_7_tube_geometry(capsys):
    _suite(capsys, 7, suites.tube_suite())


def test_criterion_8_surgery(capsys):
    _suite(capsys, 8, suites.surgery_suite(100))


def test_criterion_9_constants_report(capsys):
    t = time.perf_counter()
    try:
        report = solve_R(MargulisConfig(0.104), ell_min=3)
        finite = report.r is not None
    except NoFiniteRadius as exc:
        report, finite = exc.report, False
    seconds = time.perf_counter() - t

    identities = all(report.chain_identities.values())
    closed_form = [solve_R(MargulisConfig(e), bound="closed-form") for e in (0.05, 0.104, 0.2)]
    rs = [r.r for r in closed_form]
    monotone = rs[0] >= rs[1] >= rs[2]
    tail_ok = all(row.holds for row in closed_form[1].certificate) and closed_form[1].dominance.holds
    stable = report.to_json() + "\n" == (SNAPSHOTS / "constants_0.104.json").read_text()
    witnesses = all(o.blocks for o in report.obstruction)

    parts = [
        f"finite certified R: {'yes' if finite else 'none'}"
        + ("" if finite else f" ({len(report.obstruction)} witnesses up to R={report.obstruction[-1].R:.3g} all block: {witnesses})"),
        f"chain identities {'ok' if identities else 'FAILED'}",
        f"closed-form R over eps 0.05/0.104/0.2 = {rs[0]:.6g}/{rs[1]:.6g}/{rs[2]:.6g} nonincreasing {'ok' if monotone else 'FAILED'}",
        f"closed-form certificate and tail {'ok' if tail_ok else 'FAILED'}",
        f"{seconds:.2f}s (limit 60s)",
        f"snapshot {'stable' if stable else 'CHANGED'}",
    ]
    ok = finite and identities and monotone and seconds < 60 and stable
    _emit(capsys, 9, ok, "; ".join(parts))
    assert identities and monotone and tail_ok and stable and seconds < 60
    assert finite, "no finite R exists under the certified Z_N bound; see the obstruction witnesses"


def test_criterion_10_kernel_basis(capsys):
    _suite(capsys, 10, suites.kernel_suite(500))


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(
        ((k, v) for k, v in globals().items() if k.startswith("test_criterion_")),
        key=lambda kv: int(kv[0].split("_")[2]),
    ):
        try:
            fn(None)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
