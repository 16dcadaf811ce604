from __future__ import annotations

import json
import math
import random

import pytest
import sympy as sp

from diambound import pipeline as pl
from diambound.flat_torus import kernel_basis
from diambound.hyp3 import MargulisConfig, c1
from conftest import SNAPSHOTS


@pytest.fixture(scope="module")
def closed_form_report():
    return pl.solve_R(bound="closed-form")


@pytest.fixture(scope="module")
def certified_failure():
    with pytest.raises(pl.NoFiniteRadius) as info:
        pl.solve_R()
    return info.value


def test_winding_examples():
    C = 4.0
    ell = 2 / C
    w = pl.winding_number_bound(C, ell)
    assert w.conservative == pytest.approx(math.sinh(1) / (4 * ell))
    assert w.stated == pytest.approx(math.sinh(2) / (4 * ell))
    assert w.conservative <= w.stated
    vals = [pl.winding_number_bound(C, 3).conservative for C in (1, 2, 5, 10)]
    assert vals == sorted(vals)
    with pytest.raises(ValueError):
        pl.winding_number_bound(5, 1, c3=6)


def test_winding_log_forms_never_overflow():
    w = pl.winding_number_bound(1e5, 100)
    assert w.conservative == math.inf
    assert w.ln_conservative == pytest.approx(0.5e7 - math.log(2) - math.log(400))


def test_ln_floor():
    assert pl.ln_floor(math.log(7.9)) == pytest.approx(math.log(7))
    assert pl.ln_floor(-1) == -math.inf
    assert pl.ln_floor(100.0) <= 100.0


def test_classify_case_examples():
    r = pl.classify_case([], columns=2)
    assert (r.h1_structure, r.case) == ("Z+Z", 1)
    r = pl.classify_case([[0, 6]])
    assert (r.h1_structure, r.case) == ("Z+Z_6", 2)


def test_classify_random_attachments():
    rng = random.Random(9)
    seen = 0
    while seen < 200:
        n = rng.randint(2, 6)
        g = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(2)]
        if sp.Matrix(g).rank() < 2:
            continue
        i, j = kernel_basis(g).pivot
        if abs(g[0][i] * g[1][j] - g[0][j] * g[1][i]) != 1:
            continue
        seen += 1
        assert pl.classify_case(pl.attachment_matrix(g, meridian=False), n).case == 1
        assert pl.classify_case(pl.attachment_matrix(g), n).case == 2


def test_budget():
    b = pl.triangulation_budget(1, 2.0, 3.0, 5.0)
    assert (b.eighth, b.sixth, b.conservative) == (12.0, 5.0, 12.0)
    b2 = pl.triangulation_budget(2, 2.0, 3.0, 5.0)
    assert b2.eighth / b.eighth == 2**8 and b2.sixth / b.sixth == 2**6
    assert pl.ln_budget(2, 2.0, 3.0, 5.0) == pytest.approx(math.log(3 * b2.conservative))
    with pytest.raises(ValueError):
        pl.triangulation_budget(0, 1, 1)


def test_cooper():
    assert pl.cooper_volume_bound(3) == pytest.approx(3 * math.pi)


def test_chain_identities_exact():
    cfg = MargulisConfig()
    ch = pl.exact_chain(cfg)
    assert all(pl.chain_identities(ch, cfg).values())
    e = sp.Rational(104, 1000)
    assert sp.simplify(ch["b2"] - ch["b1"]) == 6
    assert sp.simplify(ch["b3"] * 3 * e**2 - 512 * sp.pi**2 * ch["b2"] ** 2) == 0
    assert sp.simplify(ch["b4"] - ch["b2"] - ch["b3"]) == 0
    assert sp.simplify(ch["b1"] - 512 * sp.pi**2 / e**2 - 3) == 0
    assert sp.simplify(ch["b1_stated"] - 128 * sp.pi**2 / e**2 - 3) == 0


def test_report_constants(closed_form_report):
    r = closed_form_report
    c = c1(MargulisConfig())
    assert r.value("c1") == pytest.approx(c)
    assert r.value("c2") > c + 1
    assert r.value("c3") > r.value("c2")
    assert r.value("b2") == pytest.approx(r.value("b1") + 6)
    assert r.slack.holds
    assert r.constants["b1"].paper_stated.startswith("128 pi^2")


def test_paper_variant_certificate(closed_form_report):
    r = closed_form_report
    assert r.r is not None and math.isfinite(r.r) and r.r > r.value("c3")
    assert r.certificate and all(row.holds for row in r.certificate)
    assert r.certificate[0].ell == 3
    assert r.dominance.holds
    assert r.certificate[-1].ell >= r.dominance.L_star


def test_paper_variant_rows_independent(closed_form_report):
    # recompute each row from the closed form with no library helpers
    r = closed_form_report
    b1, b3, b4 = r.value("b1"), r.value("b3"), r.value("b4")
    for row in r.certificate:
        ell = row.ell
        x = 0.5 * r.r * ell
        ln_n = x - math.log(2) + math.log1p(-math.exp(-2 * x)) - math.log(4 * ell)
        s = math.sqrt(ln_n)
        ln_lhs = math.log(math.exp(ln_n / s) + s - 1) if ln_n / s < 700 else ln_n / s
        ln_rhs = math.log(3) + max(2 * math.log(b1) + math.log(b3) + 8 * math.log(ell), math.log(b4) + 6 * math.log(ell))
        assert ln_lhs == pytest.approx(row.ln_lhs, rel=1e-9)
        assert ln_rhs == pytest.approx(row.ln_rhs, rel=1e-12)
        assert ln_lhs > ln_rhs


def test_paper_variant_monotone_in_epsilon():
    rs = [pl.solve_R(MargulisConfig(e), bound="closed-form").r for e in (0.05, 0.104, 0.2)]
    assert rs[0] >= rs[1] >= rs[2]


def test_certified_has_no_finite_radius(certified_failure):
    rep = certified_failure.report
    assert rep.r is None
    assert rep.obstruction and all(o.blocks for o in rep.obstruction)
    assert rep.obstruction[-1].R > 1e290
    needed = [r for _, r in rep.r_needed]
    assert needed == sorted(needed)


def test_obstruction_independent(certified_failure):
    # min_k N^(1/k) + k - 1 <= e + ln N  (take k = ceil(ln N)); compare with 3 B1^2 B3 l^8
    rep = certified_failure.report
    b1, b3 = rep.value("b1"), rep.value("b3")
    for o in rep.obstruction:
        # ln N <= R l / 2, so ln(e + ln N) <= ln(R l / 2) + log1p(2 e / (R l))
        ln_x = math.log(o.R) + math.log(o.ell) - math.log(2)
        assert ln_x + math.log1p(math.e / math.exp(min(ln_x, 700))) <= math.log(3) + 2 * math.log(b1) + math.log(b3) + 8 * math.log(o.ell)


def test_snapshot(certified_failure):
    snap = (SNAPSHOTS / "constants_0.104.json").read_text()
    assert certified_failure.report.to_json() + "\n" == snap


def test_deterministic():
    a = pl.solve_R(bound="closed-form").to_json()
    b = pl.solve_R(bound="closed-form").to_json()
    assert a == b
    keys = json.loads(a).keys()
    assert {"epsilon_tilde", "c1", "c2", "c3", "b1", "b2", "b3", "b4", "r", "certificate"} <= set(keys)


def test_solve_r_arguments():
    with pytest.raises(ValueError):
        pl.solve_R(ell_min=0)
    with pytest.raises(ValueError):
        pl.solve_R(bound="other")


def test_half_ball_check():
    s = pl.half_ball_check(MargulisConfig(), c1(MargulisConfig()) + 1)
    assert s.tube_radius == 40.0 and s.holds
