from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diambound import presentation as pres
from diambound.abelian_bound import presented_group, smith_normal_form
from diambound.suites import random_presentation


def test_parse_commutator():
    P = pres.parse("<a,b | abAB>")
    assert P.generator_count == 2
    assert len(P.relators) == 1
    assert P.length == 4


def test_parse_empty_relator_list():
    P = pres.parse("<a | >")
    assert (P.generator_count, P.relators, P.length) == (1, (), 0)


@pytest.mark.parametrize("text, expected", [("<a | aaaa>", 4), ("<a | aa, aaa>", 5), ("<a,b | abAB>", 4)])
def test_length(text, expected):
    assert pres.length(pres.parse(text)) == expected


def test_whitespace_and_exponents():
    assert pres.parse("< a , b | a b A B >") == pres.parse("<a,b|abAB>")
    assert pres.parse("<a | a^4>").length == 4
    assert pres.parse("<a | a^-2>") == pres.parse("<a | AA>")


def test_multiletter_generators():
    P = pres.parse("<x1, x2 | x1 x2 x1^-1 x2^-1>")
    assert P.length == 4
    assert pres.parse(pres.format_presentation(P)) == P


def test_free_reduction_before_measuring():
    assert pres.parse("<a,b | abBa>").length == 2


def test_syntax_error_reports_position():
    with pytest.raises(pres.PresentationSyntaxError) as info:
        pres.parse("<a | a%a>")
    assert info.value.position == 6


def test_unknown_generator():
    with pytest.raises(pres.UnknownGeneratorError):
        pres.parse("<a | ab>")


def test_triangularize_power():
    Q = pres.triangularize(pres.parse("<a | aaaa>"))
    assert pres.format_presentation(Q) == "<a,b | aab, Baa>"
    assert Q.length == 6


def test_triangularize_keeps_triangular_input():
    P = pres.parse("<a,b,c | abc>")
    assert pres.triangularize(P) == P


def test_triangularize_commutator():
    Q = pres.triangularize(pres.parse("<a,b | abAB>"))
    assert Q.generator_count == 3
    assert len(Q.relators) == 2
    assert Q.is_triangular() and Q.length == 6


def test_square_rule_keeps_group():
    P = pres.parse("<a, b | aa, bbb>")
    Q = pres.triangularize(P)
    assert Q.is_triangular()
    assert presented_group(pres.abelianization_matrix(Q), Q.generator_count) == presented_group(
        pres.abelianization_matrix(P), 2
    )


def test_empty_relator_reported():
    P = pres.Presentation(("a",), (((0, 1),), ((0, 1), (0, -1))))
    with pytest.raises(pres.EmptyRelatorError) as info:
        pres.triangularize(P)
    assert info.value.index == 1


def test_abelianization_examples():
    assert pres.abelianization_matrix(pres.parse("<a,b | abAB>")) == [[0, 0]]
    assert pres.abelianization_matrix(pres.parse("<a | aa>")) == [[2]]
    Q = pres.triangularize(pres.parse("<a | aaaa>"))
    nonunit = [d for d in smith_normal_form(pres.abelianization_matrix(Q)) if d != 1]
    assert nonunit == [4]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_triangularize_properties(seed):
    P = random_presentation(random.Random(seed))
    Q = pres.triangularize(P)
    assert Q.is_triangular()
    assert Q.length <= 3 * P.length
    assert pres.triangularize(Q) == Q
    assert presented_group(pres.abelianization_matrix(P), P.generator_count) == presented_group(
        pres.abelianization_matrix(Q), Q.generator_count
    )


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_print_parse_roundtrip(seed):
    P = random_presentation(random.Random(seed))
    assert pres.parse(pres.format_presentation(P)) == P


@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from([1, -1])), max_size=30))
def test_free_reduce_idempotent(word):
    once = pres.free_reduce(word)
    assert pres.free_reduce(once) == once
    assert pres.free_reduce(tuple(word) + pres.invert(word)) == ()
