"""Die parsing, arithmetic, and exact moments."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiltbound import (
    Die,
    DieParseError,
    canonicalize,
    difference,
    moments,
    negate,
    parse_die,
    tilt,
)

F = Fraction


def test_parse_pgf_x():
    d = parse_die("(2z^-3+z+z^5)/4")
    assert d.outcomes == ((-3, F(1, 2)), (1, F(1, 4)), (5, F(1, 4)))


def test_parse_pgf_y():
    d = parse_die("(9z^-8+1+8z^9)/18")
    assert d.outcomes == ((-8, F(1, 2)), (0, F(1, 18)), (9, F(4, 9)))


def test_parse_pairs_coin():
    d = parse_die("0:1/2,1:1/2")
    assert d.outcomes == ((0, F(1, 2)), (1, F(1, 2)))


def test_parse_whitespace_and_braces():
    assert parse_die(" ( 2z^{-3} + z + z^5 ) / 4 ") == parse_die("(2z^-3+z+z^5)/4")
    assert parse_die("-3 : 1/2, 1 : 1/4, 5 : 1/4") == parse_die("(2z^-3+z+z^5)/4")


def test_parse_round_trip():
    for spec in ("(2z^-3+z+z^5)/4", "0:1/2,1:1/2", "(9z^-8+1+8z^9)/18"):
        d = parse_die(spec)
        assert parse_die(d.to_text()) == d


@pytest.mark.parametrize("bad", [
    "", "z", "(z+z^2)/0", "(z+q)/2", "0:1/2,1:1/3",  # probs sum to 5/6
    "0:1", "(z)/1",                                   # single value
    "0:1/2,0:1/2",                                    # duplicate value
    "0:1/2,1:-1/2,2:1",                               # negative probability
    "(2z^-3+z+z^5)/5",                                # wrong divisor
])
def test_parse_errors(bad):
    with pytest.raises(DieParseError):
        parse_die(bad)


def test_negate_examples(die_x):
    assert negate(die_x).outcomes == ((-5, F(1, 4)), (-1, F(1, 4)), (3, F(1, 2)))
    sym = parse_die("-1:1/2,1:1/2")
    assert negate(sym) == sym
    assert negate(negate(die_x)) == die_x


def test_difference_is_pgf_product(gardner):
    # PGF of A - B is A(z) * B(1/z): check against full pair enumeration.
    a, b = gardner["A"], gardner["B"]
    acc: dict[int, Fraction] = {}
    for (va, pa), (vb, pb) in itertools.product(a.outcomes, b.outcomes):
        acc[va - vb] = acc.get(va - vb, F(0)) + pa * pb
    assert dict(gardner["AB"].outcomes) == acc


def test_difference_self_symmetric(die_x):
    u = difference(die_x, die_x)
    assert moments(u).mu1 == 0
    assert negate(u) == u


def test_canonicalize_mean_zero_unchanged(die_x, die_y):
    for d in (die_x, die_y):
        c = canonicalize(d)
        assert c.die == d and c.scale == 1 and c.offset == 0


def test_canonicalize_coin(coin):
    c = canonicalize(coin)
    assert c.die == parse_die("-1:1/2,1:1/2")
    assert (c.scale, c.offset) == (2, 1)
    assert moments(c.die).mu1 == 0


def test_moments_known_values(die_x, die_y):
    ms = moments(die_x)
    assert (ms.mu2, ms.mu3, ms.mu4) == (11, 18, 197)
    assert moments(die_y).mu2 == 68
    sym = parse_die("-1:1/2,1:1/2")
    assert moments(sym).mu3 == 0 and moments(sym).nu3 == 0.0


def test_moments_float_views(die_x):
    ms = moments(die_x)
    assert ms.sigma == pytest.approx(11 ** 0.5, rel=1e-15)
    assert ms.nu3 == pytest.approx(18 / 11 ** 1.5, rel=1e-13)
    assert ms.nu4 == pytest.approx(197 / 121, rel=1e-15)


def test_moments_negation_relations(die_x):
    ms, msn = moments(die_x), moments(negate(die_x))
    assert (msn.mu2, msn.mu4) == (ms.mu2, ms.mu4)
    assert msn.mu3 == -ms.mu3
    assert (msn.abs1, msn.abs3) == (ms.abs1, ms.abs3)


def test_abs3_dominates_mu3():
    # Every non-degenerate die straddles its own mean, so the domination is
    # strict; equality would need all values on one side.
    for spec in ("0:3/4,4:1/4", "(2z^-3+z+z^5)/4", "(9z^-8+1+8z^9)/18"):
        ms = moments(parse_die(spec))
        assert ms.abs3 > abs(ms.mu3)


def _exact_total(d: Die) -> Fraction:
    return sum(d.probs, F(0))


@st.composite
def small_dice(draw):
    values = draw(st.lists(st.integers(-8, 8), min_size=2, max_size=4, unique=True))
    weights = draw(st.lists(st.integers(1, 9), min_size=len(values),
                            max_size=len(values)))
    total = sum(weights)
    return Die.from_pairs((v, F(w, total)) for v, w in zip(values, weights))


@given(small_dice())
@settings(max_examples=60, deadline=None)
def test_probability_sums_exact(d):
    assert _exact_total(d) == 1


@given(small_dice(), st.integers(1, 6))
@settings(max_examples=25, deadline=None)
def test_canonicalize_preserves_tilt(d, n):
    assert tilt(d, n).tilt == tilt(canonicalize(d).die, n).tilt


@given(small_dice())
@settings(max_examples=40, deadline=None)
def test_abs_moments_dominate(d):
    ms = moments(d)
    assert ms.abs2 == ms.mu2
    assert ms.abs3 >= abs(ms.mu3)
    assert ms.abs4 == ms.mu4
