"""Shared fixtures: the worked-example dice and their cached analyses."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from tiltbound import Die, difference, parse_die
from tiltbound.prove import DieAnalysis, analyze_die

X_SPEC = "(2z^-3+z+z^5)/4"
Y_SPEC = "(9z^-8+1+8z^9)/18"
GARDNER_A = "(z^2+z^6+z^7)/3"
GARDNER_B = "(z+z^5+z^9)/3"
GARDNER_C = "(z^3+z^4+z^8)/3"
COIN_SPEC = "0:1/2,1:1/2"


@pytest.fixture(scope="session")
def die_x() -> Die:
    return parse_die(X_SPEC)


@pytest.fixture(scope="session")
def die_y() -> Die:
    return parse_die(Y_SPEC)


@pytest.fixture(scope="session")
def coin() -> Die:
    return parse_die(COIN_SPEC)


@pytest.fixture(scope="session")
def gardner() -> dict[str, Die]:
    a = parse_die(GARDNER_A)
    b = parse_die(GARDNER_B)
    c = parse_die(GARDNER_C)
    return {"A": a, "B": b, "C": c, "AB": difference(a, b), "CA": difference(c, a)}


@pytest.fixture(scope="session")
def analysis_x(die_x) -> DieAnalysis:
    return analyze_die(die_x)


@pytest.fixture(scope="session")
def analysis_y(die_y) -> DieAnalysis:
    return analyze_die(die_y)


def random_die(rng: random.Random, n_outcomes: int, value_span: int = 9) -> Die:
    """A random small die with exact rational probabilities."""
    values = rng.sample(range(-value_span, value_span + 1), n_outcomes)
    weights = [rng.randint(1, 9) for _ in values]
    total = sum(weights)
    return Die.from_pairs((v, Fraction(w, total)) for v, w in zip(values, weights))


@pytest.fixture(scope="session")
def random_dice() -> list[Die]:
    """Deterministic corpus of twenty random 3-4 outcome dice."""
    rng = random.Random(20260809)
    return [random_die(rng, rng.choice((3, 4))) for _ in range(20)]
