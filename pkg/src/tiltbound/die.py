"""Integer dice: representation, parsing, arithmetic, and exact moments.

A "die" is a bounded integer-valued random variable with at least two
values, each carrying an exact rational probability.  Probabilities stay
rational throughout; floats appear only in derived read-only views
(sigma and the normalized moments).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DieParseError

__all__ = [
    "CanonicalDie",
    "Die",
    "MomentSet",
    "canonicalize",
    "difference",
    "moments",
    "negate",
    "parse_die",
]


@dataclass(frozen=True)
class Die:
    """A bounded integer-valued random variable.

    ``outcomes`` is an ordered tuple of (value, probability) pairs with
    strictly increasing integer values and positive rational probabilities
    summing exactly to one.
    """

    outcomes: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        if len(self.outcomes) < 2:
            raise DieParseError("a die needs at least two values")
        total = Fraction(0)
        prev = None
        for value, prob in self.outcomes:
            if not isinstance(value, int):
                raise DieParseError(f"value {value!r} is not an integer")
            if prev is not None and value <= prev:
                raise DieParseError("values must be strictly increasing and distinct")
            if prob <= 0:
                raise DieParseError(f"probability of {value} is not positive")
            prev = value
            total += prob
        if total != 1:
            raise DieParseError(f"probabilities sum to {total}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Fraction]]) -> "Die":
        """Build a die from unordered (value, probability) pairs."""
        items = sorted((int(v), Fraction(p)) for v, p in pairs)
        return cls(tuple(items))

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.outcomes)

    @property
    def probs(self) -> tuple[Fraction, ...]:
        return tuple(p for _, p in self.outcomes)

    def prob_of(self, value: int) -> Fraction:
        for v, p in self.outcomes:
            if v == value:
                return p
        return Fraction(0)

    def to_text(self) -> str:
        """Round-trippable ``value:num/den`` list form."""
        return ",".join(f"{v}:{p.numerator}/{p.denominator}" for v, p in self.outcomes)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class MomentSet:
    """Exact central moments of a die plus float views.

    mu_k are central moments, abs_k the absolute central moments
    E|X - mu1|^k.  sigma = sqrt(mu2); nu_k = mu_k / sigma^k.  The float
    fields are correctly rounded from the exact rationals (relative error
    well under 2**-48).
    """

    mu1: Fraction
    mu2: Fraction
    mu3: Fraction
    mu4: Fraction
    abs1: Fraction
    abs2: Fraction
    abs3: Fraction
    abs4: Fraction
    sigma: float
    nu3: float
    nu4: float


@dataclass(frozen=True)
class CanonicalDie:
    """Affine rescaling q*X - p of a die with exact mean zero.

    ``scale`` is the denominator q and ``offset`` the numerator p of the
    original mean p/q in lowest terms, so the canonical die keeps integer
    support.  The tilt of every n-fold roll is unchanged by this map.
    """

    die: Die
    scale: int
    offset: int


_PGF_RE = re.compile(r"^\((?P<body>[^()]*)\)\s*/\s*(?P<den>\d+)$")
_TERM_RE = re.compile(r"^(?P<coef>\d+)?(?P<z>z(?:\^\{?(?P<exp>-?\d+)\}?)?)?$")


def _parse_pgf(text: str) -> Die:
    m = _PGF_RE.match(text)
    if not m:
        raise DieParseError(f"not a PGF spec: {text!r}")
    den = int(m.group("den"))
    if den <= 0:
        raise DieParseError("PGF divisor must be positive")
    coeffs: dict[int, int] = {}
    for raw in m.group("body").split("+"):
        term = raw.strip()
        tm = _TERM_RE.match(term)
        if not tm or not term:
            raise DieParseError(f"bad PGF term: {raw!r}")
        coef = int(tm.group("coef") or 1)
        if tm.group("z") is None:
            exp = 0
        elif tm.group("exp") is None:
            exp = 1
        else:
            exp = int(tm.group("exp"))
        if coef == 0:
            raise DieParseError(f"zero coefficient in term {raw!r}")
        coeffs[exp] = coeffs.get(exp, 0) + coef
    return Die.from_pairs((v, Fraction(c, den)) for v, c in coeffs.items())


def _parse_pairs(text: str) -> Die:
    pairs = []
    seen = set()
    for raw in text.split(","):
        item = raw.strip()
        if ":" not in item:
            raise DieParseError(f"bad value:prob pair: {raw!r}")
        v_str, p_str = item.split(":", 1)
        try:
            value = int(v_str.strip())
            prob = Fraction(p_str.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DieParseError(f"bad value:prob pair: {raw!r}") from exc
        if value in seen:
            raise DieParseError(f"duplicate value {value}")
        seen.add(value)
        pairs.append((value, prob))
    return Die.from_pairs(pairs)


def parse_die(text: str) -> Die:
    """Parse a die from ``value:prob`` pairs or a PGF string.

    Accepted forms (whitespace-insensitive)::

        -3:1/2, 1:1/4, 5:1/4
        (2z^-3+z+z^5)/4
    """
    compact = "".join(text.split())
    if not compact:
        raise DieParseError("empty die spec")
    if ":" in compact:
        return _parse_pairs(compact)
    return _parse_pgf(compact)


def negate(d: Die) -> Die:
    """The distribution of -X."""
    return Die.from_pairs((-v, p) for v, p in d.outcomes)


def difference(a: Die, b: Die) -> Die:
    """The distribution of an independent roll of ``a`` minus one of ``b``.

    This is the full cross-convolution, i.e. the die whose PGF is
    A(z) * B(1/z).
    """
    acc: dict[int, Fraction] = {}
    for va, pa in a.outcomes:
        for vb, pb in b.outcomes:
            v = va - vb
            acc[v] = acc.get(v, Fraction(0)) + pa * pb
    return Die.from_pairs(acc.items())


def mean(d: Die) -> Fraction:
    return sum((Fraction(v) * p for v, p in d.outcomes), Fraction(0))


def canonicalize(d: Die) -> CanonicalDie:
    """Rescale to exact mean zero while keeping integer support.

    With mean p/q in lowest terms, the canonical die is q*X - p.  q is
    minimal: any integer-support affine map to mean zero must multiply by a
    multiple of the mean's denominator.
    """
    mu1 = mean(d)
    q = mu1.denominator
    p = mu1.numerator
    moved = Die.from_pairs((q * v - p, prob) for v, prob in d.outcomes)
    return CanonicalDie(die=moved, scale=q, offset=p)


def moments(d: Die) -> MomentSet:
    """Exact central and absolute central moments, with float sigma/nu views."""
    mu1 = mean(d)
    mu = {k: Fraction(0) for k in (2, 3, 4)}
    ab = {k: Fraction(0) for k in (1, 2, 3, 4)}
    for v, p in d.outcomes:
        c = v - mu1
        c2 = c * c
        mu[2] += p * c2
        mu[3] += p * c2 * c
        mu[4] += p * c2 * c2
        a = abs(c)
        ab[1] += p * a
        ab[3] += p * c2 * a
    ab[2] = mu[2]
    ab[4] = mu[4]
    if mu[2] == 0:
        raise DieParseError("degenerate die: variance is zero")
    sigma = math.sqrt(float(mu[2]))
    # One correctly-rounded float conversion per ratio keeps the relative
    # error at a couple of ulps.
    nu3 = math.copysign(math.sqrt(float(mu[3] ** 2 / mu[2] ** 3)), float(mu[3]))
    nu4 = float(mu[4] / mu[2] ** 2)
    return MomentSet(
        mu1=mu1,
        mu2=mu[2],
        mu3=mu[3],
        mu4=mu[4],
        abs1=ab[1],
        abs2=ab[2],
        abs3=ab[3],
        abs4=ab[4],
        sigma=sigma,
        nu3=nu3,
        nu4=nu4,
    )
