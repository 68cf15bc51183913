"""Span, shift, and span certificates with small l1 norm.

The span b of a die is the largest integer with all values in a single
congruence class mod b; the shift a is that class.  A certificate is a set
of integers c_x supported on values of the die with sum 0 and sum of
c_x * x equal to b.  Its l1 norm C and the minimum probability m over its
support drive the quadratic characteristic-function bound
|f(t)| <= 1 - (8m / (pi C)^2) t^2 for the span-normalized die.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .die import Die, MomentSet

__all__ = [
    "LatticeStructure",
    "certificate",
    "cf_quadratic_coefficient",
    "span_normalize",
    "span_shift",
]

# Exhaustive certificate search is capped at 3-value supports with
# coefficients in [-64, 64]; beyond that the extended-gcd construction is
# used.  Small dice have tiny search spaces, the cap bounds runtime.
_COEF_CAP = 64
_MAX_VALUES_FOR_SEARCH = 24

_REL_DOWN = 1.0 - 1e-12  # downward slack for certified lower-bound constants


@dataclass(frozen=True)
class LatticeStructure:
    """Span/shift of a die plus a small-norm span certificate.

    ``certificate`` pairs (value, coefficient) in the die's own value scale:
    the coefficients sum to 0 and sum of c*value equals the span.  ``norm``
    is the l1 norm C >= 2 and ``min_prob`` the minimum probability m among
    values in the certificate's support.
    """

    span: int
    shift: int
    certificate: tuple[tuple[int, int], ...]
    norm: int
    min_prob: Fraction

    def as_json_obj(self) -> list[dict]:
        return [{"value": v, "coefficient": c} for v, c in self.certificate]


def span_shift(d: Die) -> tuple[int, int]:
    """Span b and shift a (in [0, b)) of a die."""
    values = d.values
    b = 0
    for v in values[1:]:
        b = math.gcd(b, v - values[0])
    return b, values[0] % b


def span_normalize(d: Die) -> Die:
    """Map values x to (x - a)/b, giving a span-1 die with shift 0.

    |f| of the result has period 2*pi and is even, so all magnitude-based
    analysis happens on [0, pi].
    """
    b, a = span_shift(d)
    return Die.from_pairs(((v - a) // b, p) for v, p in d.outcomes)


def _ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    """(g, s, t) with s*x + t*y = g = gcd(x, y)."""
    if y == 0:
        return (abs(x), int(math.copysign(1, x)) if x else 0, 0)
    g, s, t = _ext_gcd(y, x % y)
    return g, t, s - (x // y) * t


def _fallback_certificate(norm_values: list[int]) -> dict[int, int]:
    # Constructive proof of the span lemma: chain extended gcds of the
    # differences to the first value.
    base = norm_values[0]
    coeffs: dict[int, int] = {}
    g = 0
    for v in norm_values[1:]:
        d = v - base
        if g == 0:
            g, s = abs(d), int(math.copysign(1, d))
            coeffs = {v: s}
            continue
        g2, s, t = _ext_gcd(g, d)
        if g2 == g:
            continue
        coeffs = {u: s * c for u, c in coeffs.items()}
        coeffs[v] = coeffs.get(v, 0) + t
        g = g2
        if g == 1:
            break
    coeffs = {u: c for u, c in coeffs.items() if c != 0}
    coeffs[base] = coeffs.get(base, 0) - sum(coeffs.values())
    return {u: c for u, c in coeffs.items() if c != 0}


def certificate(d: Die) -> LatticeStructure:
    """Find a span certificate minimizing the l1 norm C (ties: maximize m).

    Searches supports of at most 3 values with coefficients up to 64 in
    magnitude, falling back to the extended-gcd construction.  The search
    runs on the span-normalized values, so the target is sum(c * v) = 1.
    """
    b, a = span_shift(d)
    vals = [(v - a) // b for v in d.values]
    probs = list(d.probs)
    k = len(vals)

    best: tuple[int, Fraction, dict[int, int]] | None = None  # (C, -m, coeffs)

    def consider(coeffs: dict[int, int]):
        nonlocal best
        c_norm = sum(abs(c) for c in coeffs.values())
        m = min(probs[i] for i in coeffs)
        if best is None or (c_norm, -m) < (best[0], -best[1]):
            best = (c_norm, m, dict(coeffs))

    # Pairs: only consecutive-by-one normalized values admit C = 2.
    for i, j in combinations(range(k), 2):
        if vals[j] - vals[i] == 1:
            consider({i: -1, j: 1})
    if best is None and k <= _MAX_VALUES_FOR_SEARCH:
        for i, j, l in combinations(range(k), 3):
            d1 = vals[i] - vals[l]
            d2 = vals[j] - vals[l]
            for c1 in range(-_COEF_CAP, _COEF_CAP + 1):
                rem = 1 - c1 * d1
                if d2 == 0 or rem % d2:
                    continue
                c2 = rem // d2
                c3 = -c1 - c2
                if c1 and c2 and c3 and abs(c2) <= _COEF_CAP and abs(c3) <= _COEF_CAP:
                    consider({i: c1, j: c2, l: c3})
    if best is None:
        by_value = _fallback_certificate(vals)
        idx = {v: i for i, v in enumerate(vals)}
        consider({idx[v]: c for v, c in by_value.items()})

    _, m, coeffs = best
    cert = tuple(sorted((d.values[i], c) for i, c in coeffs.items()))
    c_norm = sum(abs(c) for _, c in cert)
    assert sum(c for _, c in cert) == 0
    assert sum(c * (v - a) // b for v, c in cert) == 1
    return LatticeStructure(span=b, shift=a, certificate=cert, norm=c_norm, min_prob=m)


def cf_quadratic_coefficient(ls: LatticeStructure, ms: MomentSet) -> tuple[float, float]:
    """Certified quadratic CF bound coefficients (d_cert, r).

    d_cert = 8m / (pi C)^2 satisfies |f(t)| <= 1 - d_cert * t^2 on [-pi, pi]
    for the span-normalized die.  r = 16 b^2 m / (pi C sigma)^2 is the same
    bound rescaled so that |g(t)| <= 1 - r t^2 / 2 for the scale-invariant
    CF g.  Both are rounded down so the bounds they feed stay valid.
    """
    d_cert = 8.0 * float(ls.min_prob) / (math.pi * ls.norm) ** 2 * _REL_DOWN
    r = 2.0 * d_cert * ls.span**2 / float(ms.mu2) * _REL_DOWN
    return d_cert, r
