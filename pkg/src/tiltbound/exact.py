"""Exact n-fold sum distributions and exact tilts by iterated convolution.

PMFs are stored as big-integer numerators over a single denominator D**n,
where D is the lcm of the outcome denominators; no floating point touches
the probabilities, so tilt signs are exact.  A rolling state makes series
computations one incremental sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .die import Die, mean
from .errors import BudgetError

__all__ = [
    "DEFAULT_BUDGET_BYTES",
    "SumPmf",
    "TiltValue",
    "prob_below_mean",
    "sum_pmf",
    "tilt",
    "tilt_series",
]

DEFAULT_BUDGET_BYTES = 2 << 30  # 2 GiB working set


@dataclass(frozen=True)
class SumPmf:
    """Exact PMF of the n-fold IID sum of a die.

    ``weights`` maps attained values to big-integer numerators over
    ``denominator`` = D**n.  The numerators sum exactly to the denominator.
    """

    n: int
    denominator: int
    weights: dict[int, int]

    def prob(self, value: int) -> Fraction:
        return Fraction(self.weights.get(value, 0), self.denominator)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.weights))


@dataclass(frozen=True)
class TiltValue:
    """Exact tilt of the n-fold sum about its mean, plus sqrt(2*pi*n)-scaled view."""

    n: int
    tilt: Fraction
    normalized: float


class Roller:
    """Rolling exact convolution state for one die.

    After ``step()`` has run n times the internal array holds the numerators
    of the n-fold sum over denominator D**n, indexed by value minus
    n*min(value).  Single-owner mutable state; each instance is used by one
    sweep at a time.
    """

    def __init__(self, die: Die, max_bytes: int = DEFAULT_BUDGET_BYTES,
                 max_steps: int | None = None):
        self.die = die
        self.max_bytes = max_bytes
        self.max_steps = max_steps
        lcm = 1
        for p in die.probs:
            lcm = lcm * p.denominator // math.gcd(lcm, p.denominator)
        self.base_den = lcm
        vmin = die.values[0]
        self.vmin = vmin
        self.extent = die.values[-1] - vmin
        self.shift_weights = [(v - vmin, int(p * lcm)) for v, p in die.outcomes]
        mu = mean(die)
        self.mean_num = mu.numerator
        self.mean_den = mu.denominator
        self.n = 0
        self.denominator = 1
        self.weights = np.zeros(1, dtype=object)
        self.weights[0] = 1

    def _check_budget(self):
        n_next = self.n + 1
        slots = n_next * self.extent + 1
        entry_bytes = 36 + (n_next * self.base_den.bit_length()) // 8
        projected = slots * entry_bytes
        if projected > self.max_bytes:
            raise BudgetError(
                f"n={n_next}: projected working set {projected} bytes exceeds "
                f"budget {self.max_bytes}"
            )
        if self.max_steps is not None and n_next > self.max_steps:
            raise BudgetError(f"step budget {self.max_steps} exhausted")

    def step(self):
        """Convolve once more with the base die."""
        self._check_budget()
        cur = self.weights
        length = len(cur)
        new = np.zeros(length + self.extent, dtype=object)
        for shift, w in self.shift_weights:
            if w == 1:
                new[shift:shift + length] += cur
            else:
                new[shift:shift + length] += cur * w
        self.weights = new
        self.n += 1
        self.denominator *= self.base_den

    @property
    def offset(self) -> int:
        """Value represented by index 0."""
        return self.n * self.vmin

    def tallies(self) -> tuple[int, int, int]:
        """(below, at, above) numerators relative to the exact mean n*mu1.

        Index i holds value offset+i; it is below the mean iff
        (offset+i)*mean_den < n*mean_num, an exact integer comparison.
        """
        q, p = self.mean_den, self.mean_num
        bound = self.n * p - q * self.offset  # i below mean iff i*q < bound
        length = len(self.weights)
        count_below = min(length, max(0, -(-bound // q)))
        s_below = int(self.weights[:count_below].sum()) if count_below else 0
        at = 0
        if bound % q == 0 and 0 <= bound // q < length:
            at = int(self.weights[bound // q])
        return s_below, at, self.denominator - s_below - at

    def tilt_value(self) -> TiltValue:
        below, at, above = self.tallies()
        t = Fraction(above - below, self.denominator)
        return TiltValue(self.n, t, math.sqrt(2 * math.pi * self.n) * float(t))

    def pmf(self) -> SumPmf:
        weights = {
            self.offset + i: int(w)
            for i, w in enumerate(self.weights)
            if w
        }
        return SumPmf(n=self.n, denominator=self.denominator, weights=weights)


def sum_pmf(d: Die, n: int, max_bytes: int = DEFAULT_BUDGET_BYTES) -> SumPmf:
    """Exact PMF of the sum of n IID copies of ``d``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    roller = Roller(d, max_bytes=max_bytes)
    for _ in range(n):
        roller.step()
    return roller.pmf()


def tilt(d: Die, n: int, max_bytes: int = DEFAULT_BUDGET_BYTES) -> TiltValue:
    """Exact tilt Pr(X[n] > n*mu1) - Pr(X[n] < n*mu1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    roller = Roller(d, max_bytes=max_bytes)
    for _ in range(n):
        roller.step()
    return roller.tilt_value()


def tilt_series(
    d: Die,
    n_from: int,
    n_to: int,
    residue: int | None = None,
    modulus: int | None = None,
    max_bytes: int = DEFAULT_BUDGET_BYTES,
    max_steps: int | None = None,
) -> list[TiltValue]:
    """Exact tilts for n in [n_from, n_to] in one incremental sweep.

    With ``residue``/``modulus`` given, only indices n = residue (mod
    modulus) are reported (the sweep still advances through every n).
    """
    if not 1 <= n_from <= n_to:
        raise ValueError("need 1 <= n_from <= n_to")
    roller = Roller(d, max_bytes=max_bytes, max_steps=max_steps)
    out = []
    for n in range(1, n_to + 1):
        roller.step()
        if n < n_from:
            continue
        if residue is not None and (n - residue) % (modulus or 1):
            continue
        out.append(roller.tilt_value())
    return out


def prob_below_mean(d: Die, n: int, max_bytes: int = DEFAULT_BUDGET_BYTES) -> Fraction:
    """Exact Pr(X[n] < n*mu1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    roller = Roller(d, max_bytes=max_bytes)
    for _ in range(n):
        roller.step()
    below, _, _ = roller.tallies()
    return Fraction(below, roller.denominator)
