"""Leading Edgeworth constants and fully explicit error bounds.

All formulas act on a canonical (exact mean zero, integer-valued) die with
span b, shift a, and exact moments.  Two forms are provided:

* CDF form: Pr(X[n] < 0) = 1/2 - L_minus/sqrt(2*pi*n) + E, with
  L_minus = beta - nu3/6, beta = (b/2 - (n*a mod b))/sigma, and an
  explicit eight-term bound on |E| parameterized by a cutoff s.

* Tilt form: T_n = L/sqrt(2*pi*n) + E with
  L = ((-n*a mod b) - (n*a mod b))/sigma - nu3/3; the error bound is the
  CDF-form bound doubled, evaluated at s = (q1*n)^(-1/4).

Both depend on n only through its residue class mod b and the explicit
n-terms, so certified arrival indices (n2) follow from per-term
monotonicity plus a single crossing search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cf import TailEnvelope, tail_integral_bound
from .die import Die, MomentSet
from .errors import SymmetricUndetermined, ValidityFloorError
from .lattice import LatticeStructure, cf_quadratic_coefficient

__all__ = [
    "BoundTerms",
    "ClassConstants",
    "GlobalConstants",
    "class_constants",
    "error_bound_cdf",
    "error_bound_tilt",
    "error_bound_tilt_terms",
    "global_constants",
    "n1",
    "n2",
]

_REL_UP = 1.0 + 1e-12  # upward slack so claimed bounds survive float rounding

P0 = math.e - 1.0
P1 = 3.0 * (math.pi - 3.0) / math.pi**3


@dataclass(frozen=True)
class GlobalConstants:
    """Die-level constants of the error bound.

    q1 = 1/5 + nu4/24; q2 = p0*q1/2 + b^2*p1/mu2; q4 = |nu3|/6;
    r = 16 b^2 m / (pi C sigma)^2.  n_min is the validity floor
    ceil(max(4*q1, 1/q1, 81*b^4/(q1*pi^4*mu2^2))): below it the cutoff
    s = (q1*n)^(-1/4) violates one of its prerequisites.
    """

    p0: float
    p1: float
    q1: float
    q2: float
    q4: float
    r: float
    d_cert: float
    n_min: int
    span: int
    shift: int
    sigma: float
    sigma_norm: float
    mu2: Fraction
    mu3: Fraction
    nu3: float


@dataclass(frozen=True)
class ClassConstants:
    """Per-residue-class quantities.

    For n = c (mod b): beta = (b/2 - (c*a mod b))/sigma, q3 = |beta|,
    q5 = q3^3/6 + 3 q3^2 q4/2 + 15 q3 q4^2/2 + 35 q4^3/2,
    L_tilt = ((-c*a mod b) - (c*a mod b))/sigma - nu3/3 and
    L_minus = beta - nu3/6.
    """

    residue: int
    beta: float
    q3: float
    q5: float
    L_tilt: float
    L_minus: float
    lattice_numerator: int  # (-c*a mod b) - (c*a mod b), exact


@dataclass(frozen=True)
class BoundTerms:
    """Tilt-form bound split into its seven summands (unscaled)."""

    principal: float  # 2 q2 / n
    tail: float       # exp(-n r/2)/(n r), or the envelope tail integral
    skew: float       # 2 q5 / (sqrt(2 pi) n^(3/2))
    cut1: float       # e^-eta (1 + p0)/eta
    cut2: float       # e^-eta 4 p0 q1 / n
    cut3: float       # e^-eta (q3 + q4)/(eta pi (q1 n)^(1/4))
    cut4: float       # e^-eta 2 q4 / (pi (q1 n)^(1/4))

    def total(self) -> float:
        parts = (self.principal, self.tail, self.skew,
                 self.cut1, self.cut2, self.cut3, self.cut4)
        return math.fsum(parts) * _REL_UP

    def rest(self) -> float:
        return math.fsum((self.skew, self.cut1, self.cut2, self.cut3, self.cut4))


def global_constants(d: Die, ls: LatticeStructure, ms: MomentSet) -> GlobalConstants:
    """All die-level bound constants; expects the canonical die's structures."""
    b = ls.span
    q1 = 0.2 + ms.nu4 / 24.0
    q2 = P0 * q1 / 2.0 + b * b * P1 / float(ms.mu2)
    d_cert, r = cf_quadratic_coefficient(ls, ms)
    floor = max(4.0 * q1, 1.0 / q1, 81.0 * b**4 / (q1 * math.pi**4 * float(ms.mu2) ** 2))
    return GlobalConstants(
        p0=P0,
        p1=P1,
        q1=q1,
        q2=q2,
        q4=abs(ms.nu3) / 6.0,
        r=r,
        d_cert=d_cert,
        n_min=max(1, math.ceil(floor)),
        span=b,
        shift=ls.shift,
        sigma=ms.sigma,
        sigma_norm=ms.sigma / b,
        mu2=ms.mu2,
        mu3=ms.mu3,
        nu3=ms.nu3,
    )


def class_constants(d: Die, ls: LatticeStructure, ms: MomentSet, c: int) -> ClassConstants:
    """Constants for the residue class n = c (mod span)."""
    b, a = ls.span, ls.shift
    if not 0 <= c < b:
        raise ValueError(f"residue {c} outside [0, {b})")
    k = (c * a) % b
    k_neg = (-c * a) % b
    beta = (b / 2.0 - k) / ms.sigma
    q3 = abs(beta)
    q4 = abs(ms.nu3) / 6.0
    q5 = q3**3 / 6.0 + 1.5 * q3**2 * q4 + 7.5 * q3 * q4**2 + 17.5 * q4**3
    return ClassConstants(
        residue=c,
        beta=beta,
        q3=q3,
        q5=q5,
        L_tilt=(k_neg - k) / ms.sigma - ms.nu3 / 3.0,
        L_minus=beta - ms.nu3 / 6.0,
        lattice_numerator=k_neg - k,
    )


def is_symmetric_class(gc: GlobalConstants, cc: ClassConstants) -> bool:
    """Exact test for L_tilt = 0.

    L = k/sigma - mu3/(3 sigma^3) vanishes iff 3*k*mu2 = mu3 as exact
    rationals (k the integer lattice numerator), never by float accident.
    """
    return 3 * cc.lattice_numerator * gc.mu2 == gc.mu3


def _s_max(gc: GlobalConstants, n: int) -> float:
    return min(1.0, math.pi * gc.sigma_norm / 3.0, (gc.q1 * n) ** -0.25)


def error_bound_cdf(gc: GlobalConstants, cc: ClassConstants, n: int, s: float) -> float:
    """Explicit bound on |E| in Pr(X[n] < 0) = 1/2 - L_minus/sqrt(2 pi n) + E.

    Requires s <= min(1, pi*sigma_norm/3, (q1 n)^(-1/4)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    limit = _s_max(gc, n)
    if s > limit * (1.0 + 1e-9) or s <= 0:
        raise ValidityFloorError(
            f"s={s} violates s <= min(1, pi*sigma_norm/3, (q1 n)^(-1/4)) = {limit}"
        )
    q1, q2, q3, q4, q5 = gc.q1, gc.q2, cc.q3, gc.q4, cc.q5
    r = gc.r
    ns2 = n * s * s
    decay = math.exp(-ns2 / 2.0)
    total = (
        q2 / n
        + math.exp(-n * r / 2.0) / (2.0 * n * r)
        + q5 / (math.sqrt(2.0 * math.pi) * n**1.5)
        + decay * (
            gc.p0 * q1 * s * s
            + 1.0 / ns2
            + 2.0 * gc.p0 * q1 / n
            + (q3 + q4) / (math.pi * n * s)
            + q4 * s / math.pi
        )
    )
    return total * _REL_UP


def _check_tilt_preconditions(gc: GlobalConstants, cc: ClassConstants, n: int):
    if n < gc.n_min:
        raise ValidityFloorError(
            f"n={n} is below the validity floor n_min={gc.n_min} "
            f"(= ceil(max(4*q1, 1/q1, 81*b^4/(q1*pi^4*mu2^2))))"
        )
    if (n - cc.residue) % gc.span:
        raise ValueError(f"n={n} is not in residue class {cc.residue} mod {gc.span}")


def error_bound_tilt_terms(
    gc: GlobalConstants,
    cc: ClassConstants,
    n: int,
    envelope: TailEnvelope | None = None,
    r: float | None = None,
) -> BoundTerms:
    """Seven-term tilt bound at s = (q1 n)^(-1/4), itemized.

    The cutoff terms use eta = n s^2 / 2 = sqrt(n/q1)/2 directly.  With
    ``envelope`` given, the quadratic-CF tail term exp(-nr/2)/(nr) is
    replaced by the certified envelope integral over [1/sigma_norm, pi];
    with ``r`` given, that value replaces the certificate constant.
    """
    _check_tilt_preconditions(gc, cc, n)
    q1, q2, q3, q4, q5 = gc.q1, gc.q2, cc.q3, gc.q4, cc.q5
    eta = 0.5 * math.sqrt(n / q1)
    decay = math.exp(-eta)
    quart = (q1 * n) ** 0.25
    if envelope is not None:
        # Start a hair below 1/sigma_norm so the envelope integral overlaps
        # (never undershoots) the region the cutoff terms already cover.
        s_cut = (1.0 / gc.sigma_norm) * (1.0 - 1e-9)
        tail = 2.0 * tail_integral_bound(envelope, n, s_cut) if s_cut < math.pi else 0.0
    else:
        r_use = gc.r if r is None else r
        tail = math.exp(-n * r_use / 2.0) / (n * r_use)
    return BoundTerms(
        principal=2.0 * q2 / n,
        tail=tail,
        skew=2.0 * q5 / (math.sqrt(2.0 * math.pi) * n**1.5),
        cut1=decay * (1.0 + gc.p0) / eta,
        cut2=decay * 4.0 * gc.p0 * q1 / n,
        cut3=decay * (q3 + q4) / (eta * math.pi * quart),
        cut4=decay * 2.0 * q4 / (math.pi * quart),
    )


def error_bound_tilt(
    gc: GlobalConstants,
    cc: ClassConstants,
    n: int,
    envelope: TailEnvelope | None = None,
    r: float | None = None,
) -> float:
    """Explicit bound on |T_n - L/sqrt(2 pi n)| for n in the class, n >= n_min."""
    return error_bound_tilt_terms(gc, cc, n, envelope=envelope, r=r).total()


def n1(gc: GlobalConstants, cc: ClassConstants) -> int:
    """Principal-term arrival floor ceil(8 pi q2^2 / L^2).

    No proof of arrival is possible earlier: the 2*q2/n term alone already
    exceeds |L|/sqrt(2 pi n) below it.
    """
    if is_symmetric_class(gc, cc):
        raise SymmetricUndetermined(
            f"L = 0 in residue class {cc.residue}: higher-order expansions needed"
        )
    return math.ceil(8.0 * math.pi * gc.q2**2 / cc.L_tilt**2)


def _scaled_bound(gc, cc, n, envelope, r) -> float:
    return math.sqrt(2.0 * math.pi * n) * error_bound_tilt(gc, cc, n, envelope=envelope, r=r)


def _envelope_monotone_floor(envelope: TailEnvelope | None) -> int:
    """Smallest n from which every envelope tail piece, scaled by
    sqrt(2 pi n), is nonincreasing in n.

    Scaled piece bounds have the form sqrt(n) * h^n * A(n) with A
    nonincreasing, so n >= -1/(2 ln h) suffices; pieces at h >= 1 never
    dominate and are rejected.
    """
    if envelope is None:
        return 1
    floor = 1
    for p in envelope.pieces:
        if p.h >= 1.0:
            raise ValidityFloorError("envelope reaches height 1; tail never damps")
        floor = max(floor, math.ceil(-0.5 / math.log(p.h)))
    return floor


def n2(
    gc: GlobalConstants,
    cc: ClassConstants,
    tail_mode: str = "cert",
    r_opt: float | None = None,
    envelope: TailEnvelope | None = None,
    search_cap: int = 10**9,
) -> int:
    """Smallest class index n with sqrt(2 pi n) * EB(n) < |L|, certified
    for every larger class index.

    ``tail_mode`` selects the tail-term source: "cert" uses the certificate
    constant r, "optimal" the certified optimal quadratic constant, and
    "envelope" the peak-envelope integral.  The search starts at the floor
    where every scaled term is provably nonincreasing (closed-form per-term
    conditions), brackets by doubling, then bisects; the domination check
    therefore covers all larger n in the class.
    """
    if is_symmetric_class(gc, cc):
        raise SymmetricUndetermined(
            f"L = 0 in residue class {cc.residue}: higher-order expansions needed"
        )
    if tail_mode == "cert":
        env, r = None, None
    elif tail_mode == "optimal":
        if r_opt is None:
            raise ValueError("optimal mode needs r_opt")
        env, r = None, 2.0 * r_opt * gc.span**2 / float(gc.mu2)
    elif tail_mode == "envelope":
        if envelope is None:
            raise ValueError("envelope mode needs an envelope")
        env, r = envelope, None
    else:
        raise ValueError(f"unknown tail mode {tail_mode!r}")

    target = abs(cc.L_tilt)
    b, c = gc.span, cc.residue
    start = max(gc.n_min, _envelope_monotone_floor(env))
    start += (c - start) % b  # first class index at or above the floor

    def ok(n: int) -> bool:
        return _scaled_bound(gc, cc, n, env, r) < target

    hi = start
    while not ok(hi):
        if hi > search_cap:
            raise ValidityFloorError(f"n2 search exceeded cap {search_cap}")
        hi = hi * 2 + (c - hi * 2) % b
    lo = start
    # All scaled terms are nonincreasing past ``start``, so the predicate is
    # monotone and bisection finds the first index where it holds.
    while lo < hi:
        mid = lo + (hi - lo) // 2
        mid -= (mid - c) % b
        if mid <= lo:
            mid += b
        if mid >= hi:
            break
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
