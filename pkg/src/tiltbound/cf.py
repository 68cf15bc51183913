"""Characteristic-function analysis: peaks, certified envelopes, tail bounds.

Everything magnitude-based works on the span-normalized die, whose |f| has
period 2*pi and is even, so [0, pi] tells the whole story.  Certification
of upper envelopes and of the optimal quadratic coefficient uses the
Lipschitz constant M = E|X - mu| of |f|: a grid of cells plus M * delta / 2
of slack turns sampled inequalities into rigorous ones without interval
arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .die import Die, canonicalize, moments
from .lattice import certificate, cf_quadratic_coefficient, span_normalize, span_shift

__all__ = [
    "CfProfile",
    "EnvelopePiece",
    "TailEnvelope",
    "build_envelope",
    "cf_eval",
    "peak_profile",
    "prob_below_mean_quadrature",
    "r_optimal",
    "tail_integral_bound",
]

_FLOAT_SLACK = 1e-12
_HEIGHT_HEADROOM = 2e-6  # keeps grid certification feasible where env touches |f|
_GRID_LIPSCHITZ_TARGET = 1e-6  # grid step chosen so M * delta <= this
_CHUNK = 1 << 20


def cf_eval(d: Die, t: float) -> complex:
    """Characteristic function E exp(i t X) at a single point."""
    return sum(float(p) * cmath.exp(1j * t * v) for v, p in d.outcomes)


def _abs_cf_fn(d: Die):
    """Vectorized |f(t)| for a die, chunk-safe for very large grids."""
    vals = np.array(d.values, dtype=float)
    probs = np.array([float(p) for p in d.probs])

    def absf(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if ts.size <= _CHUNK:
            return np.abs(np.exp(1j * np.outer(ts, vals)) @ probs)
        out = np.empty_like(ts)
        for lo in range(0, ts.size, _CHUNK):
            part = ts[lo:lo + _CHUNK]
            out[lo:lo + _CHUNK] = np.abs(np.exp(1j * np.outer(part, vals)) @ probs)
        return out

    return absf


def _lipschitz_bound(d: Die) -> float:
    """Upper-rounded E|X - mu|, a Lipschitz constant for |f|."""
    mu = sum((Fraction(v) * p for v, p in d.outcomes), Fraction(0))
    m = sum((p * abs(v - mu) for v, p in d.outcomes), Fraction(0))
    return math.nextafter(float(m), math.inf)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-9) -> tuple[float, float]:
    """Golden-section maximization of a unimodal bracket."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d_ = a + inv * (b - a)
    fc, fd = f(c), f(d_)
    while b - a > tol:
        if fc > fd:
            b, d_, fd = d_, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + inv * (b - a)
            fd = f(d_)
    t = c if fc > fd else d_
    return t, max(fc, fd)


@dataclass(frozen=True)
class CfProfile:
    """Interior peaks of |f| on (0, pi] for the span-normalized die.

    ``peaks`` lists (t, height) for every verified local maximum on
    (0, pi]; the origin peak (t=0, height 1) is implicit and prepended by
    ``heights()``.  ``lipschitz`` bounds |d/dt |f|| wherever differentiable.
    """

    die: Die
    normalized: Die
    lipschitz: float
    peaks: tuple[tuple[float, float], ...]

    def heights(self) -> list[float]:
        return [1.0] + [h for _, h in self.peaks]

    def as_json_obj(self) -> dict:
        return {
            "lipschitz": self.lipschitz,
            "peaks": [{"t": t, "height": h} for t, h in self.peaks],
        }


def peak_profile(d: Die) -> CfProfile:
    """Locate all local maxima of |f| on (0, pi] for the span-normalized die.

    Grid scan with step <= min(1e-3, 1/(4M)) followed by golden-section
    refinement to |dt| <= 1e-8; each peak is re-verified against nearby
    samples.
    """
    norm = span_normalize(d)
    lip = _lipschitz_bound(norm)
    absf = _abs_cf_fn(norm)
    step = min(1e-3, 1.0 / (4.0 * lip)) if lip > 0 else 1e-3
    count = int(math.ceil(math.pi / step)) + 1
    ts = np.linspace(0.0, math.pi, count)
    ys = absf(ts)

    def f1(t: float) -> float:
        return float(absf(np.array([t]))[0])

    peaks: list[tuple[float, float]] = []
    interior = np.nonzero(
        (ys[1:-1] >= ys[:-2]) & (ys[1:-1] >= ys[2:])
        & ((ys[1:-1] > ys[:-2]) | (ys[1:-1] > ys[2:]))
    )[0] + 1
    for i in interior:
        t_star, h_star = _golden_max(f1, ts[i - 1], ts[i + 1])
        peaks.append((t_star, h_star))
    if ys[-1] > ys[-2]:
        # |f| is even with period 2*pi, so pi is a critical point; increasing
        # into pi means a peak exactly there.
        peaks.append((math.pi, float(ys[-1])))

    deduped: list[tuple[float, float]] = []
    for t_star, h_star in sorted(peaks):
        if deduped and t_star - deduped[-1][0] < 10 * step:
            if h_star > deduped[-1][1]:
                deduped[-1] = (t_star, h_star)
            continue
        deduped.append((t_star, h_star))
    for t_star, h_star in deduped:
        for dt in (1e-6, 1e-5):
            for probe in (t_star - dt, t_star + dt):
                if 0.0 < probe <= math.pi:
                    assert f1(probe) <= h_star + 1e-9, "peak failed verification"
    return CfProfile(die=d, normalized=norm, lipschitz=lip, peaks=tuple(deduped))


def r_optimal(d: Die, gap: float = 1e-8, max_cells: int = 4_000_000) -> float:
    """Certified lower bound on min over (0, pi] of (1 - |f(t)|) / t^2.

    Branch-and-bound on Lipschitz cells: each cell's bound uses the midpoint
    sample minus M * delta / 2.  Near zero, the power-series tail bound
    |f| <= 1 - mu2 t^2 / 2 + abs3 t^3 / 6 yields the cell bound
    mu2/2 - abs3 t / 6, which tends to the mu2/2 limit.  The result is
    guaranteed <= the true minimum and within ``gap`` of it unless the cell
    budget is exhausted (the result stays valid either way).  The certified
    quadratic coefficient is folded in as a floor, so the optimal constant
    never reports below the certificate one (they coincide for dice like
    the fair coin, where the minimum sits exactly at t = pi).
    """
    norm = span_normalize(d)
    ms = moments(norm)
    mu2 = float(ms.mu2)
    ab3 = math.nextafter(float(ms.abs3), math.inf)
    lip = _lipschitz_bound(norm)
    absf = _abs_cf_fn(norm)
    t_series = 0.999 * math.sqrt(2.0 / mu2)

    n0 = 4096
    edges = np.linspace(0.0, math.pi, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    upper = math.inf
    retired_lb = math.inf
    total = n0
    for _ in range(64):
        mids = 0.5 * (lo + hi)
        fm = absf(mids)
        series = hi <= t_series
        bounds = np.where(
            series,
            mu2 / 2.0 - ab3 * hi / 6.0,
            (1.0 - fm - lip * (hi - lo) / 2.0 - _FLOAT_SLACK) / np.maximum(hi, 1e-300) ** 2,
        )
        with np.errstate(divide="ignore"):
            sample_vals = (1.0 - fm + _FLOAT_SLACK) / np.maximum(mids, 1e-300) ** 2
        upper = min(upper, float(sample_vals.min()))
        improvable = bounds < upper - gap
        if (~improvable).any():
            retired_lb = min(retired_lb, float(bounds[~improvable].min()))
        if not improvable.any() or total > max_cells:
            if improvable.any():
                retired_lb = min(retired_lb, float(bounds[improvable].min()))
            break
        lo, hi = lo[improvable], hi[improvable]
        mids = 0.5 * (lo + hi)
        lo = np.concatenate([lo, mids])
        hi = np.concatenate([mids, hi])
        total += len(lo)
    refined = min(retired_lb, upper) * (1.0 - _FLOAT_SLACK)
    d_cert, _ = cf_quadratic_coefficient(certificate(norm), ms)
    return max(refined, d_cert)


@dataclass(frozen=True)
class EnvelopePiece:
    """One piece of a tail envelope: a constant level or a parabola cap
    h * (1 - kappa * (t - t0)^2) on [lo, hi]."""

    lo: float
    hi: float
    kind: str  # "const" | "parabola"
    h: float
    kappa: float = 0.0
    t0: float = 0.0

    def value(self, t: float) -> float:
        if self.kind == "const":
            return self.h
        return self.h * (1.0 - self.kappa * (t - self.t0) ** 2)


@dataclass(frozen=True)
class TailEnvelope:
    """Certified piecewise upper bound on |f| over [s_low, pi].

    Certification grid: at each cell of width ``delta``, the sampled
    |f(midpoint)| plus M * delta / 2 is at most the envelope's minimum over
    the cell, so env(t) >= |f(t)| pointwise.
    """

    pieces: tuple[EnvelopePiece, ...]
    delta: float
    s_low: float

    def value(self, t: float) -> float:
        for p in self.pieces:
            if p.lo <= t <= p.hi:
                return p.value(t)
        raise ValueError(f"t={t} outside envelope domain [{self.s_low}, pi]")

    def max_height(self) -> float:
        return max(p.h for p in self.pieces)

    def as_json_obj(self) -> dict:
        out = []
        for p in self.pieces:
            item = {"lo": p.lo, "hi": p.hi, "kind": p.kind, "h": p.h}
            if p.kind == "parabola":
                item.update({"kappa": p.kappa, "t0": p.t0})
            out.append(item)
        return {"s_low": self.s_low, "delta": self.delta, "pieces": out}


def _certify(absf, pieces: list[EnvelopePiece], s_low: float, lip: float,
             delta: float) -> bool:
    """Grid check: sampled |f| + M*delta/2 <= envelope minimum per cell.

    Pieces are constant or concave, so the cell minimum of the envelope is
    attained at a cell edge (junctions between pieces sit at the shared
    base level).
    """

    def env_vals(ts: np.ndarray) -> np.ndarray:
        out = np.full(ts.shape, np.inf)
        for p in pieces:
            mask = (ts >= p.lo - 1e-15) & (ts <= p.hi + 1e-15)
            if p.kind == "const":
                out[mask] = np.minimum(out[mask], p.h)
            else:
                out[mask] = np.minimum(
                    out[mask], p.h * (1.0 - p.kappa * (ts[mask] - p.t0) ** 2)
                )
        return out

    count = int(math.ceil((math.pi - s_low) / delta))
    for lo_i in range(0, count, _CHUNK):
        n_here = min(_CHUNK, count - lo_i)
        left = s_low + delta * (lo_i + np.arange(n_here))
        right = np.minimum(left + delta, math.pi)
        mids = 0.5 * (left + right)
        f_mid = absf(mids)
        env_min = np.minimum(env_vals(left), env_vals(right))
        if not np.all(f_mid + lip * delta / 2.0 + _FLOAT_SLACK <= env_min):
            return False
    return True


def _constant_sup_envelope(absf, s_low: float, lip: float, delta: float) -> list[EnvelopePiece]:
    """Certified constant envelope at the grid supremum of |f| on [s_low, pi]."""
    count = int(math.ceil((math.pi - s_low) / delta))
    sup = 0.0
    for lo_i in range(0, count, _CHUNK):
        n_here = min(_CHUNK, count - lo_i)
        mids = s_low + delta * (lo_i + np.arange(n_here) + 0.5)
        np.minimum(mids, math.pi, out=mids)
        sup = max(sup, float(absf(mids).max()))
    level = min(1.0, sup + lip * delta / 2.0 + _HEIGHT_HEADROOM)
    return [EnvelopePiece(s_low, math.pi, "const", level)]


def build_envelope(profile: CfProfile, s_low: float) -> TailEnvelope:
    """Certified piecewise envelope: constant at the second peak height with
    parabola caps over every peak above it.

    Cap curvatures start from the measured peak shape and are halved until
    the Lipschitz grid certifies the whole envelope (at most 20 halvings,
    then the envelope falls back to a constant).
    """
    if not 0.0 < s_low < math.pi:
        raise ValueError("s_low must lie in (0, pi)")
    norm = profile.normalized
    lip = profile.lipschitz
    absf = _abs_cf_fn(norm)
    delta = _GRID_LIPSCHITZ_TARGET / max(lip, 1e-9)
    delta = min(delta, (math.pi - s_low) / 64.0)

    peaks = [(t, h) for t, h in profile.peaks if t > s_low]
    if len(peaks) >= 2:
        heights = sorted((h for _, h in peaks), reverse=True)
        base = heights[1] + _HEIGHT_HEADROOM
        caps = [(t, h + _HEIGHT_HEADROOM) for t, h in peaks if h > heights[1]]

        def make_pieces(kappas: list[float]) -> list[EnvelopePiece] | None:
            spans = []
            for (t0, h0), kappa in zip(caps, kappas):
                if kappa <= 0 or h0 <= base:
                    return None
                w = math.sqrt((1.0 - base / h0) / kappa)
                lo_c, hi_c = max(s_low, t0 - w), min(math.pi, t0 + w)
                if hi_c - lo_c < 4 * delta:
                    return None
                spans.append((lo_c, hi_c, t0, h0, kappa))
            spans.sort()
            for (_, hi1, *_), (lo2, *_) in zip(spans, spans[1:]):
                if lo2 < hi1:  # overlapping caps: give up on parabolas
                    return None
            pieces = []
            cursor = s_low
            for lo_c, hi_c, t0, h0, kappa in spans:
                if lo_c > cursor:
                    pieces.append(EnvelopePiece(cursor, lo_c, "const", base))
                pieces.append(EnvelopePiece(lo_c, hi_c, "parabola", h0, kappa, t0))
                cursor = hi_c
            if cursor < math.pi:
                pieces.append(EnvelopePiece(cursor, math.pi, "const", base))
            return pieces

        kappas = []
        for t0, h0 in caps:
            # Measured curvature requirement over the cap's natural width.
            w_probe = math.sqrt(max(1.0 - base / h0, 1e-9))
            offs = np.linspace(1e-4, max(2e-4, w_probe), 256)
            ts = np.clip(t0 + np.concatenate([-offs, offs]), 1e-9, math.pi)
            f_near = absf(ts)
            with np.errstate(divide="ignore"):
                req = (1.0 - f_near / h0) / (ts - t0) ** 2
            kappas.append(max(float(req.min()) * 0.98, 1e-6))

        for _ in range(21):
            pieces = make_pieces(kappas)
            if pieces is None:
                break
            if _certify(absf, pieces, s_low, lip, delta):
                return TailEnvelope(tuple(pieces), delta, s_low)
            kappas = [k / 2.0 for k in kappas]

        top = max(h for _, h in peaks) + _HEIGHT_HEADROOM
        flat = [EnvelopePiece(s_low, math.pi, "const", min(top, 1.0))]
        if _certify(absf, flat, s_low, lip, delta):
            return TailEnvelope(tuple(flat), delta, s_low)

    pieces = _constant_sup_envelope(absf, s_low, lip, delta)
    return TailEnvelope(tuple(pieces), delta, s_low)


def _gauss_integral_bounds(n: int, kappa: float, v0: float, width: float) -> float:
    """Upper bound on the integral of exp(-n*kappa*v^2) over [v0, v0+width],
    v0 >= 0; the best of the flat, Gaussian-tail, and double-tail forms."""
    decay = math.exp(-n * kappa * v0 * v0)
    forms = [width * decay, 0.5 * math.sqrt(math.pi / (n * kappa)) * decay]
    return min(forms)


def tail_integral_bound(env: TailEnvelope, n: int, s: float) -> float:
    """Rigorous upper bound on (1/2) * integral of env(t)^n / t over [s, pi].

    This is the CDF-form tail contribution: the two symmetric tails, the
    1/(2*pi) prefactor, and the D(t) <= pi/2 factor combine to exactly 1/2
    of the one-sided integral.  Constant pieces integrate to a log in closed
    form; parabola caps are bounded through 1 - u <= exp(-u) and Gaussian
    tails.
    """
    if s < env.s_low - 1e-12:
        raise ValueError(f"s={s} below envelope domain start {env.s_low}")
    total = 0.0
    for p in env.pieces:
        lo = max(p.lo, s)
        hi = p.hi
        if hi <= lo:
            continue
        if p.kind == "const":
            if p.h == 0.0:
                continue
            total += 0.5 * math.exp(n * math.log(p.h)) * math.log(hi / lo)
            continue
        hn = math.exp(n * math.log(p.h)) if p.h > 0 else 0.0
        if lo < p.t0 < hi:
            gauss = min(hi - lo, math.sqrt(math.pi / (n * p.kappa)))
            total += 0.5 * hn * gauss / lo
        elif p.t0 <= lo:
            v0 = lo - p.t0
            forms = [_gauss_integral_bounds(n, p.kappa, v0, hi - lo) / lo]
            if v0 > 0:
                # int_{v0}^inf exp(-c v^2/2) dv/v <= exp(-c v0^2/2)/(c v0^2),
                # c = 2 n kappa (integration by parts, dropped negative term)
                c = 2.0 * n * p.kappa
                forms.append(math.exp(-c * v0 * v0 / 2.0) / (c * v0 * v0))
            total += 0.5 * hn * min(forms)
        else:
            v0 = p.t0 - hi
            total += 0.5 * hn * _gauss_integral_bounds(n, p.kappa, v0, hi - lo) / lo
    return total * (1.0 + _FLOAT_SLACK)


def prob_below_mean_quadrature(d: Die, n: int, profile: CfProfile | None = None) -> float:
    """Pr(X[n] < n*mu1) via the principal-value integral representation.

    The canonical die divided by its span is a span-1, mean-zero lattice
    variable V; then Pr(V[n] < 0) = 1/2 - I0 with
    I0 = (1/pi) * int_0^pi Im(exp(i*alpha*t) f_V(t)^n) D(t)/t dt,
    D(t) = (t/2)/sin(t/2) and alpha = 1/2 - {n*a/b}.  Adaptive quadrature
    with split points at the |f| peaks.
    """
    canon = canonicalize(d).die
    b, a = span_shift(canon)
    alpha = 0.5 - ((n * a) % b) / b
    vals = np.array(canon.values, dtype=float) / b
    probs = np.array([float(p) for p in canon.probs])

    def integrand(t: float) -> float:
        if t == 0.0:
            return alpha
        f = complex(np.exp(1j * t * vals) @ probs)
        damp = (t / 2.0) / math.sin(t / 2.0)
        return (cmath.exp(1j * alpha * t) * f**n).imag * damp / t

    if profile is None:
        profile = peak_profile(d)
    points = [t for t, _ in profile.peaks if 0.0 < t < math.pi]
    i0, _ = quad(
        integrand, 0.0, math.pi,
        points=points or None, limit=400, epsabs=1e-13, epsrel=1e-13,
    )
    return 0.5 - i0 / math.pi
