"""Machine-checkable proofs of asymptopia arrival per congruence class.

For each residue class of the canonical die's span the certified error
bound yields an n2 with sqrt(2*pi*n)*EB(n) < |L| for every class index
n >= n2; an exact tilt scan up to n2 then pins down the minimal index
proven_n0 from which the sign of T_n equals the sign of L with no gap.
Exact zero tilts are surfaced, never absorbed into either sign.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import bounds as bd
from .cf import CfProfile, TailEnvelope, build_envelope, peak_profile, r_optimal
from .die import Die, MomentSet, canonicalize, moments
from .errors import BudgetError
from .exact import DEFAULT_BUDGET_BYTES, Roller
from .lattice import LatticeStructure, certificate

__all__ = [
    "ClassReport",
    "DieAnalysis",
    "DominanceReport",
    "analyze_die",
    "dominance",
    "prove_all",
    "prove_class",
]

DEFAULT_SCAN_STEPS = 10**6

STATUS_PROVEN = "proven"
STATUS_SYMMETRIC = "symmetric_undetermined"
STATUS_BUDGET = "scan_budget_exceeded"

_MODES = ("cert", "optimal", "envelope")


def _fmt(x: float) -> float:
    """Fixed-precision float for byte-stable reports."""
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class DieAnalysis:
    """Per-die artifacts shared by every class proof."""

    die: Die
    canonical: Die
    scale: int
    offset: int
    lattice: LatticeStructure
    moments: MomentSet
    gc: bd.GlobalConstants
    profile: CfProfile
    r_opt: float
    envelope: TailEnvelope | None


@dataclass
class ClassReport:
    """Proof state for one residue class."""

    residue: int
    span: int
    L_tilt: float
    L_minus: float
    status: str
    n1: int | None = None
    n2_by_mode: dict = field(default_factory=dict)
    tail_mode: str | None = None
    proven_n0: int | None = None
    zero_tilt_indices: list = field(default_factory=list)
    scan_max: int = 0
    bound_decomposition_at: dict = field(default_factory=dict)

    def n2_best(self) -> int | None:
        usable = [v for v in self.n2_by_mode.values() if v is not None]
        return min(usable) if usable else None

    def as_json_obj(self, die_text: str) -> dict:
        return {
            "die": die_text,
            "class": self.residue,
            "span": self.span,
            "L": _fmt(self.L_tilt),
            "L_minus": _fmt(self.L_minus),
            "n1": self.n1,
            "n2": {k: self.n2_by_mode.get(k) for k in _MODES if k in self.n2_by_mode},
            "tail_mode": self.tail_mode,
            "proven_n0": self.proven_n0,
            "zero_tilts": list(self.zero_tilt_indices),
            "scan_max": self.scan_max,
            "status": self.status,
            "bound_decomposition_at": self.bound_decomposition_at,
        }


def analyze_die(d: Die) -> DieAnalysis:
    """Canonicalize and compute every die-level artifact once."""
    canon = canonicalize(d)
    ls = certificate(canon.die)
    ms = moments(canon.die)
    gc = bd.global_constants(canon.die, ls, ms)
    profile = peak_profile(canon.die)
    r_opt = r_optimal(canon.die)
    envelope = None
    s_low = (1.0 / gc.sigma_norm) * (1.0 - 2e-9)
    if 0.0 < s_low < math.pi:
        try:
            envelope = build_envelope(profile, s_low)
            if envelope.max_height() >= 1.0:
                envelope = None
        except ValueError:
            envelope = None
    return DieAnalysis(
        die=d,
        canonical=canon.die,
        scale=canon.scale,
        offset=canon.offset,
        lattice=ls,
        moments=ms,
        gc=gc,
        profile=profile,
        r_opt=r_opt,
        envelope=envelope,
    )


def _decomposition(gc, cc, n, envelope, r) -> dict:
    terms = bd.error_bound_tilt_terms(gc, cc, n, envelope=envelope, r=r)
    scale = math.sqrt(2.0 * math.pi * n)
    return {
        "n": n,
        "total": _fmt(scale * terms.total()),
        "principal": _fmt(scale * terms.principal),
        "tail": _fmt(scale * terms.tail),
        "rest": _fmt(scale * terms.rest()),
    }


def _class_report(analysis: DieAnalysis, c: int, tail_mode: str | None) -> ClassReport:
    gc = analysis.gc
    cc = bd.class_constants(analysis.canonical, analysis.lattice, analysis.moments, c)
    report = ClassReport(
        residue=c,
        span=gc.span,
        L_tilt=cc.L_tilt,
        L_minus=cc.L_minus,
        status=STATUS_PROVEN,
    )
    if bd.is_symmetric_class(gc, cc):
        report.status = STATUS_SYMMETRIC
        return report
    report.n1 = bd.n1(gc, cc)
    modes: dict[str, int | None] = {}
    modes["cert"] = bd.n2(gc, cc, "cert")
    modes["optimal"] = bd.n2(gc, cc, "optimal", r_opt=analysis.r_opt)
    if analysis.envelope is not None:
        modes["envelope"] = bd.n2(gc, cc, "envelope", envelope=analysis.envelope)
    report.n2_by_mode = modes
    if tail_mode is None:
        best_mode = min((m for m in modes if modes[m] is not None),
                        key=lambda m: modes[m])
    elif tail_mode in modes:
        best_mode = tail_mode
    else:
        raise ValueError(f"tail mode {tail_mode!r} not certifiable for this die")
    report.tail_mode = best_mode
    report.scan_max = modes[best_mode]
    env = analysis.envelope if best_mode == "envelope" else None
    r = (2.0 * analysis.r_opt * gc.span**2 / float(gc.mu2)
         if best_mode == "optimal" else None)
    for n_probe in sorted({report.n1, report.scan_max} - {None}):
        if n_probe >= gc.n_min and (n_probe - c) % gc.span == 0:
            report.bound_decomposition_at[str(n_probe)] = _decomposition(
                gc, cc, n_probe, env, r
            )
    return report


def _scan(analysis: DieAnalysis, reports: list[ClassReport],
          max_bytes: int, max_steps: int | None):
    """One exact sweep shared by all classes still needing a scan."""
    todo = {r.residue: r for r in reports if r.status == STATUS_PROVEN and r.scan_max}
    if not todo:
        return
    b = analysis.gc.span
    horizon = max(r.scan_max for r in todo.values())
    signs: dict[int, list[tuple[int, int]]] = {c: [] for c in todo}
    roller = Roller(analysis.die, max_bytes=max_bytes, max_steps=max_steps)
    reached = 0
    try:
        for n in range(1, horizon + 1):
            roller.step()
            c = n % b
            if c in todo and n <= todo[c].scan_max:
                below, at, above = roller.tallies()
                signs[c].append((n, (above > below) - (above < below)))
            reached = n
    except BudgetError:
        pass
    for c, report in todo.items():
        if reached < report.scan_max:
            report.status = STATUS_BUDGET
            report.scan_max = reached
            continue
        target = 1 if report.L_tilt > 0 else -1
        last_bad = None
        for n, sign in signs[c]:
            if sign == 0:
                report.zero_tilt_indices.append(n)
            if sign != target:
                last_bad = n
        if last_bad is None:
            report.proven_n0 = signs[c][0][0] if signs[c] else report.scan_max
        else:
            # The certified bound forces the sign at scan_max >= n2, so a
            # disagreement there would mean the bound itself is broken.
            assert last_bad < report.scan_max, "exact sign contradicts certified bound"
            report.proven_n0 = last_bad + b


def prove_all(
    d: Die,
    max_bytes: int = DEFAULT_BUDGET_BYTES,
    max_steps: int | None = DEFAULT_SCAN_STEPS,
    analysis: DieAnalysis | None = None,
    tail_mode: str | None = None,
) -> list[ClassReport]:
    """One ClassReport per residue class of the canonical die's span.

    ``tail_mode`` pins the scan horizon to that mode's n2 instead of the
    best certifiable one.
    """
    analysis = analysis or analyze_die(d)
    reports = [_class_report(analysis, c, tail_mode) for c in range(analysis.gc.span)]
    _scan(analysis, reports, max_bytes, max_steps)
    return reports


def prove_class(
    d: Die,
    c: int,
    max_bytes: int = DEFAULT_BUDGET_BYTES,
    max_steps: int | None = DEFAULT_SCAN_STEPS,
    analysis: DieAnalysis | None = None,
    tail_mode: str | None = None,
) -> ClassReport:
    """Prove the arrival index for a single residue class."""
    analysis = analysis or analyze_die(d)
    if not 0 <= c < analysis.gc.span:
        raise ValueError(f"residue {c} outside [0, {analysis.gc.span})")
    report = _class_report(analysis, c, tail_mode)
    _scan(analysis, [report], max_bytes, max_steps)
    return report


@dataclass
class DominanceReport:
    """Asymptotic dominance analysis for a pair of dice via their difference."""

    difference: Die
    reports: list[ClassReport]
    dominant_by_class: dict

    def as_json_obj(self) -> dict:
        text = self.difference.to_text()
        return {
            "difference_die": text,
            "classes": [r.as_json_obj(text) for r in self.reports],
            "dominant_by_class": self.dominant_by_class,
        }


def dominance(
    a: Die,
    b: Die,
    max_bytes: int = DEFAULT_BUDGET_BYTES,
    max_steps: int | None = DEFAULT_SCAN_STEPS,
    tail_mode: str | None = None,
) -> DominanceReport:
    """Which of two dice eventually wins n-fold rolls, per residue class.

    Positive tilt of the difference a - b means a's rolls beat b's.
    """
    from .die import difference as diff

    u = diff(a, b)
    reports = prove_all(u, max_bytes=max_bytes, max_steps=max_steps,
                        tail_mode=tail_mode)
    verdict = {}
    for r in reports:
        if r.status == STATUS_SYMMETRIC:
            verdict[str(r.residue)] = None
        else:
            verdict[str(r.residue)] = "first" if r.L_tilt > 0 else "second"
    return DominanceReport(difference=u, reports=reports, dominant_by_class=verdict)


def report_json(reports: list[ClassReport], die_text: str) -> str:
    """Deterministic JSON for a list of class reports."""
    payload = [r.as_json_obj(die_text) for r in reports]
    return json.dumps(payload, indent=2, sort_keys=False)
