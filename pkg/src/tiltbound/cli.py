"""Command-line front end: analyze | tilt | cf | bounds | dominance.

Human tables truncate (not round) decimals; CSV uses '.' decimals, no
thousands separators, and prints exact rationals as num/den.  Runs are
fully deterministic: identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import bounds as bd
from .die import parse_die
from .errors import BudgetError, DieParseError, SymmetricUndetermined
from .exact import DEFAULT_BUDGET_BYTES, tilt_series
from .lattice import span_normalize
from .prove import (
    STATUS_SYMMETRIC,
    analyze_die,
    dominance,
    prove_all,
    report_json,
)

__all__ = ["main", "run", "RunConfig"]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_SYMMETRIC = 4


@dataclass
class RunConfig:
    """One parsed invocation."""

    command: str
    die: str
    die2: str | None = None
    residue: int | None = None
    n_from: int = 1
    n_to: int = 100
    tail: str | None = None
    fmt: str = "table"
    out: str | None = None
    budget_mb: int = DEFAULT_BUDGET_BYTES >> 20
    samples: int = 2048


def trunc(x: float, places: int = 6) -> str:
    """Truncated (not rounded) fixed-point rendering."""
    scaled = x * 10**places
    whole = math.floor(scaled) if x >= 0 else math.ceil(scaled)
    return f"{whole / 10**places:.{places}f}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiltbound",
        description="Exact tilt scans and certified Edgeworth error bounds for integer dice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, die2=False, n_range=False):
        p.add_argument("--die", required=True, help="die spec: 'v:p,...' or '(..z..)/d'")
        if die2:
            p.add_argument("--die2", required=True, help="second die spec")
        p.add_argument("--class", dest="residue", type=int, default=None,
                       help="restrict to one residue class mod the span")
        if n_range:
            p.add_argument("--from", dest="n_from", type=int, default=1)
            p.add_argument("--to", dest="n_to", type=int, default=100)
        p.add_argument("--tail", choices=("cert", "optimal", "envelope"), default=None,
                       help="tail-bound mode (default: best certifiable)")
        p.add_argument("--format", dest="fmt", choices=("table", "csv", "json"),
                       default="table")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--budget-mb", dest="budget_mb", type=int,
                       default=DEFAULT_BUDGET_BYTES >> 20)

    common(sub.add_parser("analyze", help="prove asymptopia arrival per class"))
    common(sub.add_parser("tilt", help="exact tilt series"), n_range=True)
    p_cf = sub.add_parser("cf", help="CF peaks, envelope, |f| samples")
    common(p_cf)
    p_cf.add_argument("--samples", type=int, default=2048)
    common(sub.add_parser("bounds", help="per-n error bound decomposition"), n_range=True)
    common(sub.add_parser("dominance", help="which die wins n-fold rolls"), die2=True)
    return parser


def _emit(text: str, cfg: RunConfig):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _analysis_rows(reports):
    rows = []
    for r in reports:
        rows.append({
            "class": r.residue,
            "L": r.L_tilt,
            "n1": r.n1,
            "n2_cert": r.n2_by_mode.get("cert"),
            "n2_optimal": r.n2_by_mode.get("optimal"),
            "n2_envelope": r.n2_by_mode.get("envelope"),
            "proven_n0": r.proven_n0,
            "zero_tilts": r.zero_tilt_indices,
            "status": r.status,
        })
    return rows


def _render_analysis_table(die_text, analysis, reports) -> str:
    gc = analysis.gc
    buf = io.StringIO()
    print(f"die      : {die_text}", file=buf)
    print(f"canonical: {analysis.canonical.to_text()}  (scale {analysis.scale}, "
          f"offset {analysis.offset})", file=buf)
    print(f"span b={gc.span} shift a={gc.shift}  sigma^2={gc.mu2}  "
          f"q1={trunc(gc.q1)} q2={trunc(gc.q2)}", file=buf)
    cert = ", ".join(f"{v}:{c:+d}" for v, c in analysis.lattice.certificate)
    print(f"certificate {{{cert}}}  C={analysis.lattice.norm} "
          f"m={analysis.lattice.min_prob}", file=buf)
    print(f"d_cert={trunc(gc.d_cert, 7)} r_cert={trunc(gc.r, 9)} "
          f"r_optimal={trunc(analysis.r_opt, 7)}", file=buf)
    print("", file=buf)
    head = (f"{'class':>5} {'L':>12} {'n1':>8} {'n2.cert':>9} {'n2.opt':>9} "
            f"{'n2.env':>9} {'n0':>8} {'status':>22} zero_tilts")
    print(head, file=buf)
    for row in _analysis_rows(reports):
        def cell(v, w):
            return f"{'-' if v is None else v:>{w}}"
        print(
            f"{row['class']:>5} {trunc(row['L']):>12} {cell(row['n1'], 8)} "
            f"{cell(row['n2_cert'], 9)} {cell(row['n2_optimal'], 9)} "
            f"{cell(row['n2_envelope'], 9)} {cell(row['proven_n0'], 8)} "
            f"{row['status']:>22} {row['zero_tilts'] or ''}",
            file=buf,
        )
    return buf.getvalue()


def cmd_analyze(cfg: RunConfig) -> int:
    die = parse_die(cfg.die)
    analysis = analyze_die(die)
    reports = prove_all(die, max_bytes=cfg.budget_mb << 20, analysis=analysis,
                        tail_mode=cfg.tail)
    if cfg.residue is not None:
        reports = [r for r in reports if r.residue == cfg.residue]
    if cfg.fmt == "json":
        _emit(report_json(reports, cfg.die) + "\n", cfg)
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["class", "L", "n1", "n2_cert", "n2_optimal",
                         "n2_envelope", "proven_n0", "status"])
        for row in _analysis_rows(reports):
            writer.writerow([row["class"], repr(row["L"]), row["n1"], row["n2_cert"],
                             row["n2_optimal"], row["n2_envelope"],
                             row["proven_n0"], row["status"]])
        _emit(buf.getvalue(), cfg)
    else:
        _emit(_render_analysis_table(cfg.die, analysis, reports), cfg)
    if any(r.status == STATUS_SYMMETRIC for r in reports):
        return EXIT_SYMMETRIC
    return EXIT_OK


def cmd_tilt(cfg: RunConfig) -> int:
    die = parse_die(cfg.die)
    modulus = None
    if cfg.residue is not None:
        from .die import canonicalize
        from .lattice import span_shift
        modulus, _ = span_shift(canonicalize(die).die)
    series = tilt_series(
        die, cfg.n_from, cfg.n_to,
        residue=cfg.residue, modulus=modulus,
        max_bytes=cfg.budget_mb << 20,
    )
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n", "tilt_numerator", "tilt_denominator", "tilt_float", "normalized"])
    for tv in series:
        writer.writerow([tv.n, tv.tilt.numerator, tv.tilt.denominator,
                         repr(float(tv.tilt)), repr(tv.normalized)])
    _emit(buf.getvalue(), cfg)
    return EXIT_OK


def cmd_cf(cfg: RunConfig) -> int:
    die = parse_die(cfg.die)
    analysis = analyze_die(die)
    if cfg.fmt == "csv":
        norm = span_normalize(analysis.canonical)
        vals = np.array(norm.values, dtype=float)
        probs = np.array([float(p) for p in norm.probs])
        ts = np.linspace(0.0, math.pi, cfg.samples)
        ys = np.abs(np.exp(1j * np.outer(ts, vals)) @ probs)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["t", "abs_f"])
        for t, y in zip(ts, ys):
            writer.writerow([repr(float(t)), repr(float(y))])
        _emit(buf.getvalue(), cfg)
        return EXIT_OK
    payload = {
        "die": cfg.die,
        "profile": analysis.profile.as_json_obj(),
        "peak_heights": [float(f"{h:.12g}") for h in analysis.profile.heights()],
        "envelope": analysis.envelope.as_json_obj() if analysis.envelope else None,
        "certificate": analysis.lattice.as_json_obj(),
        "d_cert": float(f"{analysis.gc.d_cert:.12g}"),
        "r_optimal": float(f"{analysis.r_opt:.12g}"),
    }
    if cfg.fmt == "json":
        _emit(json.dumps(payload, indent=2) + "\n", cfg)
    else:
        buf = io.StringIO()
        print(f"die: {cfg.die}", file=buf)
        print(f"peak heights: {', '.join(trunc(h, 5) for h in analysis.profile.heights())}",
              file=buf)
        print(f"d_cert={trunc(analysis.gc.d_cert, 7)}  "
              f"r_optimal={trunc(analysis.r_opt, 7)}", file=buf)
        env = analysis.envelope
        if env:
            print(f"envelope over [{trunc(env.s_low, 5)}, pi]:", file=buf)
            for p in env.pieces:
                if p.kind == "const":
                    print(f"  const {trunc(p.h, 5)} on [{trunc(p.lo, 5)}, {trunc(p.hi, 5)}]",
                          file=buf)
                else:
                    print(f"  parabola h={trunc(p.h, 5)} kappa={trunc(p.kappa, 3)} "
                          f"t0={trunc(p.t0, 5)} on [{trunc(p.lo, 5)}, {trunc(p.hi, 5)}]",
                          file=buf)
        _emit(buf.getvalue(), cfg)
    return EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    die = parse_die(cfg.die)
    analysis = analyze_die(die)
    gc = analysis.gc
    env = analysis.envelope if cfg.tail == "envelope" else None
    r = (2.0 * analysis.r_opt * gc.span**2 / float(gc.mu2)
         if cfg.tail == "optimal" else None)
    rows = []
    for n in range(cfg.n_from, cfg.n_to + 1):
        c = n % gc.span
        if cfg.residue is not None and c != cfg.residue:
            continue
        cc = bd.class_constants(analysis.canonical, analysis.lattice, analysis.moments, c)
        if n < gc.n_min:
            rows.append((n, None))
            continue
        terms = bd.error_bound_tilt_terms(gc, cc, n, envelope=env, r=r)
        scale = math.sqrt(2.0 * math.pi * n)
        rows.append((n, (
            scale * terms.total(), scale * terms.principal, scale * terms.tail,
            scale * terms.skew, scale * terms.cut1, scale * terms.cut2,
            scale * terms.cut3, scale * terms.cut4, cc.L_tilt,
        )))
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["n", "EB", "principal", "tail", "skew",
                         "cut1", "cut2", "cut3", "cut4", "L"])
        for n, data in rows:
            if data is None:
                writer.writerow([n, "below_validity_floor"] + [""] * 8)
            else:
                writer.writerow([n] + [repr(x) for x in data])
        _emit(buf.getvalue(), cfg)
    elif cfg.fmt == "json":
        payload = []
        for n, data in rows:
            if data is None:
                payload.append({"n": n, "error": "below_validity_floor"})
            else:
                keys = ("EB", "principal", "tail", "skew", "cut1", "cut2", "cut3",
                        "cut4", "L")
                payload.append({"n": n, **{k: float(f"{v:.12g}")
                                           for k, v in zip(keys, data)}})
        _emit(json.dumps(payload, indent=2) + "\n", cfg)
    else:
        buf = io.StringIO()
        print(f"{'n':>9} {'EB':>14} {'2q2/n':>14} {'tail':>14} {'rest':>14}", file=buf)
        for n, data in rows:
            if data is None:
                print(f"{n:>9} {'(below validity floor n_min=%d)' % gc.n_min}", file=buf)
            else:
                total, principal, tail = data[0], data[1], data[2]
                rest = sum(data[3:8])
                print(f"{n:>9} {trunc(total, 7):>14} {trunc(principal, 7):>14} "
                      f"{trunc(tail, 7):>14} {trunc(rest, 7):>14}", file=buf)
        _emit(buf.getvalue(), cfg)
    return EXIT_OK


def cmd_dominance(cfg: RunConfig) -> int:
    a = parse_die(cfg.die)
    b = parse_die(cfg.die2)
    result = dominance(a, b, max_bytes=cfg.budget_mb << 20, tail_mode=cfg.tail)
    if cfg.fmt == "json":
        _emit(json.dumps(result.as_json_obj(), indent=2) + "\n", cfg)
    else:
        buf = io.StringIO()
        print(f"difference die (first - second): {result.difference.to_text()}", file=buf)
        diff_analysis = analyze_die(result.difference)
        buf.write(_render_analysis_table(result.difference.to_text(), diff_analysis,
                                         result.reports))
        for c, who in result.dominant_by_class.items():
            label = {None: "undetermined (symmetric)",
                     "first": "first die wins", "second": "second die wins"}[who]
            print(f"class {c}: {label}", file=buf)
        _emit(buf.getvalue(), cfg)
    if any(r.status == STATUS_SYMMETRIC for r in result.reports):
        return EXIT_SYMMETRIC
    return EXIT_OK


_COMMANDS = {
    "analyze": cmd_analyze,
    "tilt": cmd_tilt,
    "cf": cmd_cf,
    "bounds": cmd_bounds,
    "dominance": cmd_dominance,
}


def run(cfg: RunConfig) -> int:
    try:
        return _COMMANDS[cfg.command](cfg)
    except DieParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SymmetricUndetermined as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYMMETRIC


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        die=args.die,
        die2=getattr(args, "die2", None),
        residue=args.residue,
        n_from=getattr(args, "n_from", 1),
        n_to=getattr(args, "n_to", 100),
        tail=args.tail,
        fmt=args.fmt,
        out=args.out,
        budget_mb=args.budget_mb,
        samples=getattr(args, "samples", 2048),
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
