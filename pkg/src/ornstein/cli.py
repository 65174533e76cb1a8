"""Command-line front end.

Every subcommand writes JSON to --out (stdout when omitted); tabular commands
also accept --csv.  Exit status: 0 success, 2 certify ran but K was not
certified, 1 any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, certify, growth, hypothesis, kernels
from .frequencies import MODES, AdmissibleSequence, select_sequence, verify_sequence
from .norms import EstimatorConfig, estimate_l1
from .plot import emit_plot
from .riesz import MATERIALIZE_MAX_N, alpha_l, apply_derivative, build_Z, coeff_sum, decompose

EXIT_OK, EXIT_ERROR, EXIT_NOT_CERTIFIED = 0, 1, 2

NORM_CSV_COLUMNS = ("l", "target", "norm", "lower", "upper", "method")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for "not certified"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def parse_multiindices(text: str) -> list[tuple[int, ...]]:
    """'a,b;c,d;...' -> [(a, b), (c, d), ...]."""
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(tuple(int(c) for c in part.split(",")))
        except ValueError:
            raise UsageError(f"bad multiindex {part!r}") from None
    if not out:
        raise UsageError("empty multiindex list")
    return out


def parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError:
        raise UsageError(f"bad integer vector {text!r}") from None


def parse_sigma(text: Optional[str], n: int) -> Optional[tuple[int, ...]]:
    if text is None or text == "ones":
        return None
    sigma = parse_vector(text)
    if any(s not in (0, 1) for s in sigma):
        raise UsageError("sigma entries must be 0 or 1")
    if len(sigma) != n:
        raise UsageError(f"sigma has length {len(sigma)}, expected {n}")
    return sigma


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    return max(1, int(os.environ.get("ORNSTEIN_THREADS", "1")))


def _dump(obj, path: Optional[Path]):
    text = json.dumps(obj, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _write(text: str, path: Optional[Path]):
    if path is not None:
        path.write_text(text)


def _estimator_config(args) -> EstimatorConfig:
    return EstimatorConfig(
        method=args.method,
        samples=args.samples,
        seed=args.seed,
        confidence=args.confidence,
        oversample=args.oversample,
        max_points=args.max_points,
        threads=_threads(args),
    )


def _load_or_select(args) -> AdmissibleSequence:
    if args.sequence is not None:
        obj = json.loads(args.sequence.read_text())
        return AdmissibleSequence.from_json(obj.get("sequence", obj))
    if args.n is None:
        raise UsageError("give --n or --sequence")
    return select_sequence(args.n, mode=args.mode)


# --- commands ---------------------------------------------------------------


def cmd_check_hypothesis(args) -> int:
    rep = hypothesis.check_pair(parse_multiindices(args.alphas), parse_vector(args.lam), parse_vector(args.gamma))
    _dump(rep.to_json(), args.out)
    return EXIT_OK


def cmd_search_witnesses(args) -> int:
    alphas = parse_multiindices(args.alphas)
    found = hypothesis.search_witnesses(alphas, args.bound)
    if found is None:
        _dump({"found": False, "bound": args.bound}, args.out)
        return EXIT_OK
    rep = hypothesis.check_pair(alphas, *found)
    _dump({"found": True, "bound": args.bound, **rep.to_json()}, args.out)
    return EXIT_OK


def cmd_select_frequencies(args) -> int:
    delta = Fraction(args.delta) if args.delta is not None else None
    seq = select_sequence(
        args.n,
        m=args.m,
        sigma=parse_sigma(args.sigma, args.n),
        delta_target=delta,
        mode=args.mode,
        lacunarity=Fraction(args.lacunarity),
    )
    out = {"sequence": seq.to_json()}
    if not args.no_verify:
        out["report"] = verify_sequence(seq, exhaustive=args.exhaustive).to_json()
    _dump(out, args.out)
    return EXIT_OK


def cmd_build_witness(args) -> int:
    seq = _load_or_select(args)
    out = {"sequence": seq.to_json(), "parts": []}
    materialize = seq.n <= MATERIALIZE_MAX_N
    if materialize:
        out["Z"] = build_Z(seq).to_json()
    for l in range(1, seq.m + 1):
        I, II = decompose(seq, l, materialize=materialize)
        part = {"l": l, "alpha": list(alpha_l(l)), "II": II.to_json(), "T": str(II.triangle_bound())}
        if I is not None:
            part["I"] = I.to_json()
            part["S"] = str(coeff_sum(I))
        out["parts"].append(part)
    _dump(out, args.out)
    return EXIT_OK


def cmd_estimate_norms(args) -> int:
    seq = _load_or_select(args)
    cfg = _estimator_config(args)
    rows = []
    targets = []
    for l in range(1, seq.m + 1):
        targets.append((l, "II", decompose(seq, l, materialize=False)[1]))
    if args.derivatives:
        if seq.n > MATERIALIZE_MAX_N:
            raise UsageError(f"--derivatives needs n <= {MATERIALIZE_MAX_N}")
        Z = build_Z(seq)
        for l in range(seq.m + 1):
            targets.append((l, "D", apply_derivative(Z, alpha_l(l))))
    for l, name, f in targets:
        est = estimate_l1(f, cfg)
        rows.append({"l": l, "target": name, "norm": est.value, "lower": est.lower, "upper": est.upper,
                     "method": est.method, "detail": est.detail})
    _dump({"sequence": {"n": seq.n, "mode": seq.mode}, "kernel": kernels.BACKEND, "norms": rows}, args.out)
    if args.csv:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=NORM_CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _write(buf.getvalue(), args.csv)
    return EXIT_OK


def cmd_lemma_growth(args) -> int:
    cfg = _estimator_config(args)
    out = {}
    sigma = parse_sigma(args.sigma, args.m_max)
    if args.search:
        res = growth.sigma_search(args.m_max, Fraction(args.M), cfg, args.oscillator)
        sigma = res.sigma
        out["sigma_search"] = {"sigma": list(res.sigma), "norm": res.norm, "method": res.method}
    fit = growth.growth_experiment(args.m_max, Fraction(args.M), sigma, args.oscillator, cfg)
    out.update(fit.to_json())
    _dump(out, args.out)
    _write(fit.to_csv(), args.csv)
    if args.svg:
        _write(emit_plot(fit.to_csv(), "m", "norm", title=f"{args.oscillator} growth, M={args.M}"), args.svg)
    return EXIT_OK


def cmd_certify(args) -> int:
    cert = certify.run_pipeline(
        Fraction(args.K),
        n=args.n,
        mode=args.mode,
        seed=args.seed,
        samples=args.samples,
        confidence=args.confidence,
        c_hat=args.c_hat,
        max_n=args.max_n,
        method=args.method,
        threads=_threads(args),
    )
    _dump(cert.to_json(), args.out)
    if args.n is None and cert.params["n_requested"] > cert.seq.n:
        print(f"note: n={cert.params['n_requested']} requested, capped at {cert.seq.n}", file=sys.stderr)
    if args.summary or args.out is not None:
        print(cert.summary(), file=sys.stderr)
    return EXIT_OK if cert.verdict else EXIT_NOT_CERTIFIED


def cmd_plot(args) -> int:
    svg = emit_plot(args.table.read_text(), args.x, args.y, title=args.title)
    if args.out is None:
        sys.stdout.write(svg)
    else:
        args.out.write_text(svg)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _add_estimator(p, samples=100_000):
    p.add_argument("--method", choices=("auto", "grid", "montecarlo"), default="auto")
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--confidence", type=float, default=0.999)
    p.add_argument("--oversample", type=int, default=4)
    p.add_argument("--max-points", type=int, default=2**20)
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: $ORNSTEIN_THREADS or 1)")


def _add_sequence_source(p):
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=MODES, default="compact")
    p.add_argument("--sequence", type=Path, help="JSON from select-frequencies")


def build_parser() -> Parser:
    ap = Parser(prog="ornstein", description="Riesz-product witnesses for L1 derivative non-inequalities.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("check-hypothesis", help="check given Lambda/Gamma witnesses")
    p.add_argument("--alphas", required=True, help='multiindices "a,b;c,d;..."')
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_check_hypothesis)

    p = sub.add_parser("search-witnesses", help="smallest witnesses in a box")
    p.add_argument("--alphas", required=True)
    p.add_argument("--bound", type=int, default=hypothesis.DEFAULT_BOUND)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_search_witnesses)

    p = sub.add_parser("select-frequencies", help="build and verify an admissible sequence")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--mode", choices=MODES, default="compact")
    p.add_argument("--delta", help="target tolerance as a rational, default from --mode")
    p.add_argument("--sigma", help="comma list of 0/1 or 'ones'")
    p.add_argument("--lacunarity", default="2")
    p.add_argument("--exhaustive", action="store_true", help="exact enumeration (small n)")
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_select_frequencies)

    p = sub.add_parser("build-witness", help="Z and its I_l / II_l parts")
    _add_sequence_source(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_build_witness)

    p = sub.add_parser("estimate-norms", help="L1 norms of II_l (and D^alpha_l Z)")
    _add_sequence_source(p)
    _add_estimator(p)
    p.add_argument("--derivatives", action="store_true", help="also the full derivative polynomials")
    p.add_argument("--out", type=Path)
    p.add_argument("--csv", type=Path)
    p.set_defaults(func=cmd_estimate_norms)

    p = sub.add_parser("lemma-growth", help="norm growth of lacunary structured sums")
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--M", default="20", help="lacunarity")
    p.add_argument("--sigma", help="comma list of 0/1 or 'ones'")
    p.add_argument("--search", action="store_true", help="pick sigma by exhaustive search (m <= 12)")
    p.add_argument("--oscillator", choices=("cos", "sin"), default="cos")
    _add_estimator(p)
    p.add_argument("--out", type=Path)
    p.add_argument("--csv", type=Path)
    p.add_argument("--svg", type=Path)
    p.set_defaults(func=cmd_lemma_growth)

    p = sub.add_parser("certify", help="end-to-end ratio certificate")
    p.add_argument("--K", required=True)
    p.add_argument("--n", type=int, help="override the n derived from K")
    p.add_argument("--mode", choices=MODES, default="compact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=certify.DEFAULT_SAMPLES)
    p.add_argument("--confidence", type=float, default=certify.DEFAULT_CONFIDENCE)
    p.add_argument("--method", choices=("auto", "grid", "montecarlo"), default="auto")
    p.add_argument("--c-hat", type=float, default=growth.BASELINE_C)
    p.add_argument("--max-n", type=int, default=certify.DEFAULT_MAX_N)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--summary", action="store_true", help="print the table to stderr")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("plot", help="SVG line chart from a CSV table")
    p.add_argument("--table", type=Path, required=True)
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--title", default="")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"ornstein: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except certify.PipelineError as exc:
        print(f"ornstein: {exc.stage} failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"ornstein: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
