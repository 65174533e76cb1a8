"""End-to-end certificate for the ratio ||D^{alpha_1} Z||_1 / sum_{l != 1} ||D^{alpha_l} Z||_1.

With D^{alpha_l} Z = I_l + i^(l mod 2) II_l and D^{alpha_0} Z = R_n:

  ||D^{alpha_1} Z|| >= ||II_1|| - ||I_1|| >= N1 - S_1 = L
  sum_{l != 1} ||D^{alpha_l} Z|| <= 2 + sum_{l >= 2} (S_l + T_l) = D

where S_l bounds the coefficient sum of I_l, T_l = sum_k |sigma_k tau|^l is the
triangle bound on II_l, and N1 is a measured lower bound on ||II_1||.  The
ratio K_hat = L / D is exact given the stored rationals.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact import fraction_str, parse_fraction
from .frequencies import AdmissibleSequence, select_sequence, verify_sequence
from .growth import BASELINE_C
from .norms import EstimatorConfig, NormEstimate, decimal_down, estimate_l1
from .riesz import ALPHA0, ALPHA1, alpha_l, decompose

U0 = Fraction(2)
DEFAULT_SAMPLES = 1_000_000
DEFAULT_CONFIDENCE = 0.999
# Past n ~ 25 the heavy upper tail of II_1 widens the Monte Carlo interval
# faster than the norm grows (1e6 samples: K_hat 0.31 at n = 25, 0.25 at 64).
# Selection alone costs ~12 s at n = 144 and ~90 s at n = 256.
DEFAULT_MAX_N = 25
# Exhaustive verification stays under a second up to here.
PIPELINE_EXHAUSTIVE_MAX_N = 9


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass
class Certificate:
    params: dict
    seq: AdmissibleSequence
    S: list[Fraction]
    T: list[Fraction]
    N1: dict
    K: Fraction
    S_method: str = "interval"
    S_exact: bool = False
    alpha0: tuple = ALPHA0
    alpha1: tuple = ALPHA1
    # wall-clock per stage; kept out of the JSON so reruns are byte-identical
    timings: dict = field(default_factory=dict)

    @property
    def N1_lower(self) -> Fraction:
        return parse_fraction(self.N1["lower"])

    @property
    def L(self) -> Fraction:
        return max(Fraction(0), self.N1_lower - self.S[0])

    @property
    def D(self) -> Fraction:
        return U0 + sum(self.S[1:], Fraction(0)) + sum(self.T, Fraction(0))

    @property
    def ratio(self) -> Fraction:
        return self.L / self.D

    @property
    def verdict(self) -> bool:
        return self.ratio >= self.K

    def orders(self) -> list[int]:
        return [sum(alpha_l(l, self.alpha0, self.alpha1)) for l in range(self.seq.m + 1)]

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "sequence": self.seq.to_json(),
            "bounds": {
                "S": [fraction_str(s) for s in self.S],
                "S_method": self.S_method,
                "S_exact": self.S_exact,
                "T": [fraction_str(t) for t in self.T],
                "N1": self.N1,
                "U0": fraction_str(U0),
            },
            "L": fraction_str(self.L),
            "D": fraction_str(self.D),
            "ratio": fraction_str(self.ratio),
            "ratio_approx": float(self.ratio),
            "K": fraction_str(self.K),
            "verdict": self.verdict,
            "alphas": [list(alpha_l(l, self.alpha0, self.alpha1)) for l in range(self.seq.m + 1)],
            # true derivative norms are (2 pi)^order times the normalized ones
            "conversion_exponents": self.orders(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        b = obj["bounds"]
        if parse_fraction(b["U0"]) != U0:
            raise ValueError("U0 must be 2")
        alphas = obj.get("alphas")
        return cls(
            params=dict(obj["params"]),
            seq=AdmissibleSequence.from_json(obj["sequence"]),
            S=[parse_fraction(s) for s in b["S"]],
            T=[parse_fraction(t) for t in b["T"]],
            N1=dict(b["N1"]),
            K=parse_fraction(obj["K"]),
            S_method=b.get("S_method", "interval"),
            S_exact=bool(b.get("S_exact", False)),
            alpha0=tuple(alphas[0]) if alphas else ALPHA0,
            alpha1=tuple(alphas[1]) if alphas else ALPHA1,
        )

    def summary(self) -> str:
        lines = [
            f"n={self.seq.n} m={self.seq.m} mode={self.seq.mode} tau={self.seq.tau}",
            f"N1 lower = {self.N1['lower']} ({self.N1['method']}, conf {self.N1['confidence']})",
        ]
        lines.append(f"{'l':>2} {'S_l':>14} {'T_l':>14}")
        for l, s in enumerate(self.S, start=1):
            t = f"{float(self.T[l - 2]):14.6g}" if l >= 2 else f"{'-':>14}"
            lines.append(f"{l:>2} {float(s):14.6g} {t}")
        lines.append(f"L = {float(self.L):.6g}  D = {float(self.D):.6g}  K_hat = {float(self.ratio):.6g}")
        lines.append(f"K = {self.K}  verdict = {self.verdict}")
        return "\n".join(lines)


def replay_ratio(obj: dict) -> Fraction:
    """Recompute K_hat from the stored fields of a certificate JSON only."""
    b = obj["bounds"]
    S = [parse_fraction(s) for s in b["S"]]
    T = [parse_fraction(t) for t in b["T"]]
    L = max(Fraction(0), parse_fraction(b["N1"]["lower"]) - S[0])
    D = parse_fraction(b["U0"]) + sum(S[1:], Fraction(0)) + sum(T, Fraction(0))
    return L / D


def n1_record(est: NormEstimate, confidence: float) -> dict:
    """Statistical fields for the II_1 lower bound; `lower` is rounded down."""
    rec = {
        "value": est.value,
        "lower": decimal_down(Fraction(est.lower)),
        "confidence": confidence if est.method == "montecarlo" else None,
        "method": est.method,
        "seed": est.detail.get("seed"),
        "samples": est.detail.get("samples"),
    }
    if est.method == "grid":
        rec["grid"] = est.detail.get("fine_grid")
        rec["resolved"] = est.detail.get("resolved")
    return rec


def assemble_certificate(
    seq: AdmissibleSequence,
    n1: NormEstimate,
    K,
    S: list[Fraction],
    S_method: str = "interval",
    S_exact: bool = False,
    params: Optional[dict] = None,
    confidence: float = DEFAULT_CONFIDENCE,
) -> Certificate:
    if n1 is None:
        raise ValueError("missing estimate for II_1")
    if n1.method == "grid" and not n1.detail.get("resolved", False):
        raise ValueError("grid estimate for II_1 is not resolving; not a valid lower bound")
    if len(S) != seq.m:
        raise ValueError(f"need {seq.m} remainder bounds, got {len(S)}")
    if any(s < 0 for s in S):
        raise ValueError("remainder bounds must be nonnegative")
    T = [decompose(seq, l, materialize=False)[1].triangle_bound() for l in range(2, seq.m + 1)]
    K = Fraction(K)
    base = {
        "n": seq.n,
        "m": seq.m,
        "K": fraction_str(K),
        "mode": seq.mode,
        "tau": fraction_str(seq.tau),
        "delta": [fraction_str(d) for d in seq.delta] if seq.delta is not None else None,
        "sigma": list(seq.sigma),
        "seed": n1.detail.get("seed"),
    }
    base.update(params or {})
    return Certificate(
        params=base,
        seq=seq,
        S=list(S),
        T=T,
        N1=n1_record(n1, confidence),
        K=K,
        S_method=S_method,
        S_exact=S_exact,
    )


def choose_n(K, c_hat=BASELINE_C, mode: str = "compact") -> int:
    """n = max(64 K^2, (8K + 1)^2) / C^2 rounded up (to a square in compact mode)."""
    K = Fraction(K)
    if K <= 0:
        raise ValueError("K must be positive")
    c = Fraction(str(c_hat))
    if c <= 0:
        raise ValueError("c_hat must be positive")
    v = max(64 * K * K, (8 * K + 1) ** 2) / (c * c)
    n = max(1, math.ceil(v))
    if mode == "compact":
        r = math.isqrt(n - 1) + 1
        n = r * r
    return n


def run_pipeline(
    K,
    n: Optional[int] = None,
    mode: str = "compact",
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
    confidence: float = DEFAULT_CONFIDENCE,
    c_hat=BASELINE_C,
    max_n: int = DEFAULT_MAX_N,
    method: str = "auto",
    threads: Optional[int] = None,
    exhaustive: Optional[bool] = None,
) -> Certificate:
    """select -> verify -> decompose -> estimate -> assemble.

    Without an override n comes from choose_n; when that exceeds max_n the run
    proceeds at max_n and the certificate records both values.
    """
    if Fraction(K) <= 0:
        raise PipelineError("params", "K must be positive")
    n_requested = n if n is not None else choose_n(K, c_hat, mode)
    n_used = n_requested if n is not None else min(n_requested, max_n)
    if n_used < 1:
        raise PipelineError("params", "n must be positive")
    timings = {}

    t = time.perf_counter()
    try:
        seq = select_sequence(n_used, mode=mode)
    except Exception as exc:
        raise PipelineError("select", str(exc)) from exc
    timings["select"] = time.perf_counter() - t

    t = time.perf_counter()
    if exhaustive is None:
        exhaustive = n_used <= PIPELINE_EXHAUSTIVE_MAX_N
    report = verify_sequence(seq, exhaustive=exhaustive)
    if not report.ok:
        raise PipelineError("verify", "; ".join(report.violations))
    timings["verify"] = time.perf_counter() - t

    t = time.perf_counter()
    _, II1 = decompose(seq, 1, materialize=False)
    timings["decompose"] = time.perf_counter() - t

    t = time.perf_counter()
    cfg = EstimatorConfig(method=method, samples=samples, seed=seed, confidence=confidence, threads=threads)
    try:
        est = estimate_l1(II1, cfg)
    except Exception as exc:
        raise PipelineError("estimate", str(exc)) from exc
    if est.method == "grid" and not est.detail.get("resolved", False):
        raise PipelineError("estimate", "grid is not resolving at this n; use montecarlo")
    timings["estimate"] = time.perf_counter() - t

    params = {
        "seed": seed,
        "samples": samples,
        "confidence": confidence,
        "c_hat": str(c_hat),
        "n_requested": n_requested,
        "max_n": max_n,
    }
    cert = assemble_certificate(
        seq,
        est,
        K,
        report.coeff_sum_bounds,
        S_method=report.method,
        S_exact=report.sums_exact,
        params=params,
        confidence=confidence,
    )
    cert.timings = {k: round(v, 3) for k, v in timings.items()}
    return cert
