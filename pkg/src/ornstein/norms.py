"""L1(T^2) norm estimates: uniform grids, Monte Carlo, and coefficient bounds.

Grid sampling is exact at the nodes: frequencies are reduced modulo the grid
size before synthesis, so huge frequencies alias onto the grid instead of
losing precision.  When the grid resolves every frequency (N_i >= 2 F_i + 1)
the estimate is marked ``resolved``; otherwise the grid acts as a rank-2
lattice rule and the refinement delta is the only error proxy.

Monte Carlo points are (u1, u2) / 2^64 with u drawn from a Philox stream, so
<q, x> mod 1 is computed exactly in wrapping 64-bit integer arithmetic.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Optional, Union

import numpy as np

from . import kernels
from .exact import fraction_str
from .riesz import SparseTrigPoly, StructuralProduct, coeff_sum, max_coeff

Poly = Union[SparseTrigPoly, StructuralProduct]

DEFAULT_OVERSAMPLE = 4
DEFAULT_MAX_POINTS = 2**20
# |f| has kinks, so even low-frequency functions need a few hundred nodes per axis
MIN_NODES = 257
DEFAULT_CONFIDENCE = 0.999
BATCH = 1 << 15
_MOD64 = 1 << 64
# dense FFT synthesis above this many nodes switches to direct summation
DENSE_MAX_POINTS = 2**23


class GridInfeasible(ValueError):
    pass


@dataclass
class NormEstimate:
    value: float
    lower: float
    upper: float
    method: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "detail": self.detail,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NormEstimate":
        return cls(
            value=float(obj["value"]),
            lower=float(obj["lower"]),
            upper=float(obj["upper"]),
            method=obj["method"],
            detail=dict(obj.get("detail", {})),
        )


@dataclass
class EstimatorConfig:
    method: str = "auto"  # auto | grid | montecarlo
    samples: int = 100_000
    seed: int = 0
    confidence: float = DEFAULT_CONFIDENCE
    oversample: int = DEFAULT_OVERSAMPLE
    max_points: int = DEFAULT_MAX_POINTS
    threads: Optional[int] = None


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ORNSTEIN_THREADS", "1")))
    except ValueError:
        return 1


# --- grid --------------------------------------------------------------------


def _odd(n: int) -> int:
    return n if n % 2 else n + 1


def grid_shape(max_freq, oversample: int = DEFAULT_OVERSAMPLE, max_points: int = DEFAULT_MAX_POINTS):
    """Node counts (N1, N2, resolved) for a coarse grid.

    Resolving sizes are max(oversample * (2 F_i + 1), MIN_NODES), rounded up to
    odd.  When their product exceeds max_points the grid is capped and marked
    unresolved.
    """
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    res = [_odd(max(oversample * (2 * int(F) + 1), MIN_NODES)) for F in max_freq]
    if res[0] * res[1] <= max_points:
        return res[0], res[1], True
    side = _odd(math.isqrt(max_points)) - 2
    if res[1] <= side:
        return _odd(max_points // res[1]) - 2, res[1], False
    if res[0] <= side:
        return res[0], _odd(max_points // res[0]) - 2, False
    return side, side, False


def _sparse_grid_values(p: SparseTrigPoly, N1: int, N2: int) -> np.ndarray:
    if not p.coeffs:
        return np.zeros((N1, N2))
    qs = list(p.coeffs)
    i1 = np.array([q[0] % N1 for q in qs], dtype=np.int64)
    i2 = np.array([q[1] % N2 for q in qs], dtype=np.int64)
    c = np.array([complex(float(a), float(b)) for a, b in p.coeffs.values()])
    if N1 * N2 <= DENSE_MAX_POINTS:
        C = np.zeros((N1, N2), dtype=complex)
        np.add.at(C, (i1, i2), c)
        return np.fft.ifft2(C) * (N1 * N2)
    # direct summation, one row of x1 at a time
    out = np.empty((N1, N2), dtype=complex)
    j2 = np.arange(N2)
    e2 = np.exp(2j * np.pi * np.outer(i2, j2) / N2)  # terms x N2
    for j1 in range(N1):
        e1 = np.exp(2j * np.pi * ((i1 * j1) % N1) / N1)
        out[j1] = (c * e1) @ e2
    return out


def _axis_trig(coords, N: int):
    j = np.arange(N, dtype=np.int64)
    r = np.array([int(a) % N for a in coords], dtype=np.int64)
    ph = (np.outer(r, j) % N).astype(np.float64) * (2 * np.pi / N)
    return np.ascontiguousarray(np.cos(ph)), np.ascontiguousarray(np.sin(ph))


def _structural_grid_values(f: StructuralProduct, N1: int, N2: int, backend=None) -> np.ndarray:
    ca, sa = _axis_trig([a[0] for a in f.freqs], N1)
    cb, sb = _axis_trig([a[1] for a in f.freqs], N2)
    w = np.array([float(x) for x in f.weights])
    out = np.empty((N1, N2))
    kernels.product_form_grid(ca, sa, cb, sb, w, f.oscillator == "sin", out, backend=backend)
    return out


def grid_values(f: Poly, N1: int, N2: int, backend=None) -> np.ndarray:
    """Values of f at the nodes (j1/N1, j2/N2); complex for sparse polynomials."""
    if isinstance(f, StructuralProduct):
        return _structural_grid_values(f, N1, N2, backend)
    return _sparse_grid_values(f, N1, N2)


def _grid_mean_abs(f: Poly, N1: int, N2: int, backend=None) -> float:
    return float(np.abs(grid_values(f, N1, N2, backend)).mean())


def l1_grid(
    f: Poly,
    oversample: int = DEFAULT_OVERSAMPLE,
    max_points: int = DEFAULT_MAX_POINTS,
    require_resolved: bool = False,
    backend=None,
) -> NormEstimate:
    """Mean of |f| on a uniform grid, checked against one refinement (N -> 2N + 1)."""
    N1, N2, resolved = grid_shape(f.max_freq(), oversample, max_points)
    if require_resolved and not resolved:
        raise GridInfeasible(f"resolving grid exceeds {max_points} nodes")
    coarse = _grid_mean_abs(f, N1, N2, backend)
    M1, M2 = 2 * N1 + 1, 2 * N2 + 1
    fine = _grid_mean_abs(f, M1, M2, backend)
    delta = abs(fine - coarse)
    return NormEstimate(
        value=fine,
        lower=fine - delta,
        upper=fine + delta,
        method="grid",
        detail={
            "grid": [N1, N2],
            "fine_grid": [M1, M2],
            "coarse_value": coarse,
            "refinement_delta": delta,
            "resolved": resolved,
        },
    )


# --- Monte Carlo -------------------------------------------------------------


def dyadic_points(seed: int, samples: int, batch: int = BATCH):
    """Deterministic (u1, u2) uint64 batches from a Philox counter-based stream."""
    bitgen = np.random.Philox(key=int(seed))
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        u = bitgen.random_raw(2 * b)
        yield u[:b].copy(), u[b:].copy()
        done += b


def _reduce64(coords) -> np.ndarray:
    return np.array([int(c) % _MOD64 for c in coords], dtype=np.uint64)


def _structural_batch_fn(f: StructuralProduct, backend=None):
    c1 = _reduce64(a[0] for a in f.freqs)
    c2 = _reduce64(a[1] for a in f.freqs)
    if any(x == 0 and y == 0 for x, y in zip(c1, c2)):
        raise ValueError("a frequency vanishes mod 2^64; dyadic sampling would alias it")
    w = np.array([float(x) for x in f.weights])
    sine = f.oscillator == "sin"

    def run(u):
        out = np.empty(u[0].shape[0])
        kernels.product_form_dyadic(c1, c2, w, sine, u[0], u[1], out, backend=backend)
        return np.abs(out)

    return run


def _sparse_batch_fn(p: SparseTrigPoly):
    qs = list(p.coeffs)
    c1 = _reduce64(q[0] for q in qs)
    c2 = _reduce64(q[1] for q in qs)
    c = np.array([complex(float(a), float(b)) for a, b in p.coeffs.values()])
    scale = 2 * np.pi / 2.0**64

    def run(u):
        acc = np.zeros(u[0].shape[0], dtype=complex)
        with np.errstate(over="ignore"):
            for k in range(len(qs)):
                ph = (c1[k] * u[0] + c2[k] * u[1]).view(np.int64).astype(np.float64) * scale
                acc += c[k] * np.exp(1j * ph)
        return np.abs(acc)

    return run


def l1_montecarlo(
    f: Poly,
    samples: int = 100_000,
    seed: int = 0,
    confidence: float = DEFAULT_CONFIDENCE,
    threads: Optional[int] = None,
    backend=None,
    batch: int = BATCH,
) -> NormEstimate:
    """Sample mean of |f| with a normal-approximation confidence interval."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    if isinstance(f, StructuralProduct):
        run = _structural_batch_fn(f, backend)
    elif f.coeffs:
        run = _sparse_batch_fn(f)
    else:
        run = lambda u: np.zeros(u[0].shape[0])  # noqa: E731

    def summarize(u):
        v = run(u)
        return math.fsum(v), math.fsum(v * v)

    threads = threads or default_threads()
    batches = dyadic_points(seed, samples, batch)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(summarize, batches))
    else:
        parts = [summarize(u) for u in batches]
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / samples
    var = max(0.0, (s2 - samples * mean * mean) / (samples - 1))
    stderr = math.sqrt(var / samples)
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    return NormEstimate(
        value=mean,
        lower=mean - z * stderr,
        upper=mean + z * stderr,
        method="montecarlo",
        detail={
            "samples": samples,
            "seed": int(seed),
            "stderr": stderr,
            "confidence": confidence,
            "z": z,
            "kernel": kernels.BACKEND if backend is None else backend,
        },
    )


# --- coefficient bounds ------------------------------------------------------


def _float_down(x: Fraction) -> float:
    f = float(x)
    return math.nextafter(f, -math.inf) if Fraction(f) > x else f


def _float_up(x: Fraction) -> float:
    f = float(x)
    return math.nextafter(f, math.inf) if Fraction(f) < x else f


def decimal_down(x: Fraction, digits: int = 12) -> str:
    s = 10**digits
    return _render(math.floor(Fraction(x) * s), digits)


def decimal_up(x: Fraction, digits: int = 12) -> str:
    s = 10**digits
    return _render(math.ceil(Fraction(x) * s), digits)


def _render(k: int, digits: int) -> str:
    sign = "-" if k < 0 else ""
    k = abs(k)
    whole, frac = divmod(k, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def l1_coeff_bounds(p: SparseTrigPoly) -> NormEstimate:
    """max_q |c_q| <= ||p||_1 <= sum_q |c_q|."""
    lo = max_coeff(p)
    hi = coeff_sum(p)
    lo_f, hi_f = _float_down(lo), _float_up(hi)
    return NormEstimate(
        value=(lo_f + hi_f) / 2,
        lower=lo_f,
        upper=hi_f,
        method="coeff-bound",
        detail={
            "lower_exact": fraction_str(lo),
            "upper_exact": fraction_str(hi),
            "lower_decimal": decimal_down(lo),
            "upper_decimal": decimal_up(hi),
        },
    )


# --- dispatch ----------------------------------------------------------------


def estimate_l1(f: Poly, config: Optional[EstimatorConfig] = None, backend=None) -> NormEstimate:
    """Grid when a resolving grid fits (or when asked), Monte Carlo otherwise."""
    cfg = config or EstimatorConfig()
    if cfg.method == "grid":
        return l1_grid(f, cfg.oversample, cfg.max_points, backend=backend)
    if cfg.method == "auto":
        N1, N2, resolved = grid_shape(f.max_freq(), cfg.oversample, cfg.max_points)
        if resolved:
            return l1_grid(f, cfg.oversample, cfg.max_points, backend=backend)
    elif cfg.method != "montecarlo":
        raise ValueError(f"unknown estimator {cfg.method!r}")
    return l1_montecarlo(f, cfg.samples, cfg.seed, cfg.confidence, cfg.threads, backend=backend)
