"""Empirical growth of ||sum_{j<=m} sigma_j osc(d_j) prod_{k<j} (1 + cos d_k)||_1 in m.

Note that with cosine oscillators and sigma all ones the sum telescopes to
prod_{k<=m}(1 + cos d_k) - 1, whose norm stays below 2; the sine variant (the
shape of II_1) keeps growing linearly.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .exact import Vec
from .norms import (
    EstimatorConfig,
    NormEstimate,
    _reduce64,
    dyadic_points,
    estimate_l1,
    grid_shape,
    grid_values,
)
from .riesz import StructuralProduct

# Slope of the cosine, sigma = 1, M = 20, m_max = 10 experiment (default
# estimator, seeds 0-2 give 0.112-0.114).  Used only to pick n in the pipeline.
BASELINE_C = 0.11
# Same experiment with sine oscillators (the shape of II_1).
BASELINE_C_SINE = 0.21

CSV_COLUMNS = ("m", "norm", "lower", "upper", "method")


@dataclass
class GrowthFit:
    table: list[dict]
    slope: float
    intercept: float
    r2: float
    oscillator: str
    lacunarity: Fraction
    sigma: tuple[int, ...]
    freqs: list[Vec] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def norms(self) -> list[float]:
        return [row["norm"] for row in self.table]

    def to_json(self) -> dict:
        return {
            "table": self.table,
            "slope": self.slope,
            "intercept": self.intercept,
            "fit_quality": self.r2,
            "oscillator": self.oscillator,
            "lacunarity": str(self.lacunarity),
            "sigma": list(self.sigma),
            "freqs": [[str(c) for c in a] for a in self.freqs],
            "violations": list(self.violations),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in self.table:
            w.writerow(row)
        return buf.getvalue()


def lacunary_freqs(m: int, lacunarity, base: int = 1) -> list[Vec]:
    """d_k = (b^k * base, k) with b = floor(M) + 1, so |d_{k+1}| > M |d_k| strictly."""
    b = math.floor(Fraction(lacunarity)) + 1
    return [(b**k * base, k) for k in range(1, m + 1)]


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    slope, intercept = statistics.linear_regression(xs, ys)
    if len(set(ys)) == 1:
        # a flat table is fitted exactly
        return slope, intercept, 1.0
    r = statistics.correlation(xs, ys)
    return slope, intercept, r * r


def growth_experiment(
    m_max: int,
    lacunarity=20,
    sigma: Optional[Sequence[int]] = None,
    oscillator: str = "cos",
    config: Optional[EstimatorConfig] = None,
    freqs: Optional[Sequence[Vec]] = None,
) -> GrowthFit:
    """Norm table for m = 1..m_max with a least-squares line through it.

    Monte Carlo estimates share one seed across m, so consecutive rows use
    common random points and their differences are far less noisy than the
    rows themselves.
    """
    if m_max < 3:
        raise ValueError("m_max must be >= 3")
    M = Fraction(lacunarity)
    if M <= 1:
        raise ValueError("lacunarity must exceed 1")
    sigma = tuple(sigma) if sigma is not None else (1,) * m_max
    if len(sigma) < m_max:
        raise ValueError("sigma shorter than m_max")
    freqs = list(freqs) if freqs is not None else lacunary_freqs(m_max, M)
    cfg = config or EstimatorConfig()
    table = []
    for m in range(1, m_max + 1):
        f = StructuralProduct(freqs[:m], sigma[:m], oscillator)
        est = estimate_l1(f, cfg)
        table.append(_row(m, est))
    ms = [row["m"] for row in table]
    slope, intercept, r2 = fit_line(ms, [row["norm"] for row in table])
    violations = []
    for a, b in zip(table, table[1:]):
        if sigma[b["m"] - 1] == 1 and not b["norm"] > a["norm"]:
            violations.append(f"norm did not increase from m={a['m']} to m={b['m']}")
    for row in table:
        if row["norm"] > row["m"]:
            violations.append(f"norm exceeds m at m={row['m']}")
    return GrowthFit(
        table=table,
        slope=slope,
        intercept=intercept,
        r2=r2,
        oscillator=oscillator,
        lacunarity=M,
        sigma=sigma[:m_max],
        freqs=freqs[:m_max],
        violations=violations,
    )


def _row(m: int, est: NormEstimate) -> dict:
    return {"m": m, "norm": est.value, "lower": est.lower, "upper": est.upper, "method": est.method}


def read_growth_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        out.append(
            {
                "m": int(row["m"]),
                "norm": float(row["norm"]),
                "lower": float(row["lower"]),
                "upper": float(row["upper"]),
                "method": row["method"],
            }
        )
    return out


@dataclass
class SigmaSearchResult:
    sigma: tuple[int, ...]
    norm: float
    method: str
    norms: dict


def _term_matrix(freqs, oscillator: str, cfg: EstimatorConfig) -> tuple[np.ndarray, str]:
    """Values of each single term osc(d_k) prod_{j<k}(1 + cos d_j) at common points."""
    m = len(freqs)
    F = (sum(abs(a[0]) for a in freqs), sum(abs(a[1]) for a in freqs))
    N1, N2, resolved = grid_shape(F, cfg.oversample, cfg.max_points)
    use_grid = cfg.method == "grid" or (cfg.method == "auto" and resolved)
    rows = []
    for k in range(m):
        w = [0] * m
        w[k] = 1
        f = StructuralProduct(freqs, w, oscillator)
        if use_grid:
            rows.append(grid_values(f, N1, N2).ravel())
        else:
            vals = []
            c1 = _reduce64([a[0] for a in freqs])
            c2 = _reduce64([a[1] for a in freqs])
            wk = np.array(w, dtype=float)
            for u in dyadic_points(cfg.seed, cfg.samples):
                out = np.empty(u[0].shape[0])
                kernels.product_form_dyadic(c1, c2, wk, oscillator == "sin", u[0], u[1], out)
                vals.append(out)
            rows.append(np.concatenate(vals))
    return np.array(rows), ("grid" if use_grid else "montecarlo")


def sigma_search(
    m: int,
    lacunarity=20,
    config: Optional[EstimatorConfig] = None,
    oscillator: str = "cos",
    freqs: Optional[Sequence[Vec]] = None,
) -> SigmaSearchResult:
    """Exhaustive search over sigma in {0,1}^m for the largest estimated norm.

    All 2^m candidates are scored on the same sample points; ties keep the
    lexicographically smallest sigma.
    """
    if not 1 <= m <= 12:
        raise ValueError("sigma_search needs 1 <= m <= 12")
    cfg = config or EstimatorConfig(samples=20_000)
    freqs = list(freqs) if freqs is not None else lacunary_freqs(m, lacunarity)
    T, method = _term_matrix(freqs[:m], oscillator, cfg)
    best, best_norm = None, -1.0
    norms = {}
    for sig in itertools.product((0, 1), repeat=m):
        v = float(np.abs(np.asarray(sig, dtype=float) @ T).mean())
        norms[sig] = v
        if v > best_norm:
            best, best_norm = sig, v
    return SigmaSearchResult(sigma=best, norm=best_norm, method=method, norms=norms)
