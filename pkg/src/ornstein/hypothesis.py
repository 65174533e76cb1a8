"""Checking and searching the equalizer/orderer witnesses for a multiindex family.

For alphas = (alpha_0, ..., alpha_m) we look for nonnegative integer vectors
Lambda with <alpha_j, Lambda> constant in j, and Gamma with

    <alpha_0, Gamma> < <alpha_1, Gamma> < <alpha_2, Gamma> <= ... <= <alpha_m, Gamma>.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import Vec, as_multiindex, dot

DEFAULT_BOUND = 64


@dataclass
class HypothesisReport:
    lambda_ok: bool
    gamma_ok: bool
    lam: Optional[Vec]
    gamma: Optional[Vec]
    pairings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.lambda_ok and self.gamma_ok

    def to_json(self) -> dict:
        return {
            "lambda_ok": self.lambda_ok,
            "gamma_ok": self.gamma_ok,
            "lambda": list(self.lam) if self.lam is not None else None,
            "gamma": list(self.gamma) if self.gamma is not None else None,
            "pairings": {k: list(v) for k, v in self.pairings.items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HypothesisReport":
        return cls(
            lambda_ok=bool(obj["lambda_ok"]),
            gamma_ok=bool(obj["gamma_ok"]),
            lam=tuple(obj["lambda"]) if obj["lambda"] is not None else None,
            gamma=tuple(obj["gamma"]) if obj["gamma"] is not None else None,
            pairings={k: list(v) for k, v in obj["pairings"].items()},
        )


def _family(alphas: Sequence[Sequence[int]]) -> list[Vec]:
    fam = [as_multiindex(a) for a in alphas]
    if len(fam) < 2:
        raise ValueError("need at least two multiindices")
    d = len(fam[0])
    if any(len(a) != d for a in fam):
        raise ValueError("multiindices have different dimensions")
    return fam


def _witness(v: Sequence[int], d: int, name: str) -> Vec:
    w = as_multiindex(v)
    if len(w) != d:
        raise ValueError(f"{name} has dimension {len(w)}, expected {d}")
    if not any(w):
        raise ValueError(f"{name} must be nonzero")
    return w


def equalizes(pairs: Sequence[int]) -> bool:
    return all(p == pairs[0] for p in pairs)


def orders(pairs: Sequence[int]) -> bool:
    # strict at the first two steps, weak afterwards
    if not pairs[0] < pairs[1]:
        return False
    if len(pairs) > 2 and not pairs[1] < pairs[2]:
        return False
    return all(pairs[j] <= pairs[j + 1] for j in range(2, len(pairs) - 1))


def check_pair(alphas, lam, gamma) -> HypothesisReport:
    fam = _family(alphas)
    d = len(fam[0])
    lam = _witness(lam, d, "Lambda")
    gamma = _witness(gamma, d, "Gamma")
    pl = [dot(a, lam) for a in fam]
    pg = [dot(a, gamma) for a in fam]
    return HypothesisReport(
        lambda_ok=equalizes(pl),
        gamma_ok=orders(pg),
        lam=lam,
        gamma=gamma,
        pairings={"lambda": pl, "gamma": pg},
    )


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[: len(pivots)], pivots


def _lambda_candidates(fam: list[Vec], bound: int):
    """Nonnegative integer points of the null space of {alpha_j - alpha_0} in the box."""
    d = len(fam[0])
    diffs = [[Fraction(a - b) for a, b in zip(al, fam[0])] for al in fam[1:]]
    R, pivots = _rref(diffs, d)
    free = [c for c in range(d) if c not in pivots]
    for vals in itertools.product(range(bound + 1), repeat=len(free)):
        x: list = [None] * d
        for c, v in zip(free, vals):
            x[c] = Fraction(v)
        for row, pc in zip(R, pivots):
            x[pc] = -sum((row[c] * x[c] for c in free), Fraction(0))
        if any(v.denominator != 1 or v < 0 or v > bound for v in x):
            continue
        cand = tuple(int(v) for v in x)
        if any(cand):
            yield cand


def search_witnesses(alphas, bound: int = DEFAULT_BOUND) -> Optional[tuple[Vec, Vec]]:
    """Lexicographically smallest (Lambda, Gamma) with entries in [0, bound], or None."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    fam = _family(alphas)
    d = len(fam[0])
    lam = min(_lambda_candidates(fam, bound), default=None)
    if lam is None:
        return None
    for g in itertools.product(range(bound + 1), repeat=d):
        if any(g) and orders([dot(a, g) for a in fam]):
            return lam, g
    return None
