"""Construction and verification of admissible frequency sequences a_1..a_n.

A sequence is admissible for (n, m, sigma, tau, delta) when, for every k and
every q = a_k + sum_{j<k} eps_j a_j with eps_j in {-1, 0, 1}:

  approximation  |(q(2)^2 / q(1))^l - (sigma_k tau)^l| <= delta_l   for l = 1..m
  lacunarity     |a_{k+1}|_inf > M |a_k|_inf
  separation     q(1) != 0

The ratio q(2)^2/q(1) is the symbol quotient q^alpha_1 / q^alpha_0 for the
family alpha_0 = (4, 0), alpha_1 = (3, 2).

Two verification routes exist.  The exhaustive route walks all 3^(k-1)
perturbations exactly; the interval route encloses every perturbation in the
box |e(i)| <= sum_{j<k} |a_j(i)| and is valid for any n.  The builder only
uses the interval route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import Vec, ceil_dyadic, int_str, parse_int, rational_inv_sqrt, sup_norm

from gmpy2 import mpz as _Z

MODES = ("compact", "faithful")
EXHAUSTIVE_MAX_N = 12
# exact (unrounded) coefficient sums are kept up to this many perturbations
EXACT_SUM_MAX_TERMS = 250


def default_delta(n: int, mode: str) -> Fraction:
    if mode == "faithful":
        return Fraction(1, 3**n)
    if mode == "compact":
        return Fraction(1, 3**n - 1)
    raise ValueError(f"unknown mode {mode!r}")


def choose_tau(n: int, delta_target: Fraction) -> Fraction:
    """1/sqrt(n) exactly for perfect squares, else a simple rational within delta/10."""
    return rational_inv_sqrt(n, Fraction(delta_target) / 10)


@dataclass
class AdmissibleSequence:
    freqs: list[Vec]
    m: int
    tau: Fraction
    sigma: tuple[int, ...]
    delta_target: Fraction
    lacunarity: Fraction = Fraction(2)
    delta: Optional[list[Fraction]] = None
    mode: str = "compact"

    def __post_init__(self):
        self.freqs = [tuple(int(c) for c in a) for a in self.freqs]
        self.sigma = tuple(int(s) for s in self.sigma)
        self.tau = Fraction(self.tau)
        self.delta_target = Fraction(self.delta_target)
        self.lacunarity = Fraction(self.lacunarity)
        if len(self.sigma) != len(self.freqs):
            raise ValueError("sigma and freqs differ in length")
        if any(s not in (0, 1) for s in self.sigma):
            raise ValueError("sigma entries must be 0 or 1")
        if any(len(a) != 2 for a in self.freqs):
            raise ValueError("frequencies must lie in Z^2")
        if self.delta is not None:
            self.delta = [Fraction(d) for d in self.delta]

    @property
    def n(self) -> int:
        return len(self.freqs)

    def target(self, k: int) -> Fraction:
        """sigma_k * tau for 0-based k."""
        return self.tau * self.sigma[k]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "mode": self.mode,
            "tau": str(self.tau),
            "delta_target": str(self.delta_target),
            "delta": [str(d) for d in self.delta] if self.delta is not None else None,
            "lacunarity": str(self.lacunarity),
            "sigma": list(self.sigma),
            "freqs": [[int_str(c) for c in a] for a in self.freqs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AdmissibleSequence":
        seq = cls(
            freqs=[tuple(parse_int(c) for c in a) for a in obj["freqs"]],
            m=int(obj["m"]),
            tau=Fraction(obj["tau"]),
            sigma=tuple(obj["sigma"]),
            delta_target=Fraction(obj["delta_target"]),
            lacunarity=Fraction(obj.get("lacunarity", "2")),
            delta=[Fraction(d) for d in obj["delta"]] if obj.get("delta") is not None else None,
            mode=obj.get("mode", "compact"),
        )
        if int(obj["n"]) != seq.n:
            raise ValueError("n does not match the number of frequencies")
        return seq


@dataclass
class ConditionReport:
    method: str
    approx_ok: bool
    lacunary_ok: bool
    separated_ok: bool
    delta: list[Fraction]
    min_ratio: Optional[Fraction]
    coeff_sum_bounds: list[Fraction]
    sums_exact: bool
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.approx_ok and self.lacunary_ok and self.separated_ok

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "ok": self.ok,
            "approx_ok": self.approx_ok,
            "lacunary_ok": self.lacunary_ok,
            "separated_ok": self.separated_ok,
            "delta": [str(d) for d in self.delta],
            "min_ratio": str(self.min_ratio) if self.min_ratio is not None else None,
            "coeff_sum_bounds": [str(s) for s in self.coeff_sum_bounds],
            "sums_exact": self.sums_exact,
            "violations": list(self.violations),
        }


# --- interval enclosure -------------------------------------------------------


def _dist_pow(xn, xd, l: int, tn: int, td: int):
    """|(xn/xd)^l - (tn/td)^l| as an unreduced pair (num, den), den > 0."""
    a, b = xn**l, xd**l
    c, d = tn**l, td**l
    num = abs(a * d - c * b)
    den = abs(b * d)
    return num, den


def interval_errors(a: Vec, E1: int, E2: int, target: Fraction, m: int):
    """Worst-case |ratio^l - target^l| over the perturbation box, l = 1..m.

    Returns a list of unreduced (num, den) pairs, or None when the box for
    q(1) contains zero.
    """
    a1, a2 = _Z(a[0]), _Z(a[1])
    E1, E2 = _Z(E1), _Z(E2)
    lo1, hi1 = a1 - E1, a1 + E1
    if lo1 <= 0 <= hi1:
        return None
    lo2, hi2 = a2 - E2, a2 + E2
    if lo2 <= 0 <= hi2:
        sq_lo, sq_hi = _Z(0), max(lo2 * lo2, hi2 * hi2)
    else:
        sq_lo, sq_hi = min(lo2 * lo2, hi2 * hi2), max(lo2 * lo2, hi2 * hi2)
    if lo1 > 0:
        r_lo, r_hi = (sq_lo, hi1), (sq_hi, lo1)
    else:
        # q(1) < 0: ratio <= 0, endpoints as (num, den) with den > 0
        r_lo, r_hi = (-sq_hi, -hi1), (-sq_lo, -lo1)
    tn, td = _Z(target.numerator), _Z(target.denominator)
    out = []
    for l in range(1, m + 1):
        e_lo = _dist_pow(r_lo[0], r_lo[1], l, tn, td)
        e_hi = _dist_pow(r_hi[0], r_hi[1], l, tn, td)
        # interior points of an even power can dip to 0 only when the ratio changes
        # sign, which cannot happen since q(1) has a fixed sign and q(2)^2 >= 0
        out.append(e_lo if e_lo[0] * e_hi[1] >= e_hi[0] * e_lo[1] else e_hi)
    return out


def _le(pair, bound: Fraction) -> bool:
    num, den = pair
    return num * bound.denominator <= bound.numerator * den


def _prefix_sums(freqs: Sequence[Vec]):
    E1 = E2 = 0
    for a in freqs:
        yield E1, E2
        E1 += abs(a[0])
        E2 += abs(a[1])


# --- construction -------------------------------------------------------------


def _first_order_scale(E2: int, P: int, tau: Fraction, m: int, delta: Fraction) -> int:
    # (ratio/tau)^l - 1 ~ 2 l E2/(P s); need tau^l * that <= delta
    if E2 == 0:
        return 1
    c = max(l * tau**l for l in range(1, m + 1))
    return math.ceil(2 * E2 * c / (P * delta))


def _smallest_passing(passes, s0: int, floor: int, rel_bits: int = 16) -> int:
    """Smallest s >= floor with passes(s), assuming passes is monotone near s0.

    Exponential search around s0, then bisection until the bracket is narrower
    than 2^-rel_bits relative (exact for s < 2^rel_bits).
    """
    s0 = max(s0, floor)
    step = max(1, s0 >> 6)
    if passes(s0):
        hi = s0
        while True:
            cand = hi - step
            if cand <= floor:
                if passes(floor):
                    return floor
                lo = floor
                break
            if not passes(cand):
                lo = cand
                break
            hi = cand
            step *= 2
    else:
        lo = s0
        while True:
            cand = lo + step
            if passes(cand):
                hi = cand
                break
            lo = cand
            step *= 2
    while hi - lo > 1 and (hi - lo) > (hi >> rel_bits):
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def select_sequence(
    n: int,
    m: int = 4,
    sigma: Optional[Sequence[int]] = None,
    delta_target=None,
    mode: str = "compact",
    lacunarity=2,
    first_scale: int = 1,
) -> AdmissibleSequence:
    """Inductively build a_1..a_n meeting all admissibility conditions with
    delta_l <= delta_target.

    sigma_k = 1 uses a_k = (P Q s^2, P s) with tau = P/Q, so the unperturbed
    ratio is exactly tau; s is the smallest scale (up to a bounded bisection)
    for which the interval enclosure certifies every power l <= m.
    sigma_k = 0 uses a_k = (X, 1) with X large enough that every perturbed
    ratio is at most delta_target.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    sigma = tuple(sigma) if sigma is not None else (1,) * n
    if len(sigma) != n:
        raise ValueError("sigma must have length n")
    delta = Fraction(delta_target) if delta_target is not None else default_delta(n, mode)
    if not 0 < delta <= 1:
        raise ValueError("delta_target must lie in (0, 1]")
    M = Fraction(lacunarity)
    if M < 1:
        raise ValueError("lacunarity must be >= 1")
    tau = choose_tau(n, delta)
    P, Q = tau.numerator, tau.denominator

    freqs: list[Vec] = []
    E1 = E2 = 0
    prev = 0
    for k in range(n):
        target = tau * sigma[k]
        if sigma[k] == 1:

            def passes(s, E1=E1, E2=E2, prev=prev, target=target):
                a = (P * Q * s * s, P * s)
                if freqs and not sup_norm(a) > M * prev:
                    return False
                if not a[0] > 2 * E1:
                    return False
                errs = interval_errors(a, E1, E2, target, m)
                return errs is not None and all(_le(e, delta) for e in errs)

            floor = max(1, first_scale) if not freqs else 1
            s0 = max(
                _first_order_scale(E2, P, tau, m, delta),
                math.isqrt(int(M * prev) // (P * Q) + 1),
                math.isqrt(2 * E1 // (P * Q) + 1),
            )
            s = _smallest_passing(passes, s0, floor)
            a = (P * Q * s * s, P * s)
        else:
            X = E1 + math.floor((1 + E2) ** 2 / delta) + 1
            X = max(X, 2 * E1 + 1, math.floor(M * prev) + 1)
            a = (X, 1)
            errs = interval_errors(a, E1, E2, target, m)
            if errs is None or not all(_le(e, delta) for e in errs):
                raise RuntimeError(f"internal margin failure at k={k + 1}")
        freqs.append(a)
        E1 += abs(a[0])
        E2 += abs(a[1])
        prev = sup_norm(a)

    seq = AdmissibleSequence(
        freqs=freqs, m=m, tau=tau, sigma=sigma, delta_target=delta, lacunarity=M, mode=mode
    )
    rep = verify_sequence(seq, exhaustive=False)
    if not rep.ok:
        raise RuntimeError(f"constructed sequence failed verification: {rep.violations}")
    seq.delta = rep.delta
    return seq


# --- verification -------------------------------------------------------------


def _check_lacunarity(seq: AdmissibleSequence, violations: list[str]):
    ok = True
    min_ratio = None
    for k in range(seq.n - 1):
        cur, nxt = sup_norm(seq.freqs[k]), sup_norm(seq.freqs[k + 1])
        r = Fraction(nxt, cur) if cur else None
        if r is not None and (min_ratio is None or r < min_ratio):
            min_ratio = r
        if cur == 0 or not nxt > seq.lacunarity * cur:
            ok = False
            violations.append(f"lacunarity fails between a_{k + 1} and a_{k + 2}")
    return ok, min_ratio


def _claimed(seq: AdmissibleSequence) -> list[Fraction]:
    if seq.delta is not None:
        return [min(d, seq.delta_target) for d in seq.delta]
    return [seq.delta_target] * seq.m


def _verify_interval(seq: AdmissibleSequence, violations: list[str]):
    m = seq.m
    separated_ok = True
    worst = [(0, 1)] * m
    sums = [Fraction(0)] * m
    for k, (E1, E2) in enumerate(_prefix_sums(seq.freqs)):
        errs = interval_errors(seq.freqs[k], E1, E2, seq.target(k), m)
        if errs is None:
            separated_ok = False
            violations.append(f"separation not certified at k={k + 1}: |a_k(1)| <= sum of earlier |a_j(1)|")
            continue
        for l, e in enumerate(errs):
            if e[0] * worst[l][1] > worst[l][0] * e[1]:
                worst[l] = e
            # |A_k| weighted by 2^-r sums to 2^(k-2); doubled for -A_k
            sums[l] += ceil_dyadic(e[0] << k, e[1])
    delta = [ceil_dyadic(*w) for w in worst]
    return separated_ok, delta, sums, False


def _offsets(freqs: Sequence[Vec]):
    """Yield, for each k, the list of (e1, e2, nonzeros) over eps in {-1,0,1}^(k-1)."""
    cur = [(0, 0, 0)]
    for a in freqs:
        yield cur
        cur = [
            (e1 + s * a[0], e2 + s * a[1], r + (s != 0))
            for (e1, e2, r) in cur
            for s in (0, 1, -1)
        ]


def _verify_exhaustive(seq: AdmissibleSequence, violations: list[str]):
    if seq.n > EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive verification is limited to n <= {EXHAUSTIVE_MAX_N}")
    m = seq.m
    total = 3**seq.n - 1
    exact = total <= EXACT_SUM_MAX_TERMS
    separated_ok = True
    worst = [(0, 1)] * m
    sums = [Fraction(0)] * m
    for k, offs in enumerate(_offsets(seq.freqs)):
        a = seq.freqs[k]
        t = seq.target(k)
        tn, td = t.numerator, t.denominator
        for e1, e2, r in offs:
            q1, q2 = a[0] + e1, a[1] + e2
            if q1 == 0:
                if separated_ok:
                    violations.append(f"separation fails at k={k + 1}: q=({q1}, {q2})")
                separated_ok = False
                continue
            # coefficient weight on q and -q: 2 * 2^-(r+1) = 2^-r
            for l in range(m):
                num, den = _dist_pow(q2 * q2, q1, l + 1, tn, td)
                if num * worst[l][1] > worst[l][0] * den:
                    worst[l] = (num, den)
                if exact:
                    sums[l] += Fraction(num, den << r)
                else:
                    sums[l] += ceil_dyadic(num, den << r, bits=96)
    delta = [Fraction(*w) if exact or seq.n <= 8 else ceil_dyadic(*w) for w in worst]
    return separated_ok, delta, sums, exact


def verify_sequence(seq: AdmissibleSequence, exhaustive: bool = False) -> ConditionReport:
    """Check all admissibility conditions; violations are reported, never raised.

    `delta` holds the achieved per-power tolerances (exact in exhaustive mode
    for small n, certified upper bounds otherwise) and `coeff_sum_bounds` the
    matching bounds on the coefficient sum of the remainder I_l.
    """
    violations: list[str] = []
    lacunary_ok, min_ratio = _check_lacunarity(seq, violations)
    if exhaustive:
        separated_ok, delta, sums, exact = _verify_exhaustive(seq, violations)
        method = "exhaustive"
    else:
        separated_ok, delta, sums, exact = _verify_interval(seq, violations)
        method = "interval"
    claimed = _claimed(seq)
    approx_ok = True
    for l, (d, c) in enumerate(zip(delta, claimed), start=1):
        if d > c:
            approx_ok = False
            violations.append(f"approximation fails for l={l}: achieved {float(d):.3e} > {float(c):.3e}")
    return ConditionReport(
        method=method,
        approx_ok=approx_ok,
        lacunary_ok=lacunary_ok,
        separated_ok=separated_ok,
        delta=delta,
        min_ratio=min_ratio,
        coeff_sum_bounds=sums,
        sums_exact=exact,
        violations=violations,
    )
