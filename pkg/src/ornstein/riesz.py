"""Sparse trigonometric polynomials for the Riesz-product witness.

Polynomials are sums  f(x) = sum_q c_q e(<q, x>)  with e(t) = exp(2 pi i t) and
exact complex-rational coefficients c_q = (re, im).  Derivatives use the
normalized symbol: D^alpha multiplies c_q by q^alpha, dropping the constant
(2 pi i)^|alpha|.

With alpha_l = alpha_0 + l (alpha_1 - alpha_0) the l-th derivative of Z splits as

    D^{alpha_l} Z = I_l + i^(l mod 2) * II_l

where II_l is the real structured sum

    II_l(x) = sum_k (sigma_k tau)^l osc(2 pi <a_k, x>) prod_{j<k} (1 + cos(2 pi <a_j, x>))

with osc = cos for even l and sin for odd l, and I_l collects the small
coefficient errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact import Vec, add, as_multiindex, int_str, mod1, monomial, neg, parse_int

ZERO = Fraction(0)
ALPHA0 = (4, 0)
ALPHA1 = (3, 2)
MATERIALIZE_MAX_N = 12

Coeff = tuple[Fraction, Fraction]


@dataclass
class SparseTrigPoly:
    coeffs: dict[Vec, Coeff] = field(default_factory=dict)
    # r(q) and the signed index +-k of the top nonzero eps, for Riesz-generated terms
    labels: dict[Vec, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {
            tuple(q): (Fraction(c[0]), Fraction(c[1]))
            for q, c in self.coeffs.items()
            if c[0] != 0 or c[1] != 0
        }
        self.labels = {q: lab for q, lab in self.labels.items() if q in self.coeffs}

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTrigPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __add__(self, other: "SparseTrigPoly") -> "SparseTrigPoly":
        out = dict(self.coeffs)
        for q, (re, im) in other.coeffs.items():
            a, b = out.get(q, (ZERO, ZERO))
            out[q] = (a + re, b + im)
        labels = {**other.labels, **self.labels}
        return SparseTrigPoly(out, labels)

    def __neg__(self) -> "SparseTrigPoly":
        return SparseTrigPoly({q: (-a, -b) for q, (a, b) in self.coeffs.items()}, dict(self.labels))

    def __sub__(self, other: "SparseTrigPoly") -> "SparseTrigPoly":
        return self + (-other)

    def times_i(self) -> "SparseTrigPoly":
        return SparseTrigPoly({q: (-b, a) for q, (a, b) in self.coeffs.items()}, dict(self.labels))

    def r(self, q: Vec) -> Optional[int]:
        lab = self.labels.get(tuple(q))
        return lab[0] if lab else None

    def max_freq(self) -> tuple[int, int]:
        if not self.coeffs:
            return (0, 0)
        return (
            max(abs(q[0]) for q in self.coeffs),
            max(abs(q[1]) for q in self.coeffs),
        )

    def symmetry(self) -> int:
        """+1 if c_{-q} = conj(c_q) (real function), -1 if c_{-q} = -conj(c_q), else 0."""
        herm = anti = True
        for q, (a, b) in self.coeffs.items():
            c = self.coeffs.get(neg(q), (ZERO, ZERO))
            herm = herm and c == (a, -b)
            anti = anti and c == (-a, b)
            if not (herm or anti):
                return 0
        return 1 if herm else -1

    def to_json(self) -> list:
        rows = []
        for q in sorted(self.coeffs):
            re, im = self.coeffs[q]
            lab = self.labels.get(q)
            rows.append(
                {
                    "q": [int_str(q[0]), int_str(q[1])],
                    "re": str(re),
                    "im": str(im),
                    "r": lab[0] if lab else None,
                }
            )
        return rows

    @classmethod
    def from_json(cls, rows: list) -> "SparseTrigPoly":
        coeffs, labels = {}, {}
        for row in rows:
            q = (parse_int(row["q"][0]), parse_int(row["q"][1]))
            coeffs[q] = (Fraction(row["re"]), Fraction(row["im"]))
            if row.get("r") is not None:
                labels[q] = (int(row["r"]), 0)
        return cls(coeffs, labels)


@dataclass
class StructuralProduct:
    """sum_k w_k osc(2 pi <a_k, x>) prod_{j<k} (1 + cos(2 pi <a_j, x>))."""

    freqs: list[Vec]
    weights: list[Fraction]
    oscillator: str = "cos"

    def __post_init__(self):
        self.freqs = [tuple(int(c) for c in a) for a in self.freqs]
        self.weights = [Fraction(w) for w in self.weights]
        if self.oscillator not in ("cos", "sin"):
            raise ValueError("oscillator must be 'cos' or 'sin'")
        if not self.freqs or len(self.freqs) != len(self.weights):
            raise ValueError("need n >= 1 frequencies with one weight each")

    @property
    def n(self) -> int:
        return len(self.freqs)

    def triangle_bound(self) -> Fraction:
        # every product term has L1 norm <= 1
        return sum((abs(w) for w in self.weights), ZERO)

    def max_freq(self) -> tuple[int, int]:
        return (
            sum(abs(a[0]) for a in self.freqs),
            sum(abs(a[1]) for a in self.freqs),
        )

    def expand(self) -> SparseTrigPoly:
        """Distribute the products into a sparse polynomial (dissociate freqs only)."""
        coeffs: dict[Vec, Coeff] = {}
        labels: dict[Vec, tuple[int, int]] = {}
        for k, a, off, r_off in _riesz_terms(self.freqs):
            w = self.weights[k - 1]
            if w == 0:
                continue
            q = add(a, off)
            c = w / 2 ** (r_off + 1)
            if self.oscillator == "cos":
                pos, negc = (c, ZERO), (c, ZERO)
            else:
                pos, negc = (ZERO, -c), (ZERO, c)
            for key, val, sign in ((q, pos, 1), (neg(q), negc, -1)):
                if key in coeffs:
                    raise ValueError(f"frequency collision at {key}")
                coeffs[key] = val
                labels[key] = (r_off + 1, sign * k)
        return SparseTrigPoly(coeffs, labels)

    def to_json(self) -> dict:
        return {
            "freqs": [[int_str(c) for c in a] for a in self.freqs],
            "weights": [str(w) for w in self.weights],
            "oscillator": self.oscillator,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StructuralProduct":
        return cls(
            freqs=[tuple(parse_int(c) for c in a) for a in obj["freqs"]],
            weights=[Fraction(w) for w in obj["weights"]],
            oscillator=obj["oscillator"],
        )


def _riesz_terms(freqs: Sequence[Vec]) -> Iterable[tuple[int, Vec, Vec, int]]:
    """Yield (k, a_k, offset, nonzeros) for every offset sum_{j<k} eps_j a_j."""
    offs: list[tuple[Vec, int]] = [((0, 0), 0)]
    for k, a in enumerate(freqs, start=1):
        a = tuple(a)
        for off, r in offs:
            yield k, a, off, r
        offs = [
            (add(off, (s * a[0], s * a[1])), r + (s != 0))
            for off, r in offs
            for s in (0, 1, -1)
        ]


def _freqs_of(seq_or_freqs) -> list[Vec]:
    freqs = getattr(seq_or_freqs, "freqs", seq_or_freqs)
    return [tuple(int(c) for c in a) for a in freqs]


def expand_riesz(freqs) -> SparseTrigPoly:
    """R_n = -1 + prod_k (1 + cos(2 pi <a_k, x>)) as a sparse polynomial.

    The coefficient at q = sum eps_j a_j is 2^-r(q).  Raises ValueError when two
    eps-patterns produce the same frequency or a nonzero pattern sums to zero.
    """
    freqs = _freqs_of(freqs)
    coeffs: dict[Vec, Coeff] = {}
    labels: dict[Vec, tuple[int, int]] = {}
    for k, a, off, r_off in _riesz_terms(freqs):
        q = add(a, off)
        r = r_off + 1
        for key, sign in ((q, 1), (neg(q), -1)):
            if key == (0, 0) or key in coeffs:
                raise ValueError(f"eps-combinations collide at {key}; frequencies are not dissociate")
            coeffs[key] = (Fraction(1, 2**r), ZERO)
            labels[key] = (r, sign * k)
    return SparseTrigPoly(coeffs, labels)


def build_Z(seq_or_freqs, alpha0: Sequence[int] = ALPHA0) -> SparseTrigPoly:
    """Z with coefficient 2^-r(q) / q^alpha0, so that D^alpha0 Z = R_n."""
    alpha0 = as_multiindex(alpha0)
    R = expand_riesz(seq_or_freqs)
    coeffs = {}
    for q, (re, _) in R.coeffs.items():
        den = monomial(q, alpha0)
        if den == 0:
            raise ValueError(f"symbol q^alpha0 vanishes at q={q}")
        coeffs[q] = (re / den, ZERO)
    return SparseTrigPoly(coeffs, dict(R.labels))


def apply_derivative(p: SparseTrigPoly, alpha: Sequence[int]) -> SparseTrigPoly:
    alpha = as_multiindex(alpha)
    out = {}
    for q, (re, im) in p.coeffs.items():
        s = monomial(q, alpha)
        if s:
            out[q] = (re * s, im * s)
    return SparseTrigPoly(out, dict(p.labels))


def alpha_l(l: int, alpha0: Sequence[int] = ALPHA0, alpha1: Sequence[int] = ALPHA1) -> Vec:
    out = tuple(a0 + l * (a1 - a0) for a0, a1 in zip(alpha0, alpha1))
    if any(c < 0 for c in out):
        raise ValueError(f"alpha_{l} = {out} has a negative entry")
    return out


def structural_part(seq, l: int) -> StructuralProduct:
    """II_l for an admissible sequence."""
    weights = [(seq.tau * s) ** l for s in seq.sigma]
    return StructuralProduct(seq.freqs, weights, "cos" if l % 2 == 0 else "sin")


def decompose(
    seq,
    l: int,
    alpha0: Sequence[int] = ALPHA0,
    alpha1: Sequence[int] = ALPHA1,
    materialize: Optional[bool] = None,
) -> tuple[Optional[SparseTrigPoly], StructuralProduct]:
    """Split D^{alpha_l} Z into (I_l, II_l).

    The target for q in +-A_k is (+-sigma_k tau)^l, so every coefficient of I_l
    is bounded by delta_l.  I_l is only materialized for n <= 12 unless forced.
    """
    if not 1 <= l <= seq.m:
        raise ValueError(f"l must lie in 1..{seq.m}")
    II = structural_part(seq, l)
    if materialize is None:
        materialize = seq.n <= MATERIALIZE_MAX_N
    if not materialize:
        return None, II
    al = alpha_l(l, alpha0, alpha1)
    alpha0 = as_multiindex(alpha0)
    R = expand_riesz(seq)
    coeffs = {}
    for q, (c, _) in R.coeffs.items():
        r, top = R.labels[q]
        ratio_l = Fraction(monomial(q, al), monomial(q, alpha0))
        target = seq.target(abs(top) - 1)
        if top < 0:
            target = -target
        coeffs[q] = (c * (ratio_l - target**l), ZERO)
    return SparseTrigPoly(coeffs, dict(R.labels)), II


def phase_factor(l: int) -> str:
    return "i" if l % 2 else "1"


def reassemble(I: SparseTrigPoly, II: StructuralProduct, l: int) -> SparseTrigPoly:
    """I_l + i^(l mod 2) * expand(II_l)."""
    ex = II.expand()
    return I + (ex.times_i() if l % 2 else ex)


def coeff_sum(p: SparseTrigPoly) -> Fraction:
    """sum_q |c_q|, exact for real or imaginary terms, |re| + |im| otherwise."""
    return sum((abs(a) + abs(b) for a, b in p.coeffs.values()), ZERO)


def max_coeff(p: SparseTrigPoly) -> Fraction:
    """max_q of a lower bound on |c_q| (exact for real or imaginary terms)."""
    return max((max(abs(a), abs(b)) for a, b in p.coeffs.values()), default=ZERO)


def eval_sparse(p: SparseTrigPoly, x: Sequence) -> complex:
    """Direct evaluation with exact argument reduction."""
    s = 0j
    for q, (re, im) in p.coeffs.items():
        t = 2 * math.pi * float(mod1(q, x))
        s += complex(float(re), float(im)) * complex(math.cos(t), math.sin(t))
    return s


def eval_product_form(f: StructuralProduct, x: Sequence, precision: int = 53) -> float:
    """Evaluate the structured sum at a rational point.

    Arguments are reduced mod 1 exactly, so the accuracy does not depend on the
    size of the frequencies.  precision > 53 switches to mpmath.
    """
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    phases = [mod1(a, x) for a in f.freqs]
    if precision == 53:
        return _product_form(f, phases, math.cos, math.sin, math.pi, float)
    import mpmath

    with mpmath.workprec(precision):
        conv = lambda fr: mpmath.mpf(fr.numerator) / fr.denominator  # noqa: E731
        return _product_form(f, phases, mpmath.cos, mpmath.sin, mpmath.pi, conv)


def _product_form(f: StructuralProduct, phases, cos, sin, pi, conv):
    acc = conv(ZERO)
    prod = conv(Fraction(1))
    for w, ph in zip(f.weights, phases):
        t = 2 * pi * conv(ph)
        c = cos(t)
        if w:
            acc += conv(w) * (c if f.oscillator == "cos" else sin(t)) * prod
        prod *= 1 + c
    return acc
