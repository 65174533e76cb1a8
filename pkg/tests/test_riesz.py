import itertools
import json
import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ornstein.frequencies import select_sequence
from ornstein.riesz import (
    SparseTrigPoly,
    StructuralProduct,
    alpha_l,
    apply_derivative,
    build_Z,
    coeff_sum,
    decompose,
    eval_product_form,
    eval_sparse,
    expand_riesz,
    max_coeff,
    reassemble,
    structural_part,
)

A2 = [(10, 3), (200, 41)]


def riesz_product_value(freqs, x):
    """Oracle: -1 + prod (1 + cos 2 pi <a, x>) straight from the definition."""
    p = 1.0
    for a in freqs:
        p *= 1 + math.cos(2 * math.pi * (a[0] * x[0] + a[1] * x[1]))
    return p - 1


def test_single_frequency_expansion():
    R = expand_riesz([(10, 3)])
    assert R.coeffs == {(10, 3): (Fraction(1, 2), 0), (-10, -3): (Fraction(1, 2), 0)}


def test_two_frequency_expansion():
    R = expand_riesz(A2)
    assert len(R) == 3**2 - 1
    assert R.coeffs[(210, 44)] == (Fraction(1, 4), 0)
    assert R.r((210, 44)) == 2
    assert coeff_sum(R) == 3


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_term_counts_by_r(n):
    # C(n, s) 2^s frequencies have exactly s nonzero eps
    freqs = [(4**k, k) for k in range(n)]
    R = expand_riesz(freqs)
    assert len(R) == 3**n - 1
    counts = Counter(R.r(q) for q in R.coeffs)
    assert counts == {s: math.comb(n, s) * 2**s for s in range(1, n + 1)}
    assert coeff_sum(R) == 2**n - 1


def test_collision_detected():
    with pytest.raises(ValueError):
        expand_riesz([(1, 0), (2, 0), (3, 0)])
    with pytest.raises(ValueError):
        expand_riesz([(0, 0)])


def test_Z_coefficients():
    Z = build_Z([(10, 3)])
    assert Z.coeffs[(10, 3)] == (Fraction(1, 20000), 0)
    assert Z.coeffs[(-10, -3)] == Z.coeffs[(10, 3)]


def test_derivative_examples():
    p = SparseTrigPoly({(10, 3): (Fraction(1, 20000), 0)})
    assert apply_derivative(p, (3, 2)).coeffs[(10, 3)] == (Fraction(9, 20), 0)
    assert apply_derivative(p, (0, 0)) == p
    ratio = apply_derivative(p, (3, 2)).coeffs[(10, 3)][0] / apply_derivative(p, (4, 0)).coeffs[(10, 3)][0]
    assert ratio == Fraction(3 * 3, 10)


def test_alpha_family():
    assert [alpha_l(l) for l in range(5)] == [(4, 0), (3, 2), (2, 4), (1, 6), (0, 8)]
    with pytest.raises(ValueError):
        alpha_l(5)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_derivative_of_Z_is_riesz_product(n):
    seq = select_sequence(n)
    assert apply_derivative(build_Z(seq), (4, 0)) == expand_riesz(seq)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_decomposition_reassembles(n, l):
    seq = select_sequence(n)
    I, II = decompose(seq, l)
    assert reassemble(I, II, l) == apply_derivative(build_Z(seq), alpha_l(l))
    # every coefficient of I_l is 2^-r times an error bounded by the achieved delta_l
    assert all(abs(c[0]) <= seq.delta[l - 1] / 2 ** I.r(q) for q, c in I.coeffs.items())


def test_exact_ratio_single_term():
    seq = select_sequence(4, first_scale=3)
    one = type(seq)([(18, 3)], m=4, tau=Fraction(1, 2), sigma=(1,), delta_target=1)
    I1, II1 = decompose(one, 1)
    assert len(I1) == 0
    assert II1.weights == [Fraction(1, 2)] and II1.oscillator == "sin"
    assert decompose(one, 2)[1].weights == [Fraction(1, 4)]


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_faithful_remainder_budget(l):
    seq = select_sequence(4, mode="faithful")
    I, _ = decompose(seq, l)
    s = coeff_sum(I)
    assert s <= (3**4 - 1) * seq.delta_target
    assert s <= 1


def test_hermitian_symmetry():
    seq = select_sequence(3)
    Z = build_Z(seq)
    for l in range(5):
        D = apply_derivative(Z, alpha_l(l))
        # the normalized symbol q^alpha is real and has the parity of |alpha|
        assert D.symmetry() == (-1) ** sum(alpha_l(l))
    # II_l is a real function for both oscillators
    assert decompose(seq, 1)[1].expand().symmetry() == 1
    assert decompose(seq, 2)[1].expand().symmetry() == 1


def test_structural_product_at_origin():
    freqs = [(3**k, k) for k in range(5)]
    cos = StructuralProduct(freqs, [1] * 5, "cos")
    assert eval_product_form(cos, (0, 0)) == 2**5 - 1
    sin = StructuralProduct(freqs, [1, 2, 3, 4, 5], "sin")
    assert eval_product_form(sin, (0, 0)) == 0


def test_product_form_matches_sparse_sum():
    rng = random.Random(0)
    freqs = [(5**k + k, 2 * k + 1) for k in range(5)]
    weights = [Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in freqs]
    for osc in ("cos", "sin"):
        f = StructuralProduct(freqs, weights, osc)
        ex = f.expand()
        for _ in range(100):
            x = (Fraction(rng.randint(0, 10**6), 10**6), Fraction(rng.randint(0, 997), 997))
            v = eval_sparse(ex, x)
            assert abs(v.imag) < 1e-9
            assert abs(v.real - eval_product_form(f, x)) < 1e-9


def test_riesz_expansion_matches_definition():
    rng = random.Random(1)
    freqs = [(3 ** (k + 1), k) for k in range(5)]
    R = expand_riesz(freqs)
    for _ in range(50):
        x = (Fraction(rng.randint(0, 10**4), 10**4), Fraction(rng.randint(0, 10**4), 10**4))
        assert abs(eval_sparse(R, x).real - riesz_product_value(freqs, x)) < 1e-9


def test_huge_frequencies_exact_reduction():
    # phases are reduced exactly, so 200-digit frequencies evaluate like small ones
    big = 10**200
    f = StructuralProduct([(big + 1, 0)], [1], "cos")
    x = (Fraction(1, 4), Fraction(0))
    assert abs(eval_product_form(f, x) - math.cos(math.pi / 2)) < 1e-15
    assert abs(float(eval_product_form(f, (Fraction(1, 3), 0), precision=120)) - math.cos(2 * math.pi / 3)) < 1e-15


def test_structural_part_weights():
    seq = select_sequence(4)
    for l in range(1, 5):
        II = structural_part(seq, l)
        assert II.weights == [Fraction(1, 2**l)] * 4
        assert II.triangle_bound() == Fraction(4, 2**l)
        assert II.oscillator == ("sin" if l % 2 else "cos")


def test_large_n_skips_materialization():
    seq = select_sequence(16)
    I, II = decompose(seq, 1)
    assert I is None and II.n == 16


poly_terms = st.dictionaries(
    st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
    st.tuples(st.fractions(max_denominator=50), st.fractions(max_denominator=50)),
    max_size=8,
)


@given(poly_terms, poly_terms)
def test_sparse_algebra(a, b):
    p, q = SparseTrigPoly(a), SparseTrigPoly(b)
    assert p + q == q + p
    assert (p - q) + q == p
    assert -(-p) == p
    assert p.times_i().times_i() == -p
    assert coeff_sum(p + q) <= coeff_sum(p) + coeff_sum(q)
    assert max_coeff(p) <= coeff_sum(p)


@given(poly_terms)
def test_sparse_json_round_trip(a):
    p = SparseTrigPoly(a)
    text = json.dumps(p.to_json())
    assert SparseTrigPoly.from_json(json.loads(text)) == p


def test_structural_json_round_trip():
    f = structural_part(select_sequence(9), 3)
    text = json.dumps(f.to_json())
    assert StructuralProduct.from_json(json.loads(text)).to_json() == f.to_json()


@given(st.lists(st.integers(1, 6), min_size=1, max_size=4), st.integers(0, 4))
def test_derivative_composition(exps, l):
    # D^a D^b = D^(a+b) on any polynomial
    R = expand_riesz([(3**k, k + 1) for k in range(len(exps))])
    a, b = alpha_l(l), (exps[0] % 3, 1)
    both = tuple(x + y for x, y in zip(a, b))
    assert apply_derivative(apply_derivative(R, a), b) == apply_derivative(R, both)


def test_eps_enumeration_labels():
    freqs = [(1, 1), (5, 2), (30, 7)]
    R = expand_riesz(freqs)
    for eps in itertools.product((-1, 0, 1), repeat=3):
        if not any(eps):
            continue
        q = (sum(e * a[0] for e, a in zip(eps, freqs)), sum(e * a[1] for e, a in zip(eps, freqs)))
        assert R.r(q) == sum(e != 0 for e in eps)
        assert R.coeffs[q][0] == Fraction(1, 2 ** R.r(q))
