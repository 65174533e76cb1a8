"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL line."""

import json
import math
import random
import statistics
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from ornstein.certify import replay_ratio, run_pipeline
from ornstein.frequencies import select_sequence
from ornstein.growth import growth_experiment
from ornstein.norms import EstimatorConfig, grid_shape, grid_values, l1_grid, l1_montecarlo
from ornstein.riesz import (
    StructuralProduct,
    alpha_l,
    apply_derivative,
    build_Z,
    coeff_sum,
    decompose,
    expand_riesz,
)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, elapsed, limit):
        ok = ok and elapsed < limit
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.1f}s / {limit}s]")
        assert ok, detail

    return emit


def test_criterion_1_exact_identity(report):
    t = time.perf_counter()
    results = {}
    for n in (2, 4, 6):
        seq = select_sequence(n, mode="compact")
        results[n] = apply_derivative(build_Z(seq, (4, 0)), (4, 0)) == expand_riesz(seq.freqs)
    report(1, all(results.values()), f"D^a0 Z == R_n exactly for n=2,4,6: {results}", time.perf_counter() - t, 10)


def test_criterion_2_riesz_bounds(report):
    t = time.perf_counter()
    worst_norm, worst_min = 0.0, math.inf
    for n in range(1, 7):
        # small dissociate frequencies: balanced-ternary first coordinates
        freqs = [(3**k, k) for k in range(1, n + 1)]
        R = expand_riesz(freqs)
        est = l1_grid(R, max_points=2**22, require_resolved=True)
        N1, N2 = est.detail["grid"]
        worst_norm = max(worst_norm, est.value)
        worst_min = min(worst_min, grid_values(R, N1, N2).real.min() + 1)
    # R_n + 1 >= 0 holds pointwise, so compact sequences are checked on the capped grid too
    for n in (2, 4, 6):
        R = expand_riesz(select_sequence(n))
        N1, N2, _ = grid_shape(R.max_freq())
        worst_min = min(worst_min, grid_values(R, N1, N2).real.min() + 1)
    ok = worst_norm <= 2 + 1e-3 and worst_min >= -1e-9
    report(2, ok, f"max ||R_n|| = {worst_norm:.6f}, min(R_n + 1) = {worst_min:.2e}", time.perf_counter() - t, 60)


def test_criterion_3_error_budget(report):
    t = time.perf_counter()
    seq = select_sequence(4, mode="faithful")
    sums = [coeff_sum(decompose(seq, l, materialize=True)[0]) for l in range(1, 5)]
    ok = all(s <= 1 for s in sums)
    report(3, ok, "exact coeff sums of I_l: " + ", ".join(f"{float(s):.4f}" for s in sums), time.perf_counter() - t, 10)


def test_criterion_4_triangle_bound(report):
    t = time.perf_counter()
    n = 4
    seq = select_sequence(n, mode="compact")
    rows = []
    ok = True
    for l in (2, 3, 4):
        v = l1_grid(decompose(seq, l, materialize=False)[1]).value
        bound = n ** (1 - l / 2)
        ok = ok and v <= bound + 1e-3
        rows.append(f"l={l}: {v:.4f} <= {bound:.3f}")
    report(4, ok, "; ".join(rows), time.perf_counter() - t, 60)


def test_criterion_5_ratio_growth(report):
    t = time.perf_counter()
    ks = {}
    for n in (4, 9, 16):
        cert = run_pipeline(1, n=n, mode="compact", seed=0, samples=100_000, confidence=0.999)
        ks[n] = cert.ratio
    increasing = ks[4] < ks[9] < ks[16]
    growth = ks[16] / ks[4]
    ok = increasing and growth >= Fraction(3, 2)
    detail = ", ".join(f"K({n})={float(k):.4f}" for n, k in ks.items()) + f", K(16)/K(4)={float(growth):.3f}"
    report(5, ok, detail, time.perf_counter() - t, 20 * 60)


def test_criterion_6_growth(report):
    t = time.perf_counter()
    cos = growth_experiment(10, lacunarity=20, oscillator="cos")
    sin = growth_experiment(8, lacunarity=20, oscillator="sin")
    norms = cos.norms
    increasing = all(b > a for a, b in zip(norms, norms[1:]))
    bounded = all(r["norm"] <= r["m"] for r in cos.table)
    factor = max(sin.slope, cos.slope) / min(sin.slope, cos.slope)
    ok = increasing and cos.slope > 0 and cos.r2 >= 0.9 and bounded and factor <= 2
    detail = f"cos slope {cos.slope:.4f} R2 {cos.r2:.3f}; sin slope {sin.slope:.4f}; ratio {factor:.2f}"
    report(6, ok, detail, time.perf_counter() - t, 10 * 60)


def _random_product(rng):
    n = rng.randint(1, 4)
    freqs = [(rng.randint(-12, 12), rng.randint(-12, 12)) for _ in range(n)]
    freqs = [a if a != (0, 0) else (1, 0) for a in freqs]
    weights = [Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(n)]
    if not any(weights):
        weights[0] = Fraction(1)
    return StructuralProduct(freqs, weights, rng.choice(("cos", "sin")))


def test_criterion_7_cross_validation(report):
    t = time.perf_counter()
    rng = random.Random(2024)
    agree = 0
    for i in range(10):
        f = _random_product(rng)
        g = l1_grid(f, require_resolved=True)
        mc = l1_montecarlo(f, samples=100_000, seed=i)
        err = math.hypot(mc.detail["stderr"], g.detail["refinement_delta"])
        agree += abs(mc.value - g.value) <= 3 * err
    f = StructuralProduct([(3, 1), (20, 7), (150, 40)], [1, 1, 1], "sin")
    sizes = [1_000, 4_000, 16_000, 64_000, 256_000]
    errs = [l1_montecarlo(f, samples=s, seed=1).detail["stderr"] for s in sizes]
    slope, _ = statistics.linear_regression([math.log(s) for s in sizes], [math.log(e) for e in errs])
    ok = agree >= 9 and abs(slope + 0.5) <= 0.1
    report(7, ok, f"{agree}/10 within 3 error bars; stderr slope {slope:.3f}", time.perf_counter() - t, 5 * 60)


HYPOTHESIS_SCRIPT = """
import time
t = time.perf_counter()
from ornstein.hypothesis import check_pair, search_witnesses
fam = [(4, 0), (3, 2), (2, 4), (1, 6), (0, 8)]
found = search_witnesses(fam, 8)
rep = check_pair(fam, *found)
dup = search_witnesses([(1, 0), (1, 0)], 8)
dup_rep = check_pair([(1, 0), (1, 0)], (1, 1), (0, 1))
print(found, rep.lambda_ok and rep.gamma_ok, dup, dup_rep.gamma_ok, time.perf_counter() - t)
"""


def test_criterion_8_hypothesis_checker(report):
    runs = [subprocess.run([sys.executable, "-c", HYPOTHESIS_SCRIPT], capture_output=True, text=True, check=True)
            for _ in range(2)]
    outs = [r.stdout.rsplit(" ", 1) for r in runs]
    elapsed = max(float(o[1]) for o in outs)
    first = outs[0][0]
    ok = first == "((2, 1), (0, 1)) True None False" and outs[1][0] == first
    report(8, ok, f"search -> {first}", elapsed, 1)


def test_criterion_9_soundness_and_replay(report):
    t = time.perf_counter()
    cert = run_pipeline(1, n=4, mode="compact", seed=0, samples=100_000)
    obj = json.loads(json.dumps(cert.to_json()))
    Z = build_Z(cert.seq)
    norms = [l1_grid(apply_derivative(Z, alpha_l(l))).value for l in range(5)]
    S, T = cert.S, cert.T
    checks = [norms[0] <= 2, norms[1] >= float(cert.L)]
    checks += [norms[l] <= float(S[l - 1] + T[l - 2]) for l in (2, 3, 4)]
    replay = replay_ratio(obj)
    ok = all(checks) and replay == cert.ratio == Fraction(obj["ratio"])
    detail = (
        f"grid norms {', '.join(f'{v:.4f}' for v in norms)}; L={float(cert.L):.4f}; "
        f"uppers {', '.join(f'{float(S[l - 1] + T[l - 2]):.3f}' for l in (2, 3, 4))}; replay exact={replay == cert.ratio}"
    )
    report(9, ok, detail, time.perf_counter() - t, 120)
