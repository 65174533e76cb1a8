import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ornstein.hypothesis import HypothesisReport, check_pair, search_witnesses

FAMILY = [(4, 0), (3, 2), (2, 4), (1, 6), (0, 8)]


def brute_force(alphas, bound):
    """Oracle: lexicographic scan of the box for each witness independently."""
    box = [v for v in itertools.product(range(bound + 1), repeat=len(alphas[0])) if any(v)]
    lam = next((v for v in box if check_pair(alphas, v, v).lambda_ok), None)
    gam = next((v for v in box if check_pair(alphas, v, v).gamma_ok), None)
    if lam is None or gam is None:
        return None
    return lam, gam


def test_family_witnesses_pass():
    rep = check_pair(FAMILY, (2, 1), (0, 1))
    assert rep.lambda_ok and rep.gamma_ok
    assert rep.pairings == {"lambda": [8, 8, 8, 8, 8], "gamma": [0, 2, 4, 6, 8]}


def test_wrong_gamma_fails():
    rep = check_pair(FAMILY, (2, 1), (1, 0))
    assert rep.lambda_ok and not rep.gamma_ok


@pytest.mark.parametrize("gamma", [(1, 0), (0, 1), (3, 5), (7, 7)])
def test_duplicate_indices_never_ordered(gamma):
    assert not check_pair([(1, 0), (1, 0)], (1, 1), gamma).gamma_ok


def test_search_family():
    assert search_witnesses(FAMILY, 8) == ((2, 1), (0, 1))
    assert brute_force(FAMILY, 8) == ((2, 1), (0, 1))


def test_search_three_term_family():
    alphas = [(2, 0), (1, 1), (0, 2)]
    assert search_witnesses(alphas, 4) == ((1, 1), (0, 1))
    rep = check_pair(alphas, (1, 1), (0, 1))
    assert rep.pairings == {"lambda": [2, 2, 2], "gamma": [0, 1, 2]}


@pytest.mark.parametrize("bound", [1, 5, 20])
def test_search_duplicates_none(bound):
    assert search_witnesses([(1, 0), (1, 0)], bound) is None


def test_search_deterministic():
    assert all(search_witnesses(FAMILY, 8) == ((2, 1), (0, 1)) for _ in range(3))


@pytest.mark.parametrize(
    "alphas, lam, gamma",
    [
        ([(1, 0)], (1, 1), (0, 1)),
        ([(1, 0), (1, 0, 0)], (1, 1), (0, 1)),
        (FAMILY, (0, 0), (0, 1)),
        (FAMILY, (2, 1), (0, -1)),
        (FAMILY, (2, 1, 0), (0, 1)),
    ],
)
def test_check_pair_rejects_bad_input(alphas, lam, gamma):
    with pytest.raises(ValueError):
        check_pair(alphas, lam, gamma)


def test_report_json_round_trip():
    rep = check_pair(FAMILY, (2, 1), (0, 1))
    text = json.dumps(rep.to_json())
    assert json.dumps(HypothesisReport.from_json(json.loads(text)).to_json()) == text


vec2 = st.tuples(st.integers(0, 4), st.integers(0, 4))


@given(st.lists(vec2, min_size=2, max_size=4), st.integers(1, 4))
def test_search_matches_brute_force(alphas, bound):
    assert search_witnesses(alphas, bound) == brute_force(alphas, bound)


@given(vec2, vec2, st.integers(1, 6), vec2, vec2)
def test_arithmetic_progressions_always_equalized(a0, a1, m, lam, gamma):
    # alpha_l = a0 + l (a1 - a0): Lambda equalizes iff <a1 - a0, Lambda> = 0
    fam = [tuple(x + l * (y - x) for x, y in zip(a0, a1)) for l in range(m + 1)]
    if not any(lam) or not any(gamma) or any(c < 0 for a in fam for c in a):
        return
    d = sum((y - x) * c for x, y, c in zip(a0, a1, lam))
    assert check_pair(fam, lam, gamma).lambda_ok == (d == 0)
