import json
from fractions import Fraction

import pytest

from ornstein.certify import (
    Certificate,
    PipelineError,
    assemble_certificate,
    choose_n,
    replay_ratio,
    run_pipeline,
)
from ornstein.frequencies import select_sequence
from ornstein.norms import NormEstimate


def fake_n1(lower, value=None):
    return NormEstimate(
        value=value if value is not None else lower,
        lower=lower,
        upper=lower + 1,
        method="montecarlo",
        detail={"seed": 0, "samples": 100_000},
    )


def budget_sequence():
    # n = 4, tau = 1/2: T_l = 4 / 2^l, so T_2 + T_3 + T_4 = 7/4
    return select_sequence(4)


def test_bookkeeping_mirror():
    # N1 = 9, S_1 = 1 and S_l + T_l = 2 for l = 2, 3, 4 give L = 8, D = 8
    seq = budget_sequence()
    T = [Fraction(1), Fraction(1, 2), Fraction(1, 4)]
    S = [Fraction(1)] + [2 - t for t in T]
    cert = assemble_certificate(seq, fake_n1(9), K=1, S=S)
    assert cert.T == T
    assert cert.L == 8 and cert.D == 8 and cert.ratio == 1
    assert cert.verdict


def test_degenerate_lower_bound():
    seq = budget_sequence()
    cert = assemble_certificate(seq, fake_n1(0.5), K=Fraction(1, 100), S=[Fraction(1)] * 4)
    assert cert.L == 0 and cert.ratio == 0 and not cert.verdict


def test_assemble_errors():
    seq = budget_sequence()
    with pytest.raises(ValueError):
        assemble_certificate(seq, None, 1, [Fraction(0)] * 4)
    with pytest.raises(ValueError):
        assemble_certificate(seq, fake_n1(1), 1, [Fraction(0)] * 3)
    with pytest.raises(ValueError):
        assemble_certificate(seq, fake_n1(1), 1, [Fraction(-1)] + [Fraction(0)] * 3)
    unresolved = NormEstimate(1, 1, 1, "grid", {"resolved": False})
    with pytest.raises(ValueError):
        assemble_certificate(seq, unresolved, 1, [Fraction(0)] * 4)


def test_n1_lower_rounded_down():
    seq = budget_sequence()
    cert = assemble_certificate(seq, fake_n1(2 / 3), 1, [Fraction(0)] * 4)
    assert cert.N1["lower"] == "0.666666666666"
    assert cert.N1_lower <= Fraction(2 / 3)


def test_n9_replay():
    cert = run_pipeline(1, n=9, samples=100_000, seed=0)
    obj = json.loads(json.dumps(cert.to_json()))
    r = replay_ratio(obj)
    assert r == cert.ratio == Fraction(obj["ratio"])
    n1 = Fraction(obj["bounds"]["N1"]["lower"])
    s1 = Fraction(obj["bounds"]["S"][0])
    # the denominator never exceeds 8 = 2 + 3 * 2 when every budget holds
    assert r >= (n1 - s1) / 8
    assert cert.S_method == "exhaustive" and cert.S_exact is False


def test_certificate_json_round_trip_byte_identical():
    cert = run_pipeline(1, n=4, samples=20_000, seed=3)
    text = json.dumps(cert.to_json())
    back = Certificate.from_json(json.loads(text))
    assert json.dumps(back.to_json()) == text


def test_rerun_bit_identical():
    a = json.dumps(run_pipeline(Fraction(1, 2), n=4, samples=20_000, seed=7).to_json())
    b = json.dumps(run_pipeline(Fraction(1, 2), n=4, samples=20_000, seed=7).to_json())
    assert a == b


def test_faithful_budget():
    cert = run_pipeline(1, n=4, mode="faithful", samples=20_000)
    assert cert.S_exact
    assert all(s <= 1 for s in cert.S)


def test_schema_fields():
    obj = run_pipeline(1, n=4, samples=20_000).to_json()
    assert set(obj) >= {"params", "sequence", "bounds", "ratio", "verdict"}
    assert set(obj["bounds"]) >= {"S", "T", "N1", "U0"}
    assert set(obj["bounds"]["N1"]) >= {"value", "lower", "confidence", "method", "seed", "samples"}
    assert obj["bounds"]["U0"] == "2"
    assert obj["conversion_exponents"] == [4, 5, 6, 7, 8]
    assert all(isinstance(c, str) for a in obj["sequence"]["freqs"] for c in a)


def test_choose_n():
    # (8K + 1)^2 dominates 64 K^2 for every K > 0
    assert choose_n(1, c_hat=1) == 81
    assert choose_n(1, c_hat=Fraction(9, 2)) == 4
    assert choose_n(Fraction(1, 8), c_hat=1) == 4
    assert choose_n(1, c_hat=1, mode="faithful") == 81
    assert choose_n(1, c_hat=2, mode="faithful") == 21
    with pytest.raises(ValueError):
        choose_n(0)


def test_pipeline_caps_large_n():
    cert = run_pipeline(1, samples=20_000, max_n=9)
    assert cert.seq.n == 9
    assert cert.params["n_requested"] == choose_n(1)


def test_pipeline_reports_stage():
    with pytest.raises(PipelineError) as exc:
        run_pipeline(1, n=4, samples=10)
    assert exc.value.stage == "estimate"
    with pytest.raises(PipelineError):
        run_pipeline(0)


def test_replay_detects_tampering():
    obj = run_pipeline(1, n=4, samples=20_000).to_json()
    obj["bounds"]["S"][0] = "1/2"
    assert replay_ratio(obj) != Fraction(obj["ratio"])


def test_summary_mentions_verdict():
    assert "verdict" in run_pipeline(1, n=4, samples=20_000).summary()

