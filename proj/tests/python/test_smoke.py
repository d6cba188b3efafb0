from fractions import Fraction

import pytest

import msdi


def test_ms_facts_pass():
    out = msdi.run("ms-facts", mode="exact")
    assert len(out["claims"]) == 5
    assert all(c["verdict"] == "pass" for c in out["claims"])


def test_honest_ot_on_ideal_devices():
    out = msdi.run("ot-run", code="hamming74", trials=64, seed=3)
    (claim,) = out["claims"]
    assert claim["claim"] == "ot_correctness"
    assert claim["verdict"] == "pass"


def test_bc_hiding_exact_tiny():
    out = msdi.run("bc-hiding", code="repetition:1", mode="exact", strategy="ascending:0")
    assert out["detail"]["distance_exact"] == "13/32"


def test_code_roundtrip():
    c = msdi.LinearCode("hamming74")
    assert (c.n, c.k, c.d) == (7, 4, 3)
    e = "0000100"
    assert c.decode(c.syndrome(e)) == e
    assert c.syndrome("0000000") == "000"


def test_extractor_and_sizing():
    d = msdi.strong_extractor_distance([0, 1, 2, 3], 3, 1)
    assert isinstance(d, Fraction)
    assert float(d) <= msdi.leftover_hash_ceiling(2, 1)
    lo, hi = msdi.rate_interval(0, 100)
    assert lo == 0 and 0 < hi < 0.05
    assert msdi.auto_code(2, 1e-3, 0.5) == "repetition:2"


def test_bad_config_raises():
    with pytest.raises(msdi.ConfigError):
        msdi.run("ot-run", code="hamming74", n=8)
    with pytest.raises(msdi.ConfigError):
        msdi.run("no-such-command")
