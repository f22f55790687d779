import mpmath
import numpy as np
import pytest

from seiffert import inequality as ie
from seiffert.grids import ratio_grid
from seiffert.inequality import (COUNTEREXAMPLE, INCONCLUSIVE, REFERENCE_SUITE, VERIFIED,
                                 ChainSpec, FixtureError, load_fixtures, parse_fixtures,
                                 verify_chain)

DPS = 50


@pytest.fixture(scope="module")
def fixtures():
    return load_fixtures()


def mp(x):
    return mpmath.mpf(x)


def oracle_T(a, b):
    a, b = mp(a), mp(b)
    return (a - b) / (2 * mpmath.atan((a - b) / (a + b)))


def oracle_A(p, a, b):
    p, a, b = mp(p), mp(a), mp(b)
    return ((a ** p + b ** p) / 2) ** (1 / p)


# ---------------------------------------------------------------------------
# fixtures


def test_packaged_fixtures_cover_suite(fixtures):
    assert set(REFERENCE_SUITE) <= set(fixtures)
    assert len(REFERENCE_SUITE) == 13
    for name in ("4.1", "Y1", "ma"):
        assert name in fixtures


def test_fixture_texts_round_trip(fixtures):
    for spec in fixtures.values():
        again = ChainSpec.from_text(spec.name, spec.text, spec.parameters, spec.domain)
        for t1, t2 in zip(spec.terms, again.terms):
            assert t1.evaluate(1, 0.37) == t2.evaluate(1, 0.37)


def test_chain_terms_are_ordered_at_sample_point(fixtures):
    # quick native-precision screen at an interior ratio
    for spec in fixtures.values():
        vals = [t.evaluate(1, 0.4) for t in spec.terms]
        assert all(a < b for a, b in zip(vals, vals[1:])), spec.name


SAMPLE = """
# comment
[demo]
description = a test chain
param r = 1/4
chain = affine (1-r) Q r A < Q
domain = 0 0.5
"""


def test_parse_fixture_text():
    chains = parse_fixtures(SAMPLE)
    spec = chains["demo"]
    assert spec.domain == (0.0, 0.5) and spec.description == "a test chain"
    assert spec.parameters == (("r", "1/4"),)
    assert len(spec.terms) == 2


@pytest.mark.parametrize("text", [
    "chain = A < T",
    "[x]\nchain = A < T\nchain = A < Q",
    "[x]\ndescription = no chain",
    "[x]\nchain = A < T\n[x]\nchain = A < Q",
    "[x]\nbogus line",
    "[x]\nchain = A < Z",
    "[x]\nchain = A < T\ndomain = 0.5 0.2",
    "[x]\nchain = affine (1-r) Q r A < T",
])
def test_fixture_errors(text):
    with pytest.raises(FixtureError):
        parse_fixtures(text)


def test_load_fixtures_from_path(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text(SAMPLE)
    assert list(load_fixtures(f)) == ["demo"]


# ---------------------------------------------------------------------------
# verification


def test_seiffert_chain_verifies(fixtures):
    rep = verify_chain(fixtures["Seiffert"], 10_000, DPS)
    assert rep.status == VERIFIED and rep.verified
    assert rep.min_margin > 0
    assert rep.grid_size >= 10_000
    assert not rep.counterexamples


def test_false_claim_below_a_1_6_is_counterexample():
    # oracle: F_1.6(0.99) > 0 since the x -> 1 coefficient -(3*1.6-5)/24 is positive
    with mpmath.workdps(40):
        assert mpmath.log(oracle_T(1, "0.99")) - mpmath.log(oracle_A("1.6", 1, "0.99")) > 0
    rep = verify_chain(ChainSpec.from_text("claim", "T < A_1.6"), 2000, DPS)
    assert rep.status == COUNTEREXAMPLE
    assert any(w.ratio > 0.9 for w in rep.counterexamples)
    assert rep.violation_count > 0


def test_false_claim_above_a_1_7_fails_near_zero():
    rep = verify_chain(ChainSpec.from_text("claim", "A_1.7 < T"), 2000, DPS)
    assert rep.status == COUNTEREXAMPLE
    worst = min(rep.counterexamples, key=lambda w: w.margin)
    assert worst.ratio < 1e-3


def test_repeated_term_is_counterexample():
    rep = verify_chain(ChainSpec.from_text("same", "A < A"), 256, DPS)
    assert rep.status == COUNTEREXAMPLE
    assert rep.min_margin == 0


def test_witnesses_reverify_at_double_precision():
    rep = verify_chain(ChainSpec.from_text("claim", "T < A_1.6"), 1000, DPS)
    for w in rep.counterexamples:
        with mpmath.workdps(2 * DPS):
            left = mpmath.log(oracle_T(1, w.ratio))
            right = mpmath.log(oracle_A("1.6", 1, w.ratio))
            assert right - left < 0
            assert abs((right - left) - w.margin) < mp(10) ** -(DPS - 5)


def test_grid_too_small_rejected(fixtures):
    with pytest.raises(ValueError):
        verify_chain(fixtures["Seiffert"], 10, DPS)


def test_worker_partitioning_is_deterministic(fixtures):
    spec = fixtures["C-S"]
    one = verify_chain(spec, 300, 40, workers=1)
    two = verify_chain(spec, 300, 40, workers=2)
    assert one.to_dict() == two.to_dict()


def test_inconclusive_when_margin_below_resolution():
    # the gap between T and A_5/3 this close to 1 is below 30 digits
    spec = ChainSpec.from_text("tight", "T < A_5/3", domain=(0.9999999, 1.0))
    rep = verify_chain(spec, 64, 30)
    assert rep.status == INCONCLUSIVE
    assert rep.unresolved_count > 0


def test_report_dict_shape(fixtures):
    d = verify_chain(fixtures["W1"], 128, 30).to_dict()
    assert d["status"] == VERIFIED
    assert set(d) >= {"chain", "status", "min_margin", "argmin", "grid_size", "precision"}


# ---------------------------------------------------------------------------
# profiles


def test_profile_shape(fixtures):
    prof = ie.margin_profile(fixtures["C-S"], 128, 30)
    assert len(prof.rows) == 128
    assert len(prof.header) == 4
    assert all(len(m) == 3 for _, m in prof.rows)
    # margins vanish toward x = 1
    assert all(abs(m) < 1e-14 for m in prof.rows[-1][1])


def test_wang_margins_positive_at_half(fixtures):
    spec = fixtures["Wang"]
    prof = ie.margin_profile(spec, 64, 40)
    (m1, m2), = ie.evaluate_margins(spec, [0.5], 40)
    with mpmath.workdps(40):
        a, b = mp(1), mp("0.5")
        l0 = (a + b) / 2
        l13 = (a ** (mp(4) / 3) + b ** (mp(4) / 3)) / (a ** (mp(1) / 3) + b ** (mp(1) / 3))
        t = oracle_T(a, b)
        assert abs(m1 - mpmath.log(t / l0)) < mp(10) ** -35
        assert abs(m2 - mpmath.log(l13 / t)) < mp(10) ** -35
    assert m1 > 0 and m2 > 0
    assert all(m > 0 for _, ms in prof.rows for m in ms)


def test_ma_envelope_minimum_at_zero_end(fixtures):
    prof = ie.margin_profile(fixtures["ma"], 1000, DPS)
    lower = [ms[0] for _, ms in prof.rows]
    i = min(range(len(lower)), key=lower.__getitem__)
    assert prof.rows[i][0] < 1e-6
    assert lower[i] < 1e-6


# ---------------------------------------------------------------------------
# Ky Fan type inequality


def _kyfan_oracle(p, a1, b1, a2, b2):
    with mpmath.workdps(60):
        lhs = oracle_T(a1, b1) / oracle_T(a2, b2)
        rhs = oracle_A(p, a1, b1) / oracle_A(p, a2, b2)
        return lhs - rhs


def test_kyfan_forward_at_five_thirds():
    r = ie.verify_kyfan("5/3", (1, 4, 1, 2), DPS)
    assert r.forward and not r.reversed
    assert _kyfan_oracle(mp(5) / 3, 1, 4, 1, 2) < 0


def test_kyfan_reversed_at_one():
    r = ie.verify_kyfan(1, (1, 4, 1, 2), DPS)
    assert r.reversed and not r.forward
    assert _kyfan_oracle(1, 1, 4, 1, 2) > 0


def test_kyfan_random_quadruples_agree_with_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x1, x2 = sorted(rng.uniform(0.01, 0.99, 2))
        b1, b2 = rng.uniform(0.5, 5, 2)
        p = float(rng.choice([0.5, 1.0, 5 / 3, 2.0]))
        q = (x1 * b1, b1, x2 * b2, b2)
        r = ie.verify_kyfan(repr(p), q, DPS)
        assert r.forward == (_kyfan_oracle(p, *q) < 0)


@pytest.mark.parametrize("q", [(1, 2, 1, 2), (1, 2, 2, 4), (1, 4, 1, 1), (1, 2, 1, 4), (0, 1, 1, 2)])
def test_kyfan_preconditions(q):
    with pytest.raises(ValueError):
        ie.verify_kyfan("5/3", q, DPS)


# ---------------------------------------------------------------------------
# D and D1


def test_d_negative_and_d1_nonnegative():
    for x in ratio_grid(500):
        assert ie.d_function(x, DPS) < 0
        assert ie.d1_function(x, DPS) >= 0


def test_d1_factorisation():
    rng = np.random.default_rng(11)
    for x in list(rng.uniform(0, 3, 100)) + [0, 1, 2]:
        x = str(x)
        assert abs(ie.d1_function(x, 60) - ie.d1_factored(x, 60)) <= mp(10) ** -30


def test_d_derivative_sign_follows_d1():
    # D rises to 0 at x = 1; D'(x) has the sign of D1(x)
    h = mp(10) ** -15
    with mpmath.workdps(40):
        for x in ["0.1", "0.4", "0.8"]:
            x = mp(x)
            d = (ie.d_function(x + h, 40) - ie.d_function(x - h, 40)) / (2 * h)
            assert mpmath.sign(d) == mpmath.sign(ie.d1_function(x, 40)) == 1
