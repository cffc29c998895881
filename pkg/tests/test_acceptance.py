"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` (or ``python tests/test_acceptance.py``)
to see the lines as they are produced; they are also collected into the
terminal summary.
"""
import math

from hermite_multipliers import acceptance as acc

RESULTS = []


def check(number):
    res = acc.run_criterion(number)
    RESULTS.append(res.line())
    print(res.line())
    return res


def test_01_orthonormality_and_plancherel():
    res = check(1)
    m = res.measured
    assert max(m["gram_defect"].values()) < 1e-10
    assert max(m["plancherel_defect"].values()) < 1e-10
    assert res.passed


def test_02_lower_bound():
    res = check(2)
    for row in res.measured["rows"]:
        assert row["ratio_deviation"] < 1e-6
        assert row["lower_bound"] >= row["sup"] - 1e-6
    assert len(res.measured["rows"]) == 15
    assert res.passed


def test_03_compactness_identity():
    res = check(3)
    for row in res.measured["rows"]:
        assert abs(row["measured"] - row["expected"]) < 1e-10
    assert res.passed


def test_04_hermite_lp_asymptotics():
    res = check(4)
    s = res.measured["slopes"]
    assert abs(s[1.0] - 0.25) <= 0.02
    assert abs(s[2.0]) <= 0.005
    assert abs(s[6.0] + 1 / 9) <= 0.02
    assert abs(s[math.inf] + 1 / 12) <= 0.02
    assert -0.125 < s[4.0] < -0.10
    assert res.passed


def test_05_product_exponents():
    res = check(5)
    for row in res.measured["rows"]:
        assert row["slope"] <= row["limit"]
    assert res.passed


def test_06_threshold_tables():
    res = check(6)
    assert not res.measured["mismatches"]
    assert res.measured["junction_gap"] <= 1e-14
    assert res.passed


def test_07_dyadic_machinery():
    res = check(7)
    m = res.measured
    assert m["partition_defect"] < 1e-12
    assert m["completeness"] < 1e-10
    assert m["block_gap"] < 1e-10
    assert res.passed


def test_08_littlewood_paley():
    res = check(8)
    m = res.measured
    assert len(m["ratios"]) == 50
    assert m["frame_bound"] <= m["min_ratio"] and m["max_ratio"] <= 1
    assert res.passed


def test_09_hormander_norms():
    res = check(9)
    m = res.measured
    assert m["rescaled_spread"] < 1e-8
    assert m["mihlin_ratio"] < 2
    assert abs(m["literal_growth"] / 4 - 1) < 0.02
    assert res.passed


def test_10_karadzhov_diagnostic():
    res = check(10)
    assert res.measured["slope"] <= 0.1
    assert len(res.measured["values"]) == 57
    assert res.passed


def test_11_multilinear():
    res = check(11)
    m = res.measured
    assert max(m["product_error"], m["general_error"], m["separable_error"]) < 1e-8
    assert m["s_multilinear_221"] == "13/2"
    assert res.passed


if __name__ == "__main__":
    for r in acc.run_all():
        print(r.line())
