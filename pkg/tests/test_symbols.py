import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermite_multipliers.errors import SymbolError
from hermite_multipliers.symbols import (
    condition_report, forward_difference, load_symbol_table, make_cutoff, make_lp_partition,
    make_symbol, multilinear_separable, parse_symbol, pseudo_symbol, separable_symbol, smooth_step,
    tabulated_symbol)


def test_family_values():
    nu = np.array([[1, 2], [0, 0]])
    assert np.allclose(make_symbol("power", 2, n=2).evaluate(nu), [1 / 16, 1])
    osc = make_symbol("oscillating", 5).evaluate(np.arange(10))
    assert np.allclose(np.abs(osc), 1) and osc[0] == 1
    assert np.allclose(osc[3], np.exp(5j * math.log(4)))
    mih = make_symbol("mihlin").evaluate([3])
    assert np.allclose(mih, (1 + 9) ** 0.5j)
    assert make_symbol("mihlin", (1.0, 2.0)).evaluate([3])[0] == pytest.approx(10 ** ((1j - 2) / 2))
    assert np.allclose(make_symbol("one", n=3).evaluate([[4, 5, 6]]), 1)


def test_riesz_uses_eigenvalue():
    # (1 - lam/R)_+^delta with lam = 2|nu| + n
    s = make_symbol("riesz", (2, 20), n=1)
    assert s.evaluate([4])[0] == pytest.approx((1 - 9 / 20) ** 2)
    assert s.evaluate([10])[0] == 0
    assert not s.smooth
    spec = make_symbol("riesz", (1, 20), kind="spectral")
    assert spec.at_multi_indices(np.array([[4]]))[0] == pytest.approx(1 - 9 / 20)


def test_size_conventions():
    s = make_symbol("power", 1, n=2)
    assert s.evaluate([[3, 4]])[0] == pytest.approx(1 / 8)
    assert s.evaluate_real([[3.0, 4.0]])[0] == pytest.approx(1 / 6)
    radial = make_symbol("power", 1, n=2, kind="radial")
    assert radial.at_multi_indices(np.array([[1, 2]]))[0] == pytest.approx(1 / 4)
    spectral = make_symbol("power", 1, n=2, kind="spectral")
    assert spectral.at_multi_indices(np.array([[1, 2]]))[0] == pytest.approx(1 / 9)


def test_pseudo_and_separable_symbols():
    s = make_symbol("power", 1, xfactor=lambda x: 1 + x[:, 0] ** 2)
    assert s.kind == "pseudo" and s.depends_on_x
    with pytest.raises(SymbolError):
        s.evaluate([1])
    vals = s.evaluate([0, 1], x=np.array([[0.0], [2.0]]))
    assert np.allclose(vals, [[1, 0.5], [5, 2.5]])

    sep = separable_symbol(lambda x: np.cos(x[:, 0]), make_symbol("oscillating", 2))
    got = sep.evaluate([3], x=np.array([[0.5]]))
    assert got[0, 0] == pytest.approx(math.cos(0.5) * 4 ** 2j)

    f = pseudo_symbol(lambda x, idx: np.sin(x[:, :1]) * idx[:, 0][None, :])
    assert np.allclose(f.evaluate([1, 2], np.array([[1.0]])), [[math.sin(1), 2 * math.sin(1)]])


def test_multilinear_symbols():
    s = make_symbol("power", 1, n=1, kind="multilinear", arity=2)
    assert s.arity == 2 and s.index_dim == 2
    assert s.evaluate([[2, 3]])[0] == pytest.approx(1 / 6)
    sep = multilinear_separable([make_symbol("power", 1), make_symbol("power", 2)])
    assert sep.evaluate([[1, 2]])[0] == pytest.approx(0.5 / 9)
    with pytest.raises(SymbolError):
        s.at_multi_indices([[1]])


def test_parse_grammar(tmp_path):
    assert parse_symbol("power:1").evaluate([1])[0] == pytest.approx(0.5)
    assert parse_symbol("riesz:2:256").params == (2.0, 256.0)
    assert parse_symbol("one").family == "one"
    path = tmp_path / "m.csv"
    path.write_text("nu_1,re,im\n0,0.3,0\n1,0.9,0\n2,0.1,0.5\n")
    t = parse_symbol(f"table:{path}")
    assert np.allclose(t.evaluate([0, 1, 2]), [0.3, 0.9, 0.1 + 0.5j])
    with pytest.raises(SymbolError):
        t.evaluate([3])
    with pytest.raises(SymbolError):
        t.evaluate_real([0.5])
    for bad in ("nope", "power", "power:1:2", "power:abc", "power:inf", "riesz:-1:3"):
        with pytest.raises(SymbolError):
            parse_symbol(bad)


def test_table_with_x_uses_nearest_sample(tmp_path):
    path = tmp_path / "mx.csv"
    path.write_text("nu_1,x_1,re,im\n0,-1,1,0\n0,1,2,0\n1,0,3,0\n")
    t = load_symbol_table(path, n=1)
    assert t.kind == "pseudo"
    vals = t.evaluate([0, 1], x=np.array([[-0.8], [0.9]]))
    assert np.allclose(vals, [[1, 3], [2, 3]])
    with pytest.raises(SymbolError):
        load_symbol_table(path, n=2)


def test_tabulated_from_dict():
    t = tabulated_symbol({(0, 1): 2.0, (1, 0): 3.0}, n=2)
    assert np.allclose(t.evaluate([[1, 0], [0, 1]]), [3, 2])
    with pytest.raises(SymbolError):
        tabulated_symbol({(0,): 1.0}, n=2)


# --------------------------------------------------------------------------
# differences and condition constants

def test_forward_difference():
    s = make_symbol("power", 1)
    d = forward_difference(s, 1)
    assert d.evaluate([0])[0] == pytest.approx(-0.5)
    d2 = forward_difference(s, 2)
    assert d2.evaluate([0])[0] == pytest.approx(1 / 3 - 2 / 2 + 1)
    spec = make_symbol("power", 1, kind="spectral")
    # spectral differences move lam by 2
    assert forward_difference(spec, 1).evaluate([1])[0] == pytest.approx(1 / 4 - 1 / 2)
    s2 = make_symbol("power", 1, n=2)
    mixed = forward_difference(s2, (1, 1)).evaluate([[0, 0]])[0]
    assert mixed == pytest.approx(1 / 3 - 2 / 2 + 1)
    with pytest.raises(SymbolError):
        forward_difference(s2, 1)


def test_marcinkiewicz_constants():
    rep = condition_report(make_symbol("power", 1), 1)
    assert rep[(0,)].value == pytest.approx(1.0)
    assert rep[(1,)].value == pytest.approx(0.5)
    assert rep[(1,)].argsup == {"index": [0]}
    osc = condition_report(make_symbol("oscillating", 5), 1)
    assert 4.9 < osc[(1,)].value <= 6


def test_kohn_nirenberg_derivatives():
    kappa = 1.5
    xi = np.linspace(0.1, 50, 400)
    rep = condition_report(make_symbol("power", kappa), 2, mode="kohn-nirenberg", xi_points=xi)
    # (1+xi)^j |d^j (1+xi)^-kappa| = kappa (kappa+1).. (1+xi)^-kappa
    assert rep[(1,)].value == pytest.approx(kappa * 1.1**-kappa, rel=1e-6)
    assert rep[(2,)].value == pytest.approx(kappa * (kappa + 1) * 1.1**-kappa, rel=1e-5)


def test_condition_report_pseudo_needs_grid():
    s = make_symbol("power", 1, xfactor=lambda x: np.cos(x[:, 0]))
    with pytest.raises(SymbolError):
        condition_report(s, 1)
    rep = condition_report(s, 1, x_grid=np.linspace(-1, 1, 5))
    assert rep[(0,)].value == pytest.approx(1.0)
    assert rep[(0,)].argsup["x"] == [0.0]


# --------------------------------------------------------------------------
# cutoffs and partitions

@settings(max_examples=50, deadline=None)
@given(t=st.floats(0, 1), u=st.floats(0, 1))
def test_smooth_step_monotone_and_symmetric(t, u):
    a, b = sorted((t, u))
    assert smooth_step(a) <= smooth_step(b) + 1e-15
    assert smooth_step(t) + smooth_step(1 - t) == pytest.approx(1.0, abs=1e-12)


def test_cutoff_shape():
    psi = make_cutoff()
    t = np.array([0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0])
    assert np.allclose(psi(t), [0, 0, 1, 1, 1, 0.5, 0, 0])
    inner = np.linspace(0.51, 3.99, 200)
    assert np.all(psi(inner) > 0)


@pytest.mark.parametrize("L", [1, 4, 10])
def test_lp_partition(L):
    part = make_lp_partition(L)
    lam = np.linspace(0, 2.0**L, 10001)
    assert np.max(np.abs(part.total(lam) - 1)) < 1e-14
    blocks = part.blocks(lam)
    assert np.all(blocks >= -1e-16)
    assert np.max((blocks > 0).sum(axis=0)) <= 2
    for l in range(1, L + 1):
        outside = (lam < 2.0 ** (l - 1)) | (lam > 2.0 ** (l + 1))
        assert np.all(part.block(l, lam[outside]) == 0)
    assert 1 / math.sqrt(2) - 1e-12 <= part.frame_bound(lam) <= 1
    with pytest.raises(ValueError):
        part.block(L + 1, lam)
