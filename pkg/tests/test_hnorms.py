import json
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import expit

from hermite_multipliers.errors import HermiteError, SymbolError
from hermite_multipliers.hermite_core import hermite_functions
from hermite_multipliers.hnorms import block_sobolev_norm, hormander_norm, log2_slope
from hermite_multipliers.symbols import make_cutoff, make_symbol, pseudo_symbol, tabulated_symbol

PSI = make_cutoff()


def step_and_slope(t):
    """smooth_step and its derivative on (0, 1)."""
    g = 1 / (1 - t) - 1 / t
    s = expit(g)
    return s, s * (1 - s) * (1 / (1 - t) ** 2 + 1 / t**2)


def psi_and_derivative(t):
    if t <= 0.5 or t >= 4:
        return 0.0, 0.0
    if t < 1:
        s, ds = step_and_slope((t - 0.5) / 0.5)
        return s, ds / 0.5
    if t <= 2:
        return 1.0, 0.0
    s, ds = step_and_slope((4 - t) / 2)
    return s, -ds / 2


def test_psi_derivative_helper_matches_cutoff():
    for t in (0.6, 0.9, 2.5, 3.7):
        assert psi_and_derivative(t)[0] == pytest.approx(float(PSI(t)), abs=1e-15)
        h = 1e-6
        fd = (float(PSI(t + h)) - float(PSI(t - h))) / (2 * h)
        assert psi_and_derivative(t)[1] == pytest.approx(fd, rel=1e-6)


def test_ft_block_against_quadrature():
    # s = 1: ||<u> F psi||^2 = ||psi||^2 + ||psi'||^2 / (4 pi^2) by Plancherel
    pts = [0.5, 1, 2, 4]
    a = quad(lambda t: psi_and_derivative(t)[0] ** 2, 0.5, 4, points=pts, epsabs=1e-14)[0]
    b = quad(lambda t: psi_and_derivative(t)[1] ** 2, 0.5, 4, points=pts, epsabs=1e-14)[0]
    want = math.sqrt(2 * (a + b / (4 * math.pi**2)))
    rep = hormander_norm(make_symbol("one"), "FT", 1.0, "rescaled", [3])
    assert rep.values()[0] == pytest.approx(want, rel=1e-9)


def test_block_sobolev_against_quadrature():
    kappa, k = 0.5, 6
    c = 2.0**k

    def g(t):
        p, dp = psi_and_derivative(t)
        return (1 + c * t) ** -kappa * p, -kappa * c * (1 + c * t) ** (-kappa - 1) * p + (1 + c * t) ** -kappa * dp

    pts = [0.5, 1, 2, 4]
    n0 = math.sqrt(2 * quad(lambda t: g(t)[0] ** 2, 0.5, 4, points=pts, epsabs=1e-14)[0])
    n1 = math.sqrt(2 * quad(lambda t: g(t)[1] ** 2, 0.5, 4, points=pts, epsabs=1e-14)[0])
    got = block_sobolev_norm(make_symbol("power", kappa), k, 1)
    assert got == pytest.approx(n0 + n1, rel=1e-8)
    assert got == pytest.approx(0.55336, abs=1e-5)
    assert block_sobolev_norm(make_symbol("power", kappa), k, 0) == pytest.approx(n0, rel=1e-10)


def test_block_sobolev_two_dimensions_radial_one():
    # m = 1: the L^2 norm of psi(|xi|) in the plane is sqrt(2 pi int psi^2 r dr)
    want = math.sqrt(2 * math.pi * quad(lambda r: psi_and_derivative(r)[0] ** 2 * r, 0.5, 4,
                                         points=[1, 2])[0])
    assert block_sobolev_norm(make_symbol("one", n=2), 3, 0) == pytest.approx(want, rel=1e-6)


def test_block_sobolev_rejections():
    with pytest.raises(SymbolError):
        block_sobolev_norm(make_symbol("riesz", (1, 10)), 2, 1)
    with pytest.raises(SymbolError):
        block_sobolev_norm(tabulated_symbol({0: 1.0}), 2, 0)
    assert block_sobolev_norm(make_symbol("riesz", (1, 10)), 2, 0) >= 0


def test_rescaled_one_is_constant_and_literal_grows():
    one = make_symbol("one")
    vals = hormander_norm(one, "FT", 2.0, "rescaled", range(1, 13)).values()
    assert np.ptp(vals) == 0
    lit = hormander_norm(one, "FT", 2.0, "literal", range(6, 13))
    assert np.allclose(lit.values()[1:] / lit.values()[:-1], 4, rtol=1e-3)
    assert lit.tail_slope == pytest.approx(2.0, abs=1e-3)


def test_mihlin_blocks_stay_bounded():
    vals = hormander_norm(make_symbol("mihlin"), "FT", 3.0, k_range=range(4, 11)).values()
    assert vals.max() / vals.min() < 2


def test_pseudo_symbol_grid_sup():
    s = make_symbol("power", 0, xfactor=lambda x: 1 + np.exp(-x[:, 0] ** 2))
    rep = hormander_norm(s, "FT", 1.0, k_range=[2], x_grid=np.array([[-1.0], [0.0], [2.0]]))
    base = hormander_norm(make_symbol("one"), "FT", 1.0, k_range=[2]).values()[0]
    assert rep.sup == pytest.approx(2 * base, rel=1e-12)
    assert rep.argsup == {"k": 2, "y": [0.0]}


def test_fht_block_against_direct_sum():
    k, s = 2, 1.0
    rep = hormander_norm(make_symbol("one"), "FHT", s, k_range=[k])
    z = np.linspace(-20, 20, 8001)
    nu = np.arange(4 * 2**k + 1)
    g = hermite_functions(nu[-1], z) @ PSI(nu / 2.0**k)
    integral = np.sum((1 + z**2) ** s * g**2) * (z[1] - z[0])
    want = 2.0 ** (k * (s - 0.5)) * math.sqrt(integral)
    assert rep.values()[0] == pytest.approx(want, rel=1e-10)
    assert rep.mode == "literal"


def test_fht_default_range_is_truncated():
    rep = hormander_norm(make_symbol("power", 1, n=2), "FHT", 1.0)
    assert rep.meta["k_truncated_at"] == rep.ks()[-1] < 12


def test_multilinear_and_spectral_flavors():
    s = make_symbol("one", kind="multilinear", arity=2)
    vals = hormander_norm(s, "multilinear-FT", 2.0, k_range=range(1, 5)).values()
    assert np.ptp(vals) < 1e-12
    fht = hormander_norm(make_symbol("power", 1, kind="multilinear", arity=2), "multilinear-FHT", 1.0,
                         k_range=[1, 2])
    assert fht.meta["joint_size"] == "l1"
    # spectral-1d literal: a 1-D transform with the prefactor 2^{k(s - n/2)}
    spec = make_symbol("power", 1, n=2, kind="spectral")
    lit = hormander_norm(spec, "spectral-1d", 1.0, "literal", [3]).values()[0]
    flat = hormander_norm(make_symbol("power", 1), "FT", 1.0, "literal", [3]).values()[0]
    assert lit == pytest.approx(flat * 2.0**-1.5, rel=1e-14)


def test_flavor_errors():
    one = make_symbol("one")
    with pytest.raises(HermiteError):
        hormander_norm(one, "FHT", 1.0, "rescaled")
    with pytest.raises(HermiteError):
        hormander_norm(one, "nope", 1.0)
    with pytest.raises(SymbolError):
        hormander_norm(one, "multilinear-FT", 1.0)
    with pytest.raises(SymbolError):
        hormander_norm(one, "spectral-1d", 1.0)
    with pytest.raises(SymbolError):
        hormander_norm(tabulated_symbol({0: 1.0}), "FT", 1.0)
    with pytest.raises(HermiteError):
        hormander_norm(one, "FT", 0.0)


def test_report_json_and_slope():
    rep = hormander_norm(pseudo_symbol(lambda x, xi: np.ones((x.shape[0], xi.shape[0]))), "FT", 1.0,
                         k_range=[1, 2, 3])
    data = json.loads(rep.to_json())
    assert data["flavor"] == "FT" and len(data["blocks"]) == 3
    assert log2_slope([1, 2, 3], [2, 4, 8]) == pytest.approx(1.0)
    assert math.isnan(log2_slope([1], [1.0]))
