"""Dyadic Hoermander-type symbol norms and per-block Sobolev norms.

Flavors
-------
``FT``              B_k = 2^{k(s-d/2)} || <x>^s F[m(y,.) psi(2^-k |.|)] ||_2, d = n
``FHT``             same with F replaced by Hermite synthesis over the shell
``spectral-1d``     one-dimensional F over the spectral variable lam
``multilinear-FT``  FT flavor in R^{n kappa}, Euclidean |xi|
``multilinear-FHT`` FHT flavor over joint indices, l1 size |nu_1| + ... + |nu_kappa|

For Fourier-type flavors the ``rescaled`` mode (default) uses
||<u>^s F[m(y, 2^k .) psi(|.|)](u)||_2 instead; by the change of variables
xi = 2^k eta the ``literal`` value equals 2^{ks} ||<2^-k u>^s F[...](u)||_2 on
the same samples, which is how it is computed.  Hermite-type flavors only
have the literal form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HermiteError, SizingError, SymbolError
from .hermite_core import MAX_GRID_POINTS, hermite_functions, hermite_series
from .symbols import make_cutoff
from .transform import contract_axes, ft_axis

FLAVORS = ("FT", "FHT", "spectral-1d", "multilinear-FT", "multilinear-FHT")
MODES = ("rescaled", "literal")
DEFAULT_K_MAX = 12
FT_PAD = 8.0
#: dual half-width X (frequency box [-X, X]) by transform dimension
DUAL_HALF_WIDTH = {1: 256.0, 2: 32.0}
#: default cap on the largest shell index synthesized by Hermite-type blocks
FHT_MAX_INDEX = 4096

_PSI = make_cutoff()


@dataclass
class HormanderReport:
    flavor: str
    s: float
    mode: str
    blocks: list
    sup: float
    argsup: dict
    tail_slope: float
    meta: dict = field(default_factory=dict)

    def values(self):
        return np.array([b["value"] for b in self.blocks])

    def ks(self):
        return [b["k"] for b in self.blocks]

    def to_dict(self):
        return {
            "flavor": self.flavor,
            "s": self.s,
            "mode": self.mode,
            "blocks": self.blocks,
            "sup": self.sup,
            "argsup": self.argsup,
            "tail_slope": self.tail_slope,
            "meta": self.meta,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def log2_slope(ks, values):
    """Least-squares slope of log2(values) against k (nan with fewer than 2 points)."""
    ks = np.asarray(ks, dtype=float)
    v = np.asarray(values, dtype=float)
    ok = v > 0
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(ks[ok], np.log2(v[ok]), 1)[0])


# --------------------------------------------------------------------------
# Fourier-type blocks
# --------------------------------------------------------------------------

def _ft_axes(d, dual_half=None, pad=FT_PAD):
    X = dual_half or DUAL_HALF_WIDTH.get(d, 8.0)
    h = 1.0 / (2.0 * X)
    L = 2 * int(math.ceil(pad / h))
    axis = h * (np.arange(L) - L // 2)
    return axis, h


class _FTBlock:
    """Samples eta in [-pad, pad)^d and the weighted-L2 norm of their transforms."""

    def __init__(self, d, dual_half=None):
        if d > 3:
            raise SizingError("Fourier-type blocks are limited to dimension <= 3")
        self.d = d
        self.axis, self.h = _ft_axes(d, dual_half)
        L = self.axis.size
        if L**d > MAX_GRID_POINTS * 4:
            raise SizingError(f"frequency box {L}^{d} is too large")
        mesh = np.meshgrid(*([self.axis] * d), indexing="ij")
        self.eta = np.stack([m.ravel() for m in mesh], axis=-1)
        r = np.sqrt(np.sum(self.eta**2, axis=1))
        self.support = np.nonzero((r > 0.5) & (r < 4.0))[0]
        self.psi = _PSI(r[self.support])
        dual = (np.arange(L) - L // 2) / (L * self.h)
        u2 = 0.0
        for j in range(d):
            shape = [1] * d
            shape[j] = L
            u2 = u2 + (dual**2).reshape(shape)
        self.u2 = u2
        self.du = (1.0 / (L * self.h)) ** d
        self.shape = (L,) * d

    def norms(self, vals, s, k, mode):
        """vals: symbol values on eta[support] (..., S); returns the block values (...,)."""
        lead = vals.shape[:-1]
        g = np.zeros(lead + (self.eta.shape[0],), dtype=complex)
        g[..., self.support] = vals * self.psi
        g = g.reshape(lead + self.shape)
        off = len(lead)
        for ax in range(self.d):
            g = ft_axis(g, off + ax, float(self.axis[0]), self.h)
        power = np.abs(g) ** 2
        if mode == "rescaled":
            w = (1.0 + self.u2) ** s
            scale = 1.0
        else:
            w = (1.0 + self.u2 / 4.0**k) ** s
            scale = 2.0 ** (k * s)
        axes = tuple(range(off, off + self.d))
        return scale * np.sqrt(np.sum(power * w, axis=axes) * self.du)


# --------------------------------------------------------------------------
# Hermite-type blocks
# --------------------------------------------------------------------------

def _fht_axis(Nmax, pad=FT_PAD):
    lam = 2 * Nmax + 1
    R = math.sqrt(2 * lam) + pad
    h = math.pi / (4 * math.sqrt(lam))
    m = int(math.ceil(R / h))
    return h * np.arange(-m, m + 1), h


def _shell(d, k):
    """Indices nu in N^d with psi(2^-k |nu|) > 0 (l1 size) and the cutoff weights."""
    hi = 4 * 2**k
    sizes = np.arange(hi + 1)
    weights = _PSI(sizes / 2.0**k)
    if d == 1:
        nz = np.nonzero(weights > 0)[0]
        return nz[:, None], weights[nz]
    mesh = np.meshgrid(*([np.arange(hi + 1)] * d), indexing="ij")
    nu = np.stack([m.ravel() for m in mesh], axis=-1)
    size = nu.sum(axis=1)
    keep = (size <= hi) & (weights[np.minimum(size, hi)] > 0)
    return nu[keep], weights[size[keep]]


def fht_feasible(d, k):
    """Whether the Hermite-type block k fits the grid-size cap in dimension d."""
    if 4 * 2**k > FHT_MAX_INDEX:
        return False
    z, _ = _fht_axis(4 * 2**k)
    return z.size**d <= MAX_GRID_POINTS


def _fht_block_values(coef, nu, d, k, s):
    """2^{k(s-d/2)} ||<z>^s sum_nu coef[..., j] phi_nu(z)||_2 for a batch of coefficient rows."""
    Nmax = 4 * 2**k
    z, h = _fht_axis(Nmax)
    if z.size**d > MAX_GRID_POINTS:
        raise SizingError(f"Hermite-type block k={k} in dimension {d} exceeds the grid cap")
    lead = coef.shape[:-1]
    if d == 1:
        dense = np.zeros(lead + (Nmax + 1,), dtype=complex)
        dense[..., nu[:, 0]] = coef
        vals = hermite_series(dense, z)
        zz = z**2
    else:
        dense = np.zeros(lead + (Nmax + 1,) * d, dtype=complex)
        dense[(Ellipsis,) + tuple(nu.T)] = coef
        H = hermite_functions(Nmax, z).T  # (N+1, P)
        vals = contract_axes(dense, [H] * d, len(lead))
        zz = 0.0
        for j in range(d):
            shape = [1] * d
            shape[j] = z.size
            zz = zz + (z**2).reshape(shape)
    axes = tuple(range(len(lead), len(lead) + d))
    integral = np.sum(np.abs(vals) ** 2 * (1.0 + zz) ** s, axis=axes) * h**d
    return 2.0 ** (k * (s - d / 2.0)) * np.sqrt(integral)


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

def _check_flavor(sym, flavor, mode):
    if flavor not in FLAVORS:
        raise HermiteError(f"unknown flavor {flavor!r}")
    if mode not in MODES:
        raise HermiteError(f"unknown mode {mode!r}")
    if flavor.startswith("multilinear"):
        if sym.kind != "multilinear" or sym.arity < 2:
            raise SymbolError("multilinear flavors need a multilinear symbol with kappa >= 2")
    elif sym.kind == "multilinear":
        raise SymbolError(f"flavor {flavor} is for linear symbols")
    if flavor == "spectral-1d" and sym.kind != "spectral":
        raise SymbolError("spectral-1d flavor needs a spectral symbol m(x, lam)")
    if flavor in ("FT", "FHT") and sym.kind not in ("multiplier", "pseudo"):
        raise SymbolError(f"flavor {flavor} needs a (pseudo-)multiplier symbol")
    if flavor.endswith("FHT") and mode != "literal":
        raise HermiteError("Hermite-type flavors are defined in literal mode only")
    if flavor.endswith("FT") and sym.table is not None:
        raise SymbolError("Fourier-type flavors need a symbol defined on real frequencies")


def default_x_grid(sym, half_width=4.0, points=9):
    """Uniform y-grid on [-R, R]^n used for the grid-sup over x."""
    axis = np.linspace(-half_width, half_width, points)
    mesh = np.meshgrid(*([axis] * sym.n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def hormander_norm(sym, flavor="FT", s=1.0, mode=None, k_range=None, x_grid=None, dual_half=None):
    """Per-block Hoermander norms and their sup over k and the y-grid.

    ``k_range`` defaults to 1..12 (truncated to what fits the grid cap for
    Hermite-type flavors).  ``x_grid`` (shape (P, n)) is used for
    x-dependent symbols; the sup over it is a grid-sup.
    """
    if mode is None:
        mode = "literal" if flavor.endswith("FHT") else "rescaled"
    _check_flavor(sym, flavor, mode)
    if not s > 0:
        raise HermiteError("regularity order must be positive")
    n = sym.n
    d = 1 if flavor == "spectral-1d" else n * sym.arity
    meta = {"grid_sup": True}
    if flavor.endswith("FHT"):
        meta["joint_size"] = "l1"
    elif flavor == "multilinear-FT":
        meta["joint_size"] = "euclidean"
    if k_range is None:
        ks = list(range(1, DEFAULT_K_MAX + 1))
        if flavor.endswith("FHT"):
            ks = [k for k in ks if fht_feasible(d, k)]
            meta["k_truncated_at"] = ks[-1]
    else:
        ks = [int(k) for k in k_range]
    xs = None
    if sym.depends_on_x:
        xs = default_x_grid(sym) if x_grid is None else np.asarray(x_grid, dtype=float).reshape(-1, n)
    blocks = []
    if flavor.endswith("FT") or flavor == "spectral-1d":
        blk = _FTBlock(d, dual_half)
        meta["dual_half_width"] = float(1.0 / (2 * blk.h))
        for k in ks:
            eta = blk.eta[blk.support] * 2.0**k
            vals = sym.evaluate_real(eta, xs)
            b = blk.norms(vals, s, k, mode)
            if flavor == "spectral-1d" and mode == "literal":
                # prefactor 2^{k(s - n/2)} with a one-dimensional transform
                b = b * 2.0 ** (k * (1.0 - n) / 2.0)
            blocks.append(_block_record(k, b, xs))
    else:
        for k in ks:
            nu, w = _shell(d, k)
            vals = sym.evaluate(nu, xs)
            b = _fht_block_values(vals * w, nu, d, k, s)
            blocks.append(_block_record(k, b, xs))
    values = [b["value"] for b in blocks]
    i = int(np.argmax(values))
    argsup = {"k": blocks[i]["k"], "y": blocks[i]["argsup"]}
    half = max(2, len(ks) // 2)
    slope = log2_slope(ks[-half:], values[-half:])
    return HormanderReport(flavor, float(s), mode, blocks, float(values[i]), argsup, slope, meta)


def _block_record(k, b, xs):
    b = np.atleast_1d(np.asarray(b, dtype=float))
    j = int(np.argmax(b))
    arg = None if xs is None else xs[j].tolist()
    return {"k": int(k), "value": float(b[j]), "argsup": arg}


# --------------------------------------------------------------------------
# integer-order block Sobolev norms
# --------------------------------------------------------------------------

def _d1(f, axis, h):
    """Fourth-order central first derivative (f vanishes near the box edges)."""
    fp1 = np.roll(f, -1, axis)
    fm1 = np.roll(f, 1, axis)
    fp2 = np.roll(f, -2, axis)
    fm2 = np.roll(f, 2, axis)
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h)


def block_sobolev_norm(sym, k, rho, x_grid=None, h=None, half_width=4.5):
    """sup_y sum_{|beta| <= rho} || d^beta [m(y, 2^k .) psi(|.|)] ||_{L^2(R^n)}."""
    rho = int(rho)
    if rho < 0:
        raise HermiteError("rho must be a non-negative integer")
    if sym.kind not in ("multiplier", "pseudo"):
        raise SymbolError("block Sobolev norms need a (pseudo-)multiplier symbol")
    if rho >= 1 and not sym.smooth:
        raise SymbolError("derivatives of non-smooth symbols are not meaningful")
    if sym.table is not None:
        raise SymbolError("tabulated symbols cannot be evaluated on real frequencies")
    n = sym.n
    if h is None:
        h = 1e-3 if n == 1 else 2e-2
    m = int(math.ceil(half_width / h))
    axis = h * np.arange(-m, m + 1)
    if axis.size**n > MAX_GRID_POINTS:
        raise SizingError("block Sobolev grid too large")
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    xi = np.stack([g.ravel() for g in mesh], axis=-1)
    r = np.sqrt(np.sum(xi**2, axis=1))
    sup = np.nonzero((r > 0.5) & (r < 4.0))[0]
    xs = None
    if sym.depends_on_x:
        xs = default_x_grid(sym) if x_grid is None else np.asarray(x_grid, dtype=float).reshape(-1, n)
    vals = sym.evaluate_real(xi[sup] * 2.0**k, xs)
    lead = vals.shape[:-1]
    g = np.zeros(lead + (xi.shape[0],), dtype=complex)
    g[..., sup] = vals * _PSI(r[sup])
    g = g.reshape(lead + (axis.size,) * n)
    off = len(lead)
    total = 0.0
    # derivatives of all orders |beta| <= rho, built up one axis at a time
    frontier = {(0,) * n: g}
    seen = dict(frontier)
    for _ in range(rho):
        nxt = {}
        for beta, arr in frontier.items():
            for j in range(n):
                b2 = tuple(b + (i == j) for i, b in enumerate(beta))
                if b2 not in seen and b2 not in nxt:
                    nxt[b2] = _d1(arr, off + j, h)
        seen.update(nxt)
        frontier = nxt
    axes = tuple(range(off, off + n))
    for arr in seen.values():
        total = total + np.sqrt(np.sum(np.abs(arr) ** 2, axis=axes) * h**n)
    return float(np.max(total))
