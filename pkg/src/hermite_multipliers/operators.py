"""Hermite multipliers, pseudo-multipliers, projections and square functions.

All operators act on a grid function through its Hermite coefficients up to
total degree |nu| <= N (the range in which every shell is complete) and are
synthesized back on the grid of the input.  x-dependent symbols are only
evaluated at grid nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutoffError, GridMismatchError, SizingError, SymbolError
from .hermite_core import GridFunction
from .transform import contract_axes, forward_array, inverse_array, synthesis_matrices

#: cap on joint multilinear index count (K^kappa)
MULTILINEAR_CAP = 1 << 24
#: target number of complex entries per chunk for pointwise sums
CHUNK_ENTRIES = 1 << 22

VARIANTS = ("plain", "dyadic-block", "tail-truncation", "lp-block")


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """A symbol on a basis plus a restriction variant.

    ``param`` is k for dyadic-block / tail-truncation and (partition, l) for
    lp-block.
    """

    symbol: object
    basis: object
    variant: str = "plain"
    param: object = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown operator variant {self.variant!r}")
        if self.symbol.kind == "multilinear":
            raise SymbolError("multilinear symbols go through apply_multilinear")
        if self.symbol.n != self.basis.n:
            raise SymbolError(f"symbol dimension {self.symbol.n} != basis dimension {self.basis.n}")
        N = self.basis.N
        if self.variant in ("dyadic-block", "tail-truncation"):
            k = int(self.param)
            if k < 0 or (self.variant == "dyadic-block" and 2**k > N):
                raise CutoffError(f"{self.variant}({k}) is outside the band |nu| <= {N}")
        if self.variant == "lp-block":
            partition, l = self.param
            if not 0 <= l <= partition.L:
                raise ValueError(f"block {l} outside 0..{partition.L}")


def index_table(n, N):
    """All nu in {0..N}^n in row-major order, shape ((N+1)^n, n)."""
    grids = np.meshgrid(*([np.arange(N + 1)] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def variant_weights(spec):
    """Restriction weights w(nu) (with the total-degree band) on the index table."""
    nu = index_table(spec.basis.n, spec.basis.N)
    size = nu.sum(axis=1)
    w = (size <= spec.basis.N).astype(float)
    if spec.variant == "dyadic-block":
        k = int(spec.param)
        w *= (size >= 2**k) & (size < 2 ** (k + 1))
    elif spec.variant == "tail-truncation":
        w *= size <= int(spec.param)
    elif spec.variant == "lp-block":
        partition, l = spec.param
        w *= partition.block(l, np.sqrt(1.0 + size.astype(float) ** 2))
    return nu, w


def _point_hermite(basis, grid, rows, nu):
    """phi_nu(x_p) for flat grid rows ``rows`` and indices nu, shape (P, K)."""
    mats = [basis.axis_matrix(a) for a in grid.nodes]
    sub = np.unravel_index(rows, grid.shape)
    out = np.ones((rows.size, nu.shape[0]))
    for j, mat in enumerate(mats):
        out *= mat[sub[j]][:, nu[:, j]]
    return out


def _chunks(total, width):
    step = max(1, CHUNK_ENTRIES // max(1, width))
    for start in range(0, total, step):
        yield np.arange(start, min(total, start + step))


def apply_coeffs(spec, coeffs, grid):
    """Apply the operator to coefficient arrays of shape (..., (N+1)^n tensor).

    Returns values on ``grid`` with shape (..., grid.size).
    """
    sym, basis = spec.symbol, spec.basis
    coeffs = np.asarray(coeffs, dtype=complex)
    lead = coeffs.shape[: coeffs.ndim - basis.n]
    flat = coeffs.reshape(lead + (-1,))
    nu, w = variant_weights(spec)
    keep = np.nonzero(w)[0]
    if not sym.depends_on_x:
        mult = np.zeros(flat.shape[-1], dtype=complex)
        if keep.size:
            mult[keep] = w[keep] * sym.at_multi_indices(nu[keep])
        scaled = (flat * mult).reshape(coeffs.shape)
        return inverse_array(scaled, basis, grid).reshape(lead + (grid.size,))
    if sym.factors and sym.xfactor is not None and not any(f.depends_on_x for f in sym.factors):
        # a(x) b(nu): multiply after a plain multiplier synthesis
        inner = OperatorSpec(sym.factors[0], basis, spec.variant, spec.param)
        out = apply_coeffs(inner, coeffs, grid)
        return out * np.asarray(sym.xfactor(grid.points()), dtype=complex)
    pts = grid.points()
    out = np.zeros(lead + (grid.size,), dtype=complex)
    ck = flat[..., keep] * w[keep]
    for rows in _chunks(grid.size, keep.size):
        m = sym.at_multi_indices(nu[keep], pts[rows])
        phi = _point_hermite(basis, grid, rows, nu[keep])
        out[..., rows] = np.einsum("pk,...k->...p", m * phi, ck)
    return out


def apply(spec, f):
    """T f for a (pseudo-, radial, spectral) multiplier, on the grid of f."""
    spec.basis.check_grid(f.grid)
    c = forward_array(f.tensor(), f.grid, spec.basis)
    vals = apply_coeffs(spec, c, f.grid)
    return GridFunction(f.grid, vals, {"truncation": f"total degree <= {spec.basis.N}"})


def band_limit(f, basis):
    """Projection of f onto span{phi_nu : |nu| <= N}."""
    from .symbols import make_symbol

    return apply(OperatorSpec(make_symbol("one", n=basis.n), basis), f)


def spectral_projection(l, f, basis):
    """P_l f = sum_{|nu| = l} (f, phi_nu) phi_nu."""
    l = int(l)
    if not 0 <= l <= basis.N:
        raise CutoffError(f"shell {l} is outside the complete range 0..{basis.N}")
    basis.check_grid(f.grid)
    c = forward_array(f.tensor(), f.grid, basis)
    size = index_table(basis.n, basis.N).sum(axis=1).reshape(c.shape)
    vals = inverse_array(np.where(size == l, c, 0), basis, f.grid)
    return GridFunction(f.grid, vals)


def square_function(f, partition, basis):
    """(sum_{l=0..L} |T_{psi_l} f|^2)^(1/2) with blocks weighted at <nu>."""
    basis.check_grid(f.grid)
    c = forward_array(f.tensor(), f.grid, basis)
    size = index_table(basis.n, basis.N).sum(axis=1)
    band = (size <= basis.N).reshape(c.shape)
    weights = partition.blocks(np.sqrt(1.0 + size.astype(float) ** 2)).reshape((-1,) + c.shape)
    blocks = inverse_array(weights * np.where(band, c, 0)[None], basis, f.grid)
    vals = np.sqrt(np.sum(np.abs(blocks) ** 2, axis=0))
    return GridFunction(f.grid, vals)


def apply_multilinear(s, fs, basis, cap=MULTILINEAR_CAP):
    """T_m(f_1, ..., f_kappa)(x) = sum_nu m(x, nu) prod_j (f_j, phi_{nu_j}) phi_{nu_j}(x).

    Each slot is truncated to total degree |nu_j| <= N.  Separable symbols
    (declared through their factors) are evaluated as products of linear
    applications.
    """
    if s.kind != "multilinear":
        raise SymbolError("apply_multilinear needs a multilinear symbol")
    fs = list(fs)
    if len(fs) != s.arity:
        raise SymbolError(f"symbol has arity {s.arity}, got {len(fs)} functions")
    grid = fs[0].grid
    for f in fs:
        basis.check_grid(f.grid)
        if f.grid.shape != grid.shape:
            raise GridMismatchError("all inputs must share one grid")
    coeffs = [forward_array(f.tensor(), f.grid, basis) for f in fs]
    meta = {"truncation": f"per-slot total degree <= {basis.N}"}
    if s.factors:
        out = np.ones(grid.size, dtype=complex)
        for fac, c in zip(s.factors, coeffs):
            out = out * apply_coeffs(OperatorSpec(fac, basis), c, grid)
        if s.xfactor is not None:
            out = out * np.asarray(s.xfactor(grid.points()), dtype=complex)
        return GridFunction(grid, out, meta)

    nu = index_table(basis.n, basis.N)
    keep = np.nonzero(nu.sum(axis=1) <= basis.N)[0]
    K, kappa = keep.size, s.arity
    if K**kappa > cap:
        raise SizingError(f"joint index count {K}^{kappa} exceeds the cap {cap}")
    sub = nu[keep]
    joint = np.concatenate(
        [g.reshape(-1, 1) for g in np.meshgrid(*([np.arange(K)] * kappa), indexing="ij")], axis=1
    )
    joint_nu = np.concatenate([sub[joint[:, j]] for j in range(kappa)], axis=1)
    flat_c = [c.reshape(-1)[keep] for c in coeffs]
    pts = grid.points()
    out = np.zeros(grid.size, dtype=complex)
    m_const = None if s.depends_on_x else s.evaluate(joint_nu).reshape((K,) * kappa)
    for rows in _chunks(grid.size, K**kappa):
        phi = _point_hermite(basis, grid, rows, sub)
        if m_const is None:
            acc = s.evaluate(joint_nu, pts[rows]).reshape((rows.size,) + (K,) * kappa)
        else:
            acc = np.broadcast_to(m_const, (rows.size,) + (K,) * kappa)
        for j in reversed(range(kappa)):
            g = phi * flat_c[j]
            acc = np.einsum("p...k,pk->p...", acc, g)
        out[rows] = acc
    return GridFunction(grid, out, meta)


def lp_partition_frame_bound(partition, basis):
    """min over band indices of sqrt(sum_l psi_l(<nu>)^2)."""
    size = np.arange(basis.N + 1, dtype=float)
    return partition.frame_bound(np.sqrt(1.0 + size**2))


def dyadic_range(N):
    """k values with a non-empty dyadic shell 2^k <= |nu| < 2^(k+1) inside |nu| <= N."""
    return list(range(int(math.floor(math.log2(N))) + 1)) if N >= 1 else []
