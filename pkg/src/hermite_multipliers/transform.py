"""Fourier-Hermite analysis/synthesis and a grid continuous Fourier transform."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CutoffError, GridMismatchError
from .hermite_core import GridFunction, GridSpec

#: sign convention of the continuous transform: exp(FT_SIGN * 2 pi i x.xi)
FT_SIGN = -1.0
BOUNDARY_DECAY = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """Hermite coefficients c[nu] stored densely on {0..N}^n."""

    n: int
    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.N + 1,) * self.n:
            raise ValueError(f"coefficient array has shape {c.shape}, expected {(self.N + 1,) * self.n}")
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, nu):
        nu = (nu,) if np.isscalar(nu) else tuple(nu)
        if any(k > self.N for k in nu):
            return 0j
        return complex(self.coeffs[nu])

    def items(self, tol=0.0):
        """(nu, c_nu) pairs with |c_nu| > tol."""
        for idx in zip(*np.nonzero(np.abs(self.coeffs) > tol)):
            nu = tuple(int(i) for i in idx)
            yield nu, complex(self.coeffs[nu])

    def energy(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    @classmethod
    def zeros(cls, n, N):
        return cls(n, N, np.zeros((N + 1,) * n, dtype=complex))

    @classmethod
    def from_dict(cls, n, N, mapping):
        c = np.zeros((N + 1,) * n, dtype=complex)
        for nu, val in mapping.items():
            nu = (nu,) if np.isscalar(nu) else tuple(nu)
            if len(nu) != n:
                raise ValueError(f"index {nu} has wrong dimension")
            if max(nu) > N:
                raise CutoffError(f"index {nu} exceeds cutoff {N}")
            c[nu] = val
        return cls(n, N, c)


def contract_axes(arr, mats, offset=0):
    """Apply mats[j] along axis offset+j of ``arr`` (index of mats[j] dim 0 -> dim 1)."""
    for j, mat in enumerate(mats):
        arr = np.moveaxis(np.tensordot(arr, mat, axes=([offset + j], [0])), -1, offset + j)
    return arr


def analysis_matrices(basis, grid):
    """Per-axis matrices w_i phi_k(x_i) used by the forward transform."""
    basis.check_grid(grid)
    return [w[:, None] * basis.axis_matrix(a) for a, w in zip(grid.nodes, grid.weights)]


def synthesis_matrices(basis, grid):
    """Per-axis matrices phi_k(x_i)^T used for synthesis on ``grid``."""
    if grid.n != basis.n:
        raise GridMismatchError(f"grid has dimension {grid.n}, basis has {basis.n}")
    return [basis.axis_matrix(a).T for a in grid.nodes]


def forward_array(values, grid, basis):
    """Forward transform of samples with shape (..., *grid.shape) -> (..., N+1, ..., N+1)."""
    values = np.asarray(values)
    offset = values.ndim - grid.n
    return contract_axes(values, analysis_matrices(basis, grid), offset)


def inverse_array(coeffs, basis, grid):
    """Synthesis of coefficient arrays (..., N+1, ...) onto ``grid``."""
    coeffs = np.asarray(coeffs)
    offset = coeffs.ndim - basis.n
    return contract_axes(coeffs, synthesis_matrices(basis, grid), offset)


def forward_fht(f, basis):
    """Hermite coefficients (f, phi_nu) for all nu <= N per axis, by quadrature."""
    c = forward_array(f.tensor(), f.grid, basis)
    return SpectralCoeffs(basis.n, basis.N, c)


def inverse_fht(c, basis, grid=None):
    """Synthesis sum_nu c_nu phi_nu on ``grid`` (the basis grid by default)."""
    grid = basis.grid if grid is None else grid
    if c.n != basis.n:
        raise GridMismatchError("coefficient dimension does not match the basis")
    if c.N > basis.N:
        nz = np.nonzero(np.abs(c.coeffs) > 0)
        if any(np.any(ax > basis.N) for ax in nz):
            raise CutoffError(f"coefficients beyond the basis cutoff {basis.N}")
        c = SpectralCoeffs(c.n, basis.N, c.coeffs[(slice(0, basis.N + 1),) * c.n])
    elif c.N < basis.N:
        pad = [(0, basis.N - c.N)] * c.n
        c = SpectralCoeffs(c.n, basis.N, np.pad(c.coeffs, pad))
    return GridFunction(grid, inverse_array(c.coeffs, basis, grid))


def plancherel_defect(f, basis):
    """| ||f||_2^2 - sum |c_nu|^2 | with both sides computed on f's grid."""
    energy = float(np.sum(f.grid.weight_tensor() * np.abs(f.values) ** 2))
    return abs(energy - forward_fht(f, basis).energy())


# --------------------------------------------------------------------------
# continuous Fourier transform
# --------------------------------------------------------------------------

def dual_axis(L, h):
    """Frequencies (j - L//2)/(L h), j = 0..L-1, conjugate to spacing h."""
    return (np.arange(L) - L // 2) / (L * h)


def ft_axis(values, axis, x0, h):
    """Trapezoid approximation of int f(x) exp(-2 pi i x xi) dx along one axis.

    Samples sit at x0 + m h; output frequencies are ``dual_axis(L, h)``.
    """
    values = np.asarray(values, dtype=complex)
    L = values.shape[axis]
    m = np.arange(L)
    shape = [1] * values.ndim
    shape[axis] = L
    # centre the spectrum: multiplying by exp(2 pi i m (L//2)/L) shifts bins
    pre = np.exp(2j * np.pi * m * (L // 2) / L).reshape(shape)
    G = np.fft.fft(values * pre, axis=axis)
    xi = dual_axis(L, h)
    post = (h * np.exp(FT_SIGN * 2j * np.pi * x0 * xi)).reshape(shape)
    return G * post


def boundary_ratio(tensor):
    """max |f| on the outer faces of a tensor relative to max |f|."""
    a = np.abs(tensor)
    top = a.max(initial=0.0)
    if top == 0:
        return 0.0
    edge = 0.0
    for ax in range(a.ndim):
        edge = max(edge, np.take(a, 0, axis=ax).max(), np.take(a, -1, axis=ax).max())
    return float(edge / top)


def continuous_ft(f):
    """Continuous Fourier transform of samples on a uniform grid.

    Returns a GridFunction on the conjugate grid; ``meta["boundary_warning"]``
    is set when f has not decayed to 1e-12 of its maximum at the edges.
    """
    grid = f.grid
    if grid.kind != "uniform":
        raise GridMismatchError("continuous_ft needs a uniform grid")
    hs = []
    for a in grid.nodes:
        if a.size < 2:
            raise GridMismatchError("each axis needs at least two nodes")
        d = np.diff(a)
        if np.max(np.abs(d - d[0])) > 1e-9 * d[0]:
            raise GridMismatchError("continuous_ft needs equally spaced nodes")
        hs.append(float(d.mean()))
    vals = f.tensor()
    for ax, (a, h) in enumerate(zip(grid.nodes, hs)):
        vals = ft_axis(vals, ax, float(a[0]), h)
    dual_nodes = tuple(dual_axis(a.size, h) for a, h in zip(grid.nodes, hs))
    dual_weights = tuple(np.full(a.size, 1.0 / (a.size * h)) for a, h in zip(grid.nodes, hs))
    ratio = boundary_ratio(f.tensor())
    meta = {"boundary_ratio": ratio, "boundary_warning": ratio > BOUNDARY_DECAY}
    return GridFunction(GridSpec(dual_nodes, dual_weights), vals, meta)
