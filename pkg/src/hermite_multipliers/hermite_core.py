"""Hermite functions, Gauss-Hermite quadrature, grids and Lp norms.

The normalized Hermite functions are evaluated with the three-term recurrence

    phi_{k+1}(x) = x sqrt(2/(k+1)) phi_k(x) - sqrt(k/(k+1)) phi_{k-1}(x),
    phi_0(x) = pi^{-1/4} exp(-x^2/2),

with the Gaussian folded into the seed.  Far outside the turning point the
seed underflows long before the polynomial part peaks, so the recurrence runs
on rescaled mantissas and keeps a per-point log scale.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

from .errors import CutoffError, GridMismatchError, SizingError

PI_QUARTER = math.pi ** -0.25
MAX_QUAD_ORDER = 10_000
#: cap on the number of tensor-grid points a basis may allocate
MAX_GRID_POINTS = 1 << 22
#: cap on the number of entries of a dense per-axis basis matrix
MAX_MATRIX_ENTRIES = 1 << 25

_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def hermite_functions(kmax, x):
    """All normalized Hermite functions phi_0..phi_kmax at the points ``x``.

    Returns an array of shape ``x.shape + (kmax + 1,)``.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty((flat.size, kmax + 1))
    log_scale = -0.5 * flat**2
    factor = np.exp(log_scale)
    prev = np.zeros_like(flat)
    cur = np.full_like(flat, PI_QUARTER)
    out[:, 0] = cur * factor
    for k in range(kmax):
        nxt = flat * math.sqrt(2.0 / (k + 1)) * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
            factor = np.exp(log_scale)
        out[:, k + 1] = cur * factor
    return out.reshape(x.shape + (kmax + 1,))


def _hermite_pair(k, x):
    """phi_k and phi_{k-1} at ``x`` (phi_{-1} = 0), using O(x.size) memory."""
    x = np.asarray(x, dtype=float)
    log_scale = -0.5 * x**2
    prev = np.zeros_like(x)
    cur = np.full_like(x, PI_QUARTER)
    for j in range(k):
        nxt = x * math.sqrt(2.0 / (j + 1)) * cur - math.sqrt(j / (j + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
    factor = np.exp(log_scale)
    return cur * factor, prev * factor


def hermite_function(k, x):
    """The single normalized Hermite function phi_k at ``x`` (real array)."""
    if k < 0:
        raise ValueError("Hermite index must be non-negative")
    return _hermite_pair(int(k), x)[0]


def hermite_function_d(k, x):
    """phi_k and its derivative, via phi_k' = sqrt(2k) phi_{k-1} - x phi_k."""
    x = np.asarray(x, dtype=float)
    val, prev = _hermite_pair(int(k), x)
    return val, math.sqrt(2.0 * k) * prev - x * val


def hermite_series(coeffs, x):
    """sum_k coeffs[..., k] phi_k(x), accumulated along the recurrence.

    ``coeffs`` has shape (..., K); the result has shape (..., x.size).  Memory
    stays O(x.size) besides the output, so K in the thousands is fine.
    """
    coeffs = np.asarray(coeffs)
    x = np.asarray(x, dtype=float).ravel()
    K = coeffs.shape[-1]
    dtype = np.result_type(coeffs.dtype, float)
    out = np.zeros(coeffs.shape[:-1] + (x.size,), dtype=dtype)
    log_scale = -0.5 * x**2
    factor = np.exp(log_scale)
    prev = np.zeros_like(x)
    cur = np.full_like(x, PI_QUARTER)
    for k in range(K):
        if k:
            nxt = x * math.sqrt(2.0 / k) * cur - math.sqrt((k - 1) / k) * prev
            prev, cur = cur, nxt
            big = np.abs(cur) > _RESCALE
            if big.any():
                cur[big] /= _RESCALE
                prev[big] /= _RESCALE
                log_scale[big] += _LOG_RESCALE
                factor = np.exp(log_scale)
        c = coeffs[..., k]
        if np.any(c != 0):
            out += c[..., None] * (cur * factor)
    return out


def eval_hermite(nu, points):
    """Evaluate the n-dimensional Hermite function phi_nu at ``points``.

    Parameters
    ----------
    nu : sequence of int
        Multi-index (nu_1, ..., nu_n), all components non-negative.
    points : array_like, shape (P, n) or (P,) when n == 1

    Returns
    -------
    complex ndarray of shape (P,) with zero imaginary part.
    """
    nu = _as_multi_index(nu)
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None] if len(nu) == 1 else pts[None, :]
    if pts.shape[-1] != len(nu):
        raise ValueError(f"points have dimension {pts.shape[-1]}, multi-index has {len(nu)}")
    val = np.ones(pts.shape[0])
    for j, k in enumerate(nu):
        val = val * hermite_function(k, pts[:, j])
    return val.astype(complex)


def eigenvalue(nu, n=None):
    """Harmonic-oscillator eigenvalue 2|nu| + n of phi_nu."""
    nu = _as_multi_index(nu)
    if n is None:
        n = len(nu)
    if n != len(nu):
        raise ValueError("dimension does not match the multi-index length")
    return 2 * sum(nu) + n


def _as_multi_index(nu):
    if np.isscalar(nu):
        nu = (nu,)
    nu = tuple(int(v) for v in nu)
    if any(v < 0 for v in nu):
        raise ValueError(f"multi-index components must be non-negative, got {nu}")
    return nu


# --------------------------------------------------------------------------
# quadrature and grids
# --------------------------------------------------------------------------

def gauss_hermite_rule(M):
    """Nodes and weights of the M-point Gauss-Hermite rule for weight exp(-x^2)."""
    M = int(M)
    if M < 1:
        raise ValueError("quadrature order must be positive")
    if M > MAX_QUAD_ORDER:
        raise SizingError(f"quadrature order {M} exceeds {MAX_QUAD_ORDER}")
    nodes, weights = roots_hermite(M)
    return np.asarray(nodes, dtype=float), np.asarray(weights, dtype=float)


def gauss_hermite_function_weights(nodes):
    """Weights W_i with sum_i W_i f(x_i) ~ int f dx for Gaussian-decaying f.

    W_i = w_i exp(x_i^2) = 1 / (M phi_{M-1}(x_i)^2), the Christoffel form, which
    stays finite where the classical weights underflow.
    """
    M = len(nodes)
    return 1.0 / (M * hermite_function(M - 1, nodes) ** 2)


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Tensor grid stored per axis, with per-axis quadrature weights."""

    nodes: tuple
    weights: tuple
    kind: str = "uniform"

    def __post_init__(self):
        if self.kind not in ("uniform", "gauss-hermite"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if len(self.nodes) != len(self.weights) or not self.nodes:
            raise ValueError("need matching, non-empty per-axis nodes and weights")
        nodes = tuple(np.asarray(a, dtype=float) for a in self.nodes)
        weights = tuple(np.asarray(w, dtype=float) for w in self.weights)
        for a, w in zip(nodes, weights):
            if a.ndim != 1 or a.shape != w.shape:
                raise ValueError("per-axis nodes and weights must be 1-D of equal length")
            if a.size > 1 and np.any(np.diff(a) <= 0):
                raise ValueError("grid nodes must be strictly increasing")
            if np.any(w <= 0):
                raise ValueError("quadrature weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self):
        return len(self.nodes)

    @property
    def shape(self):
        return tuple(a.size for a in self.nodes)

    @property
    def size(self):
        return int(np.prod(self.shape))

    def points(self):
        """All grid points in row-major tensor order, shape (size, n)."""
        mesh = np.meshgrid(*self.nodes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def weight_tensor(self):
        """Product weights in row-major tensor order, shape (size,)."""
        w = self.weights[0]
        for wj in self.weights[1:]:
            w = np.multiply.outer(w, wj)
        return np.asarray(w).ravel()

    def spacing(self):
        """Per-axis spacing of a uniform grid."""
        if self.kind != "uniform":
            raise GridMismatchError("spacing is only defined for uniform grids")
        return tuple(float(a[1] - a[0]) if a.size > 1 else 1.0 for a in self.nodes)

    @classmethod
    def uniform(cls, half_width, h, n=1):
        """Symmetric uniform grid on [-R, R]^n with trapezoid weights h."""
        m = int(math.ceil(half_width / h))
        axis = h * np.arange(-m, m + 1)
        return cls(tuple(axis for _ in range(n)), tuple(np.full(axis.size, h) for _ in range(n)))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on a tensor grid (row-major order)."""

    grid: GridSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).ravel()
        if vals.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {vals.size}")
        object.__setattr__(self, "values", vals)

    def tensor(self):
        return self.values.reshape(self.grid.shape)

    def __add__(self, other):
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__


def _check_same_grid(f, g):
    if f.grid is not g.grid and f.grid.shape != g.grid.shape:
        raise GridMismatchError("grid functions live on different grids")


def sample(grid, func):
    """GridFunction of ``func(points)`` where points has shape (size, n)."""
    return GridFunction(grid, func(grid.points()))


@dataclass(frozen=True, eq=False)
class HermiteBasis:
    """Truncated Hermite basis with per-axis cutoff N in dimension n.

    ``quad_grid`` is the tensor Gauss-Hermite grid (M = quad_order nodes per
    axis, function weights) on which the forward transform is exact for the
    band; ``grid`` is a uniform grid reaching past the turning point.
    """

    n: int
    N: int
    quad_order: int
    quad_grid: GridSpec
    grid: GridSpec
    _cache: dict = field(default_factory=dict, repr=False)

    def axis_matrix(self, nodes, N=None):
        """Dense matrix phi_k(nodes[i]) for k <= N, cached per node array."""
        N = self.N if N is None else N
        nodes = np.asarray(nodes, dtype=float)
        if nodes.size * (N + 1) > MAX_MATRIX_ENTRIES:
            raise SizingError(f"basis matrix {nodes.size}x{N + 1} exceeds the cap")
        key = (nodes.size, N, hash(nodes.tobytes()))
        mat = self._cache.get(key)
        if mat is None:
            mat = hermite_functions(N, nodes)
            self._cache[key] = mat
        return mat

    def indices(self, max_total=None):
        """Multi-indices with components <= N and total degree <= max_total."""
        max_total = self.N if max_total is None else max_total
        return total_degree_indices(self.n, self.N, max_total)

    def check_grid(self, grid):
        """Raise unless ``grid`` supports exact-to-rounding analysis of the band."""
        if grid.n != self.n:
            raise GridMismatchError(f"grid has dimension {grid.n}, basis has {self.n}")
        if grid.kind == "gauss-hermite":
            if min(grid.shape) < self.N + 1:
                raise GridMismatchError("Gauss-Hermite grid needs at least N+1 nodes per axis")
            return
        lam = 2 * self.n * self.N + self.n
        for axis, h in zip(grid.nodes, grid.spacing()):
            if h > math.pi / (4 * math.sqrt(lam)) * (1 + 1e-9):
                raise GridMismatchError("uniform grid too coarse for the basis cutoff")
            if min(-axis[0], axis[-1]) < math.sqrt(2 * lam) + 3.0:
                raise GridMismatchError("uniform grid does not reach past the turning point")


def total_degree_indices(n, N, max_total):
    """All nu in {0..N}^n with |nu| <= max_total, lexicographic, shape (K, n)."""
    rng = range(N + 1)
    idx = [nu for nu in itertools.product(rng, repeat=n) if sum(nu) <= max_total]
    return np.array(idx, dtype=int).reshape(-1, n)


def build_basis(n, N, oversample=1.0, pad=4.0, max_points=MAX_GRID_POINTS):
    """Construct a :class:`HermiteBasis` meeting the grid invariants.

    Quadrature order is ceil(oversample (N+1)); the uniform grid has half-width
    sqrt(2 lambda) + pad and spacing pi / (4 sqrt(lambda) oversample), where
    lambda = 2nN + n is the largest eigenvalue reachable with per-axis cutoff N.
    """
    if n < 1 or N < 0:
        raise ValueError("need n >= 1 and N >= 0")
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    if pad < 4:
        raise ValueError("pad must be at least 4")
    lam = 2 * n * N + n
    half_width = math.sqrt(2 * lam) + pad
    h = math.pi / (4 * math.sqrt(lam)) / oversample
    per_axis = 2 * int(math.ceil(half_width / h)) + 1
    M = int(math.ceil(oversample * (N + 1)))
    if per_axis**n > max_points or M**n > max_points or M > MAX_QUAD_ORDER:
        raise SizingError(
            f"basis n={n}, N={N} needs {per_axis}^{n} grid points (cap {max_points})"
        )
    nodes, _ = gauss_hermite_rule(M)
    wq = gauss_hermite_function_weights(nodes)
    quad = GridSpec(tuple(nodes for _ in range(n)), tuple(wq for _ in range(n)), "gauss-hermite")
    return HermiteBasis(n, N, M, quad, GridSpec.uniform(half_width, h, n))


# --------------------------------------------------------------------------
# Lp norms
# --------------------------------------------------------------------------

def _check_p(p):
    p = float(p)
    if not p >= 1:
        raise ValueError(f"Lp exponent must be >= 1, got {p}")
    return p


def lp_norm(f, p):
    """Quadrature approximation of ||f||_p on the grid of ``f``."""
    p = _check_p(p)
    a = np.abs(f.values)
    if not np.all(np.isfinite(a)):
        raise ValueError("grid function has non-finite values")
    if math.isinf(p):
        return float(a.max(initial=0.0))
    top = a.max(initial=0.0)
    if top == 0:
        return 0.0
    w = f.grid.weight_tensor()
    return float(top * np.sum(w * (a / top) ** p) ** (1.0 / p))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _refine_zeros(k, left, right, left_sign):
    """Zeros of phi_k inside sign-change brackets by safeguarded Newton."""
    a, b = left.copy(), right.copy()
    x = 0.5 * (a + b)
    for _ in range(60):
        val, der = hermite_function_d(k, x)
        same = np.sign(val) == left_sign
        a = np.where(same, x, a)
        b = np.where(same, b, x)
        safe = np.where(der != 0, der, 1.0)
        newton = np.where(der != 0, x - val / safe, 0.5 * (a + b))
        x_new = np.where((newton >= a) & (newton <= b), newton, 0.5 * (a + b))
        done = np.max(np.abs(x_new - x), initial=0.0) < 1e-13 * max(1.0, float(np.max(x)))
        x = x_new
        if done:
            break
    return x


def _panel_nodes(k, oversample=1.0, pad=4.0):
    """Gauss-Legendre nodes/weights on panels between consecutive zeros of phi_k."""
    lam = 2 * k + 1
    R = math.sqrt(2 * lam) + pad + 4.0
    h = math.pi / (4 * math.sqrt(lam)) / oversample
    xs = h * np.arange(0, int(math.ceil(R / h)) + 1)
    vals = hermite_function(k, xs)
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    zeros = np.empty(0)
    if sign_change.size:
        zeros = _refine_zeros(k, xs[sign_change], xs[sign_change + 1], np.sign(vals[sign_change]))
    exact_zero = xs[vals == 0]
    zeros = np.unique(np.concatenate([zeros, exact_zero]))
    # half-line breakpoints, subdivided so no panel is longer than 0.25
    brk = np.unique(np.concatenate([[0.0], zeros, [R]]))
    pieces = []
    for a, b in zip(brk[:-1], brk[1:]):
        m = max(1, int(math.ceil((b - a) / 0.25)))
        pieces.append(np.linspace(a, b, m + 1)[:-1])
    left = np.concatenate(pieces)
    right = np.append(left[1:], R)
    mid, half = 0.5 * (left + right), 0.5 * (right - left)
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return x, w


def _sup_abs(k, oversample=1.0):
    """max_x |phi_k(x)| located on a fine grid and polished by Newton on phi_k'."""
    lam = 2 * k + 1
    R = math.sqrt(2 * lam) + 6.0
    h = math.pi / (8 * math.sqrt(lam)) / oversample
    xs = h * np.arange(0, int(math.ceil(R / h)) + 1)
    vals = np.abs(hermite_function(k, xs))
    # polish the largest few grid maxima together
    x = xs[np.argsort(vals)[::-1][:8]].copy()
    for _ in range(30):
        v, d = hermite_function_d(k, x)
        d2 = (x * x - lam) * v  # phi'' = (x^2 - lambda) phi
        step = np.where(d2 != 0, d / np.where(d2 != 0, d2, 1.0), 0.0)
        step = np.clip(step, -h, h)
        x = x - step
        if np.max(np.abs(step)) < 1e-15 * max(1.0, float(np.max(np.abs(x)))):
            break
    return max(float(vals.max()), float(np.max(np.abs(hermite_function(k, x)))))


def hermite_lp_norms(k, ps, oversample=1.0):
    """Accurate ||phi_k||_{L^p(R)} for several exponents at once.

    Finite p integrate |phi_k|^p on Gauss-Legendre panels whose endpoints are
    the zeros of phi_k, so the kinks of |phi_k|^p never sit inside a panel.
    p = inf locates the extremum by Newton iteration on phi_k'.
    """
    ps = [_check_p(p) for p in ps]
    out = {}
    finite = [p for p in ps if not math.isinf(p)]
    if finite:
        x, w = _panel_nodes(int(k), oversample)
        a = np.abs(hermite_function(int(k), x))
        top = a.max()
        for p in finite:
            # even function: integral over R is twice the half-line integral
            out[p] = float(top * (2.0 * np.sum(w * (a / top) ** p)) ** (1.0 / p))
    if any(math.isinf(p) for p in ps):
        out[math.inf] = _sup_abs(int(k), oversample)
    return out


def hermite_lp_norm(nu, p, oversample=1.0):
    """||phi_nu||_{L^p(R^n)} as the product of one-dimensional norms."""
    nu = _as_multi_index(nu)
    p = _check_p(p)
    val = 1.0
    for k in nu:
        val *= hermite_lp_norms(k, [p], oversample)[p]
    return val


def check_cutoff(nu, N):
    if max(_as_multi_index(nu)) > N:
        raise CutoffError(f"multi-index {nu} exceeds the per-axis cutoff {N}")
