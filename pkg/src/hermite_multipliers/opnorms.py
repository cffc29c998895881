"""Operator norms: exact L^2 norms on the band, Lp lower bounds, compactness tails."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import CutoffError, SizingError, SymbolError
from .hermite_core import (
    GridSpec,
    gauss_hermite_function_weights,
    gauss_hermite_rule,
    hermite_functions,
    lp_norm,
    GridFunction,
)
from .operators import OperatorSpec, apply_coeffs, index_table
from .transform import forward_array, inverse_array

MAX_MATRIX_DIM = 6000
DEFAULT_SEED = 42


@dataclass
class NormEstimate:
    value: float
    kind: str
    witness: object
    p: float = 2.0
    q: float = 2.0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("exact", "lower-bound"):
            raise ValueError(f"unknown estimate kind {self.kind!r}")
        if not self.value >= 0:
            raise ValueError("norm estimates are non-negative")


def band_indices(basis):
    """Multi-indices with |nu| <= N (rows) and their positions in the tensor table."""
    nu = index_table(basis.n, basis.N)
    pos = np.nonzero(nu.sum(axis=1) <= basis.N)[0]
    return nu[pos], pos


def operator_matrix(s, basis, oversample=2.0):
    """Galerkin matrix A[mu, nu] = int m(x, nu) phi_nu(x) phi_mu(x) dx over |mu|, |nu| <= N.

    x-independent symbols give the diagonal m(nu); x-dependent ones are
    assembled on a tensor Gauss-Hermite grid with ceil(oversample (N+1)) nodes
    per axis.  Rows/columns follow ``band_indices(basis)``.
    """
    if s.kind == "multilinear":
        raise SymbolError("operator_matrix needs a linear symbol")
    nu, _ = band_indices(basis)
    K = nu.shape[0]
    if K > MAX_MATRIX_DIM:
        raise SizingError(f"operator matrix of size {K} exceeds {MAX_MATRIX_DIM}")
    if not s.depends_on_x:
        return np.diag(s.at_multi_indices(nu))
    M = int(np.ceil(oversample * (basis.N + 1)))
    nodes, _ = gauss_hermite_rule(M)
    w = gauss_hermite_function_weights(nodes)
    H = hermite_functions(basis.N, nodes)
    grid = GridSpec(tuple(nodes for _ in range(basis.n)), tuple(w for _ in range(basis.n)), "gauss-hermite")
    pts = grid.points()
    wt = grid.weight_tensor()
    A = np.zeros((K, K), dtype=complex)
    step = max(1, (1 << 22) // K)
    for start in range(0, pts.shape[0], step):
        rows = np.arange(start, min(pts.shape[0], start + step))
        sub = np.unravel_index(rows, grid.shape)
        phi = np.ones((rows.size, K))
        for j in range(basis.n):
            phi *= H[sub[j]][:, nu[:, j]]
        m = s.at_multi_indices(nu, pts[rows])
        A += (phi * wt[rows, None]).T @ (m * phi)
    return A


def l2_opnorm(s, basis, oversample=2.0):
    """L^2 operator norm on the band: sup |m| for multipliers, top singular value otherwise."""
    nu, _ = band_indices(basis)
    if not s.depends_on_x:
        vals = np.abs(s.at_multi_indices(nu))
        i = int(np.argmax(vals))
        return NormEstimate(float(vals[i]), "exact", {"nu": nu[i].tolist()})
    A = operator_matrix(s, basis, oversample)
    u, sv, vh = np.linalg.svd(A)
    top = np.argsort(-np.abs(vh[0]))[:5]
    profile = [{"nu": nu[i].tolist(), "weight": float(abs(vh[0, i]))} for i in top]
    return NormEstimate(float(sv[0]), "exact", {"singular_vector": profile})


def _ratio_norms(vals, fvals, grid, p, q):
    out = []
    for tv, fv in zip(vals, fvals):
        num = lp_norm(GridFunction(grid, tv), q)
        den = lp_norm(GridFunction(grid, fv), p)
        out.append(num / den if den > 0 else 0.0)
    return np.array(out)


def lp_opnorm_lower(s, p, q, basis, testset=("hermite", "random", "gaussian"),
                    n_random=8, seed=DEFAULT_SEED, hermite_indices=None):
    """Lower bound for ||T||_{L^p -> L^q} by maximizing ||Tf||_q / ||f||_p over tests.

    Tests: Hermite functions (all band indices unless ``hermite_indices`` is
    given), seeded random band-limited functions and a few Gaussians.  All
    norms use the uniform basis grid.
    """
    testset = tuple(testset)
    if not testset:
        raise ValueError("empty test set")
    unknown = set(testset) - {"hermite", "random", "gaussian"}
    if unknown:
        raise ValueError(f"unknown test families {sorted(unknown)}")
    spec = OperatorSpec(s, basis)
    grid = basis.grid
    nu, pos = band_indices(basis)
    shape = (basis.N + 1,) * basis.n
    best = NormEstimate(0.0, "lower-bound", None, p, q)
    details = {}

    if "hermite" in testset:
        chosen = np.arange(nu.shape[0]) if hermite_indices is None else np.array(
            [int(np.nonzero((nu == np.asarray(h)).all(axis=1))[0][0]) for h in hermite_indices])
        ratios = np.empty(chosen.size)
        step = max(1, (1 << 24) // max(1, grid.size))
        for start in range(0, chosen.size, step):
            sel = chosen[start:start + step]
            C = np.zeros((sel.size, int(np.prod(shape))), dtype=complex)
            C[np.arange(sel.size), pos[sel]] = 1.0
            C = C.reshape((sel.size,) + shape)
            fv = inverse_array(C, basis, grid).reshape(sel.size, -1)
            tv = apply_coeffs(spec, C, grid)
            ratios[start:start + step] = _ratio_norms(tv, fv, grid, p, q)
        details["hermite"] = {"nu": nu[chosen].tolist(), "ratio": ratios.tolist()}
        i = int(np.argmax(ratios))
        best = NormEstimate(float(ratios[i]), "lower-bound", {"test": "hermite", "nu": nu[chosen[i]].tolist()}, p, q)

    if "random" in testset:
        rng = np.random.default_rng(seed)
        C = np.zeros((n_random, int(np.prod(shape))), dtype=complex)
        C[:, pos] = rng.standard_normal((n_random, pos.size)) + 1j * rng.standard_normal((n_random, pos.size))
        C = C.reshape((n_random,) + shape)
        fv = inverse_array(C, basis, grid).reshape(n_random, -1)
        tv = apply_coeffs(spec, C, grid)
        ratios = _ratio_norms(tv, fv, grid, p, q)
        details["random"] = ratios.tolist()
        i = int(np.argmax(ratios))
        if ratios[i] > best.value:
            best = NormEstimate(float(ratios[i]), "lower-bound", {"test": "random", "seed": seed, "draw": i}, p, q)

    if "gaussian" in testset:
        pts = grid.points()
        params = [(a, c) for a in (0.5, 1.0, 2.0) for c in (0.0, 1.0)]
        raw = np.array([np.exp(-a * np.sum((pts - c) ** 2, axis=1)) for a, c in params], dtype=complex)
        # band-limit first so that T f is the true operator applied to f
        coeffs = forward_array(raw.reshape((len(params),) + grid.shape), grid, basis)
        coeffs = coeffs * (index_table(basis.n, basis.N).sum(axis=1) <= basis.N).reshape(shape)
        fv = inverse_array(coeffs, basis, grid).reshape(len(params), -1)
        tv = apply_coeffs(spec, coeffs, grid)
        ratios = _ratio_norms(tv, fv, grid, p, q)
        details["gaussian"] = ratios.tolist()
        i = int(np.argmax(ratios))
        if ratios[i] > best.value:
            a, c = params[i]
            best = NormEstimate(float(ratios[i]), "lower-bound", {"test": "gaussian", "a": a, "center": c}, p, q)

    best.details = details
    return best


def band_matrix(spec):
    """Matrix of an operator on the band: apply to each phi_nu, transform back.

    Rows and columns follow ``band_indices(spec.basis)``; the quadrature grid
    makes the round trip exact for x-independent symbols.
    """
    basis = spec.basis
    nu, pos = band_indices(basis)
    K = nu.shape[0]
    if K > MAX_MATRIX_DIM:
        raise SizingError(f"band matrix of size {K} exceeds {MAX_MATRIX_DIM}")
    shape = (basis.N + 1,) * basis.n
    grid = basis.quad_grid
    eye = np.zeros((K, int(np.prod(shape))), dtype=complex)
    eye[np.arange(K), pos] = 1.0
    out = apply_coeffs(spec, eye.reshape((K,) + shape), grid)
    coeffs = forward_array(out.reshape((K,) + grid.shape), grid, basis).reshape(K, -1)[:, pos]
    return coeffs.T


def band_opnorm(spec):
    """Spectral norm of ``band_matrix(spec)`` (exact L^2 norm on the band)."""
    return NormEstimate(float(np.linalg.norm(band_matrix(spec), 2)), "exact",
                        {"variant": spec.variant, "param": spec.param})


def compactness_profile(s, k_values, basis):
    """Rows (k, tail_sup, measured) for the tail T_m - T_m restricted to |nu| <= k-1.

    tail_sup = sup_{k <= |nu| <= N} |m(nu)|; measured is the spectral norm of
    the tail operator's matrix, obtained by applying it to every basis
    function on the quadrature grid and transforming back.
    """
    if s.kind not in ("multiplier", "radial"):
        raise SymbolError("compactness profiles are defined for multipliers")
    nu, _ = band_indices(basis)
    full = band_matrix(OperatorSpec(s, basis))
    mvals = np.abs(s.at_multi_indices(nu))
    size = nu.sum(axis=1)
    rows = []
    for k in k_values:
        k = int(k)
        if not 0 <= k <= basis.N:
            raise CutoffError(f"k={k} outside 0..{basis.N}")
        tail = full
        if k > 0:
            tail = full - band_matrix(OperatorSpec(s, basis, "tail-truncation", k - 1))
        measured = float(np.linalg.norm(tail, 2))
        tail_sup = float(mvals[size >= k].max())
        rows.append((k, tail_sup, measured))
    return rows


# --------------------------------------------------------------------------
# spectral projections
# --------------------------------------------------------------------------

def _shell_weights_at_origin(l, dims):
    """S(m) = sum_{|nu'| = m, nu' in N^dims} prod phi_{nu'_j}(0)^2 for m = 0..l."""
    a = hermite_functions(l, np.zeros(1))[0] ** 2
    out = np.zeros(l + 1)
    out[0] = 1.0
    for _ in range(dims):
        out = np.convolve(out, a)[: l + 1]
    return out


def projection_diagonal(l, n, r):
    """Kernel diagonal Phi_l(x, x) = sum_{|nu| = l} phi_nu(x)^2 at |x| = r.

    The diagonal is rotation invariant, so it is evaluated along the first
    axis: sum_k phi_k(r)^2 S_{n-1}(l - k).
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    H = hermite_functions(l, r) ** 2
    if n == 1:
        return H[:, l]
    S = _shell_weights_at_origin(l, n - 1)
    return H @ S[::-1]


def projection_kernel_sup(l, n):
    """sup_x Phi_l(x, x), the exact norm of P_l from L^1 to L^inf."""
    lam = 2 * l + n
    R = np.sqrt(2 * lam) + 4.0
    r = np.linspace(0.0, R, 40 * (l + 4))
    d = projection_diagonal(l, n, r)
    i = int(np.argmax(d))
    h = r[1] - r[0]
    lo, hi = max(0.0, r[i] - h), min(R, r[i] + h)
    res = minimize_scalar(lambda t: -projection_diagonal(l, n, t)[0], bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    best = max(float(d[i]), float(-res.fun))
    arg = float(res.x) if -res.fun >= d[i] else float(r[i])
    return best, arg


def projection_opnorm_lower(l, p, basis, n_random=16, seed=DEFAULT_SEED, oversample=None):
    """Lower estimate of ||P_l||_{L^p -> L^p'} for 1 <= p <= 2.

    p = 1 returns the exact value sup_x Phi_l(x, x) (for a positive kernel the
    off-diagonal entries are bounded by the diagonal).  For p > 1 the tests
    are f = |g|^(p'-1) sgn(g) with g = phi_nu, |nu| = l, or seeded random shell
    combinations; in one dimension this attains ||phi_l||_{p'}^2.
    """
    p = float(p)
    if p < 1 or p > 2:
        raise ValueError(f"projection bounds need 1 <= p <= 2, got {p}")
    l = int(l)
    if not 0 <= l <= basis.N:
        raise CutoffError(f"shell {l} outside the complete range 0..{basis.N}")
    n = basis.n
    if p == 1:
        val, r = projection_kernel_sup(l, n)
        return NormEstimate(val, "exact", {"kernel_sup_at_radius": r}, 1.0, np.inf)
    q = p / (p - 1)
    if oversample is None:
        # |g|^(p'-1) has kinks at the zeros of g; 1-D grids are cheap to refine
        oversample = 16.0 if n == 1 else 4.0
    lam = 2 * l + n
    R = np.sqrt(2 * lam) + 6.0
    h = np.pi / (4 * np.sqrt(lam)) / oversample
    grid = GridSpec.uniform(R, h, n)
    axis = grid.nodes[0]
    H = hermite_functions(l, axis)
    shell = np.array([nu for nu in index_table(n, l) if sum(nu) == l])
    w = grid.weight_tensor()

    def shell_values(coef):
        # sum_j coef_j phi_{shell_j} on the grid, tensor row-major
        out = 0
        for c, nu in zip(coef, shell):
            term = H[:, nu[0]]
            for j in range(1, n):
                term = np.multiply.outer(term, H[:, nu[j]])
            out = out + c * np.asarray(term).ravel()
        return out

    basis_vals = np.array([shell_values(np.eye(len(shell))[j]) for j in range(len(shell))])
    tests = list(basis_vals)
    rng = np.random.default_rng(seed)
    if len(shell) > 1:
        for _ in range(n_random):
            tests.append(rng.standard_normal(len(shell)) @ basis_vals)
    best, witness = 0.0, None
    for t, g in enumerate(tests):
        f = np.abs(g) ** (q - 1) * np.sign(g)
        coef = basis_vals @ (w * f)
        Pf = coef @ basis_vals
        num = lp_norm(GridFunction(grid, Pf), q)
        den = lp_norm(GridFunction(grid, f), p)
        ratio = num / den
        if ratio > best:
            best = ratio
            witness = {"test": "hermite", "nu": shell[t].tolist()} if t < len(shell) else {
                "test": "random", "seed": seed, "draw": t - len(shell)}
    return NormEstimate(float(best), "lower-bound", witness, p, q)
