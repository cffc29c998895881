"""Symbols, difference operators, symbol-condition checkers and dyadic cutoffs.

A symbol is indexed by what its kind naturally sees:

* ``multiplier`` m(nu) and ``pseudo`` m(x, nu): nu an n-multi-index;
* ``radial`` mu(l): l = |nu|;
* ``spectral`` m(x, lam): lam = 2|nu| + n on the spectrum of the oscillator;
* ``multilinear`` m(x, nu_1, ..., nu_kappa): the joint index of length n*kappa.

Family symbols are driven by a profile of a scalar size; on discrete
indices the size is the l1 length |nu|, on real frequencies the Euclidean
length |xi|.
"""
from __future__ import annotations

import csv
import itertools
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb, expit

from .errors import SymbolError

KINDS = ("multiplier", "pseudo", "radial", "spectral", "multilinear")
FAMILIES = ("one", "power", "oscillating", "mihlin", "riesz", "tabulated", "separable", "callable")


@dataclass(frozen=True, eq=False)
class Symbol:
    """Immutable symbol object.

    Exactly one evaluator is set: ``profile`` (a function of the index size,
    optionally times ``xfactor(x)``), ``func(x, idx)``, ``table`` or
    ``factors`` (a per-slot product for separable symbols).
    """

    kind: str
    n: int
    family: str
    params: tuple = ()
    arity: int = 1
    profile: object = None
    xfactor: object = None
    func: object = None
    table: object = None
    factors: tuple = ()
    smooth: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SymbolError(f"unknown symbol kind {self.kind!r}")
        if self.n < 1:
            raise SymbolError("dimension must be positive")
        if self.kind == "multilinear" and self.arity < 2:
            raise SymbolError("multilinear symbols need arity >= 2")
        if self.kind != "multilinear" and self.arity != 1:
            raise SymbolError("only multilinear symbols have arity > 1")
        if sum(v is not None and v != () for v in (self.profile, self.func, self.table, self.factors)) != 1:
            raise SymbolError("a symbol needs exactly one evaluator")

    # ------------------------------------------------------------------
    @property
    def depends_on_x(self):
        if self.kind in ("multiplier", "radial"):
            return False
        if self.func is not None:
            return bool(self.meta.get("x_dependent", True))
        if self.table is not None:
            return self.table.has_x
        if self.factors:
            return self.xfactor is not None or any(f.depends_on_x for f in self.factors)
        return self.xfactor is not None

    @property
    def index_dim(self):
        """Length of one discrete index for this kind."""
        if self.kind in ("radial", "spectral"):
            return 1
        return self.n * self.arity

    def _size(self, idx):
        """Scalar size fed to profiles: l1 length, or the raw index for radial/spectral."""
        if self.kind in ("radial", "spectral"):
            return idx[:, 0].astype(float)
        return idx.sum(axis=1).astype(float)

    def _as_index(self, idx):
        idx = np.asarray(idx)
        if idx.ndim == 0:
            idx = idx.reshape(1, 1)
        elif idx.ndim == 1:
            idx = idx[:, None] if self.index_dim == 1 else idx[None, :]
        if idx.shape[1] != self.index_dim:
            raise SymbolError(f"index has length {idx.shape[1]}, symbol expects {self.index_dim}")
        return idx

    def _as_x(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None] if self.n == 1 else x[None, :]
        if x.shape[1] != self.n:
            raise SymbolError(f"points have dimension {x.shape[1]}, symbol expects {self.n}")
        return x

    def evaluate(self, idx, x=None):
        """Values at discrete indices, shape (K,) or (P, K) when x is given.

        ``idx`` has shape (K, d) with d the index length of the kind (see the
        module docstring).  x-dependent symbols require ``x`` of shape (P, n).
        """
        idx = self._as_index(idx)
        if x is None and self.depends_on_x:
            raise SymbolError("this symbol depends on x; pass evaluation points")
        xs = None if x is None else self._as_x(x)
        if self.table is not None:
            vals = self.table.lookup(idx, xs)
        elif self.factors:
            vals = self._factor_values(idx, xs)
        elif self.func is not None:
            vals = np.asarray(self.func(xs, idx), dtype=complex)
        else:
            vals = np.asarray(self.profile(self._size(idx)), dtype=complex)
            if xs is not None:
                vals = np.broadcast_to(vals, (xs.shape[0], vals.size))
                if self.xfactor is not None:
                    vals = vals * np.asarray(self.xfactor(xs), dtype=complex)[:, None]
        if xs is not None and vals.ndim == 1:
            vals = np.broadcast_to(vals, (xs.shape[0], vals.size))
        return np.array(vals, dtype=complex)

    def _factor_values(self, idx, xs):
        d = self.n if self.kind == "multilinear" else idx.shape[1]
        out = None
        for j, fac in enumerate(self.factors):
            sub = idx[:, j * d:(j + 1) * d] if self.kind == "multilinear" else idx
            v = fac.evaluate(sub, xs if fac.depends_on_x else None)
            out = v if out is None else out * v
        if self.xfactor is not None and xs is not None:
            out = np.broadcast_to(out, (xs.shape[0], idx.shape[0])) * self.xfactor(xs)[:, None]
        return out

    def at_multi_indices(self, nu, x=None):
        """Values at n-multi-indices nu (shape (K, n)) whatever the kind.

        Radial symbols see l = |nu|, spectral symbols lam = 2|nu| + n.
        """
        nu = np.asarray(nu).reshape(-1, self.n)
        if self.kind == "radial":
            return self.evaluate(nu.sum(axis=1), x)
        if self.kind == "spectral":
            return self.evaluate(2 * nu.sum(axis=1) + self.n, x)
        if self.kind == "multilinear":
            raise SymbolError("multilinear symbols are indexed by joint indices")
        return self.evaluate(nu, x)

    def evaluate_real(self, xi, x=None):
        """Values on real frequencies xi (shape (K, d)); size is |xi| Euclidean."""
        xi = np.asarray(xi, dtype=float)
        if xi.ndim == 1:
            xi = xi[:, None]
        if self.table is not None:
            raise SymbolError("tabulated symbols have no values off the integer lattice")
        if x is None and self.depends_on_x:
            raise SymbolError("this symbol depends on x; pass evaluation points")
        xs = None if x is None else self._as_x(x)
        if self.func is not None:
            vals = np.asarray(self.func(xs, xi), dtype=complex)
        elif self.factors:
            vals = self._factor_values(xi, xs)
        else:
            r = np.sqrt(np.sum(xi**2, axis=1))
            vals = np.asarray(self.profile(r), dtype=complex)
            if xs is not None:
                vals = np.broadcast_to(vals, (xs.shape[0], vals.size))
                if self.xfactor is not None:
                    vals = vals * np.asarray(self.xfactor(xs), dtype=complex)[:, None]
        if xs is not None and vals.ndim == 1:
            vals = np.broadcast_to(vals, (xs.shape[0], vals.size))
        return np.array(vals, dtype=complex)

    def describe(self):
        return ":".join([self.family] + [f"{p:g}" if isinstance(p, float) else str(p) for p in self.params])


# --------------------------------------------------------------------------
# tabulated data
# --------------------------------------------------------------------------

class SymbolTable:
    """Declared values m(nu) or m(x, nu) at finitely many points."""

    def __init__(self, entries, has_x=False):
        # entries: nu tuple -> value, or nu tuple -> list of (x tuple, value)
        self.entries = dict(entries)
        self.has_x = has_x
        if not self.entries:
            raise SymbolError("empty symbol table")

    def lookup(self, idx, xs):
        cols = []
        for nu in map(tuple, idx.tolist()):
            if nu not in self.entries:
                raise SymbolError(f"index {nu} is outside the declared table range")
            cols.append(self.entries[nu])
        if not self.has_x:
            vals = np.array(cols, dtype=complex)
            return vals if xs is None else np.broadcast_to(vals, (xs.shape[0], vals.size))
        out = np.empty((xs.shape[0], len(cols)), dtype=complex)
        for j, samples in enumerate(cols):
            pts = np.array([s[0] for s in samples], dtype=float)
            vals = np.array([s[1] for s in samples], dtype=complex)
            dist = np.sum((xs[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
            out[:, j] = vals[np.argmin(dist, axis=1)]
        return out


def load_symbol_table(path, n=None):
    """Read a CSV with header nu_1..nu_n[,x_1..x_n],re,im into a Symbol."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SymbolError(f"{path}: empty table")
    header = [h.strip() for h in rows[0]]
    nu_cols = [i for i, h in enumerate(header) if h.startswith("nu_")]
    x_cols = [i for i, h in enumerate(header) if h.startswith("x_")]
    if not nu_cols or header[-2:] != ["re", "im"]:
        raise SymbolError(f"{path}: header must be nu_1..nu_n[,x_1..x_n],re,im")
    if x_cols and len(x_cols) != len(nu_cols):
        raise SymbolError(f"{path}: x columns must match the dimension")
    if n is not None and len(nu_cols) != n:
        raise SymbolError(f"{path}: table dimension {len(nu_cols)} does not match n={n}")
    entries = {}
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            nu = tuple(int(row[i]) for i in nu_cols)
            val = complex(float(row[-2]), float(row[-1]))
            xpt = tuple(float(row[i]) for i in x_cols)
        except ValueError as exc:
            raise SymbolError(f"{path}:{line}: {exc}") from None
        if any(k < 0 for k in nu):
            raise SymbolError(f"{path}:{line}: negative index")
        if x_cols:
            entries.setdefault(nu, []).append((xpt, val))
        else:
            entries[nu] = val
    return tabulated_symbol(entries, n=len(nu_cols), has_x=bool(x_cols))


def tabulated_symbol(entries, n=1, has_x=False):
    """Symbol from a dict nu -> value (or nu -> [(x, value), ...] with has_x)."""
    norm = {}
    for nu, val in entries.items():
        nu = (int(nu),) if np.isscalar(nu) else tuple(int(k) for k in nu)
        if len(nu) != n:
            raise SymbolError(f"index {nu} does not have length {n}")
        norm[nu] = val
    table = SymbolTable(norm, has_x)
    kind = "pseudo" if has_x else "multiplier"
    return Symbol(kind, n, "tabulated", (len(norm),), table=table, smooth=False)


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

def _profile(family, params, kind, n):
    if family == "one":
        return lambda r: np.ones_like(r)
    if family == "power":
        (kappa,) = params
        return lambda r: (1.0 + r) ** (-kappa)
    if family == "oscillating":
        (tau,) = params
        return lambda r: np.exp(1j * tau * np.log1p(r))
    if family == "mihlin":
        a, b = params
        return lambda r: np.exp(0.5 * (1j * a - b) * np.log1p(r * r))
    if family == "riesz":
        delta, R = params

        def riesz(r):
            lam = r if kind == "spectral" else 2.0 * r + n
            return np.clip(1.0 - lam / R, 0.0, None) ** delta

        return riesz
    raise SymbolError(f"unknown symbol family {family!r}")


_ARITY = {"one": (0, 0), "power": (1, 1), "oscillating": (1, 1), "mihlin": (0, 2), "riesz": (2, 2)}
_DEFAULTS = {"mihlin": (1.0, 0.0)}


def make_symbol(family, params=(), n=1, kind="multiplier", arity=1, xfactor=None):
    """Build a family symbol.

    Families: ``one``; ``power`` (kappa): (1+r)^-kappa; ``oscillating`` (tau):
    (1+r)^(i tau); ``mihlin`` (a[, b]): (1+r^2)^((i a - b)/2), defaults a=1,
    b=0; ``riesz`` (delta, R): (1 - lam/R)_+^delta with lam = 2r + n; and
    ``table`` (path) for CSV data.  ``xfactor`` multiplies by a(x) and turns a
    multiplier into a pseudo-multiplier.
    """
    if np.isscalar(params) or isinstance(params, str):
        params = (params,)
    params = tuple(params)
    if family in ("table", "tabulated"):
        if len(params) != 1:
            raise SymbolError("table symbols take one parameter: the CSV path")
        return load_symbol_table(params[0], n)
    if family not in _ARITY:
        raise SymbolError(f"unknown symbol family {family!r}")
    lo, hi = _ARITY[family]
    if not lo <= len(params) <= hi:
        raise SymbolError(f"family {family!r} takes {lo}..{hi} parameters, got {len(params)}")
    try:
        params = tuple(float(p) for p in params)
    except (TypeError, ValueError):
        raise SymbolError(f"non-numeric parameter for {family!r}: {params}") from None
    if not all(math.isfinite(p) for p in params):
        raise SymbolError("symbol parameters must be finite")
    params = params + _DEFAULTS.get(family, ())[len(params):]
    if family == "riesz" and (params[0] < 0 or params[1] <= 0):
        raise SymbolError("riesz needs delta >= 0 and R > 0")
    if xfactor is not None and kind == "multiplier":
        kind = "pseudo"
    if kind == "multilinear" and arity < 2:
        arity = 2
    prof = _profile(family, params, kind, n * (arity if kind == "multilinear" else 1))
    return Symbol(kind, n, family, params, arity, profile=prof, xfactor=xfactor,
                  smooth=family != "riesz")


def parse_symbol(spec, n=1, kind="multiplier", arity=1):
    """Parse the ``family[:param[:param]]`` command-line grammar."""
    parts = spec.split(":")
    family, params = parts[0].strip(), parts[1:]
    if family in ("table", "tabulated"):
        return make_symbol("table", (":".join(params),), n=n)
    return make_symbol(family, params, n=n, kind=kind, arity=arity)


def separable_symbol(a, b, n=1):
    """Pseudo-multiplier a(x) b(nu) with b a linear symbol and a a callable of x (P, n)."""
    if b.kind not in ("multiplier", "pseudo"):
        raise SymbolError("separable factor b must be a (pseudo-)multiplier")
    return Symbol("pseudo", n, "separable", (b.describe(),), factors=(b,), xfactor=a,
                  smooth=b.smooth)


def multilinear_separable(factors, xfactor=None):
    """Multilinear symbol a(x) b_1(nu_1) ... b_k(nu_k) from per-slot symbols."""
    factors = tuple(factors)
    n = factors[0].n
    if any(f.n != n or f.kind not in ("multiplier", "pseudo") for f in factors):
        raise SymbolError("per-slot factors must be linear symbols of the same dimension")
    return Symbol("multilinear", n, "separable", tuple(f.describe() for f in factors),
                  arity=len(factors), factors=factors, xfactor=xfactor)


def pseudo_symbol(func, n=1, kind="pseudo", arity=1, x_dependent=True, smooth=True):
    """General symbol from ``func(x, idx)`` returning shape (P, K) (or (K,) if x is None)."""
    return Symbol(kind, n, "callable", (), arity, func=func, smooth=smooth,
                  meta={"x_dependent": x_dependent})


# --------------------------------------------------------------------------
# differences and condition checks
# --------------------------------------------------------------------------

def forward_difference(s, alpha):
    """Symbol evaluating Delta^alpha m (forward differences, per axis).

    Radial symbols step l by 1; spectral symbols step lam by 2 so that the
    difference moves between adjacent eigenvalues.
    """
    if s.kind == "multilinear":
        raise SymbolError("forward differences of multilinear symbols are not supported")
    alpha = (int(alpha),) if np.isscalar(alpha) else tuple(int(a) for a in alpha)
    if len(alpha) != s.index_dim or any(a < 0 for a in alpha):
        raise SymbolError(f"difference order {alpha} does not fit the symbol index")
    step = 2 if s.kind == "spectral" else 1
    terms = []
    for beta in itertools.product(*(range(a + 1) for a in alpha)):
        coef = 1
        for a, b in zip(alpha, beta):
            coef *= (-1) ** (a - b) * int(comb(a, b, exact=True))
        terms.append((coef, np.array(beta) * step))

    def diff(x, idx):
        idx = np.asarray(idx)
        out = 0
        for coef, beta in terms:
            out = out + coef * s.evaluate(idx + beta, x)
        return out

    return Symbol(s.kind, s.n, "difference", (s.describe(), alpha), func=diff,
                  smooth=s.smooth, meta={"x_dependent": s.depends_on_x, "base": s})


ConditionEntry = namedtuple("ConditionEntry", "value argsup")


def _orders(dim, rho):
    return [a for a in itertools.product(range(rho + 1), repeat=dim) if sum(a) <= rho]


def _central_difference(s, xi, alpha, x):
    """Mixed central finite difference of the real-frequency symbol."""
    order = sum(alpha)
    rel = np.finfo(float).eps ** (1.0 / (order + 2))
    out = 0
    h_all = rel * np.maximum(1.0, np.abs(xi))
    stencils = []
    for j, a in enumerate(alpha):
        stencils.append([((-1) ** i * comb(a, i), (a / 2 - i)) for i in range(a + 1)])
    for combo in itertools.product(*stencils):
        coef = np.prod([c for c, _ in combo])
        shift = np.array([o for _, o in combo])
        out = out + coef * s.evaluate_real(xi + shift * h_all, x)
    scale = np.prod(h_all ** np.array(alpha), axis=1)
    return out / scale


def condition_report(s, rho, mode="marcinkiewicz", nu_max=100, x_grid=None, xi_points=None):
    """Constants C_alpha = sup (1+|nu|)^|alpha| |Delta^alpha m| for |alpha| <= rho.

    ``marcinkiewicz`` uses forward differences on indices with |nu| <= nu_max;
    ``kohn-nirenberg`` uses central derivatives on a positive real grid
    (``xi_points``, default geometric up to nu_max) with weight (1+|xi|).
    Pseudo symbols take the sup over ``x_grid`` as well.  Returns a dict
    alpha -> ConditionEntry(value, argsup).
    """
    if s.kind == "multilinear":
        raise SymbolError("condition checks apply to linear symbols")
    x = None
    if s.depends_on_x:
        if x_grid is None:
            raise SymbolError("x-dependent symbol needs an x grid")
        x = np.asarray(x_grid, dtype=float).reshape(-1, s.n)
    dim = s.index_dim
    if mode == "marcinkiewicz":
        if s.kind in ("radial", "spectral"):
            shells = np.arange(nu_max + 1)
            idx = (2 * shells + s.n if s.kind == "spectral" else shells)[:, None]
            size = shells.astype(float)
        else:
            idx = np.array([nu for nu in itertools.product(range(nu_max + 1), repeat=dim)
                            if sum(nu) <= nu_max]).reshape(-1, dim)
            size = idx.sum(axis=1).astype(float)
    elif mode == "kohn-nirenberg":
        if s.kind not in ("multiplier", "pseudo"):
            raise SymbolError("Kohn-Nirenberg checks need a symbol on real frequencies")
        if xi_points is None:
            m = 2000 if dim == 1 else max(8, int(round(2000 ** (1.0 / dim))))
            axis = np.geomspace(0.05, max(nu_max, 1.0), m)
            xi_points = np.stack([g.ravel() for g in np.meshgrid(*([axis] * dim), indexing="ij")], axis=-1)
        idx = np.asarray(xi_points, dtype=float).reshape(-1, dim)
        size = np.sqrt(np.sum(idx**2, axis=1))
    else:
        raise SymbolError(f"unknown condition mode {mode!r}")

    report = {}
    for alpha in _orders(dim, rho):
        if mode == "marcinkiewicz":
            vals = forward_difference(s, alpha).evaluate(idx, x)
        else:
            vals = _central_difference(s, idx, alpha, x)
        vals = np.abs(vals)
        if not np.all(np.isfinite(vals)):
            raise SymbolError(f"non-finite symbol values for alpha={alpha}")
        weighted = vals * (1.0 + size) ** sum(alpha)
        flat = int(np.argmax(weighted))
        if weighted.ndim == 2:
            p, k = np.unravel_index(flat, weighted.shape)
            arg = {"index": idx[k].tolist(), "x": x[p].tolist()}
        else:
            arg = {"index": idx[flat].tolist()}
        report[alpha] = ConditionEntry(float(weighted.ravel()[flat]), arg)
    return report


# --------------------------------------------------------------------------
# dyadic cutoff and Littlewood-Paley partition
# --------------------------------------------------------------------------

def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, exp(-1/t)/(exp(-1/t)+exp(-1/(1-t))) between."""
    t = np.asarray(t, dtype=float)
    inner = np.clip(t, 1e-300, 1 - 1e-16)
    with np.errstate(over="ignore", divide="ignore"):
        val = expit(1.0 / (1.0 - inner) - 1.0 / inner)
    return np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, val))


@dataclass(frozen=True)
class DyadicCutoff:
    """Bump psi on (0, inf): support [1/2, 4], identically 1 on [1, 2]."""

    support: tuple = (0.5, 4.0)
    plateau: tuple = (1.0, 2.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.support
        c, d = self.plateau
        rise = smooth_step((t - a) / (c - a))
        fall = smooth_step((b - t) / (b - d))
        return np.where(t < c, rise, np.where(t > d, fall, 1.0))


def make_cutoff():
    return DyadicCutoff()


@dataclass(frozen=True)
class LPPartition:
    """Telescoping partition psi_0 + psi_1 + ... + psi_L on (0, 2^L].

    With Phi = 1 on [0, 1], falling smoothly to 0 at 2, psi_0 = Phi and
    psi_l(lam) = Phi(2^-l lam) - Phi(2^(1-l) lam) is supported in
    [2^(l-1), 2^(l+1)].
    """

    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("partition needs L >= 1")

    @staticmethod
    def base(t):
        t = np.asarray(t, dtype=float)
        return smooth_step(2.0 - t)

    def block(self, l, lam):
        lam = np.asarray(lam, dtype=float)
        if l == 0:
            return self.base(lam)
        if not 1 <= l <= self.L:
            raise ValueError(f"block index {l} outside 0..{self.L}")
        return self.base(lam / 2.0**l) - self.base(lam / 2.0 ** (l - 1))

    def blocks(self, lam):
        """Array of shape (L+1,) + lam.shape with all block values."""
        return np.stack([self.block(l, lam) for l in range(self.L + 1)])

    def total(self, lam):
        return self.blocks(lam).sum(axis=0)

    @property
    def lam_max(self):
        return 2.0**self.L

    def frame_bound(self, lam):
        """min over lam of sqrt(sum_l psi_l(lam)^2)."""
        return float(np.sqrt(np.min(np.sum(self.blocks(lam) ** 2, axis=0))))


def make_lp_partition(L):
    return LPPartition(int(L))
