"""Acceptance experiments shared by ``hermite-mult selftest`` and the test suite.

Each ``criterion_*`` function runs one experiment and returns a
:class:`CriterionResult` holding the measured numbers, the tolerance it was
judged against and a one-line verdict.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import thresholds as th
from .hermite_core import GridFunction, build_basis, hermite_lp_norms, lp_norm
from .hnorms import hormander_norm
from .operators import (OperatorSpec, apply, apply_multilinear, band_limit,
                        lp_partition_frame_bound, square_function)
from .opnorms import band_opnorm, compactness_profile, lp_opnorm_lower, projection_opnorm_lower
from .symbols import (make_lp_partition, make_symbol, multilinear_separable, pseudo_symbol,
                      tabulated_symbol)
from .transform import forward_array, inverse_array, plancherel_defect

DEFAULT_SEED = 42
#: log-spaced 1-D indices for the Lp asymptotics
ASYMPTOTIC_NU = tuple(int(v) for v in np.unique(np.round(np.geomspace(64, 4096, 13))))
ASYMPTOTIC_P = (1.0, 1.2, 1.5, 2.0, 3.0, 4.0, 6.0, math.inf)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"

    def record(self):
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def fit_slope(x, y):
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def _random_band(basis, count, rng):
    """``count`` real random band-limited functions on the uniform basis grid."""
    shape = (basis.N + 1,) * basis.n
    c = rng.standard_normal((count,) + shape)
    size = sum(np.indices(shape))
    c = np.where(size <= basis.N, c, 0.0)
    vals = inverse_array(c, basis, basis.grid).reshape(count, -1)
    return [GridFunction(basis.grid, v) for v in vals]


# --------------------------------------------------------------------------

def criterion_orthonormality(seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    gram, planch = {}, {}
    for n, N in ((1, 128), (2, 32)):
        basis = build_basis(n, N)
        K = (N + 1) ** n
        eye = np.eye(K).reshape((K,) + (N + 1,) * n)
        for label, grid in (("gauss-hermite", basis.quad_grid), ("uniform", basis.grid)):
            step = max(1, (1 << 23) // grid.size)
            G = np.concatenate([forward_array(inverse_array(eye[i:i + step], basis, grid), grid, basis)
                                .reshape(-1, K) for i in range(0, K, step)])
            gram[f"n={n} {label}"] = float(np.max(np.abs(G - np.eye(K))))
        planch[f"n={n}"] = max(plancherel_defect(f, basis) / lp_norm(f, 2) ** 2
                               for f in _random_band(basis, 4, rng))
    worst = max(max(gram.values()), max(planch.values()))
    return CriterionResult(1, "orthonormality/Plancherel", worst < 1e-10,
                           {"gram_defect": gram, "plancherel_defect": planch},
                           f"max defect {worst:.2e} < 1e-10")


def demo_table(N):
    """Deterministic table over 0..N starting 0.3, 0.9, 0.1."""
    vals = {0: 0.3, 1: 0.9, 2: 0.1}
    for k in range(3, N + 1):
        vals[k] = 0.5 * math.cos(k) / math.sqrt(1.0 + k)
    return tabulated_symbol(vals)


def criterion_lower_bound(seed=DEFAULT_SEED, N=64):
    basis = build_basis(1, N)
    symbols = {"power:1": make_symbol("power", 1), "oscillating:5": make_symbol("oscillating", 5),
               "tabulated": demo_table(N)}
    nu = np.arange(N + 1)
    rows, ok = [], True
    worst_dev, worst_gap = 0.0, -math.inf
    for name, s in symbols.items():
        m = np.abs(s.evaluate(nu))
        for p in (1.0, 1.5, 2.0, 3.0, math.inf):
            est = lp_opnorm_lower(s, p, p, basis, seed=seed)
            ratios = np.array(est.details["hermite"]["ratio"])
            dev = float(np.max(np.abs(ratios - m)))
            gap = float(m.max() - est.value)
            worst_dev, worst_gap = max(worst_dev, dev), max(worst_gap, gap)
            ok &= dev < 1e-6 and est.value >= m.max() - 1e-6
            rows.append({"symbol": name, "p": p, "lower_bound": est.value, "sup": float(m.max()),
                         "ratio_deviation": dev})
    return CriterionResult(2, "lower bound", bool(ok), {"rows": rows},
                           f"ratio deviation {worst_dev:.1e}, sup - bound {worst_gap:.1e}")


def criterion_compactness(N=64):
    basis = build_basis(1, N)
    ks = (2, 4, 8, 16, 32)
    rows, worst = [], 0.0
    cases = [(f"power:{k}", make_symbol("power", k), lambda j, k=k: (1.0 + j) ** -k) for k in (0.5, 1, 2)]
    cases.append(("oscillating:5", make_symbol("oscillating", 5), lambda j: 1.0))
    for name, s, exact in cases:
        for k, tail_sup, measured in compactness_profile(s, ks, basis):
            err = abs(measured - exact(k))
            worst = max(worst, err)
            rows.append({"symbol": name, "k": k, "measured": measured, "expected": exact(k)})
    return CriterionResult(3, "compactness identity", worst < 1e-10, {"rows": rows},
                           f"max |measured - expected| {worst:.1e} < 1e-10")


_NORM_CACHE = {}


def asymptotic_norms(nus=ASYMPTOTIC_NU, ps=ASYMPTOTIC_P):
    """{nu: {p: ||phi_nu||_p}} with a module-level cache."""
    out = {}
    for k in nus:
        have = _NORM_CACHE.setdefault(k, {})
        missing = [p for p in ps if p not in have]
        if missing:
            have.update(hermite_lp_norms(k, missing))
        out[k] = {p: have[p] for p in ps}
    return out


SLOPE_TARGETS = {1.0: (0.23, 0.27), 2.0: (-0.005, 0.005), 6.0: (-1 / 9 - 0.02, -1 / 9 + 0.02),
                 math.inf: (-1 / 12 - 0.02, -1 / 12 + 0.02)}


def criterion_asymptotics():
    norms = asymptotic_norms()
    nus = sorted(norms)
    slopes, ok = {}, True
    for p in (1.0, 2.0, 4.0, 6.0, math.inf):
        slope = fit_slope(nus, [norms[k][p] for k in nus])
        slopes[p] = slope
        if p == 4.0:
            ok &= -0.125 < slope < -0.10
        else:
            lo, hi = SLOPE_TARGETS[p]
            ok &= lo <= slope <= hi
    text = ", ".join(f"p={'inf' if math.isinf(p) else f'{p:g}'}: {v:+.4f}" for p, v in slopes.items())
    return CriterionResult(4, "Hermite Lp asymptotics", bool(ok), {"slopes": slopes}, text)


def criterion_products():
    pairs = {3.0: 1.5, 6.0: 1.2, math.inf: 1.0}
    norms = asymptotic_norms()
    nus = sorted(norms)
    rows, ok = [], True
    for p, q in pairs.items():
        slope = fit_slope(nus, [norms[k][p] * norms[k][q] for k in nus])
        limit = float(th.gamma(1, p)) + 0.02
        ok &= slope <= limit
        rows.append({"n": 1, "p": p, "slope": slope, "limit": limit})
    # diagonal nu = (k, k): the norm of a tensor product is the product of norms
    for p, q in ((2.0, 2.0), (math.inf, 1.0)):
        sizes = [2 * k for k in nus]
        slope = fit_slope(sizes, [(norms[k][p] * norms[k][q]) ** 2 for k in nus])
        limit = float(th.gamma(2, p)) + 0.05
        ok &= slope <= limit
        rows.append({"n": 2, "p": p, "slope": slope, "limit": limit})
    text = ", ".join(f"n={r['n']} p={r['p']:g}: {r['slope']:.3f} <= {r['limit']:.3f}" for r in rows)
    return CriterionResult(5, "product exponents", bool(ok), {"rows": rows}, text)


#: (n, p, s-linear-FT) spot checks worked out by hand from the bullet formulas
THRESHOLD_SPOTS = (
    (1, "4", Fraction(2)), (2, "2", Fraction(3)), (1, "3", Fraction(3, 2)),
    (1, "6", Fraction(14, 9)), (2, "5/2", Fraction(61, 20)), (2, "10/3", Fraction(31, 10)),
    (2, "4", Fraction(19, 6)), (3, "3", Fraction(14, 3)), (3, "6", Fraction(5)),
    (3, "8", Fraction(41, 8)), (4, "5/2", Fraction(123, 20)), (2, "3/2", Fraction(37, 12)),
)


def criterion_thresholds():
    bad = []
    for n, p, want in THRESHOLD_SPOTS:
        got = th.s_threshold("s-linear-FT", n, p)
        if got != want:
            bad.append(f"s({n},{p})={got}!={want}")
        if got - th.s_threshold("s-linear-FHT", n, p) != Fraction(1, 12):
            bad.append(f"FHT shift at ({n},{p})")
    junction_gap = 0.0
    for n in range(1, 11):
        for pj in th.junctions(n):
            vals = th.branch_values(n, pj)
            # branches meeting at pj: 0/1 at the first junction, 1/2 at the second
            i = 0 if (n == 1 or pj == Fraction(2 * (n + 3), n + 1)) else 1
            junction_gap = max(junction_gap, abs(float(vals[i] - vals[i + 1])))
            junction_gap = max(junction_gap, abs(float(th.gamma(n, pj) - vals[i])))
    deltas = {n: th.delta(n, Fraction(2 * n, n + 2)) for n in range(2, 7)}
    if any(v != Fraction(1, 2) for v in deltas.values()):
        bad.append("delta at 2n/(n+2)")
    if th.s_multilinear(2, 2, 1) != Fraction(13, 2):
        bad.append("s-multilinear(2,2,1)")
    ok = not bad and junction_gap <= 1e-14
    detail = f"{len(THRESHOLD_SPOTS)} spot checks, junction gap {junction_gap:.1e}"
    if bad:
        detail += "; mismatches: " + "; ".join(bad)
    return CriterionResult(6, "threshold tables", ok,
                           {"junction_gap": junction_gap, "mismatches": bad}, detail)


def _demo_pseudo():
    # m(x, nu) = (1 + |nu|)^(-1/2) (1 + 0.5 cos x) + i 0.1 x / (1 + x^2)
    def func(x, idx):
        size = idx.sum(axis=1).astype(float)
        b = (1.0 + size) ** -0.5
        if x is None:
            return b
        a = 1.0 + 0.5 * np.cos(x[:, 0])
        return a[:, None] * b[None, :] + 0.1j * (x[:, 0] / (1 + x[:, 0] ** 2))[:, None]
    return pseudo_symbol(func)


def criterion_dyadic(seed=DEFAULT_SEED, N=64):
    part = make_lp_partition(10)
    lam = np.concatenate([np.linspace(1.0, 2.0**10, 200001), np.geomspace(1.0, 2.0**10, 20001)])
    pu_defect = float(np.max(np.abs(part.total(lam) - 1.0)))

    basis = build_basis(1, N)
    rng = np.random.default_rng(seed)
    f = GridFunction(basis.grid, rng.standard_normal(basis.grid.size) * np.exp(-0.02 * basis.grid.points()[:, 0] ** 2))
    s = _demo_pseudo()
    whole = apply(OperatorSpec(s, basis), f).values
    parts = apply(OperatorSpec(s, basis, "tail-truncation", 0), f).values
    for k in range(int(math.log2(N)) + 1):
        parts = parts + apply(OperatorSpec(s, basis, "dyadic-block", k), f).values
    completeness = float(np.max(np.abs(parts - whole)) / np.max(np.abs(whole)))

    block_gap = 0.0
    nu = np.arange(N + 1)
    for m in (make_symbol("power", 1), make_symbol("mihlin", (1.0, 0.5))):
        mv = np.abs(m.evaluate(nu))
        for k in range(int(math.log2(N)) + 1):
            shell = (nu >= 2**k) & (nu < 2 ** (k + 1))
            measured = band_opnorm(OperatorSpec(m, basis, "dyadic-block", k)).value
            block_gap = max(block_gap, abs(measured - mv[shell].max()))
    ok = pu_defect < 1e-12 and completeness < 1e-10 and block_gap < 1e-10
    return CriterionResult(7, "dyadic machinery", ok,
                           {"partition_defect": pu_defect, "completeness": completeness,
                            "block_gap": block_gap},
                           f"partition {pu_defect:.1e}, completeness {completeness:.1e}, "
                           f"block norm {block_gap:.1e}")


def criterion_littlewood_paley(seed=DEFAULT_SEED, N=256, count=50, n=1):
    basis = build_basis(n, N)
    L = int(math.ceil(math.log2(math.sqrt(1.0 + N * N))))
    part = make_lp_partition(L)
    lower = lp_partition_frame_bound(part, basis)
    ratios = []
    for f in _random_band(basis, count, np.random.default_rng(seed)):
        S = square_function(f, part, basis)
        ratios.append(lp_norm(S, 2) / lp_norm(f, 2))
    ratios = np.array(ratios)
    # 1e-12 slack absorbs rounding in the grid norms
    ok = bool(np.all(ratios >= lower - 1e-12) and np.all(ratios <= 1 + 1e-12))
    return CriterionResult(8, "Littlewood-Paley p=2", ok,
                           {"frame_bound": lower, "min_ratio": float(ratios.min()),
                            "max_ratio": float(ratios.max()), "L": L, "seed": seed,
                            "ratios": ratios.tolist()},
                           f"ratios in [{ratios.min():.4f}, {ratios.max():.4f}] "
                           f"within [{lower:.4f}, 1]")


def criterion_hormander():
    one = make_symbol("one")
    flat = hormander_norm(one, "FT", 2.0, "rescaled", range(1, 13)).values()
    spread = float((max(flat) - min(flat)) / max(flat))
    mihlin = hormander_norm(make_symbol("mihlin"), "FT", 3.0, "rescaled", range(4, 11)).values()
    mratio = float(max(mihlin) / min(mihlin))
    lit = hormander_norm(one, "FT", 2.0, "literal", (11, 12)).values()
    growth = float(lit[1] / lit[0])
    ok = spread < 1e-8 and mratio < 2 and abs(growth / 4.0 - 1) < 0.02
    return CriterionResult(9, "Hormander norms", ok,
                           {"rescaled_spread": spread, "mihlin_ratio": mratio, "literal_growth": growth},
                           f"m=1 spread {spread:.1e}, Mihlin max/min {mratio:.4f}, "
                           f"literal growth {growth:.4f} vs 4")


def criterion_karadzhov(ls=range(8, 65)):
    basis = build_basis(2, max(ls))
    ls = list(ls)
    vals = [projection_opnorm_lower(l, 1, basis).value for l in ls]
    slope = fit_slope(ls, vals)
    limit = float(th.delta(2, 1)) - 0.5 + 0.1
    return CriterionResult(10, "Karadzhov diagnostic", slope <= limit,
                           {"slope": slope, "limit": limit, "values": vals},
                           f"slope {slope:+.4f} <= {limit:.1f}")


def criterion_multilinear(N=48):
    basis = build_basis(1, N)
    x = basis.grid.points()[:, 0]
    f = GridFunction(basis.grid, np.exp(-0.5 * (x - 1.0) ** 2) * (1 + x))
    g = GridFunction(basis.grid, np.exp(-x * x / 3.0) * np.cos(2 * x))

    one = make_symbol("one", kind="multilinear", arity=2)
    prod = band_limit(f, basis).values * band_limit(g, basis).values
    got = apply_multilinear(one, [f, g], basis).values
    err_one = float(np.max(np.abs(got - prod)) / np.max(np.abs(prod)))

    a, b = make_symbol("power", 1), make_symbol("oscillating", 5)

    def joint(xs, idx):
        vals = a.evaluate(idx[:, :1]) * b.evaluate(idx[:, 1:])
        return vals if xs is None else np.broadcast_to(vals, (xs.shape[0], vals.size))

    general = pseudo_symbol(joint, kind="multilinear", arity=2, x_dependent=False)
    comp = apply(OperatorSpec(a, basis), f).values * apply(OperatorSpec(b, basis), g).values
    scale = np.max(np.abs(comp))
    err_general = float(np.max(np.abs(apply_multilinear(general, [f, g], basis).values - comp)) / scale)
    err_sep = float(np.max(np.abs(apply_multilinear(multilinear_separable([a, b]), [f, g], basis).values
                                  - comp)) / scale)
    exact = th.s_multilinear(2, 2, 1)
    worst = max(err_one, err_general, err_sep)
    ok = worst < 1e-8 and exact == Fraction(13, 2)
    return CriterionResult(11, "multilinear", ok,
                           {"product_error": err_one, "general_error": err_general,
                            "separable_error": err_sep, "s_multilinear_221": str(exact)},
                           f"max error {worst:.1e}, s(2,2,1) = {exact}")


CRITERIA = {
    1: criterion_orthonormality,
    2: criterion_lower_bound,
    3: criterion_compactness,
    4: criterion_asymptotics,
    5: criterion_products,
    6: criterion_thresholds,
    7: criterion_dyadic,
    8: criterion_littlewood_paley,
    9: criterion_hormander,
    10: criterion_karadzhov,
    11: criterion_multilinear,
}

SEEDED = {1, 2, 7, 8}


def run_criterion(number, seed=DEFAULT_SEED):
    func = CRITERIA[number]
    start = time.perf_counter()
    res = func(seed=seed) if number in SEEDED else func()
    res.passed = bool(res.passed)
    res.seconds = time.perf_counter() - start
    return res


def run_all(numbers=None, seed=DEFAULT_SEED):
    return [run_criterion(k, seed) for k in (sorted(CRITERIA) if numbers is None else numbers)]
