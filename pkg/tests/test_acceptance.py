"""Acceptance criteria 1-11, one PASS/FAIL line each."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from mmcantor.clone_structure import BUNDLED, bundled, children, enumerate_level
from mmcantor.dimension import eigenvalue, eigenvalue_curve, solve_dimension
from mmcantor.geometry import EmbeddedRealization, box_counting_dimension, separation_report
from mmcantor.invariants import (MassRatioMap, Verdict, additivity_residuals, clopen_invariant, compare_invariants,
                                 identity_pairing, mass_ratio_spectrum, mass_ratios)
from mmcantor.measure import clone_measure, level_cover_sums, measure_lower_bounds, measure_upper_bounds, solve, \
    transpose_residual
from mmcantor.oracle import char_poly_root_2x2, exhaustive_subdivision_sum, moran_solve
from mmcantor.spectral import build_matrix, is_irreducible, matrix_power, power_structure, predict_subdivision

from conftest import ACCEPTANCE_LINES, make

LOG23 = math.log(2) / math.log(3)
IRREDUCIBLE = [n for n in BUNDLED if n != "figure_reducible"]


def record(n: int, title: str, checks: dict):
    failed = [k for k, ok in checks.items() if not ok]
    line = f"criterion {n:>2} {'PASS' if not failed else 'FAIL'}  {title}"
    if failed:
        line += "  (failed: " + "; ".join(failed) + ")"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failed, line


def timed(fn, *args):
    t = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t


def fresh(s):
    # a structurally equal copy misses the dimension cache, so timings are honest
    return s.with_diameters([m.diameter for m in s.models])


def test_criterion_01_middle_third_dimension():
    res, secs = timed(solve_dimension, fresh(bundled("middle_third")))
    oracle = moran_solve([1 / 3, 1 / 3])
    record(1, f"middle-third d* = {res.dimension:.13f} (oracle {oracle:.13f}), {secs:.3f} s", {
        "agrees with moran_solve within 1e-9": abs(res.dimension - oracle) <= 1e-9,
        "equals ln2/ln3 within 1e-9": abs(res.dimension - LOG23) <= 1e-9,
        "runtime < 1 s": secs < 1,
    })


def test_criterion_02_figure_matrix_dimension():
    s = bundled("figure_matrix")
    res, secs = timed(solve_dimension, fresh(s))
    oracle = char_poly_root_2x2(s)
    lam0 = eigenvalue(s, 0)
    record(2, f"figure-matrix d* = {res.dimension:.12f} (oracle {oracle:.12f}), lambda_0 = {lam0:.12f}, "
              f"{secs:.3f} s", {
        "agrees with char_poly_root_2x2 within 1e-9": abs(res.dimension - oracle) <= 1e-9,
        "lambda_0 = (3+sqrt5)/2 within 1e-10": abs(lam0 - (3 + math.sqrt(5)) / 2) <= 1e-10,
        "runtime < 1 s": secs < 1,
    })


def _d_grid(name):
    s = bundled(name)
    if name == "figure_reducible":
        # no d* exists for a reducible pattern; use fixed exponents of the same spread
        return [0.25, 0.5, 1.0]
    d = solve_dimension(s).dimension
    return [d / 2, d, 1.0]


def test_criterion_03_subdivision_identity():
    checks = {}
    worst = 0.0
    for name in BUNDLED:
        s = bundled(name)
        coll = s.roots()
        exact_ok = float_ok = True
        for k in range(9):
            # rational mode: formal powers are exact for every d, and d = 1 is rational
            for d in (None, 1):
                exact_ok &= predict_subdivision(s, coll, d, k).components == \
                    exhaustive_subdivision_sum(s, coll, d, k).components
            for d in _d_grid(name):
                p = np.array(predict_subdivision(s, coll, d, k).components, dtype=float)
                e = np.array(exhaustive_subdivision_sum(s, coll, d, k).components, dtype=float)
                rel = float(np.max(np.abs(p - e) / np.abs(e)))
                worst = max(worst, rel)
                float_ok &= rel <= 1e-12
        checks[f"{name} exact"] = exact_ok
        checks[f"{name} float"] = float_ok
    record(3, f"subdivision identity, {len(BUNDLED)} structures, k <= 8, worst float rel {worst:.1e}", checks)


def test_criterion_04_matrix_power_consistency():
    checks = {}
    for name in BUNDLED:
        s = bundled(name)
        ok = True
        for k in range(1, 5):
            for d in (None, 0, 1, 2):
                lhs = build_matrix(power_structure(s, k), d).entries
                rhs = matrix_power(build_matrix(s, d), k).entries
                ok &= lhs.shape == rhs.shape and all(x == y for x, y in zip(lhs.ravel(), rhs.ravel()))
        checks[name] = ok
    record(4, "matrix of the k-th power structure equals M^k exactly, k <= 4", checks)


def test_criterion_05_transpose_fixed_point_and_additivity():
    checks = {}
    worst_fp = worst_add = 0.0
    for name in IRREDUCIBLE:
        s = bundled(name)
        sol = solve(s)
        fp = transpose_residual(sol)
        worst_fp = max(worst_fp, fp)
        add = 0.0
        for k in range(6):
            for a in enumerate_level(s, k):
                add = max(add, abs(clone_measure(sol, a) - math.fsum(clone_measure(sol, c) for c in children(s, a))))
        worst_add = max(worst_add, add)
        checks[f"{name} fixed point"] = fp <= 1e-10
        checks[f"{name} additivity"] = add <= 1e-12
    record(5, f"transpose fixed point (worst {worst_fp:.1e}), additivity to level 6 (worst {worst_add:.1e})", checks)


def test_criterion_06_irreducibility():
    ok_i, k = is_irreducible(build_matrix(bundled("figure_irreducible"), 0))
    ok_r, zeros = is_irreducible(build_matrix(bundled("figure_reducible"), 0))
    record(6, f"figure-irreducible witness k = {k}; figure-reducible zeros at {list(zeros)}", {
        "irreducible fixture classified true": ok_i is True and isinstance(k, int) and k >= 1,
        "reducible fixture classified false": ok_r is False,
        "zero pattern (3,1),(3,2)": tuple(zeros) == ((3, 1), (3, 2)),
    })


def test_criterion_07_monotone_curve():
    checks = {}
    for name in IRREDUCIBLE:
        s = bundled(name)
        d = solve_dimension(s).dimension
        lams = np.array([lam for _, lam in eigenvalue_curve(s, np.linspace(0, 2 * d, 100))])
        checks[name] = bool(np.all(np.diff(lams) < 0) and lams[0] > 1)
    # the reducible fixture has no d*; its spectral radius is checked on [0, 2]
    s = bundled("figure_reducible")
    rad = np.array([max(abs(np.linalg.eigvals(build_matrix(s, d).as_float()))) for d in np.linspace(0, 2, 100)])
    checks["figure_reducible (spectral radius on [0, 2])"] = bool(np.all(np.diff(rad) < 0) and rad[0] > 1)
    record(7, "eigenvalue curve strictly decreasing on a 100-point grid, lambda_0 > 1", checks)


def test_criterion_08_covering_constants():
    # an identity at every level needs d* to machine precision, not the default 1e-12
    sol = solve(bundled("middle_third"), tol=1e-15)
    sums = level_cover_sums(sol, 40).sum(axis=1)
    ub = measure_upper_bounds(sol)
    lb = measure_lower_bounds(sol, beta=3)
    record(8, f"middle-third K' = {ub.K_prime:.15f}, Q = {lb.Q:.15f}, L = {lb.global_bound:.15f}", {
        "level sums = 1 for k <= 40": bool(np.all(np.abs(sums - 1) <= 1e-12)),
        "K' = 1": abs(ub.K_prime - 1) <= 1e-12,
        "Q = 1": abs(lb.Q - 1) <= 1e-12,
        "L = 1/4": abs(lb.global_bound - 0.25) <= 1e-12,
    })


def test_criterion_09_geometry():
    e = EmbeddedRealization.from_structure(bundled("middle_third"))
    t = time.perf_counter()
    rep = separation_report(e, 12)
    box = box_counting_dimension(e, 10)
    secs = time.perf_counter() - t
    eps2 = 2 * rep.error_radius
    a1 = rep.clones[0]

    def within(iv, x, width):
        return iv[0] <= x <= iv[1] and iv[1] - iv[0] <= width

    record(9, f"middle-third alpha in [{rep.alpha_interval[0]:.9f}, {rep.alpha_interval[1]:.9f}], "
              f"beta in [{rep.beta_interval[0]:.6f}, {rep.beta_interval[1]:.6f}], box {box.estimate:.4f}, "
              f"{secs:.2f} s", {
        "sep(A1) = 1/3": within(a1.sep_interval, 1 / 3, eps2),
        "rel(A1) = 1": a1.rel_interval[0] <= 1 <= a1.rel_interval[1],
        "alpha = 1/3": within(rep.alpha_interval, 1 / 3, eps2),
        "beta = 3": rep.beta_interval[0] <= 3 <= rep.beta_interval[1],
        "box count within 0.05": abs(box.estimate - LOG23) <= 0.05,
        "runtime < 10 s": secs < 10,
    })


def test_criterion_10_clopen_invariant():
    mt = bundled("middle_third")
    fifths = make({1: [(1, Fraction(1, 5))] * 2}, "fifths")
    inv = clopen_invariant(mt, 1, 6, 3)
    self_cmp = compare_invariants(inv, inv)
    cross = compare_invariants(clopen_invariant(mt, 1, 6, 3), clopen_invariant(fifths, 1, 6, 3))
    fm = bundled("figure_matrix")
    models = compare_invariants(clopen_invariant(fm, 1, 6, 3), clopen_invariant(fm, 2, 6, 3))
    record(10, f"self {self_cmp.verdict.value}, vs fifths {cross.verdict.value}, "
               f"figure-matrix models {models.verdict.value} (alpha {models.alpha:.6f}, beta {models.beta:.6f})", {
        "middle-third vs itself consistent": self_cmp.verdict is Verdict.CONSISTENT_WITH_SIMILAR,
        "middle-third vs fifths incomparable": cross.verdict is Verdict.INCOMPARABLE,
        "dimensions pinned by moran_solve": abs(solve(mt).d - moran_solve([1 / 3] * 2)) <= 1e-9
        and abs(solve(fifths).d - moran_solve([1 / 5] * 2)) <= 1e-9,
        "figure-matrix models consistent at L=6, S=3": models.verdict is Verdict.CONSISTENT_WITH_SIMILAR,
    })


def test_criterion_11_mass_ratio():
    mt = bundled("middle_third")
    ident = identity_pairing(mt, 4)
    a1, a2 = (1 / 3) ** (1 / LOG23), (2 / 3) ** (1 / LOG23)
    skew = make({1: [(1, a1), (1, a2)]}, "skewed")
    words = [w for k in range(4) for w in enumerate_level(mt, k)]
    pairing = MassRatioMap.build(mt, skew, [(a.word, a.word) for a in words])
    res = additivity_residuals(pairing)
    worst = max(res.values())
    record(11, f"identity spectrum {mass_ratio_spectrum(ident)}, skewed pairing spectrum "
               f"{[round(q, 12) for q in mass_ratio_spectrum(pairing)]}, worst additivity residual {worst:.1e}", {
        "identity MR = 1": bool(np.all(np.abs(mass_ratios(ident) - 1) <= 1e-12)),
        "identity spectrum {1}": mass_ratio_spectrum(ident) == pytest.approx([1.0]),
        "additivity within 1e-12": worst <= 1e-12 and len(res) == 7,
    })
