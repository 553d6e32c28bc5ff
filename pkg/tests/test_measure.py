import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from mmcantor.clone_structure import BUNDLED, bundled, children, enumerate_level
from mmcantor.errors import AddressError, NotIrreducibleError
from mmcantor.measure import (clone_measure, level_cover_sums, measure_lower_bounds, measure_report,
                              measure_upper_bounds, relative_measures, solve, transpose_residual)
from mmcantor.oracle import exhaustive_subdivision_sum
from mmcantor.spectral import build_matrix, is_irreducible

from test_clone_structure import structures

IRREDUCIBLE = [n for n in BUNDLED if n != "figure_reducible"]


def test_relative_measure_examples(middle_third, rank1, figure_matrix):
    assert relative_measures(middle_third).tolist() == [1.0]
    assert np.allclose(relative_measures(rank1), [0.5, 0.5], atol=1e-13)
    v = relative_measures(figure_matrix)
    M = build_matrix(figure_matrix, solve(figure_matrix).d).as_float()
    # cross-check against plain power iteration on the transpose
    w = np.ones(2)
    for _ in range(2000):
        w = M.T @ w
        w /= w.sum()
    assert np.allclose(v, w, atol=1e-12)


@pytest.mark.parametrize("name", IRREDUCIBLE)
def test_transpose_fixed_point(name):
    sol = solve(bundled(name))
    assert transpose_residual(sol) <= 1e-10
    assert np.all(sol.relative_measures > 0)
    assert abs(sol.relative_measures.sum() - 1) < 1e-14


def test_clone_measure_examples(middle_third, figure_matrix):
    assert abs(clone_measure(middle_third, middle_third.address((1,))) - 0.5) < 1e-13
    for k in range(1, 7):
        for a in enumerate_level(middle_third, k):
            assert abs(clone_measure(middle_third, a) - 2.0 ** -k) < 1e-13
    v = relative_measures(figure_matrix)
    for j, root in enumerate(figure_matrix.roots()):
        assert clone_measure(figure_matrix, root) == pytest.approx(v[j], abs=1e-15)
    with pytest.raises(AddressError):
        from mmcantor.clone_structure import CloneAddress
        clone_measure(figure_matrix, CloneAddress((2, 1), 1, figure_matrix))


@pytest.mark.parametrize("name", IRREDUCIBLE)
def test_sigma_additivity_to_level_six(name):
    s = bundled(name)
    sol = solve(s)
    worst = 0.0
    for k in range(0, 6):
        for a in enumerate_level(s, k):
            kids = math.fsum(clone_measure(sol, c) for c in children(s, a))
            worst = max(worst, abs(clone_measure(sol, a) - kids))
    assert worst <= 1e-12


def test_upper_bounds_middle_third(middle_third):
    ub = measure_upper_bounds(middle_third)
    assert ub.bounds.tolist() == pytest.approx([1.0], abs=1e-12)
    assert abs(ub.K_prime - 1) < 1e-12
    assert np.allclose(level_cover_sums(middle_third, 20).sum(axis=1), 1, atol=1e-12)


def test_upper_bounds_rank1(rank1):
    ub = measure_upper_bounds(rank1)
    # M^inf = [[1/2, 1/2], [1/2, 1/2]] and both diameters are 1
    assert np.allclose(ub.bounds, [1.0, 1.0], atol=1e-12)
    assert abs(ub.K_prime - 2) < 1e-12


def test_upper_bounds_match_explicit_sums(figure_matrix):
    ub = measure_upper_bounds(figure_matrix)
    sol = solve(figure_matrix)
    # explicit enumeration pins the matrix-computed level sums (level 12 stays under the oracle cap)
    explicit = exhaustive_subdivision_sum(figure_matrix, figure_matrix.roots(), sol.d, 12)
    assert abs(sum(explicit.components) - level_cover_sums(sol, 12)[12].sum()) < 1e-12 * ub.K_prime
    assert abs(ub.level_sums[ub.converged_level] - ub.K_prime) < 1e-8
    # gaps shrink until they reach the rounding floor set by the float d*
    gaps = np.abs(ub.level_sums - ub.K_prime)
    live = gaps > 1e-10 * ub.K_prime
    assert np.all(np.diff(gaps[live]) < 0)


@pytest.mark.parametrize("name", IRREDUCIBLE)
def test_upper_bounds_follow_measure_direction(name):
    sol = solve(bundled(name))
    ub = measure_upper_bounds(sol)
    assert np.allclose(ub.bounds / ub.bounds.sum(), sol.relative_measures, atol=1e-8)


def test_lower_bound_examples(middle_third, rank1):
    lb = measure_lower_bounds(middle_third, beta=3)
    assert abs(lb.global_bound - 0.25) < 1e-12 and abs(lb.Q - 1) < 1e-12
    assert lb.flag == "all covers"
    lb = measure_lower_bounds(middle_third)
    assert abs(lb.global_bound - 0.5) < 1e-12 and lb.flag == "clone-covers only"
    lb = measure_lower_bounds(rank1)
    assert abs(lb.Q - 1) < 1e-12
    assert np.allclose(lb.bounds, [0.5, 0.5], atol=1e-12)
    with pytest.raises(ValueError):
        measure_lower_bounds(middle_third, beta=0.5)


@pytest.mark.parametrize("name", IRREDUCIBLE)
def test_bound_sandwich(name):
    rep = measure_report(bundled(name), beta=2.0)
    assert np.all(rep.lower_bounds <= rep.upper_bounds)
    assert sum(rep.lower_bounds) <= rep.constants["K_prime"]


def test_reducible_is_rejected():
    with pytest.raises(NotIrreducibleError):
        relative_measures(bundled("figure_reducible"))


@given(structures())
def test_sigma_additivity_random(s):
    if not is_irreducible(build_matrix(s, 0)).strongly_connected:
        return
    sol = solve(s)
    for a in enumerate_level(s, 2):
        kids = math.fsum(clone_measure(sol, c) for c in children(s, a))
        assert abs(clone_measure(sol, a) - kids) <= 1e-12


def test_report_json(middle_third):
    data = measure_report(middle_third, beta=3).to_json()
    assert data["lower_bound_scope"] == "all covers"
    assert data["lower_bounds"] == pytest.approx([0.25])
