import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmcantor.clone_structure import BUNDLED, bundled
from mmcantor.dimension import eigenvalue, eigenvalue_curve, solve_dimension
from mmcantor.errors import NotIrreducibleError
from mmcantor.oracle import char_poly_root_2x2, moran_solve
from mmcantor.spectral import is_irreducible, build_matrix, power_structure

from conftest import lifted_middle_third, make, periodic_pair

LOG23 = math.log(2) / math.log(3)
IRREDUCIBLE = [n for n in BUNDLED if n != "figure_reducible"]


def test_middle_third(middle_third):
    res = solve_dimension(middle_third)
    assert abs(res.dimension - LOG23) < 1e-11
    lo, hi = res.bracket
    assert lo <= res.dimension <= hi and hi - lo <= 1e-12
    assert eigenvalue(middle_third, lo) > 1 > eigenvalue(middle_third, hi)


def test_four_quarters():
    s = make({1: [(1, Fraction(1, 4))] * 4})
    assert abs(solve_dimension(s).dimension - 1) < 1e-11


def test_figure_matrix_pinned_by_char_poly(figure_matrix):
    d = solve_dimension(figure_matrix).dimension
    assert abs(d - char_poly_root_2x2(figure_matrix)) < 1e-9
    assert abs(d - 0.600) < 0.01


def test_reducible_rejected():
    with pytest.raises(NotIrreducibleError):
        solve_dimension(bundled("figure_reducible"))


def test_periodic_structure_solved():
    s = periodic_pair()
    d = solve_dimension(s).dimension
    # lambda^2 = (3^-d + 4^-d)(3^-d + 5^-d) = 1 along the two-step cycle
    assert abs((3 ** -d + 4 ** -d) * (3 ** -d + 5 ** -d) - 1) < 1e-10


def test_curve_examples(middle_third, figure_matrix):
    curve = eigenvalue_curve(middle_third, [0, LOG23, 1])
    assert [lam for _, lam in curve] == pytest.approx([2, 1, 2 / 3], abs=1e-12)
    assert eigenvalue_curve(figure_matrix, [0])[0][1] == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-12)


@pytest.mark.parametrize("name", IRREDUCIBLE)
def test_curve_strictly_decreasing_and_single_crossing(name):
    s = bundled(name)
    d = solve_dimension(s).dimension
    lams = np.array([lam for _, lam in eigenvalue_curve(s, np.linspace(0, 2 * d, 100))])
    assert np.all(np.diff(lams) < 0)
    assert lams[0] > 1
    assert np.count_nonzero(np.diff(np.sign(lams - 1))) == 1


@pytest.mark.parametrize("name", IRREDUCIBLE)
@pytest.mark.parametrize("k", [2, 3])
def test_power_structure_same_dimension(name, k):
    s = bundled(name)
    assert abs(solve_dimension(power_structure(s, k)).dimension - solve_dimension(s).dimension) <= 2e-12 + 1e-13


def test_lifted_middle_third():
    assert abs(solve_dimension(lifted_middle_third()).dimension - LOG23) < 1e-11
    assert abs(char_poly_root_2x2(lifted_middle_third()) - LOG23) < 1e-11


@given(st.lists(st.fractions(Fraction(1, 50), Fraction(9, 10)), min_size=2, max_size=6))
def test_single_model_matches_moran(scales):
    s = make({1: [(1, a) for a in scales]})
    d = solve_dimension(s).dimension
    assert abs(math.fsum(float(a) ** d for a in scales) - 1) < 1e-10
    assert abs(d - moran_solve([float(a) for a in scales])) < 1e-10


def test_runtime_small(figure_matrix):
    t = time.perf_counter()
    solve_dimension(figure_matrix.with_diameters([Fraction(1, 2), Fraction(1)]))
    assert time.perf_counter() - t < 1.0


def test_result_is_cached(figure_matrix):
    assert solve_dimension(figure_matrix) is solve_dimension(figure_matrix)
    with pytest.raises(ValueError):
        solve_dimension(figure_matrix).eigenvector_left[0] = 2.0
