import math
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from mmcantor.clone_structure import CloneMapSpec, CloneStructure, Model, bundled

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# lines printed by the acceptance tests, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make(scales_by_model, name=None, diameters=None):
    """Structure from ``{container: [(target, scale), ...]}``."""
    models = tuple(Model(j, Fraction(1) if diameters is None else diameters[j - 1])
                   for j in sorted(scales_by_model))
    clones, k = [], 0
    for j in sorted(scales_by_model):
        for target, a in scales_by_model[j]:
            k += 1
            clones.append(CloneMapSpec(k, j, target, a))
    return CloneStructure(models, tuple(clones), name)


@pytest.fixture(scope="session")
def middle_third():
    return bundled("middle_third")


@pytest.fixture(scope="session")
def figure_matrix():
    return bundled("figure_matrix")


@pytest.fixture(scope="session")
def rank1():
    return bundled("symmetric_rank1")


def triadic_measure_set():
    """Three clones of equal scale with the middle-third dimension: clone measures 3^-k."""
    a = 3 ** (-math.log2(3))
    return make({1: [(1, a)] * 3}, "triadic")


def lifted_middle_third():
    """The middle-third set split over two identical models."""
    third = Fraction(1, 3)
    return make({1: [(1, third), (2, third)], 2: [(1, third), (2, third)]}, "lifted")


def periodic_pair():
    """Strongly connected but periodic: every clone of model 1 is of type 2 and vice versa."""
    return make({1: [(2, Fraction(1, 3)), (2, Fraction(1, 4))], 2: [(1, Fraction(1, 3)), (1, Fraction(1, 5))]},
                "periodic")
