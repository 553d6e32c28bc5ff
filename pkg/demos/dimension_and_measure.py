"""Walk through the spectral pipeline on the bundled two-model set.

Run with ``python3 demos/dimension_and_measure.py``.
"""

import numpy as np

from mmcantor import (bundled, build_matrix, char_poly_root_2x2, eigenvalue_curve, is_irreducible, measure_report,
                      predict_subdivision, solve_dimension, d_quantity, subdivide)


def main():
    s = bundled("figure_matrix")
    print(f"{s.name}: {s.n} models, {s.m} clones")

    # counting matrix and the symbolic d-matrix
    print("\nM at d = 0 (clone counts):")
    print(build_matrix(s, 0).table())
    print("\nM_d with d left symbolic:")
    print(build_matrix(s, None).table())
    info = is_irreducible(build_matrix(s, 0))
    print(f"\nirreducible: {info.irreducible} (M^{info.witness_k} is positive)")

    # the dimension is where the Frobenius eigenvalue crosses 1
    res = solve_dimension(s)
    print(f"\nd* = {res.dimension:.12f}, independent 2x2 check {char_poly_root_2x2(s):.12f}")
    for d, lam in eigenvalue_curve(s, np.linspace(0, 2 * res.dimension, 5)):
        print(f"  lambda({d:.4f}) = {lam:.6f}")

    # subdividing a collection k times acts on its d-quantity by M_d^k
    k, d = 5, res.dimension
    enumerated = d_quantity(s, subdivide(s, s.roots(), k), d).as_array()
    predicted = predict_subdivision(s, s.roots(), d, k).as_array()
    print(f"\nlevel-{k} d-sums: enumerated {enumerated}, matrix {predicted}")

    rep = measure_report(s)
    print("\nmeasure at d*:")
    for j, (v, lo, hi) in enumerate(zip(rep.relative_measures, rep.lower_bounds, rep.upper_bounds), 1):
        print(f"  model {j}: relative {v:.6f}, bounds [{lo:.6f}, {hi:.6f}] ({rep.cover})")


if __name__ == "__main__":
    main()
