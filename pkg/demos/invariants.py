"""Clopen invariants and mass ratios.

Run with ``python3 demos/invariants.py``.
"""

import math

from mmcantor import (MassRatioMap, bundled, clopen_invariant, compare_invariants, mass_ratio_spectrum,
                      mass_ratios)
from mmcantor.clone_structure import CloneMapSpec, CloneStructure, Model


def skewed_copy():
    # one model, two clones carrying measures 1/3 and 2/3 at the middle-third dimension
    d = math.log(2) / math.log(3)
    a1, a2 = (1 / 3) ** (1 / d), (2 / 3) ** (1 / d)
    return CloneStructure((Model(1, 1),), (CloneMapSpec(1, 1, 1, a1), CloneMapSpec(2, 1, 1, a2)), "skewed")


def main():
    fm = bundled("figure_matrix")
    a, b = clopen_invariant(fm, 1, 6, 3), clopen_invariant(fm, 2, 6, 3)
    print(f"figure_matrix truncated invariants: {len(a)} and {len(b)} values")
    cmp = compare_invariants(a, b)
    print(f"  model 1 vs model 2: {cmp.verdict.value}, alpha {cmp.alpha:.6f}, beta {cmp.beta:.6f}")

    mt = bundled("middle_third")
    for other in ("middle_third_coarse", "fifths"):
        s = bundled(other)
        res = compare_invariants(clopen_invariant(mt, 1, 5, 2), clopen_invariant(s, 1, 5, 2))
        print(f"  middle_third vs {other}: {res.verdict.value} {res.detail}")

    words = [(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]
    m = MassRatioMap.build(mt, skewed_copy(), [(w, w) for w in words])
    print("\nmass ratios of the word-preserving map onto the skewed copy:")
    for (u, _), r in zip(m.pairs, mass_ratios(m)):
        print(f"  {u.word}: {r:.6f}")
    print(f"parent/child quotients: {mass_ratio_spectrum(m)}")


if __name__ == "__main__":
    main()
