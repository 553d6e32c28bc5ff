"""Planar realizations: separation constants, box counting and SVG renders.

Run with ``python3 demos/geometry.py [outdir]``; SVG files go to ``outdir``
(default ``demos/out``).
"""

import sys
from pathlib import Path

from mmcantor import bundled, solve_dimension
from mmcantor.geometry import EmbeddedRealization, box_counting_dimension, render_svg, separation_report


def main(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    for name, level in [("middle_third", 12), ("figure_matrix", 12), ("planar_multi", 6)]:
        s = bundled(name)
        e = EmbeddedRealization.from_structure(s)
        rep = separation_report(e, level, report_level=1)
        box = box_counting_dimension(e, level)
        print(f"{name}: alpha in [{rep.alpha_interval[0]:.6f}, {rep.alpha_interval[1]:.6f}], "
              f"beta in [{rep.beta_interval[0]:.4f}, {rep.beta_interval[1]:.4f}], xi >= {rep.xi_bound:.4f}")
        print(f"  box counting {box.estimate:.4f} vs d* {solve_dimension(s).dimension:.4f}")
        path = outdir / f"{name}.svg"
        path.write_text(render_svg(e, 4))
        print(f"  wrote {path}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent / "out")
