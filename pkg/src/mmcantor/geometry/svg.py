"""SVG drawings of the first few construction levels."""

from __future__ import annotations

import numpy as np

from ..similarity import apply_complex
from .realization import EmbeddedRealization, clone_discs, require_embedding

MAX_RENDER_LEVELS = 10
_PALETTE = ("#1f3a5f", "#2e6f95", "#3f9c8f", "#7bb661", "#d0b84a", "#e08a3c", "#c8553d", "#8e3b5f",
            "#5b4b8a", "#3b6e8e", "#222222")


def _fmt(x: float) -> str:
    out = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if out in ("-0", "") else out


def render_svg(e: EmbeddedRealization, levels: int, width: int = 800) -> str:
    """One ``<g>`` layer per level with the image of every model outline.

    Models with a polygon outline are drawn as polygons, the rest as their
    bounding discs.  The y axis points up.
    """
    if not 0 <= levels <= MAX_RENDER_LEVELS:
        raise ValueError(f"levels must lie in 0..{MAX_RENDER_LEVELS}")
    require_embedding(e)
    xs = np.concatenate([e.centers.real - e.radii, e.centers.real + e.radii])
    ys = np.concatenate([e.centers.imag - e.radii, e.centers.imag + e.radii])
    x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
    pad = 0.05 * max(x1 - x0, y1 - y0)
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    height = int(round(width * (y1 - y0) / (x1 - x0)))
    base_stroke = 0.004 * max(x1 - x0, y1 - y0)

    polys = [None if r.polygon is None else np.array([complex(x, y) for x, y in r.polygon]) for r in e.regions]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(x1 - x0)} {_fmt(y1 - y0)}">',
        f"<title>{e.structure.name or 'Cantor set'}: levels 0 to {levels}</title>",
        '<g transform="scale(1,-1)">',
    ]
    for lvl in range(levels + 1):
        _, _, types, z, rad, (a, b, r) = clone_discs(e, lvl)
        colour = _PALETTE[min(lvl, len(_PALETTE) - 1)]
        fill = colour if lvl == levels else "none"
        sw = _fmt(base_stroke * 0.75 ** lvl)
        out.append(f'<g id="level-{lvl}" fill="{fill}" fill-opacity="0.35" stroke="{colour}" stroke-width="{sw}">')
        for k in range(len(types)):
            poly = polys[types[k] - 1]
            if poly is None:
                out.append(f'<circle cx="{_fmt(z[k].real)}" cy="{_fmt(z[k].imag)}" r="{_fmt(rad[k])}"/>')
            else:
                w = apply_complex(a[k], b[k], r[k], poly)
                pts = " ".join(f"{_fmt(p.real)},{_fmt(p.imag)}" for p in w)
                out.append(f'<polygon points="{pts}"/>')
        out.append("</g>")
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)
