"""Planar similarities and model regions.

A similarity is stored as ``z -> a * F(z) + b`` on complex numbers, where
``a = scale * exp(i * rotation)``, ``b`` is the translation and ``F`` is
either the identity or complex conjugation (reflection in the x-axis,
applied first).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PlanarSimilarity:
    scale: float
    rotation: float = 0.0
    reflect: bool = False
    translation: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"similarity scale must be positive, got {self.scale}")
        object.__setattr__(self, "translation", (float(self.translation[0]), float(self.translation[1])))

    @property
    def linear(self) -> complex:
        return self.scale * cmath.exp(1j * self.rotation)

    @property
    def offset(self) -> complex:
        return complex(*self.translation)

    @classmethod
    def from_complex(cls, a: complex, b: complex, reflect: bool = False) -> "PlanarSimilarity":
        return cls(abs(a), math.atan2(a.imag, a.real), reflect, (b.real, b.imag))

    def apply(self, points):
        """Map an ``(N, 2)`` array (or a single point) through the similarity."""
        pts = np.asarray(points, dtype=float)
        z = pts[..., 0] + 1j * pts[..., 1]
        w = apply_complex(self.linear, self.offset, self.reflect, z)
        return np.stack([w.real, w.imag], axis=-1)

    def compose(self, inner: "PlanarSimilarity") -> "PlanarSimilarity":
        """``self o inner``."""
        a, b, r = compose_complex(self.linear, self.offset, self.reflect,
                                  inner.linear, inner.offset, inner.reflect)
        return PlanarSimilarity.from_complex(a, b, r)

    def inverse(self) -> "PlanarSimilarity":
        # w = a F(z) + b  =>  z = F((w - b) / a) = F(1/a) F(w) - F(b/a)
        a, b = self.linear, self.offset
        if self.reflect:
            return PlanarSimilarity.from_complex((1 / a).conjugate(), -(b / a).conjugate(), True)
        return PlanarSimilarity.from_complex(1 / a, -b / a, False)

    @classmethod
    def from_dict(cls, data: dict, default_scale=None) -> "PlanarSimilarity":
        scale = data.get("scale", default_scale)
        if scale is None:
            raise ValueError("placement needs a 'scale'")
        t = data.get("translation", [0.0, 0.0])
        if len(t) != 2:
            raise ValueError("placement 'translation' must be [x, y]")
        return cls(float(scale), float(data.get("rotation", 0.0)), bool(data.get("reflect", False)),
                   (float(t[0]), float(t[1])))

    def to_dict(self) -> dict:
        return {"scale": self.scale, "rotation": self.rotation, "reflect": self.reflect,
                "translation": list(self.translation)}


def apply_complex(a, b, reflect, z):
    if np.ndim(reflect) == 0:
        return a * (np.conj(z) if reflect else z) + b
    return a * np.where(reflect, np.conj(z), z) + b


def compose_complex(a1, b1, r1, a2, b2, r2):
    """Coefficients of ``(a1, b1, r1) o (a2, b2, r2)``; works elementwise on arrays."""
    if np.ndim(r1) == 0:
        if r1:
            return a1 * np.conj(a2), a1 * np.conj(b2) + b1, np.logical_xor(r1, r2)
        return a1 * a2, a1 * b2 + b1, np.logical_xor(r1, r2)
    a = np.where(r1, a1 * np.conj(a2), a1 * a2)
    b = np.where(r1, a1 * np.conj(b2), a1 * b2) + b1
    return a, b, np.logical_xor(r1, r2)


@dataclass(frozen=True)
class Region:
    """Bounding disc of a model, with an optional outline used only for drawing."""

    center: tuple[float, float]
    radius: float
    polygon: tuple[tuple[float, float], ...] | None = field(default=None)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"region radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.polygon is not None:
            object.__setattr__(self, "polygon", tuple((float(x), float(y)) for x, y in self.polygon))

    @property
    def center_complex(self) -> complex:
        return complex(*self.center)

    @classmethod
    def from_dict(cls, data: dict) -> "Region":
        poly = data.get("polygon")
        return cls(tuple(data["center"]), float(data["radius"]), tuple(map(tuple, poly)) if poly else None)

    def to_dict(self) -> dict:
        out = {"center": list(self.center), "radius": self.radius}
        if self.polygon is not None:
            out["polygon"] = [list(p) for p in self.polygon]
        return out
