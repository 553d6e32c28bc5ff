"""Clone structures of multi-model Cantor sets.

A structure has ``n`` models ``A_1..A_n`` and ``m`` level-1 clones.  Clone
``i`` sits inside model ``container(i)`` and is mapped onto model
``target(i)`` (its *type*) by a similarity that expands by
``1 / inverse_scale(i)``.

Clones at deeper levels are named by words ``[i1, ..., ik]`` read from the
outside in: ``i1`` is a level-1 clone of model ``container(i1)``, ``i2`` is
a level-1 clone of model ``target(i1)`` pulled back into ``i1`` and so on.
A word is valid when ``container(i_{t+1}) == target(i_t)`` for every
consecutive pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema
import numpy as np

from .errors import AddressError, StructureError
from .numeric import Number, PowerSum, integral_exponent, is_exact, number_to_json, parse_number, power
from .similarity import PlanarSimilarity, Region


@dataclass(frozen=True)
class Model:
    id: int
    diameter: Number = Fraction(1)
    label: str | None = None
    region: Region | None = None


@dataclass(frozen=True)
class CloneMapSpec:
    id: int
    container: int
    target: int
    inverse_scale: Number
    placement: PlanarSimilarity | None = None


@dataclass(frozen=True)
class CloneStructure:
    models: tuple[Model, ...]
    clones: tuple[CloneMapSpec, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "clones", tuple(self.clones))

    @property
    def n(self) -> int:
        return len(self.models)

    @property
    def m(self) -> int:
        return len(self.clones)

    @cached_property
    def _clone_by_id(self) -> dict[int, CloneMapSpec]:
        return {c.id: c for c in self.clones}

    @cached_property
    def _model_by_id(self) -> dict[int, Model]:
        return {mdl.id: mdl for mdl in self.models}

    @cached_property
    def _inside(self) -> dict[int, tuple[CloneMapSpec, ...]]:
        out: dict[int, list[CloneMapSpec]] = {mdl.id: [] for mdl in self.models}
        for c in sorted(self.clones, key=lambda c: c.id):
            out.setdefault(c.container, []).append(c)
        return {k: tuple(v) for k, v in out.items()}

    def clone(self, i: int) -> CloneMapSpec:
        try:
            return self._clone_by_id[i]
        except KeyError:
            raise AddressError(f"unknown clone id {i}") from None

    def model(self, j: int) -> Model:
        try:
            return self._model_by_id[j]
        except KeyError:
            raise StructureError(f"unknown model id {j}") from None

    def clones_in(self, j: int) -> tuple[CloneMapSpec, ...]:
        """Level-1 clones contained in model ``j``, ordered by id."""
        return self._inside.get(j, ())

    @property
    def is_exact(self) -> bool:
        return all(is_exact(c.inverse_scale) for c in self.clones) and all(
            is_exact(mdl.diameter) for mdl in self.models)

    def counts(self) -> np.ndarray:
        """``R[i-1, j-1]`` = number of type-i level-1 clones inside model j."""
        R = np.zeros((self.n, self.n), dtype=int)
        for c in self.clones:
            R[c.target - 1, c.container - 1] += 1
        return R

    def address(self, word: Iterable[int] = (), root: int | None = None, check: bool = True) -> "CloneAddress":
        word = tuple(int(i) for i in word)
        for i in word:
            self.clone(i)
        if word:
            first = self.clone(word[0]).container
            if root is not None and root != first:
                raise AddressError(f"word starts in model {first}, not in model {root}")
            root = first
        elif root is None:
            if self.n != 1:
                raise AddressError("the empty word needs a model id")
            root = self.models[0].id
        else:
            self.model(root)
        addr = CloneAddress(word, root, self)
        if check and not _chains(self, word):
            raise AddressError(f"word {list(word)} breaks the container/target chaining rule")
        return addr

    def roots(self) -> list["CloneAddress"]:
        """The models themselves, as level-0 clones."""
        return [self.address((), mdl.id) for mdl in self.models]

    def with_diameters(self, diameters: Sequence[Number]) -> "CloneStructure":
        models = tuple(Model(mdl.id, d, mdl.label, mdl.region) for mdl, d in zip(self.models, diameters))
        return CloneStructure(models, self.clones, self.name)


@dataclass(frozen=True)
class CloneAddress:
    word: tuple[int, ...]
    root: int
    structure: CloneStructure = field(compare=False, repr=False, hash=False)

    @property
    def level(self) -> int:
        return len(self.word)

    @property
    def containing_type(self) -> int | None:
        if not self.word:
            return None
        return self.structure.clone(self.word[0]).container

    @property
    def type(self) -> int:
        if not self.word:
            return self.root
        return self.structure.clone(self.word[-1]).target

    @property
    def cumulative_inverse_scale(self) -> Number:
        out: Number = Fraction(1)
        for i in self.word:
            out = out * self.structure.clone(i).inverse_scale
        return out

    @property
    def diameter(self) -> Number:
        return self.cumulative_inverse_scale * self.structure.model(self.type).diameter

    def child(self, i: int) -> "CloneAddress":
        return CloneAddress(self.word + (i,), self.root, self.structure)

    def parent(self) -> "CloneAddress":
        if not self.word:
            raise AddressError("a model has no parent clone")
        return CloneAddress(self.word[:-1], self.root, self.structure)

    def contains(self, other: "CloneAddress") -> bool:
        """True when ``other`` lies inside this clone (or is it)."""
        return self.root == other.root and other.word[:len(self.word)] == self.word

    def to_json(self):
        return {"model": self.root, "word": list(self.word)}


@dataclass
class ValidationReport:
    violations: list[str]
    counts: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"valid": self.ok, "violations": list(self.violations),
                "counts": None if self.counts is None else self.counts.tolist()}


@dataclass(frozen=True)
class DQuantity:
    """Per-type sums of ``diameter**d`` over a clone collection."""

    exponent: object
    components: tuple

    def __add__(self, other: "DQuantity") -> "DQuantity":
        if self.exponent != other.exponent:
            raise ValueError("cannot add d-quantities taken at different exponents")
        return DQuantity(self.exponent, tuple(a + b for a, b in zip(self.components, other.components)))

    def total(self):
        return sum(self.components[1:], self.components[0])

    def at(self, d) -> np.ndarray:
        """Float values; a symbolic quantity is evaluated at ``d``."""
        vals = [c.at(d) if isinstance(c, PowerSum) else c for c in self.components]
        return np.array([float(v) for v in vals])

    def as_array(self) -> np.ndarray:
        if self.exponent is None:
            raise TypeError("symbolic d-quantity; use .at(d)")
        return np.array([float(c) for c in self.components])


def _chains(s: CloneStructure, word: Sequence[int]) -> bool:
    return all(s.clone(b).container == s.clone(a).target for a, b in zip(word, word[1:]))


def validate_structure(s: CloneStructure) -> ValidationReport:
    v: list[str] = []
    if s.n < 1:
        v.append("structure has no models")
    model_ids = [mdl.id for mdl in s.models]
    if sorted(model_ids) != list(range(1, s.n + 1)):
        v.append(f"model ids must be distinct and exactly 1..{s.n}, got {model_ids}")
    clone_ids = [c.id for c in s.clones]
    if sorted(clone_ids) != list(range(1, s.m + 1)):
        v.append(f"clone ids must be distinct and exactly 1..{s.m}, got {clone_ids}")
    for mdl in s.models:
        if not mdl.diameter > 0:
            v.append(f"model {mdl.id} has non-positive diameter {mdl.diameter}")
    known = set(model_ids)
    for c in s.clones:
        if c.container not in known:
            v.append(f"clone {c.id} has unknown container model {c.container}")
        if c.target not in known:
            v.append(f"clone {c.id} has unknown target model {c.target}")
        if not 0 < c.inverse_scale < 1:
            v.append(f"clone {c.id} inverse scale {c.inverse_scale} is not in (0, 1)")
    for mdl in s.models:
        k = len(s.clones_in(mdl.id))
        if k < 2:
            v.append(f"model {mdl.id} has < 2 clones ({k})")
    counts = None
    if all(c.container in known and c.target in known for c in s.clones) and sorted(model_ids) == list(range(1, s.n + 1)):
        counts = s.counts()
    return ValidationReport(v, counts)


def require_valid(s: CloneStructure) -> None:
    report = validate_structure(s)
    if not report.ok:
        raise StructureError("invalid clone structure: " + "; ".join(report.violations))


def check_address(s: CloneStructure, addr: CloneAddress) -> bool:
    """Chaining test for ``addr``; unknown clone ids raise AddressError."""
    for i in addr.word:
        s.clone(i)
    if addr.word and s.clone(addr.word[0]).container != addr.root:
        return False
    return _chains(s, addr.word)


def _require_address(s: CloneStructure, addr: CloneAddress) -> None:
    if not check_address(s, addr):
        raise AddressError(f"invalid address {addr.to_json()}")


def children(s: CloneStructure, addr: CloneAddress) -> list[CloneAddress]:
    _require_address(s, addr)
    return [CloneAddress(addr.word + (c.id,), addr.root, s) for c in s.clones_in(addr.type)]


def _sort_key(a: CloneAddress):
    return (a.root, a.word)


def require_disjoint(coll: Sequence[CloneAddress]) -> None:
    """Raise when two addresses of ``coll`` are nested (one word prefixes the other)."""
    ordered = sorted(coll, key=_sort_key)
    # if a prefixes c then every word sorted between them also has prefix a
    for a, b in zip(ordered, ordered[1:]):
        if a.contains(b):
            raise StructureError(f"collection is not disjoint: {a.to_json()} contains {b.to_json()}")


def subdivide(s: CloneStructure, coll: Sequence[CloneAddress], k: int) -> list[CloneAddress]:
    if k < 0:
        raise ValueError("k must be non-negative")
    for a in coll:
        _require_address(s, a)
    require_disjoint(coll)
    out = list(coll)
    for _ in range(k):
        out = [ch for a in out for ch in children(s, a)]
    return out


def enumerate_level(s: CloneStructure, k: int, roots: Sequence[CloneAddress] | None = None) -> list[CloneAddress]:
    """All level-k clones below ``roots`` (default: every model), in lexicographic order."""
    return subdivide(s, s.roots() if roots is None else roots, k)


def d_quantity(s: CloneStructure, coll: Iterable[CloneAddress], d) -> DQuantity:
    """``d is None`` gives exact formal power sums (rational inputs only)."""
    if d is not None and not d > 0 and d != 0:
        raise ValueError("d must be non-negative")
    exact = d is None or (integral_exponent(d) is not None and s.is_exact)
    terms: list[list] = [[] for _ in range(s.n)]
    for a in coll:
        _require_address(s, a)
        diam = a.diameter
        if d is None and not is_exact(diam):
            raise TypeError("symbolic d-quantities need rational scales and diameters")
        terms[a.type - 1].append(power(diam, d))
    if d is None:
        comps = [sum(t, PowerSum()) for t in terms]
    elif exact:
        comps = [sum(t, Fraction(0)) for t in terms]
    else:
        comps = [math.fsum(float(x) for x in t) for t in terms]
    return DQuantity(d, tuple(comps))


# ---------------------------------------------------------------- JSON files

_NUMBER = {
    "oneOf": [
        {"type": "number"},
        {"type": "object", "required": ["num", "den"], "additionalProperties": False,
         "properties": {"num": {"type": "integer"}, "den": {"type": "integer"}}},
    ]
}
_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

STRUCTURE_SCHEMA = {
    "type": "object",
    "required": ["models", "clones"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "models": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object", "required": ["id"], "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer"},
                    "diameter": _NUMBER,
                    "label": {"type": "string"},
                    "region": {
                        "type": "object", "required": ["center", "radius"], "additionalProperties": False,
                        "properties": {"center": _POINT, "radius": {"type": "number"},
                                       "polygon": {"type": "array", "items": _POINT}},
                    },
                },
            },
        },
        "clones": {
            "type": "array",
            "items": {
                "type": "object", "required": ["id", "container", "target", "inverse_scale"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer"},
                    "container": {"type": "integer"},
                    "target": {"type": "integer"},
                    "inverse_scale": _NUMBER,
                    "placement": {
                        "type": "object", "additionalProperties": False,
                        "properties": {"scale": _NUMBER, "rotation": {"type": "number"},
                                       "reflect": {"type": "boolean"}, "translation": _POINT},
                    },
                },
            },
        },
    },
}


def structure_from_dict(data: dict, name: str | None = None) -> CloneStructure:
    """Build a structure from the shared JSON layout; schema errors raise StructureError."""
    errors = sorted(jsonschema.Draft7Validator(STRUCTURE_SCHEMA).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = ["/" + "/".join(str(p) for p in e.absolute_path) + ": " + e.message for e in errors]
        raise StructureError("structure file does not match schema: " + "; ".join(msgs))
    models = []
    for md in data["models"]:
        region = Region.from_dict(md["region"]) if "region" in md else None
        models.append(Model(md["id"], parse_number(md.get("diameter", 1)), md.get("label"), region))
    clones = []
    for cd in data["clones"]:
        scale = parse_number(cd["inverse_scale"])
        placement = None
        if "placement" in cd:
            pd = dict(cd["placement"])
            if "scale" in pd:
                pd["scale"] = float(parse_number(pd["scale"]))
            placement = PlanarSimilarity.from_dict(pd, default_scale=float(scale))
        clones.append(CloneMapSpec(cd["id"], cd["container"], cd["target"], scale, placement))
    return CloneStructure(tuple(models), tuple(clones), name or data.get("name"))


def structure_to_dict(s: CloneStructure) -> dict:
    out: dict = {}
    if s.name:
        out["name"] = s.name
    out["models"] = []
    for mdl in s.models:
        md = {"id": mdl.id, "diameter": number_to_json(mdl.diameter)}
        if mdl.label:
            md["label"] = mdl.label
        if mdl.region is not None:
            md["region"] = mdl.region.to_dict()
        out["models"].append(md)
    out["clones"] = []
    for c in s.clones:
        cd = {"id": c.id, "container": c.container, "target": c.target,
              "inverse_scale": number_to_json(c.inverse_scale)}
        if c.placement is not None:
            cd["placement"] = c.placement.to_dict()
        out["clones"].append(cd)
    return out


def load_structure(path) -> CloneStructure:
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    return structure_from_dict(data, name=data.get("name", path.stem))


BUNDLED = ("middle_third", "figure_matrix", "figure_irreducible", "figure_reducible",
           "planar_multi", "symmetric_rank1", "middle_third_coarse", "fifths")


def bundled(name: str) -> CloneStructure:
    """One of the structures shipped in ``mmcantor/data``."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled structure {name!r}; choose from {BUNDLED}")
    text = resources.files("mmcantor").joinpath("data", f"{name}.json").read_text()
    data = json.loads(text)
    return structure_from_dict(data, name=data.get("name", name))
