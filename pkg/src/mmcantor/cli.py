"""Command-line entry point.

Every command prints a human-readable report, or JSON with ``--json``.
Exit status: 0 success, 1 invalid input (parse, schema or structure
violations), 2 computational failure.  Errors are also written to stderr
as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import clone_structure as cs
from .dimension import eigenvalue_curve, solve_dimension
from .errors import AddressError, CapExceededError, ConvergenceError, NotIrreducibleError, StructureError
from .geometry import (EmbeddedRealization, box_counting_dimension, render_svg, separation_report,
                       validate_embedding)
from .invariants import (MassRatioMap, additivity_residuals, clopen_invariant, compare_invariants, mass_ratio_spectrum,
                         mass_ratios)
from .measure import measure_report
from .numeric import PowerSum, number_to_json
from .oracle import char_poly_root_2x2, exhaustive_subdivision_sum, moran_solve
from .spectral import SpectralMatrix, build_matrix, frobenius, is_irreducible, predict_subdivision

COMMANDS = ("validate", "matrix", "dim", "measure", "subdivide", "separation", "boxdim", "render",
            "invariant", "compare", "massratio", "oracle")


class InputError(Exception):
    """Malformed command line or input file (exit status 1)."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    output: str | None = None
    as_json: bool = False
    exact: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        tol = self.options.get("tol")
        if tol is not None and not tol > 0:
            raise InputError("--tol must be positive")


# input helpers

def load(path: str) -> cs.CloneStructure:
    """A structure file, or the name of a bundled structure."""
    p = Path(path)
    if not p.exists() and path in cs.BUNDLED:
        return cs.bundled(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}",
                         {"file": path, "line": exc.lineno, "column": exc.colno}) from exc
    try:
        return cs.structure_from_dict(data, name=data.get("name", p.stem) if isinstance(data, dict) else p.stem)
    except StructureError as exc:
        raise StructureError(f"{path}: {exc}") from exc


def parse_d(text: str | None, s: cs.CloneStructure | None = None):
    """``symbolic``, ``star`` (the dimension), or a number (``1``, ``1/2``, ``0.63``)."""
    if text is None:
        return Fraction(0)
    if text == "symbolic":
        return None
    if text == "star":
        return solve_dimension(s).dimension
    try:
        if "." in text or "e" in text.lower():
            return float(text)
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot read exponent {text!r}") from exc


def parse_address(s: cs.CloneStructure, text: str) -> cs.CloneAddress:
    """``model:w1.w2.w3``; ``model:`` is the model itself."""
    root, _, word = text.partition(":")
    try:
        ids = [int(w) for w in word.split(".") if w]
        return s.address(ids, int(root))
    except ValueError as exc:
        if isinstance(exc, AddressError):
            raise
        raise InputError(f"cannot read address {text!r}; expected model:id.id.id") from exc


def _embedding(s: cs.CloneStructure) -> EmbeddedRealization:
    return EmbeddedRealization.from_structure(s)


def _num(x):
    if isinstance(x, PowerSum):
        return repr(x)
    if isinstance(x, Fraction):
        return number_to_json(x)
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _text(x) -> str:
    return repr(x) if isinstance(x, PowerSum) else str(x)


# commands; each returns (text, json-able object)

def cmd_validate(cfg: RunConfig, s: cs.CloneStructure):
    report = cs.validate_structure(s)
    out = report.to_json()
    lines = [f"{s.name or 'structure'}: {s.n} models, {s.m} clones"]
    lines += [f"  violation: {v}" for v in report.violations]
    emb_ok = True
    if report.ok and all(m.region is not None for m in s.models) and all(c.placement is not None for c in s.clones):
        er = validate_embedding(_embedding(s))
        emb_ok = er.ok
        out["embedding"] = {"valid": er.ok, "violations": er.violations}
        lines += [f"  embedding violation: {v}" for v in er.violations]
    else:
        out["embedding"] = None
    ok = report.ok and emb_ok
    lines.append("valid" if ok else "INVALID")
    return "\n".join(lines), out, 0 if ok else 1


def cmd_matrix(cfg: RunConfig, s: cs.CloneStructure):
    d = parse_d(cfg.options.get("d"), s)
    if cfg.exact and d is not None and not (isinstance(d, Fraction) and d.denominator == 1):
        raise InputError("--exact needs an integral d or d=symbolic")
    M = build_matrix(s, d)
    if not cfg.exact and M.exact and not M.symbolic:
        M = SpectralMatrix(M.d, M.as_float())
    irr = is_irreducible(build_matrix(s, 0))
    out = {"structure": s.name, "matrix": M.to_json(),
           "irreducibility": {"irreducible": irr.irreducible, "witness_k": irr.witness_k,
                              "strongly_connected": irr.strongly_connected, "period": irr.period,
                              "zero_positions": [list(p) for p in irr.zero_positions]}}
    lines = [f"M_d at d = {'symbolic' if d is None else d}", M.table()]
    if irr.irreducible:
        lines.append(f"irreducible (all entries of M^{irr.witness_k} positive)")
    else:
        lines.append(f"not irreducible; persistent zeros at {list(irr.zero_positions)}")
    if not M.symbolic and irr.strongly_connected:
        fd = frobenius(M)
        out["frobenius"] = {"eigenvalue": fd.eigenvalue, "right_eigenvector": fd.right_eigenvector.tolist(),
                            "left_eigenvector": fd.left_eigenvector.tolist(), "residual": fd.residual}
        lines.append(f"Frobenius eigenvalue {fd.eigenvalue:.15g}")
        lines.append("left eigenvector  " + " ".join(f"{x:.12g}" for x in fd.left_eigenvector))
        lines.append("right eigenvector " + " ".join(f"{x:.12g}" for x in fd.right_eigenvector))
    return "\n".join(lines), out, 0


def _parse_curve(text: str):
    try:
        a, b, n = text.split(":")
        d0, d1, steps = float(a), float(b), int(n)
    except ValueError as exc:
        raise InputError(f"--curve expects d0:d1:steps, got {text!r}") from exc
    if steps < 2 or not d1 > d0 or d0 < 0:
        raise InputError("--curve needs 0 <= d0 < d1 and at least 2 steps")
    return np.linspace(d0, d1, steps)


def cmd_dim(cfg: RunConfig, s: cs.CloneStructure):
    res = solve_dimension(s, cfg.options.get("tol") or 1e-12)
    out = {"structure": s.name, **res.to_json()}
    lines = [f"d* = {res.dimension:.13g}",
             f"bracket = [{res.bracket[0]:.15g}, {res.bracket[1]:.15g}]",
             f"lambda(d*) = {res.eigenvalue_at_solution:.15g}"]
    if cfg.options.get("curve"):
        curve = eigenvalue_curve(s, _parse_curve(cfg.options["curve"]))
        out["curve"] = [[d, lam] for d, lam in curve]
        csv = "d,lambda\n" + "".join(f"{d:.12g},{lam:.15g}\n" for d, lam in curve)
        return csv.rstrip("\n"), out, 0
    return "\n".join(lines), out, 0


def cmd_measure(cfg: RunConfig, s: cs.CloneStructure):
    beta = cfg.options.get("beta")
    rep = measure_report(s, beta)
    out = {"structure": s.name, **rep.to_json()}
    lines = [f"d* = {rep.dimension:.13g}",
             f"{'model':>6}{'relative':>18}{'lower':>18}{'upper':>18}"]
    for j in range(len(rep.relative_measures)):
        lines.append(f"{j + 1:>6}{rep.relative_measures[j]:>18.12g}{rep.lower_bounds[j]:>18.12g}"
                     f"{rep.upper_bounds[j]:>18.12g}")
    c = rep.constants
    lines.append(f"K' = {c['K_prime']:.15g}  Q = {c['Q']:.15g}  beta = {c['beta']}  "
                 f"(lower bound valid for {rep.cover})")
    return "\n".join(lines), out, 0


def cmd_subdivide(cfg: RunConfig, s: cs.CloneStructure):
    k = cfg.options.get("k", 1)
    d = parse_d(cfg.options.get("d") or "1", s)
    if cfg.exact and d is not None and not (isinstance(d, Fraction) and d.denominator == 1):
        raise InputError("--exact needs an integral d or d=symbolic")
    if not cfg.exact and d is not None:
        d = float(d)
    addrs = [parse_address(s, a) for a in cfg.options.get("addr") or []] or s.roots()
    enum_q = cs.d_quantity(s, cs.subdivide(s, addrs, k), d)
    pred = predict_subdivision(s, addrs, d, k)
    if cfg.exact or d is None:
        agree = enum_q.components == pred.components
    else:
        agree = all(abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1e-300)
                    for a, b in zip(enum_q.components, pred.components))
    out = {"k": k, "d": "symbolic" if d is None else _num(d),
           "collection": [a.to_json() for a in addrs],
           "enumerated": [_num(x) for x in enum_q.components],
           "matrix_prediction": [_num(x) for x in pred.components], "agree": agree}
    lines = [f"v(J^({k})) at d = {out['d']}"]
    lines += [f"  type {i + 1}: {_text(x)}" for i, x in enumerate(enum_q.components)]
    lines.append("matrix prediction " + ("agrees" if agree else "DISAGREES"))
    return "\n".join(lines), out, 0 if agree else 2


def cmd_separation(cfg: RunConfig, s: cs.CloneStructure):
    level = cfg.options.get("level") or 10
    rep = separation_report(_embedding(s), level, cfg.options.get("report_level") or 1)
    return rep.table(), rep.to_json(), 0


def cmd_boxdim(cfg: RunConfig, s: cs.CloneStructure):
    level = cfg.options.get("level") or 10
    scales = cfg.options.get("scales")
    if scales:
        try:
            scales = [float(x) for x in scales.split(",")]
        except ValueError as exc:
            raise InputError("--scales expects comma-separated numbers") from exc
    res = box_counting_dimension(_embedding(s), level, scales)
    lines = [f"box-counting estimate {res.estimate:.6f}" + ("  (degenerate)" if res.degenerate else ""),
             f"{'scale':>14}{'boxes':>10}"]
    lines += [f"{sc:>14.6g}{n:>10d}" for sc, n in zip(res.scales, res.counts)]
    return "\n".join(lines), res.to_json(), 0


def cmd_render(cfg: RunConfig, s: cs.CloneStructure):
    levels = cfg.options.get("levels")
    if levels is None:
        levels = cfg.options.get("level") or 3
    svg = render_svg(_embedding(s), levels)
    return svg, {"svg": svg, "levels": levels}, 0


def cmd_invariant(cfg: RunConfig, s: cs.CloneStructure):
    inv = clopen_invariant(s, cfg.options.get("model") or 1, cfg.options.get("L") or 4, cfg.options.get("S") or 2)
    return json.dumps(inv.values.tolist()), inv.to_json(), 0


def cmd_compare(cfg: RunConfig, a: cs.CloneStructure, b: cs.CloneStructure):
    L, S = cfg.options.get("L") or 4, cfg.options.get("S") or 2
    A = clopen_invariant(a, cfg.options.get("model") or 1, L, S)
    B = clopen_invariant(b, cfg.options.get("model_b") or 1, L, S)
    res = compare_invariants(A, B, cfg.options.get("tol") or 1e-9)
    out = {"A": a.name, "B": b.name, "L": L, "S": S, **res.to_json()}
    line = res.verdict.value
    if res.alpha is not None or res.beta is not None:
        line += f"  alpha={res.alpha}  beta={res.beta}"
    return line + "\n" + json.dumps(out, indent=2), out, 0


def cmd_massratio(cfg: RunConfig, src: cs.CloneStructure, tgt: cs.CloneStructure, pairs_path: str):
    try:
        pairs = json.loads(Path(pairs_path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {pairs_path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{pairs_path}:{exc.lineno}:{exc.colno}: {exc.msg}",
                         {"file": pairs_path, "line": exc.lineno, "column": exc.colno}) from exc
    if not isinstance(pairs, list):
        raise InputError(f"{pairs_path}: expected a JSON list of [source, target] pairs")
    m = MassRatioMap.from_json(src, tgt, pairs)
    mr = mass_ratios(m)
    out = {"pairs": [{"source": u.to_json(), "target": v.to_json(), "mass_ratio": float(r)}
                     for (u, v), r in zip(m.pairs, mr)]}
    lines = [f"{'source':<20}{'target':<20}{'MR':>16}"]
    for (u, v), r in zip(m.pairs, mr):
        lines.append(f"{u.root}:{'.'.join(map(str, u.word)):<18}{v.root}:{'.'.join(map(str, v.word)):<18}{r:>16.12g}")
    try:
        out["spectrum"] = mass_ratio_spectrum(m)
        lines.append("parent/child quotients: " + ", ".join(f"{q:.12g}" for q in out["spectrum"]))
    except ValueError:
        out["spectrum"] = []
    res = additivity_residuals(m)
    out["max_additivity_residual"] = max(res.values()) if res else None
    if res:
        lines.append(f"max additivity residual {out['max_additivity_residual']:.3g}")
    return "\n".join(lines), out, 0


def cmd_oracle(cfg: RunConfig):
    which = cfg.options.get("oracle")
    tol = cfg.options.get("tol") or 1e-13
    if which == "moran":
        try:
            scales = [float(Fraction(x)) for x in cfg.inputs]
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError("moran expects scales like 1/3 0.25") from exc
        value = moran_solve(scales, tol)
        out = {"quantity": "dimension", "value": value, "method": "scalar bisection on sum(a^d) = 1",
               "tolerance": tol}
        return f"{value:.13g}", out, 0
    if not cfg.inputs:
        raise InputError(f"oracle {which} needs a structure file")
    s = load(cfg.inputs[0])
    if which == "charpoly":
        value = char_poly_root_2x2(s, tol)
        out = {"quantity": "dimension", "value": value,
               "method": "bisection on the sign of p(1) = 1 - tr M_d + det M_d", "tolerance": tol}
        return f"{value:.13g}", out, 0
    k = cfg.options.get("k", 1)
    d = parse_d(cfg.options.get("d") or "1", s)
    if not cfg.exact and d is not None:
        d = float(d)
    addrs = [parse_address(s, a) for a in cfg.options.get("addr") or []] or s.roots()
    q = exhaustive_subdivision_sum(s, addrs, d, k)
    out = {"quantity": "d-quantity", "value": [_num(x) for x in q.components],
           "method": "explicit enumeration of the clone tree", "tolerance": 0 if cfg.exact else 1e-12}
    return "\n".join(f"type {i + 1}: {_text(x)}" for i, x in enumerate(q.components)), out, 0


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command; returns the exit status."""
    stdout = stdout or sys.stdout
    c = cfg.command
    if c == "oracle":
        text, obj, status = cmd_oracle(cfg)
    elif c == "compare":
        if len(cfg.inputs) != 2:
            raise InputError("compare needs two structure files")
        text, obj, status = cmd_compare(cfg, load(cfg.inputs[0]), load(cfg.inputs[1]))
    elif c == "massratio":
        if len(cfg.inputs) != 3:
            raise InputError("massratio needs SOURCE TARGET PAIRS.json")
        text, obj, status = cmd_massratio(cfg, load(cfg.inputs[0]), load(cfg.inputs[1]), cfg.inputs[2])
    else:
        if len(cfg.inputs) != 1:
            raise InputError(f"{c} needs exactly one structure file")
        s = load(cfg.inputs[0])
        text, obj, status = globals()[f"cmd_{c}"](cfg, s)
    payload = json.dumps(obj, indent=2) if cfg.as_json else text
    if c == "render" and not cfg.as_json:
        payload = text.rstrip("\n")
    if cfg.output:
        Path(cfg.output).write_text(payload + "\n")
    else:
        print(payload, file=stdout)
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mmcantor", description="Dimension, measure and invariants of multi-model Cantor sets.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("inputs", nargs="*", help="structure files (or bundled names); for oracle: moran|charpoly|subdivision first")
    p.add_argument("--tol", type=float)
    p.add_argument("--level", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--report-level", type=int, dest="report_level")
    p.add_argument("--L", type=int, dest="L")
    p.add_argument("--S", type=int, dest="S")
    p.add_argument("--model", type=int)
    p.add_argument("--model-b", type=int, dest="model_b")
    p.add_argument("--d", help="exponent: number, p/q, 'star' or 'symbolic'")
    p.add_argument("--k", type=int)
    p.add_argument("--addr", action="append", help="clone address model:id.id (repeatable)")
    p.add_argument("--beta", type=float)
    p.add_argument("--scales")
    p.add_argument("--curve", help="d0:d1:steps, CSV output")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true", dest="as_json")
    p.add_argument("--exact", action="store_true")
    return p


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "inputs", "out", "as_json", "exact")
            and v is not None}
    inputs = list(ns.inputs)
    if ns.command == "oracle":
        if not inputs or inputs[0] not in ("moran", "charpoly", "subdivision"):
            raise InputError("oracle needs one of: moran, charpoly, subdivision")
        opts["oracle"] = inputs.pop(0)
    for key in ("level", "levels", "L", "S", "k"):
        if key in opts and opts[key] < 0:
            raise InputError(f"--{key} must be non-negative")
    return RunConfig(ns.command, inputs, ns.out, ns.as_json, ns.exact, opts)


def _fail(kind: str, exc: BaseException, status: int, **extra) -> int:
    err = {"error": kind, "message": str(exc), "exit_status": status, **extra}
    print(json.dumps(err), file=sys.stderr)
    return status


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run(config_from_args(argv))
    except InputError as exc:
        return _fail("input", exc, 1, **({"position": exc.position} if exc.position else {}))
    except (StructureError, jsonschema.ValidationError) as exc:
        return _fail("structure", exc, 1)
    except CapExceededError as exc:
        return _fail("cap_exceeded", exc, 2, estimate=exc.estimate)
    except NotIrreducibleError as exc:
        return _fail("not_irreducible", exc, 2)
    except ConvergenceError as exc:
        return _fail("convergence", exc, 2)
    except (ValueError, TypeError, ZeroDivisionError, ArithmeticError) as exc:
        return _fail("computation", exc, 2)


if __name__ == "__main__":
    sys.exit(main())
