"""JSON documents for Floer data, cobordisms and their extras.

Every grading is written as an exact ``"n/d"`` string.  Parsing is strict:
unknown or missing fields, wrong types and dangling references raise
:class:`DocumentError` carrying a JSON path (or line and column for syntax
errors).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .floer import Cobordism, CriticalManifold, FloerData, ModuliOperator, Tower
from .graded import GradedComplex
from .models import Model
from .pin2 import Involution

__all__ = [
    "SCHEMA_VERSION",
    "COBORDISM_SCHEMA_VERSION",
    "DocumentError",
    "FloerDocument",
    "emit",
    "parse",
    "emit_cobordism",
    "parse_cobordism",
    "document_from_model",
    "format_grading",
    "parse_grading",
]

SCHEMA_VERSION = "pin2floer.floer/1"
COBORDISM_SCHEMA_VERSION = "pin2floer.cobordism/1"
_FRACTION = re.compile(r"^(-?\d+)/(\d+)$")


class DocumentError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def format_grading(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_grading(text, path: str, denominator: Optional[int] = None) -> Fraction:
    if not isinstance(text, str):
        raise DocumentError(path, f"expected an \"n/d\" string, got {text!r}")
    m = _FRACTION.match(text)
    if not m or int(m.group(2)) == 0:
        raise DocumentError(path, f"malformed grading {text!r}")
    value = Fraction(int(m.group(1)), int(m.group(2)))
    if denominator is not None and denominator % value.denominator:
        raise DocumentError(path, f"grading {text} is not a multiple of 1/{denominator}")
    return value


@dataclass(eq=False)
class FloerDocument:
    """Parsed contents of a data document."""

    data: FloerData
    involution: Optional[Involution] = None
    q: Optional[Cobordism] = None
    v: Optional[Cobordism] = None
    filtration: Optional[dict] = None
    window: Optional[tuple] = None
    schema_version: str = SCHEMA_VERSION

    def to_model(self) -> Model:
        return Model(self.data, self.involution, self.q, self.v, self.filtration, self.window)

    def __eq__(self, other) -> bool:
        return isinstance(other, FloerDocument) and emit(self) == emit(other)


def document_from_model(model: Model) -> FloerDocument:
    return FloerDocument(model.data, model.involution, model.q, model.v, model.filtration,
                         model.window)


# ---- emit ------------------------------------------------------------------

def _emit_manifold(m: CriticalManifold) -> dict:
    lc = m.local_complex
    return {
        "id": m.id,
        "kind": m.kind,
        "base_grading": format_grading(m.base_grading),
        "cells": [[x, int(lc.space.degree_of(x))] for x in lc.space.labels()],
        "boundary": {x: sorted(ys) for x, ys in lc.differential.images.items()},
        "tower": None if m.tower is None else
        {"id": m.tower.id, "index": m.tower.index, "sign": m.tower.sign},
    }


def _emit_operator(op: ModuliOperator) -> dict:
    return {
        "id": op.id,
        "class": op.cls,
        "source": op.source,
        "target": op.target,
        "shift": format_grading(op.shift),
        "entries": {x: sorted(ys) for x, ys in op.entries.items()},
    }


def _emit_cob(c: Cobordism) -> dict:
    return {
        "name": c.name,
        "degree": format_grading(c.degree),
        "metadata": dict(c.metadata),
        "operators": [_emit_operator(op) for op in c.operators],
    }


def _emit_doc(doc: FloerDocument) -> dict:
    d = doc.data
    inv = None
    if doc.involution is not None:
        inv = {
            "manifolds": dict(doc.involution.manifold_map),
            "cells": [[a[0], a[1], b[0], b[1]] for a, b in doc.involution.cell_map.items()],
        }
    module = None
    if doc.q is not None or doc.v is not None:
        if doc.q is None or doc.v is None:
            raise ValueError("module operators need both Q and V")
        module = {"Q": _emit_cob(doc.q), "V": _emit_cob(doc.v)}
    return {
        "schema_version": SCHEMA_VERSION,
        "name": d.name,
        "grading_denominator": d.grading_denominator,
        "metadata": dict(d.metadata),
        "window": None if doc.window is None else [format_grading(w) for w in doc.window],
        "manifolds": [_emit_manifold(m) for m in d.manifolds],
        "operators": [_emit_operator(op) for op in d.operators],
        "involution": inv,
        "module": module,
        "filtration": None if doc.filtration is None else dict(doc.filtration),
    }


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def emit(doc) -> str:
    """Canonical JSON text for a FloerDocument, a Model or bare FloerData."""
    if isinstance(doc, Model):
        doc = document_from_model(doc)
    elif isinstance(doc, FloerData):
        doc = FloerDocument(doc)
    return _dumps(_emit_doc(doc))


def emit_cobordism(cob: Cobordism, source: Optional[FloerDocument] = None,
                   target: Optional[FloerDocument] = None) -> str:
    out = {"schema_version": COBORDISM_SCHEMA_VERSION, **_emit_cob(cob),
           "source": None if source is None else _emit_doc(source),
           "target": None if target is None else _emit_doc(target)}
    return _dumps(out)


# ---- parse -----------------------------------------------------------------

def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None


def _obj(x, path: str, required: tuple, optional: tuple = ()) -> dict:
    if not isinstance(x, dict):
        raise DocumentError(path, "expected an object")
    for k in x:
        if k not in required and k not in optional:
            raise DocumentError(f"{path}.{k}", "unknown field")
    for k in required:
        if k not in x:
            raise DocumentError(f"{path}.{k}", "missing field")
    return x


def _typed(x, kind, path: str, what: str):
    if kind is int and isinstance(x, bool):
        raise DocumentError(path, f"expected {what}")
    if not isinstance(x, kind):
        raise DocumentError(path, f"expected {what}")
    return x


def _str_list(x, path):
    _typed(x, list, path, "a list")
    for i, y in enumerate(x):
        _typed(y, str, f"{path}[{i}]", "a string")
    return x


def _metadata(x, path):
    _typed(x, dict, path, "an object")
    for k, v in x.items():
        if isinstance(v, float) or not isinstance(v, (int, str, bool, type(None))):
            raise DocumentError(f"{path}.{k}", "metadata values must be integers, strings, "
                                               "booleans or null")
    return dict(x)


def _parse_manifold(x, path, den) -> CriticalManifold:
    _obj(x, path, ("id", "kind", "base_grading", "cells", "boundary", "tower"))
    mid = _typed(x["id"], str, f"{path}.id", "a string")
    base = parse_grading(x["base_grading"], f"{path}.base_grading", den)
    cells = []
    _typed(x["cells"], list, f"{path}.cells", "a list")
    for i, c in enumerate(x["cells"]):
        p = f"{path}.cells[{i}]"
        if not (isinstance(c, list) and len(c) == 2 and isinstance(c[0], str)
                and isinstance(c[1], int) and not isinstance(c[1], bool)):
            raise DocumentError(p, "expected [label, degree]")
        cells.append((c[0], c[1]))
    labels = {c[0] for c in cells}
    if len(labels) != len(cells):
        raise DocumentError(f"{path}.cells", "duplicate cell label")
    bd = {}
    _typed(x["boundary"], dict, f"{path}.boundary", "an object")
    for k, ys in x["boundary"].items():
        p = f"{path}.boundary.{k}"
        if k not in labels:
            raise DocumentError(p, f"unknown cell {k!r}")
        for y in _str_list(ys, p):
            if y not in labels:
                raise DocumentError(p, f"unknown cell {y!r}")
        bd[k] = frozenset(ys)
    tower = None
    if x["tower"] is not None:
        t = _obj(x["tower"], f"{path}.tower", ("id", "index", "sign"))
        tower = Tower(_typed(t["id"], str, f"{path}.tower.id", "a string"),
                      _typed(t["index"], int, f"{path}.tower.index", "an integer"),
                      _typed(t["sign"], int, f"{path}.tower.sign", "an integer"))
    try:
        lc = GradedComplex.build(cells, bd)
        return CriticalManifold(mid, _typed(x["kind"], str, f"{path}.kind", "a string"),
                                base, lc, tower)
    except ValueError as exc:
        raise DocumentError(path, str(exc)) from None


def _parse_operator(x, path, den, src_cells, tgt_cells) -> ModuliOperator:
    _obj(x, path, ("id", "class", "source", "target", "shift", "entries"))
    src = _typed(x["source"], str, f"{path}.source", "a string")
    tgt = _typed(x["target"], str, f"{path}.target", "a string")
    if src not in src_cells:
        raise DocumentError(f"{path}.source", f"unknown manifold {src!r}")
    if tgt not in tgt_cells:
        raise DocumentError(f"{path}.target", f"unknown manifold {tgt!r}")
    entries = {}
    _typed(x["entries"], dict, f"{path}.entries", "an object")
    for k, ys in x["entries"].items():
        p = f"{path}.entries.{k}"
        if k not in src_cells[src]:
            raise DocumentError(p, f"unknown source cell {k!r}")
        for y in _str_list(ys, p):
            if y not in tgt_cells[tgt]:
                raise DocumentError(p, f"unknown target cell {y!r}")
        entries[k] = frozenset(ys)
    try:
        return ModuliOperator(_typed(x["id"], str, f"{path}.id", "a string"),
                              _typed(x["class"], str, f"{path}.class", "a string"), src, tgt,
                              parse_grading(x["shift"], f"{path}.shift", den), entries)
    except ValueError as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(path, str(exc)) from None


def _cells_of(data: FloerData) -> dict:
    return {m.id: set(m.cells()) for m in data.manifolds}


def _parse_cob(x, path, den, src_cells, tgt_cells, extra=()) -> Cobordism:
    _obj(x, path, ("name", "degree", "metadata", "operators"), extra)
    _typed(x["operators"], list, f"{path}.operators", "a list")
    ops = [_parse_operator(o, f"{path}.operators[{i}]", den, src_cells, tgt_cells)
           for i, o in enumerate(x["operators"])]
    return Cobordism(tuple(ops), parse_grading(x["degree"], f"{path}.degree", den),
                     _metadata(x["metadata"], f"{path}.metadata"),
                     _typed(x["name"], str, f"{path}.name", "a string"))


def _check_version(x, want):
    if not isinstance(x, dict) or "schema_version" not in x:
        raise DocumentError("$.schema_version", "missing field")
    if x["schema_version"] != want:
        raise DocumentError("$.schema_version",
                            f"unsupported version {x['schema_version']!r}, expected {want!r}")


def _parse_doc(x, path="$") -> FloerDocument:
    _check_version(x, SCHEMA_VERSION) if path == "$" else None
    _obj(x, path, ("schema_version", "name", "grading_denominator", "metadata", "window",
                   "manifolds", "operators", "involution", "module", "filtration"))
    if x["schema_version"] != SCHEMA_VERSION:
        raise DocumentError(f"{path}.schema_version", f"unsupported version {x['schema_version']!r}")
    den = _typed(x["grading_denominator"], int, f"{path}.grading_denominator", "an integer")
    if den < 1:
        raise DocumentError(f"{path}.grading_denominator", "must be positive")
    _typed(x["manifolds"], list, f"{path}.manifolds", "a list")
    mans = [_parse_manifold(m, f"{path}.manifolds[{i}]", den) for i, m in enumerate(x["manifolds"])]
    ids = [m.id for m in mans]
    if len(set(ids)) != len(ids):
        raise DocumentError(f"{path}.manifolds", "duplicate manifold id")
    cells = {m.id: set(m.cells()) for m in mans}
    _typed(x["operators"], list, f"{path}.operators", "a list")
    ops = [_parse_operator(o, f"{path}.operators[{i}]", den, cells, cells)
           for i, o in enumerate(x["operators"])]
    if len({op.id for op in ops}) != len(ops):
        raise DocumentError(f"{path}.operators", "duplicate operator id")
    data = FloerData(tuple(mans), tuple(ops), den, _metadata(x["metadata"], f"{path}.metadata"),
                     _typed(x["name"], str, f"{path}.name", "a string"))
    window = None
    if x["window"] is not None:
        w = x["window"]
        if not (isinstance(w, list) and len(w) == 2):
            raise DocumentError(f"{path}.window", "expected [lo, hi]")
        window = (parse_grading(w[0], f"{path}.window[0]", den),
                  parse_grading(w[1], f"{path}.window[1]", den))
        if window[0] > window[1]:
            raise DocumentError(f"{path}.window", "lo exceeds hi")
    inv = None
    if x["involution"] is not None:
        p = f"{path}.involution"
        iv = _obj(x["involution"], p, ("manifolds", "cells"))
        mm = _typed(iv["manifolds"], dict, f"{p}.manifolds", "an object")
        for k, v in mm.items():
            if k not in cells or v not in cells:
                raise DocumentError(f"{p}.manifolds.{k}", "unknown manifold")
        cm = {}
        _typed(iv["cells"], list, f"{p}.cells", "a list")
        for i, row in enumerate(iv["cells"]):
            q = f"{p}.cells[{i}]"
            if not (isinstance(row, list) and len(row) == 4 and all(isinstance(r, str) for r in row)):
                raise DocumentError(q, "expected [manifold, cell, manifold, cell]")
            for mid, c in ((row[0], row[1]), (row[2], row[3])):
                if mid not in cells or c not in cells[mid]:
                    raise DocumentError(q, f"unknown cell {mid}:{c}")
            cm[(row[0], row[1])] = (row[2], row[3])
        inv = Involution(mm, cm)
    q = v = None
    if x["module"] is not None:
        p = f"{path}.module"
        mo = _obj(x["module"], p, ("Q", "V"))
        q = _parse_cob(mo["Q"], f"{p}.Q", den, cells, cells)
        v = _parse_cob(mo["V"], f"{p}.V", den, cells, cells)
    filt = None
    if x["filtration"] is not None:
        p = f"{path}.filtration"
        filt = {}
        for k, lev in _typed(x["filtration"], dict, p, "an object").items():
            if k not in cells:
                raise DocumentError(f"{p}.{k}", "unknown manifold")
            filt[k] = _typed(lev, int, f"{p}.{k}", "an integer")
        missing = [m for m in ids if m not in filt]
        if missing:
            raise DocumentError(p, f"no level for manifold {missing[0]!r}")
    return FloerDocument(data, inv, q, v, filt, window)


def parse(text: str) -> FloerDocument:
    """Parse a data document; raises DocumentError with a path on any problem."""
    return _parse_doc(_load(text))


def parse_cobordism(text: str, source: Optional[FloerData] = None,
                    target: Optional[FloerData] = None):
    """Parse a cobordism document into ``(cobordism, source_doc, target_doc)``.

    Embedded source/target documents are used unless ``source``/``target``
    data are supplied; operators are resolved against whichever is used.
    """
    x = _load(text)
    _check_version(x, COBORDISM_SCHEMA_VERSION)
    _obj(x, "$", ("schema_version", "name", "degree", "metadata", "operators", "source", "target"))
    src_doc = None if x["source"] is None else _parse_doc(x["source"], "$.source")
    tgt_doc = None if x["target"] is None else _parse_doc(x["target"], "$.target")
    src = source if source is not None else (src_doc.data if src_doc else None)
    tgt = target if target is not None else (tgt_doc.data if tgt_doc else None)
    if src is None or tgt is None:
        raise DocumentError("$", "source and target data are required")
    den = src.grading_denominator
    cob = _parse_cob({k: x[k] for k in ("name", "degree", "metadata", "operators")}, "$", den,
                     _cells_of(src), _cells_of(tgt))
    return cob, src_doc, tgt_doc
