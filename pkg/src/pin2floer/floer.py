"""Floer data, block-differential assembly, pair-sequence and cobordism maps.

Generators of the assembled complexes are pairs ``(manifold_id, cell)``.
Each generator has a total grading ``gr = base_grading + local degree``.
The check and hat complexes place generators at ``gr``; the bar complex
places boundary-unstable generators at ``gr - 1``.

Operator classes and the sums they contribute (``D_xy`` goes from kind x to
kind y, composition applies the right factor first)::

    check = D_oo + D_os + D_ss + (D_uo + D_us) D_su
    hat   = D_oo + D_uo + D_uu + D_su (D_os + D_us)
    bar   = D_ss + D_su + D_us + D_uu

The bar-class operators ``bar_ss``, ``bar_su``, ``bar_us``, ``bar_uu`` supply
``D_ss``, ``D_su``, ``D_us``, ``D_uu``; local differentials of the critical
manifolds are added to ``D_oo``, ``D_ss`` and ``D_uu``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .graded import (
    GradedComplex,
    GradedMap,
    GradedVectorSpace,
    ValidationReport,
    as_degree,
    in_window,
    sparse_add,
    sparse_compose,
    verify_chain_map,
    verify_square_zero,
)

__all__ = [
    "IRREDUCIBLE",
    "STABLE",
    "UNSTABLE",
    "CLASSES",
    "FLAVORS",
    "Tower",
    "CriticalManifold",
    "ModuliOperator",
    "FloerData",
    "Cobordism",
    "CobordismMaps",
    "DegreeError",
    "required_shift",
    "assemble",
    "assemble_check",
    "assemble_hat",
    "assemble_bar",
    "assemble_ijp",
    "component_identities",
    "validate",
    "assemble_cobordism",
    "compose_cobordisms",
    "identity_cobordism",
    "reducible_tower_grading",
    "modified_grading",
    "absolute_grading",
    "iota_characteristic",
    "relative_grading_sum",
]

IRREDUCIBLE = "irreducible"
STABLE = "boundary_stable"
UNSTABLE = "boundary_unstable"
KINDS = (IRREDUCIBLE, STABLE, UNSTABLE)
_SHORT = {IRREDUCIBLE: "o", STABLE: "s", UNSTABLE: "u"}

CLASSES = {
    "oo": (IRREDUCIBLE, IRREDUCIBLE),
    "os": (IRREDUCIBLE, STABLE),
    "uo": (UNSTABLE, IRREDUCIBLE),
    "us": (UNSTABLE, STABLE),
    "bar_ss": (STABLE, STABLE),
    "bar_su": (STABLE, UNSTABLE),
    "bar_us": (UNSTABLE, STABLE),
    "bar_uu": (UNSTABLE, UNSTABLE),
}
# total-grading shift of a class minus the degree of the map it builds
_GR_OFFSET = {"bar_su": 1, "bar_us": -1}
FLAVORS = ("check", "hat", "bar")


def required_shift(cls: str, degree) -> Fraction:
    """Total grading shift an operator of class ``cls`` needs for a map of ``degree``."""
    return as_degree(degree) + _GR_OFFSET.get(cls, 0)


class DegreeError(ValueError):
    """An operator whose grading shift disagrees with its class."""

    def __init__(self, op_id: str, message: str):
        super().__init__(f"operator {op_id}: {message}")
        self.op_id = op_id


@dataclass(frozen=True)
class Tower:
    """Position of a reducible manifold: tower id, eigenvalue index, eigenvalue sign."""

    id: str
    index: int
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("tower sign must be +1 or -1")


@dataclass(frozen=True)
class CriticalManifold:
    """A critical submanifold with its local cell complex (complete, integer graded).

    The square of the local differential is checked by ``validate`` rather
    than here, so corrupted data can still be built and diagnosed.
    """

    id: str
    kind: str
    base_grading: Fraction
    local_complex: GradedComplex
    tower: Optional[Tower] = None

    def __post_init__(self):
        object.__setattr__(self, "base_grading", as_degree(self.base_grading))
        if self.kind not in KINDS:
            raise ValueError(f"manifold {self.id}: unknown kind {self.kind!r}")
        if self.kind == IRREDUCIBLE and self.tower is not None:
            raise ValueError(f"manifold {self.id}: irreducible manifolds carry no tower data")
        if self.kind != IRREDUCIBLE and self.tower is None:
            raise ValueError(f"manifold {self.id}: reducible manifolds need tower data")
        lc = self.local_complex
        if lc.window is not None:
            raise ValueError(f"manifold {self.id}: local complex must be complete")
        for d in lc.space.degrees:
            if d.denominator != 1 or d < 0:
                raise ValueError(f"manifold {self.id}: local degrees must be non-negative integers")

    @property
    def dim(self) -> int:
        degs = self.local_complex.space.degrees
        return int(max(degs)) if degs else 0

    def cells(self) -> list:
        return self.local_complex.space.labels()

    def local_failures(self) -> list:
        """Square-zero failures of the local complex (computed once)."""
        out = self.__dict__.get("_local_failures")
        if out is None:
            out = verify_square_zero(self.local_complex).failures
            object.__setattr__(self, "_local_failures", out)
        return out

    def generators(self, drop: int = 0) -> list:
        """``((id, cell), grading - drop)`` pairs, cached per ``drop``."""
        cache = self.__dict__.setdefault("_generators", {})
        if drop not in cache:
            cache[drop] = [((self.id, x), self.grading(x) - drop) for x in self.cells()]
        return cache[drop]

    def local_map(self) -> dict:
        """Local differential on generators ``(id, cell)`` (computed once)."""
        out = self.__dict__.get("_local_map")
        if out is None:
            out = {(self.id, x): frozenset((self.id, y) for y in ys)
                   for x, ys in self.local_complex.differential.images.items()}
            object.__setattr__(self, "_local_map", out)
        return out

    def grading(self, cell) -> Fraction:
        table = self.__dict__.get("_gradings")
        if table is None:
            sp = self.local_complex.space
            table = {x: self.base_grading + sp.degree_of(x) for x in sp.labels()}
            object.__setattr__(self, "_gradings", table)
        return table[cell]


@dataclass(frozen=True)
class ModuliOperator:
    """One classified operator between the local complexes of two manifolds.

    ``shift`` is the declared change of total grading and ``entries`` maps
    source cells to sets of target cells.
    """

    id: str
    cls: str
    source: str
    target: str
    shift: Fraction
    entries: Mapping

    def __post_init__(self):
        object.__setattr__(self, "shift", as_degree(self.shift))
        if self.cls not in CLASSES:
            raise ValueError(f"operator {self.id}: unknown class {self.cls!r}")
        clean = {}
        for x, ys in dict(self.entries).items():
            ys = frozenset(ys)
            if ys:
                clean[x] = ys
        object.__setattr__(self, "entries", clean)

    def __hash__(self):
        return hash((self.id, self.cls, self.source, self.target, self.shift))

    def global_map(self) -> dict:
        out = self.__dict__.get("_global")
        if out is None:
            out = {(self.source, x): frozenset((self.target, y) for y in ys)
                   for x, ys in self.entries.items()}
            object.__setattr__(self, "_global", out)
        return out


def _audit(op: ModuliOperator, src: CriticalManifold, tgt: CriticalManifold, degree) -> list:
    """Problems with one operator: class/kind rules, declared shift, entries (memoized)."""
    memo = op.__dict__.setdefault("_audits", {})
    key = (id(src), id(tgt), degree)
    hit = memo.get(key)
    if hit is not None and hit[0] is src and hit[1] is tgt:
        return hit[2]
    out = _audit_uncached(op, src, tgt, degree)
    memo[key] = (src, tgt, out)
    return out


def _audit_uncached(op, src, tgt, degree) -> list:
    problems = []
    want_kinds = CLASSES[op.cls]
    if (src.kind, tgt.kind) != want_kinds:
        problems.append(("class", f"class {op.cls} needs {want_kinds[0]} -> {want_kinds[1]}, "
                                  f"got {src.kind} -> {tgt.kind}"))
        return problems
    need = required_shift(op.cls, degree)
    if op.shift != need:
        problems.append(("degree", f"declared shift {op.shift}, class {op.cls} needs {need}"))
    for x, ys in op.entries.items():
        if x not in src.local_complex.space:
            problems.append(("entry", f"unknown source cell {x!r}"))
            continue
        for y in ys:
            if y not in tgt.local_complex.space:
                problems.append(("entry", f"unknown target cell {y!r}"))
                continue
            got = tgt.grading(y) - src.grading(x)
            if got != op.shift:
                problems.append(("degree", f"entry {x!r} -> {y!r} shifts grading by {got}, "
                                           f"declared {op.shift}"))
    return problems


@dataclass(frozen=True, eq=False)
class FloerData:
    """Critical manifolds plus classified operators: the input of every assembly."""

    manifolds: tuple = ()
    operators: tuple = ()
    grading_denominator: int = 1
    metadata: Mapping = field(default_factory=dict)
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "manifolds", tuple(self.manifolds))
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "metadata", dict(self.metadata))
        if self.grading_denominator < 1:
            raise ValueError("grading denominator must be positive")
        ids = {}
        for m in self.manifolds:
            if m.id in ids:
                raise ValueError(f"duplicate manifold id {m.id!r}")
            if self.grading_denominator % m.base_grading.denominator:
                raise ValueError(f"manifold {m.id}: grading {m.base_grading} not a multiple "
                                 f"of 1/{self.grading_denominator}")
            ids[m.id] = m
        object.__setattr__(self, "_by_id", ids)
        seen = set()
        for i, op in enumerate(self.operators):
            if op.id in seen:
                raise ValueError(f"duplicate operator id {op.id!r}")
            seen.add(op.id)
            for end in (op.source, op.target):
                if end not in ids:
                    raise ValueError(f"operators[{i}] ({op.id}): unknown manifold {end!r}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, FloerData):
            return NotImplemented
        return (self.manifolds == other.manifolds and self.operators == other.operators
                and self.grading_denominator == other.grading_denominator
                and self.metadata == other.metadata and self.name == other.name)

    __hash__ = object.__hash__

    def manifold(self, mid: str) -> CriticalManifold:
        return self._by_id[mid]

    def of_kind(self, kind: str) -> list:
        return [m for m in self.manifolds if m.kind == kind]

    def kind_of(self, label) -> str:
        return self._by_id[label[0]].kind

    def grading(self, label) -> Fraction:
        return self._by_id[label[0]].grading(label[1])

    def audit(self, degree=-1) -> list:
        """``(op_id, category, message)`` for every operator problem."""
        key = ("audit", as_degree(degree))
        if key not in self._cache:
            out = []
            for op in self.operators:
                for cat, msg in _audit(op, self._by_id[op.source], self._by_id[op.target], degree):
                    out.append((op.id, cat, msg))
            self._cache[key] = out
        return list(self._cache[key])

    def sparse(self, cls: str) -> dict:
        """Sum of the operators of one class, plus local differentials on the diagonal."""
        key = ("sparse", cls)
        if key not in self._cache:
            parts = [op.global_map() for op in self.operators if op.cls == cls]
            kind = {"oo": IRREDUCIBLE, "bar_ss": STABLE, "bar_uu": UNSTABLE}.get(cls)
            if kind is not None:
                parts.extend(m.local_map() for m in self.of_kind(kind))
            self._cache[key] = sparse_add(*parts)
        return self._cache[key]

    def generators(self, flavor: str) -> list:
        """``(label, degree)`` pairs of one flavor over the whole data set."""
        kinds = {"check": (IRREDUCIBLE, STABLE), "hat": (IRREDUCIBLE, UNSTABLE),
                 "bar": (STABLE, UNSTABLE)}[flavor]
        key = ("generators", flavor)
        if key not in self._cache:
            out = []
            for m in self.manifolds:
                if m.kind not in kinds:
                    continue
                out.extend(m.generators(1 if (flavor == "bar" and m.kind == UNSTABLE) else 0))
            self._cache[key] = out
        return list(self._cache[key])

    def dual(self, shift=None) -> "FloerData":
        """Data of the orientation-reversed manifold.

        Stable and unstable kinds swap, operators are transposed, and the
        total grading becomes ``shift - gr`` with ``shift = -1 - b1`` by default.
        """
        from .graded import dualize
        if shift is None:
            shift = -1 - int(self.metadata.get("b1", 0))
        shift = as_degree(shift)
        swap = {IRREDUCIBLE: IRREDUCIBLE, STABLE: UNSTABLE, UNSTABLE: STABLE}
        mans = []
        for m in self.manifolds:
            tower = None if m.tower is None else Tower(m.tower.id, m.tower.index, -m.tower.sign)
            mans.append(CriticalManifold(m.id, swap[m.kind], shift - m.base_grading - m.dim,
                                         dualize(m.local_complex, m.dim), tower))
        ops = [dual_operator(op) for op in self.operators]
        meta = dict(self.metadata)
        if "rokhlin_times8" in meta:
            meta["rokhlin_times8"] = -meta["rokhlin_times8"]
        meta["dual_shift"] = str(shift)
        return FloerData(tuple(mans), tuple(ops), self.grading_denominator, meta,
                         (self.name + "_dual") if self.name else "dual")


_DUAL_CLASS = {"oo": "oo", "os": "uo", "uo": "os", "us": "us", "bar_ss": "bar_uu",
               "bar_uu": "bar_ss", "bar_su": "bar_su", "bar_us": "bar_us"}


def dual_operator(op: ModuliOperator) -> ModuliOperator:
    tr: dict = {}
    for x, ys in op.entries.items():
        for y in ys:
            tr.setdefault(y, set()).add(x)
    return ModuliOperator(op.id, _DUAL_CLASS[op.cls], op.target, op.source, op.shift,
                          {y: frozenset(xs) for y, xs in tr.items()})


def _check_degrees(data: FloerData, degree=-1) -> None:
    for op_id, cat, msg in data.audit(degree):
        if cat == "class":
            raise ValueError(f"operator {op_id}: {msg}")
        raise DegreeError(op_id, msg)


def _restrict_sources(m: Mapping, data: FloerData, kinds) -> dict:
    return {x: ys for x, ys in m.items() if data.kind_of(x) in kinds}


def _full_differential(data: FloerData, flavor: str) -> dict:
    key = ("diff", flavor)
    if key in data._cache:
        return data._cache[key]
    D = data.sparse
    if flavor == "check":
        out = sparse_add(D("oo"), D("os"), D("bar_ss"),
                         sparse_compose(sparse_add(D("uo"), D("us")), D("bar_su")))
    elif flavor == "hat":
        out = sparse_add(D("oo"), D("uo"), D("bar_uu"),
                         sparse_compose(D("bar_su"), sparse_add(D("os"), D("us"))))
    elif flavor == "bar":
        out = sparse_add(D("bar_ss"), D("bar_su"), D("bar_us"), D("bar_uu"))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    data._cache[key] = out
    return out


def assemble(data: FloerData, flavor: str, window=None) -> GradedComplex:
    """Assemble one flavor of the chain complex, truncated to ``window``."""
    key = ("complex", flavor, _window_key(window))
    if key not in data._cache:
        _check_degrees(data)
        space = _flavor_space(data, flavor, key[2])
        diff = GradedMap(space, space, -1, _full_differential(data, flavor), strict=False)
        data._cache[key] = GradedComplex(space, diff, key[2])
    return data._cache[key]


_SPACE_MEMO: dict = {}


def _flavor_space(data: FloerData, flavor: str, window) -> GradedVectorSpace:
    """Generator space of one flavor; shared by data sets with the same manifolds."""
    shape = tuple((m.id, m.kind, m.base_grading, id(m.local_complex.space))
                  for m in data.manifolds)
    key = (shape, flavor, window)
    hit = _SPACE_MEMO.get(key)
    if hit is not None and all(a.local_complex.space is b.local_complex.space
                               for a, b in zip(hit[0], data.manifolds)):
        return hit[1]
    space = GradedVectorSpace.from_labels(data.generators(flavor)).restrict(window)
    if len(_SPACE_MEMO) > 64:
        _SPACE_MEMO.clear()
    # the stored manifolds keep the local spaces alive, so their ids stay unique
    _SPACE_MEMO[key] = (data.manifolds, space)
    return space


def _window_key(window):
    return None if window is None else (as_degree(window[0]), as_degree(window[1]))


def assemble_check(data: FloerData, window=None) -> GradedComplex:
    return assemble(data, "check", window)


def assemble_hat(data: FloerData, window=None) -> GradedComplex:
    return assemble(data, "hat", window)


def assemble_bar(data: FloerData, window=None) -> GradedComplex:
    return assemble(data, "bar", window)


def assemble_ijp(data: FloerData, window=None, complexes=None):
    """Chain maps ``i: bar -> check``, ``j: check -> hat``, ``p: hat -> bar``.

    ``i`` and ``j`` have degree 0 and ``p`` has degree -1.  Raises when one of
    them fails to be a chain map at an interior degree.
    """
    if complexes is None:
        complexes = {f: assemble(data, f, window) for f in FLAVORS}
    cb, cc, ch = complexes["bar"], complexes["check"], complexes["hat"]
    D = data.sparse
    ident = {}
    for m in data.manifolds:
        for x in m.cells():
            ident[(m.id, x)] = frozenset([(m.id, x)])
    stable = _restrict_sources(ident, data, (STABLE,))
    irred = _restrict_sources(ident, data, (IRREDUCIBLE,))
    unst = _restrict_sources(ident, data, (UNSTABLE,))
    i_map = sparse_add(stable, D("uo"), D("us"))
    j_map = sparse_add(irred, D("bar_su"))
    p_map = sparse_add(D("os"), D("us"), unst)
    i = GradedMap(cb.space, cc.space, 0, i_map, strict=False)
    j = GradedMap(cc.space, ch.space, 0, j_map, strict=False)
    p = GradedMap(ch.space, cb.space, -1, p_map, strict=False)
    for name, f, a, b in (("i", i, cb, cc), ("j", j, cc, ch), ("p", p, ch, cb)):
        rep = verify_chain_map(f, a, b)
        if not rep.ok:
            raise ValueError(f"{name} is not a chain map at degree {rep.failures[0][0]}")
    return i, j, p


def component_identities(data: FloerData) -> dict:
    """Each component of the square-zero identities as a sparse map."""
    D = data.sparse
    c = sparse_compose
    oo, os_, uo, us = D("oo"), D("os"), D("uo"), D("us")
    ss, su, bus, uu = D("bar_ss"), D("bar_su"), D("bar_us"), D("bar_uu")
    return {
        "bar s->s: Dss Dss + Dus Dsu": sparse_add(c(ss, ss), c(bus, su)),
        "bar s->u: Dsu Dss + Duu Dsu": sparse_add(c(su, ss), c(uu, su)),
        "bar u->s: Dss Dus + Dus Duu": sparse_add(c(ss, bus), c(bus, uu)),
        "bar u->u: Dsu Dus + Duu Duu": sparse_add(c(su, bus), c(uu, uu)),
        "o->o: Doo Doo + Duo Dsu Dos": sparse_add(c(oo, oo), c(uo, c(su, os_))),
        "o->s: Dos Doo + Dss Dos + Dus Dsu Dos": sparse_add(c(os_, oo), c(ss, os_), c(us, c(su, os_))),
        "u->o: Doo Duo + Duo Duu + Duo Dsu Dus": sparse_add(c(oo, uo), c(uo, uu), c(uo, c(su, us))),
        "u->s: Dos Duo + Dss Dus + Dus Duu + bar Dus + Dus Dsu Dus":
            sparse_add(c(os_, uo), c(ss, us), c(us, uu), bus, c(us, c(su, us))),
    }


def validate(data: FloerData, window=None, involution=None) -> ValidationReport:
    """Class/kind rules, operator degrees, square-zero of all three flavors.

    Component identities are evaluated separately: when a square fails they
    are listed as the failing components, otherwise a nonzero component only
    produces a warning.  With ``involution`` the equivariance checks run too.
    """
    rep = ValidationReport()
    for op_id, cat, msg in data.audit():
        rep.fail(None, f"{cat}: operator {op_id}: {msg}")
    if not rep.ok:
        return rep
    for m in data.manifolds:
        for d, msg in m.local_failures():
            rep.fail(m.base_grading + d, f"local complex of {m.id}: {msg}")
    squares_ok = True
    square_fail_degrees = set()
    for flavor in FLAVORS:
        sub = verify_square_zero(assemble(data, flavor, window))
        squares_ok = squares_ok and sub.ok
        square_fail_degrees.update(d for d, _ in sub.failures)
        rep.merge(sub, prefix=f"{flavor}: ")
    for name, m in component_identities(data).items():
        degs = sorted({data.grading(x) for x in m if in_window(data.grading(x), window)})
        if not degs:
            continue
        where = ", ".join(str(d) for d in degs)
        if squares_ok:
            rep.warnings.append(f"component {name} nonzero at gr {where}; squares vanish, "
                                f"possible missing strata")
        else:
            rep.fail(degs[0], f"component identity {name} fails at gr {where}")
    if involution is not None:
        from .pin2 import check_involution
        rep.merge(check_involution(data, involution, window), prefix="involution: ")
    return rep


@dataclass(frozen=True, eq=False)
class Cobordism:
    """Classified operators from the manifolds of one data set to another.

    ``degree`` is the degree of the assembled maps; each operator's total
    grading shift is audited against it.
    """

    operators: tuple
    degree: Fraction
    metadata: Mapping = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "degree", as_degree(self.degree))
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __eq__(self, other):
        return (isinstance(other, Cobordism) and self.operators == other.operators
                and self.degree == other.degree and self.metadata == other.metadata
                and self.name == other.name)

    __hash__ = object.__hash__

    def audit(self, src: FloerData, tgt: FloerData) -> list:
        out = []
        for op in self.operators:
            try:
                a, b = src.manifold(op.source), tgt.manifold(op.target)
            except KeyError as exc:
                out.append((op.id, "entry", f"unknown manifold {exc.args[0]!r}"))
                continue
            for cat, msg in _audit(op, a, b, self.degree):
                out.append((op.id, cat, msg))
        return out

    def sparse(self, cls: str) -> dict:
        return sparse_add(*[op.global_map() for op in self.operators if op.cls == cls])


@dataclass
class CobordismMaps:
    check: Optional[GradedMap]
    hat: Optional[GradedMap]
    bar: Optional[GradedMap]
    report: ValidationReport

    def __iter__(self):
        return iter((self.check, self.hat, self.bar))

    def __getitem__(self, flavor):
        return getattr(self, flavor)


def _cobordism_sparse(src: FloerData, tgt: FloerData, cob: Cobordism) -> dict:
    M = cob.sparse
    Ds, Dt = src.sparse, tgt.sparse
    c = sparse_compose
    return {
        "check": sparse_add(M("oo"), M("os"), M("bar_ss"),
                            c(sparse_add(M("uo"), M("us")), Ds("bar_su")),
                            c(sparse_add(Dt("uo"), Dt("us")), M("bar_su"))),
        "hat": sparse_add(M("oo"), M("uo"), M("bar_uu"),
                          c(M("bar_su"), sparse_add(Ds("os"), Ds("us"))),
                          c(Dt("bar_su"), sparse_add(M("os"), M("us")))),
        "bar": sparse_add(M("bar_ss"), M("bar_su"), M("bar_us"), M("bar_uu")),
    }


def assemble_cobordism(src: FloerData, tgt: FloerData, cob: Cobordism, window=None,
                       src_window=None, tgt_window=None, complexes=None,
                       flavors=FLAVORS) -> CobordismMaps:
    """Assemble the three cobordism maps and verify that each is a chain map.

    ``src_window``/``tgt_window`` default to ``window``.  Failures are listed
    in the returned report together with the offending flavor.
    """
    if src.grading_denominator != tgt.grading_denominator:
        raise ValueError("source and target use different grading denominators")
    problems = cob.audit(src, tgt)
    if problems:
        op_id, cat, msg = problems[0]
        if cat == "degree":
            raise DegreeError(op_id, msg)
        raise ValueError(f"operator {op_id}: {msg}")
    sw = window if src_window is None else src_window
    tw = window if tgt_window is None else tgt_window
    if complexes is None:
        complexes = ({f: assemble(src, f, sw) for f in flavors},
                     {f: assemble(tgt, f, tw) for f in flavors})
    cs, ct = complexes
    sparse = _cobordism_sparse(src, tgt, cob)
    rep = ValidationReport()
    maps = dict.fromkeys(FLAVORS)
    for f in flavors:
        maps[f] = GradedMap(cs[f].space, ct[f].space, cob.degree, sparse[f], strict=False)
        rep.merge(verify_chain_map(maps[f], cs[f], ct[f]), prefix=f"{f}: ")
    return CobordismMaps(maps["check"], maps["hat"], maps["bar"], rep)


def identity_cobordism(data: FloerData) -> Cobordism:
    """Identity operators on every manifold: ``oo``, ``bar_ss`` and ``bar_uu``."""
    cls = {IRREDUCIBLE: "oo", STABLE: "bar_ss", UNSTABLE: "bar_uu"}
    ops = [ModuliOperator(f"id:{m.id}", cls[m.kind], m.id, m.id, 0,
                          {x: frozenset([x]) for x in m.cells()}) for m in data.manifolds]
    return Cobordism(tuple(ops), 0, name="identity")


def compose_cobordisms(first: Cobordism, second: Cobordism, a: FloerData, b: FloerData,
                       c: FloerData) -> Cobordism:
    """Declared composite of two cobordisms between data sets without irreducibles.

    Components are the blocks of the product of the two bar maps.
    """
    for d in (a, b, c):
        if d.of_kind(IRREDUCIBLE):
            raise ValueError("composite fixtures are only defined for reducible-only data")
    m1 = sparse_add(*[op.global_map() for op in first.operators])
    m2 = sparse_add(*[op.global_map() for op in second.operators])
    prod = sparse_compose(m2, m1)
    grouped: dict = {}
    for x, ys in prod.items():
        for y in ys:
            key = (x[0], y[0])
            grouped.setdefault(key, {}).setdefault(x[1], set()).add(y[1])
    ops = []
    degree = first.degree + second.degree
    short = {STABLE: "s", UNSTABLE: "u"}
    for (sid, tid), entries in sorted(grouped.items()):
        cls = "bar_" + short[a.manifold(sid).kind] + short[c.manifold(tid).kind]
        ops.append(ModuliOperator(f"{sid}->{tid}", cls, sid, tid, required_shift(cls, degree),
                                  {x: frozenset(ys) for x, ys in entries.items()}))
    return Cobordism(tuple(ops), degree, name=f"{second.name}*{first.name}")


def _sign(s) -> int:
    if s in ("+", 1):
        return 1
    if s in ("-", -1):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {s!r}")


def reducible_tower_grading(i: int, sign1, sign2) -> int:
    """Relative grading between two reducibles over one critical point.

    ``i`` counts eigenvalues (with multiplicity) between the two levels;
    the result is ``2i`` for equal signs, ``2i - 1`` when the first is
    positive and the second negative, ``2i + 1`` in the opposite case.
    """
    s1, s2 = _sign(sign1), _sign(sign2)
    if s1 == s2:
        return 2 * i
    return 2 * i - 1 if s1 > 0 else 2 * i + 1


def modified_grading(gr, kind_minus: str, kind_plus: str) -> Fraction:
    """Shift a relative grading between reducibles by ``o[C+] - o[C-]``."""
    o = {STABLE: 0, UNSTABLE: 1}
    for k in (kind_minus, kind_plus):
        if k not in o:
            raise ValueError(f"modified grading needs reducible kinds, got {k!r}")
    return as_degree(gr) - o[kind_minus] + o[kind_plus]


def absolute_grading(gr_z: int, dim: int, c1_sq, iota, sigma) -> Fraction:
    """``-gr_z + dim + c1_sq/4 - iota - sigma/4`` as an exact rational."""
    return (-as_degree(gr_z) + dim + as_degree(c1_sq) / 4 - as_degree(iota)
            - as_degree(sigma) / 4)


def iota_characteristic(chi: int, sigma: int, b1_Y: int) -> Fraction:
    """``(chi + sigma - b1) / 2``; warns when the value is not an integer."""
    value = Fraction(chi + sigma - b1_Y, 2)
    if value.denominator != 1:
        warnings.warn(f"characteristic number {value} is not an integer", stacklevel=2)
    return value


def relative_grading_sum(gr_ab, gr_bc) -> Fraction:
    return as_degree(gr_ab) + as_degree(gr_bc)
