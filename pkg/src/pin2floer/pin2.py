"""The involution layer: invariant chains, the Gysin sequence, the module
structure over ``F[[V]][Q]/(Q^3)`` and the invariants alpha, beta, gamma.

The involution permutes generators, so invariant chains have a basis of
orbit sums ``("orb", x)`` (for ``x != jx``) and fixed generators
``("fix", x)``.  The image of ``id + j`` is spanned by the orbit sums alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .floer import (
    FLAVORS,
    Cobordism,
    FloerData,
    assemble,
    assemble_cobordism,
    assemble_ijp,
)
from .graded import (
    GradedComplex,
    GradedMap,
    Homology,
    HomologyMap,
    ValidationReport,
    as_degree,
    check_exactness,
    connecting_map,
    homology,
    induced_map,
    sparse_add,
    verify_chain_map,
)

__all__ = [
    "Involution",
    "InvariantPart",
    "RModuleStructure",
    "StandardModuleParams",
    "InconclusiveWindow",
    "InvariantRecord",
    "check_involution",
    "invariant_subcomplex",
    "image_subcomplex",
    "quasi_isomorphism_report",
    "gysin_sequence",
    "gysin_for_complex",
    "induced_module",
    "classify_image_i",
    "check_invariant_properties",
]


@dataclass(frozen=True)
class Involution:
    """Involution on manifold ids and on generators ``(manifold_id, cell)``."""

    manifold_map: Mapping
    cell_map: Mapping

    def __post_init__(self):
        object.__setattr__(self, "manifold_map", dict(self.manifold_map))
        object.__setattr__(self, "cell_map", dict(self.cell_map))

    def __call__(self, label):
        return self.cell_map.get(label, label)

    @classmethod
    def trivial(cls, data: FloerData) -> "Involution":
        return cls({m.id: m.id for m in data.manifolds}, {})

    def dual(self) -> "Involution":
        return self


def _conj(m: Mapping, j: Callable) -> dict:
    return {j(x): frozenset(j(y) for y in ys) for x, ys in m.items()}


def _op_keys(op, inv: Involution) -> tuple:
    """Hashable keys of an operator and of its conjugate (memoized per involution)."""
    memo = op.__dict__.setdefault("_conj_keys", {})
    hit = memo.get(id(inv))
    if hit is not None and hit[0] is inv:
        return hit[1]
    mm = inv.manifold_map
    own = (op.cls, op.source, op.target, frozenset(_freeze(op.global_map())))
    conj = (op.cls, mm.get(op.source, op.source), mm.get(op.target, op.target),
            frozenset(_freeze(_conj(op.global_map(), inv))))
    memo[id(inv)] = (inv, (own, conj))
    return own, conj


def _cell_problems(inv: Involution, m, tm) -> list:
    """Kind, grading and cell-map problems between ``m`` and its image ``tm`` (memoized)."""
    memo = inv.__dict__.setdefault("_memo", {})
    key = (id(m), id(tm))
    hit = memo.get(key)
    if hit is not None and hit[0] is m and hit[1] is tm:
        return hit[2]
    out = []
    t = tm.id
    if tm.kind != m.kind or tm.base_grading != m.base_grading:
        out.append((m.base_grading, f"{m.id} and {t} differ in kind or grading"))
    for x in m.cells():
        y = inv((m.id, x))
        if y[0] != t or y[1] not in tm.local_complex.space:
            out.append((None, f"cell map sends {(m.id, x)} outside manifold {t}"))
            continue
        if inv(y) != (m.id, x):
            out.append((None, f"cell map is not involutive at {(m.id, x)}"))
        if tm.grading(y[1]) != m.grading(x):
            out.append((m.grading(x), f"cell map changes degree at {(m.id, x)}"))
    memo[key] = (m, tm, out)
    return out


def _local_commutes(inv: Involution, m, tm) -> bool:
    """Whether the involution carries the local differential of ``m`` to that of ``tm``."""
    memo = inv.__dict__.setdefault("_local_memo", {})
    key = (id(m), id(tm))
    hit = memo.get(key)
    if hit is not None and hit[0] is m and hit[1] is tm:
        return hit[2]
    ok = _conj(m.local_map(), inv) == tm.local_map()
    memo[key] = (m, tm, ok)
    return ok


def check_involution(data: FloerData, inv: Involution, window=None) -> ValidationReport:
    """Involutivity, compatibility with gradings and kinds, and intertwining of operators."""
    rep = ValidationReport()
    mm = inv.manifold_map
    for m in data.manifolds:
        t = mm.get(m.id, m.id)
        if t not in mm and t != m.id:
            rep.fail(None, f"manifold map sends {m.id} to unknown {t}")
            continue
        if mm.get(t, t) != m.id:
            rep.fail(None, f"manifold map is not involutive at {m.id}")
            continue
        for d, msg in _cell_problems(inv, m, data.manifold(t)):
            rep.fail(d, msg)
    if not rep.ok:
        return rep
    for m in data.manifolds:
        if not _local_commutes(inv, m, data.manifold(mm.get(m.id, m.id))):
            rep.fail(m.base_grading, f"local differential of {m.id} does not commute with the involution")
    pool: dict = {}
    for op in data.operators:
        key = _op_keys(op, inv)[0]
        pool[key] = pool.get(key, 0) + 1
    for op in data.operators:
        if pool.get(_op_keys(op, inv)[1], 0) == 0:
            rep.fail(data.manifold(op.source).base_grading,
                     f"operator {op.id} has no conjugate partner")
    if rep.ok:
        for flavor in FLAVORS:
            c = assemble(data, flavor, window)
            jm = GradedMap(c.space, c.space, 0, {x: frozenset([inv(x)]) for x in c.space.labels()})
            rep.merge(verify_chain_map(jm, c, c), prefix=f"{flavor} involution: ")
    return rep


def _freeze(m: Mapping):
    return ((x, ys) for x, ys in m.items())


def _orbit_rep(x, j):
    y = j(x)
    return x if repr(x) <= repr(y) else y


class InvariantPart:
    """Invariant subcomplex ``ker(id + j)`` of a complex with its inclusion."""

    def __init__(self, c: GradedComplex, inv: Callable):
        self.parent = c
        self.j = inv
        cells = []
        for x in c.space.labels():
            y = inv(x)
            if y not in c.space or c.space.degree_of(y) != c.space.degree_of(x):
                raise ValueError(f"involution does not preserve the grading at {x!r}")
            if y == x:
                cells.append((("fix", x), c.space.degree_of(x)))
            elif _orbit_rep(x, inv) == x:
                cells.append((("orb", x), c.space.degree_of(x)))
        bd = {}
        for lab, _ in cells:
            img = c.differential.apply_labels(self.members(lab))
            enc = self.encode(img)
            if enc:
                bd[lab] = enc
        self.complex = GradedComplex.build(cells, bd, c.window)
        self.inclusion = GradedMap(self.complex.space, c.space, 0,
                                   {lab: self.members(lab) for lab, _ in cells})

    def members(self, lab) -> frozenset:
        kind, x = lab
        return frozenset([x]) if kind == "fix" else frozenset([x, self.j(x)])

    def encode(self, labels: frozenset) -> frozenset:
        """Express an invariant set of generators in the orbit basis."""
        out = set()
        for y in labels:
            jy = self.j(y)
            if jy == y:
                out.add(("fix", y))
            elif jy not in labels:
                raise ValueError(f"chain {sorted(labels, key=repr)!r} is not invariant; "
                                 f"the involution is not a chain map")
            else:
                out.add(("orb", _orbit_rep(y, self.j)))
        return frozenset(out)

    def restrict_map(self, f: GradedMap, target: "InvariantPart") -> GradedMap:
        """An equivariant map between parents, restricted to invariant chains."""
        imgs = {}
        for lab in self.complex.space.labels():
            img = f.apply_labels(self.members(lab))
            enc = target.encode(img)
            if enc:
                imgs[lab] = enc
        return GradedMap(self.complex.space, target.complex.space, f.shift, imgs, strict=False)


def invariant_subcomplex(c: GradedComplex, inv: Callable):
    """``(complex, inclusion)`` for the invariant chains of ``c``."""
    part = InvariantPart(c, inv)
    return part.complex, part.inclusion


def image_subcomplex(c: GradedComplex, inv: Callable):
    """``(complex, inclusion into the invariant complex, projection id + j)``."""
    part = InvariantPart(c, inv)
    orbits = [lab for lab in part.complex.space.labels() if lab[0] == "orb"]
    cells = [(lab, part.complex.space.degree_of(lab)) for lab in orbits]
    bd = {lab: part.complex.boundary(lab) for lab in orbits if part.complex.boundary(lab)}
    img = GradedComplex.build(cells, bd, c.window)
    for lab in orbits:
        if any(y[0] == "fix" for y in part.complex.boundary(lab)):
            raise ValueError(f"boundary of {lab!r} leaves the image of id + j")
    incl = GradedMap(img.space, part.complex.space, 0, {lab: frozenset([lab]) for lab in orbits})
    proj = {}
    for x in c.space.labels():
        if inv(x) != x:
            proj[x] = frozenset([("orb", _orbit_rep(x, inv))])
    pi = GradedMap(c.space, img.space, 0, proj)
    return img, incl, pi


def quasi_isomorphism_report(c: GradedComplex, inv: Callable) -> ValidationReport:
    """Check that the image of ``id + j`` includes into the invariants as a quasi-isomorphism."""
    img, incl, _ = image_subcomplex(c, inv)
    part = InvariantPart(c, inv)
    h_img, h_inv = homology(img), homology(part.complex)
    f = induced_map(incl, h_img, h_inv)
    rep = ValidationReport()
    for d, m in f.matrices.items():
        from .gf2 import rank
        if m.rows != m.cols or rank(m) != m.rows:
            rep.fail(d, f"inclusion is not an isomorphism on homology ({m.cols} -> {m.rows})")
    return rep


def gysin_for_complex(c: GradedComplex, inv: Callable) -> ValidationReport:
    """Exactness of the long exact sequence of ``0 -> C^inv -> C -> (id+j)C -> 0``."""
    part = InvariantPart(c, inv)
    img, _, pi = image_subcomplex(c, inv)
    h_inv, h_c, h_img = homology(part.complex), homology(c), homology(img)
    iota = induced_map(part.inclusion, h_inv, h_c)
    proj = induced_map(pi, h_c, h_img)
    delta = connecting_map(part.inclusion, pi, h_inv, h_c, h_img)
    return check_exactness([iota, proj, delta], cyclic=True)


def gysin_sequence(data: FloerData, inv: Involution, flavor: str, window=None) -> ValidationReport:
    return gysin_for_complex(assemble(data, flavor, window), inv)


@dataclass
class RModuleStructure:
    """Homology of the invariant complex with its ``Q`` and ``V`` actions."""

    homology: Homology
    q: HomologyMap
    v: HomologyMap

    def act(self, op: str, d, vec: int) -> Optional[int]:
        """Apply ``Q`` or ``V`` to a coordinate vector; ``None`` when unreliable."""
        m = (self.q if op == "Q" else self.v).matrix(d)
        return None if m is None else m.apply(vec)

    def word(self, ops: str, d, vec: int) -> Optional[int]:
        """Apply a word such as ``"QQ"`` (rightmost letter first)."""
        d = as_degree(d)
        for op in reversed(ops):
            vec = self.act(op, d, vec)
            if vec is None:
                return None
            d += -1 if op == "Q" else -4
        return vec


def _module_maps(data, inv, q, v, flavor, window, complexes=None):
    """Invariant part of one flavor with ``Q`` and ``V`` restricted to it."""
    c = assemble(data, flavor, window) if complexes is None else complexes[flavor]
    part = InvariantPart(c, inv)
    cs = {flavor: c}
    out = []
    for name, cob in (("Q", q), ("V", v)):
        full = assemble_cobordism(data, data, cob, window, complexes=(cs, cs), flavors=(flavor,))
        m = part.restrict_map(full[flavor], part)
        sub = verify_chain_map(m, part.complex, part.complex)
        if not sub.ok:
            raise ValueError(f"{name} is not a chain map on invariant chains "
                             f"in degree {sub.failures[0][0]}")
        out.append(m)
    return part, out[0], out[1]


def induced_module(data: FloerData, inv: Involution, q: Cobordism, v: Cobordism,
                   flavor: str, window=None, complexes=None) -> RModuleStructure:
    """Module structure on the invariant homology of one flavor.

    Raises when ``Q^3 = 0`` or ``QV = VQ`` fails on a reliable class.
    """
    if as_degree(q.degree) != -1 or as_degree(v.degree) != -4:
        raise ValueError("Q must have degree -1 and V degree -4")
    part, qc, vc = _module_maps(data, inv, q, v, flavor, window, complexes)
    h = homology(part.complex)
    mod = RModuleStructure(h, induced_map(qc, h, h), induced_map(vc, h, h))
    for d in h.degrees():
        for k in range(h.dims[d]):
            x = 1 << k
            q3 = mod.word("QQQ", d, x)
            if q3:
                raise ValueError(f"Q^3 is nonzero on class {k} in degree {d}")
            qv, vq = mod.word("QV", d, x), mod.word("VQ", d, x)
            if qv is not None and vq is not None and qv != vq:
                raise ValueError(f"QV != VQ on class {k} in degree {d}")
    return mod


@dataclass(frozen=True)
class StandardModuleParams:
    """Invariants of the image of ``i_*`` and the shift of the bar tower.

    Bar homology is ``M`` shifted by ``shift`` (defined mod 4); its 1-type
    classes sit in degrees congruent to ``2 + shift`` mod 4.
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "shift"):
            object.__setattr__(self, name, as_degree(getattr(self, name)))

    def ordered(self) -> bool:
        return self.alpha >= self.beta >= self.gamma

    def congruent(self) -> bool:
        return (self.alpha - self.beta).denominator == 1 and (self.beta - self.gamma).denominator == 1

    def as_tuple(self) -> tuple:
        return (self.alpha, self.beta, self.gamma)


class InconclusiveWindow(ValueError):
    """The window is too small to locate one of the three minima."""


_TYPE_NAMES = {0: "Q^2-type", 1: "Q-type", 2: "1-type"}


def classify_image_i(data: FloerData, inv: Involution, q: Cobordism, v: Cobordism,
                     window=None) -> StandardModuleParams:
    """Extract alpha, beta, gamma from the image of ``i_*`` in the check flavor.

    A bar class ``x`` is 1-type when ``Q^2 x != 0``, Q-type when
    ``Q x != 0 = Q^2 x`` and Q^2-type when ``Q x = 0``.  With ``m_t`` the least
    degree of a type-``t`` class whose image is nonzero,
    ``alpha = m_{Q^2}/2``, ``beta = (m_Q - 1)/2`` and ``gamma = (m_1 - 2)/2``.
    A minimum only counts when a class of the same type with zero image is
    seen below it inside the window.
    """
    b1 = int(data.metadata.get("b1", 0))
    if b1 != 0:
        raise ValueError(f"invariants need a rational homology sphere, data has b1 = {b1}")
    complexes = {f: assemble(data, f, window) for f in FLAVORS}
    i_map, _, _ = assemble_ijp(data, window, complexes)
    bar_part, qc, _ = _module_maps(data, inv, q, v, "bar", window, complexes)
    chk_part = InvariantPart(complexes["check"], inv)
    hb, hc = homology(bar_part.complex), homology(chk_part.complex)
    q_star = induced_map(qc, hb, hb)
    i_star = induced_map(bar_part.restrict_map(i_map, chk_part), hb, hc)

    found: dict = {0: [], 1: [], 2: []}
    residues = {}
    for d in hb.degrees():
        n = hb.dims[d]
        if n == 0:
            continue
        if n > 1:
            raise ValueError(f"bar homology has dimension {n} in degree {d}; "
                             f"not a single standard tower")
        qm = q_star.matrix(d)
        if qm is None:
            continue
        qx = qm.apply(1)
        if qx == 0:
            t = 0
        else:
            qm2 = q_star.matrix(d - 1)
            if qm2 is None:
                continue
            t = 2 if qm2.apply(qx) else 1
        im = i_star.matrix(d)
        if im is None:
            continue
        found[t].append((d, im.apply(1) != 0))
        residues.setdefault(t, set()).add(d % 4)
    for t, rs in residues.items():
        if len(rs) != 1:
            raise ValueError(f"{_TYPE_NAMES[t]} classes occupy several residues mod 4")
    mins = {}
    for t, rows in found.items():
        hits = [d for d, nz in rows if nz]
        if not hits:
            raise InconclusiveWindow(f"no {_TYPE_NAMES[t]} class with nonzero image in the window")
        m = min(hits)
        if any(d > m and not nz for d, nz in rows):
            raise ValueError(f"{_TYPE_NAMES[t]} image is not closed under V")
        if not any(d < m and not nz for d, nz in rows):
            raise InconclusiveWindow(f"the {_TYPE_NAMES[t]} minimum at degree {m} may lie "
                                     f"below the window")
        mins[t] = m
    shift = (min(d for d, _ in found[2]) - 2) % 4
    return StandardModuleParams(Fraction(mins[0], 2), Fraction(mins[1] - 1, 2),
                                Fraction(mins[2] - 2, 2), shift)


@dataclass
class InvariantRecord:
    """One model's invariants with optional Rokhlin data and dual invariants."""

    name: str
    params: StandardModuleParams
    rokhlin_times8: Optional[int] = None
    dual: Optional[StandardModuleParams] = None


def check_invariant_properties(records) -> ValidationReport:
    """Ordering, orientation reversal and the mod 2 Rokhlin congruence."""
    rep = ValidationReport()
    for r in records:
        a, b, g = r.params.as_tuple()
        if not r.params.ordered():
            rep.fail(None, f"{r.name}: ordering fails ({a}, {b}, {g})")
        if r.dual is not None:
            da, db, dg = r.dual.as_tuple()
            if (da, db, dg) != (-g, -b, -a):
                rep.fail(None, f"{r.name}: dual triple ({da}, {db}, {dg}) is not ({-g}, {-b}, {-a})")
        if r.rokhlin_times8 is not None:
            mu8 = Fraction(r.rokhlin_times8, 8)
            for name, val in (("alpha", a), ("beta", b), ("gamma", g)):
                s = val + mu8
                if s.denominator != 1 or s.numerator % 2:
                    rep.fail(None, f"{r.name}: {name} = {val} is not congruent to "
                                   f"-{mu8} mod 2")
    return rep
