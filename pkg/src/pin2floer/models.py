"""Builtin Floer data sets and random complexes for property tests.

Each reducible tower is a sequence of two-sphere levels (eigenvalue
multiplicity two), so consecutive levels of one sign differ by 4 in grading
and the lowest stable level sits 3 above the highest unstable one.  The
involution acts antipodally on every sphere.  ``Q`` lowers the cell
dimension inside a sphere and ``V`` moves one level down a tower, crossing
from the lowest stable level to the highest unstable level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .floer import (
    STABLE,
    UNSTABLE,
    Cobordism,
    CriticalManifold,
    FloerData,
    ModuliOperator,
    Tower,
    compose_cobordisms,
    identity_cobordism,
    reducible_tower_grading,
    relative_grading_sum,
    required_shift,
)
from .graded import FilteredComplex, GradedComplex, as_degree
from .pin2 import Involution

__all__ = [
    "MODEL_NAMES",
    "ModelSpec",
    "Model",
    "local_sphere_complex",
    "point_complex",
    "generate",
    "dual",
    "generate_random_complex",
    "composite_fixtures",
]

MODEL_NAMES = ("s3", "poincare", "s1xs2", "t3", "flat_bundle", "hantzsche_wendt",
               "minus_e8_cobordism")
SPHERE_CELLS = tuple(f"e{k}{s}" for k in range(3) for s in "+-")
_MARGIN = 8


def local_sphere_complex(equivariant: bool = True):
    """Six-cell model of the two-sphere and its antipodal cell map.

    Returns ``(complex, cell_map)``; with ``equivariant=False`` the cell map
    is the identity.
    """
    cells = [(c, int(c[1])) for c in SPHERE_CELLS]
    bd = {
        "e1+": frozenset({"e0+", "e0-"}), "e1-": frozenset({"e0+", "e0-"}),
        "e2+": frozenset({"e1+", "e1-"}), "e2-": frozenset({"e1+", "e1-"}),
    }
    c = GradedComplex.build(cells, bd)
    if not equivariant:
        return c, {x: x for x in SPHERE_CELLS}
    return c, {x: x[:2] + ("-" if x[2] == "+" else "+") for x in SPHERE_CELLS}


def point_complex() -> GradedComplex:
    return GradedComplex.build([("pt", 0)])


@dataclass(frozen=True)
class ModelSpec:
    name: str
    window: tuple = (-24, 24)
    include_involution: bool = True
    include_module: bool = True
    include_filtration: bool = True
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.name!r}; expected one of {', '.join(MODEL_NAMES)}")
        lo, hi = as_degree(self.window[0]), as_degree(self.window[1])
        if not lo < hi:
            raise ValueError("window needs lo < hi")
        if hi - lo < 4:
            raise ValueError("window too small to contain one full tower level")
        object.__setattr__(self, "window", (lo, hi))


@dataclass(eq=False)
class Model:
    """A generated data set with its optional extras.

    ``filtration`` maps manifold ids to integer levels.  For the cobordism
    fixture ``cobordism`` is set and ``data`` is its source.
    """

    data: FloerData
    involution: Optional[Involution] = None
    q: Optional[Cobordism] = None
    v: Optional[Cobordism] = None
    filtration: Optional[dict] = None
    window: Optional[tuple] = None
    cobordism: Optional[Cobordism] = None
    target: Optional["Model"] = None

    def filtered(self, flavor: str, window=None, invariant: bool = True) -> FilteredComplex:
        """Filtered complex of one flavor, on invariant chains by default."""
        from .floer import assemble
        from .pin2 import InvariantPart
        if self.filtration is None:
            raise ValueError("model has no filtration")
        c = assemble(self.data, flavor, self.window if window is None else window)
        if not invariant:
            return FilteredComplex(c, {x: self.filtration[x[0]] for x in c.space.labels()})
        if self.involution is None:
            raise ValueError("model has no involution")
        inv = InvariantPart(c, self.involution).complex
        return FilteredComplex(inv, {x: self.filtration[x[1][0]] for x in inv.space.labels()})


class _Builder:
    """Accumulates manifolds, operators, module operators and the involution."""

    def __init__(self):
        self.manifolds = []
        self.ops = []
        self.q_ops = []
        self.v_ops = []
        self.mmap = {}
        self.cmap = {}
        self.levels = {}
        self._base = {}
        self._kind = {}
        self._n = 0

    def sphere(self, mid, kind, base, tower, level=None):
        c, j = local_sphere_complex()
        self.manifolds.append(CriticalManifold(mid, kind, base, c, tower))
        self._base[mid], self._kind[mid] = as_degree(base), kind
        self.mmap[mid] = mid
        for x, y in j.items():
            self.cmap[(mid, x)] = (mid, y)
        if level is not None:
            self.levels[mid] = level
        cls = "bar_ss" if kind == STABLE else "bar_uu"
        self.q_ops.append(ModuliOperator(f"Q:{mid}", cls, mid, mid, -1, {
            "e2+": {"e1+"}, "e2-": {"e1-"}, "e1+": {"e0+"}, "e1-": {"e0-"}}))

    def point_pair(self, a, b, kind, base, tower_a, tower_b, level=None):
        for mid, tw in ((a, tower_a), (b, tower_b)):
            self.manifolds.append(CriticalManifold(mid, kind, base, point_complex(), tw))
            self._base[mid], self._kind[mid] = as_degree(base), kind
            if level is not None:
                self.levels[mid] = level
        self.mmap[a], self.mmap[b] = b, a
        self.cmap[(a, "pt")], self.cmap[(b, "pt")] = (b, "pt"), (a, "pt")

    def _cls(self, src, tgt):
        short = {STABLE: "s", UNSTABLE: "u"}
        return "bar_" + short[self._kind[src]] + short[self._kind[tgt]]

    def op(self, src, tgt, entries, into=None, degree=-1, prefix="d"):
        cls = self._cls(src, tgt)
        self._n += 1
        target = self.ops if into is None else into
        target.append(ModuliOperator(f"{prefix}{self._n}:{src}->{tgt}", cls, src, tgt,
                                     required_shift(cls, degree), entries))

    def identity(self, src, tgt, into, degree):
        self.op(src, tgt, {x: {x} for x in SPHERE_CELLS}, into, degree, prefix="V")

    def model(self, name, meta, window, with_inv, with_mod, with_filt) -> Model:
        data = FloerData(tuple(self.manifolds), tuple(self.ops), 1, meta, name)
        inv = Involution(self.mmap, self.cmap) if with_inv else None
        q = Cobordism(tuple(self.q_ops), -1, name="Q") if with_mod else None
        v = Cobordism(tuple(self.v_ops), -4, name="V") if with_mod else None
        filt = dict(self.levels) if (with_filt and self.levels) else None
        return Model(data, inv, q, v, filt, window)


def _levels(window, period=4, margin=_MARGIN):
    """Ranges of stable and unstable level indices covering the window."""
    lo, hi = window
    n_s = int((hi + margin) // period) + 2
    n_u = int((-lo + margin) // period) + 2
    return range(max(n_s, 1)), range(max(n_u, 1))


def _tower_bases(anchor, n_s, n_u):
    """Base gradings of stable and unstable sphere levels of one tower.

    Levels are placed with the tower-grading rule, eigenvalue multiplicity two.
    """
    step = reducible_tower_grading(2, "+", "+")
    cross = reducible_tower_grading(2, "+", "-")
    stable = [as_degree(anchor)]
    for _ in range(1, n_s):
        stable.append(relative_grading_sum(stable[-1], step))
    unstable = [relative_grading_sum(stable[0], -cross)]
    for _ in range(1, n_u):
        unstable.append(relative_grading_sum(unstable[-1], -step))
    return stable[:n_s], unstable[:n_u]


def _sphere_tower(b: _Builder, tid, anchor, window, level=None, prefix=None):
    """Add one tower of spheres with its ``V`` operators; returns the level ids."""
    rs, ru = _levels(window)
    stable, unstable = _tower_bases(anchor, len(rs), len(ru))
    prefix = tid if prefix is None else prefix
    sids = [f"{prefix}:s{k}" for k in rs]
    uids = [f"{prefix}:u{m}" for m in ru]
    for k, (mid, base) in enumerate(zip(sids, stable)):
        b.sphere(mid, STABLE, base, Tower(tid, k, 1), level)
    for m, (mid, base) in enumerate(zip(uids, unstable)):
        b.sphere(mid, UNSTABLE, base, Tower(tid, -1 - m, -1), level)
    for k in range(1, len(sids)):
        b.identity(sids[k], sids[k - 1], b.v_ops, -4)
    b.identity(sids[0], uids[0], b.v_ops, -4)
    for m in range(1, len(uids)):
        b.identity(uids[m - 1], uids[m], b.v_ops, -4)
    return sids, uids


def _s3_like(name, shift, window, spec, meta) -> Model:
    b = _Builder()
    _sphere_tower(b, "T", shift, window, level=0)
    return b.model(name, meta, window, spec.include_involution, spec.include_module,
                   spec.include_filtration)


def _s1xs2(spec) -> Model:
    """Two towers over the two critical points of the circle of flat connections.

    Conjugate pairs of operators from tower B1 to tower B0 send both 0-cells
    of a sphere to one 0-cell; their sum vanishes on invariant chains.
    """
    b = _Builder()
    s0, u0 = _sphere_tower(b, "B0", -1, spec.window, level=0)
    s1, u1 = _sphere_tower(b, "B1", 0, spec.window, level=1)
    for src, tgt in list(zip(s1, s0)) + list(zip(u1, u0)):
        for pole in "+-":
            b.op(src, tgt, {"e0+": {f"e0{pole}"}, "e0-": {f"e0{pole}"}})
    meta = {"b1": 1}
    return b.model("s1xs2", meta, spec.window, spec.include_involution, spec.include_module,
                   spec.include_filtration)


T3_POINTS = (("x", -1, 0), ("y1", -2, 1), ("y2", -2, 1), ("y3", -2, 1),
             ("z1", -1, 2), ("z2", -1, 2), ("z3", -1, 2), ("w", 0, 3))


def _t3(spec) -> Model:
    """Eight towers over the critical points of a perfect Morse function on T^3.

    ``w`` has index 3, the ``z`` index 2, the ``y`` index 1 and ``x`` index 0.
    Block ``i`` puts ``w`` at ``b = 4i``, the ``z`` at ``b - 1``, the ``y`` at
    ``b - 2`` and ``x`` at ``b - 1``.  Each ``y`` sends its top cells to the
    0-cells of ``x`` and ``w`` maps identically onto ``x``.  Filtration levels
    follow the energy order ``x < y < z < w``.
    """
    b = _Builder()
    towers = {}
    for pid, offset, level in T3_POINTS:
        towers[pid] = _sphere_tower(b, pid, offset, spec.window, level=level)
    for region in (0, 1):
        for k in range(len(towers["x"][region])):
            x = towers["x"][region][k]
            for pid in ("y1", "y2", "y3"):
                b.op(towers[pid][region][k], x, {"e2+": {"e0+"}, "e2-": {"e0-"}})
            b.op(towers["w"][region][k], x, {c: {c} for c in SPHERE_CELLS})
    meta = {"b1": 3, "hat_shift": -4}
    return b.model("t3", meta, spec.window, spec.include_involution, spec.include_module,
                   spec.include_filtration)


def _flat_bundle(spec) -> Model:
    """Two sphere towers and a conjugate pair of point towers.

    Tower ``C0`` starts at grading 2 and ``C1`` at 0; the point towers ``b0``
    and ``b1`` (swapped by the involution) have levels at every odd grading.
    Top cells of ``C0`` level ``i`` go to point level ``2i + 1`` and those of
    ``C1`` level ``i`` to point level ``2i``.
    """
    b = _Builder()
    c0s, c0u = _sphere_tower(b, "C0", 2, spec.window, level=1)
    c1s, c1u = _sphere_tower(b, "C1", 0, spec.window, level=1)
    n_s = min(len(c0s), len(c1s))
    n_u = min(len(c0u), len(c1u))
    ps, pu = [], []
    for j in range(2 * n_s):
        ids = (f"b0:s{j}", f"b1:s{j}")
        b.point_pair(*ids, STABLE, 2 * j + 1, Tower("b0", j, 1), Tower("b1", j, 1), level=0)
        ps.append(ids)
    for m in range(2 * n_u):
        ids = (f"b0:u{m}", f"b1:u{m}")
        b.point_pair(*ids, UNSTABLE, -2 * m, Tower("b0", -1 - m, -1), Tower("b1", -1 - m, -1), level=0)
        pu.append(ids)
    for i in range(n_s):
        for sph, pts in ((c0s[i], ps[2 * i + 1]), (c1s[i], ps[2 * i])):
            b.op(sph, pts[0], {"e2+": {"pt"}})
            b.op(sph, pts[1], {"e2-": {"pt"}})
    # unstable level m of C0 hits point level 2m (hat -2m), C1 hits 2m + 1
    for m in range(n_u):
        for sph, pts in ((c0u[m], pu[2 * m]), (c1u[m], pu[2 * m + 1])):
            b.op(sph, pts[0], {"e2+": {"pt"}})
            b.op(sph, pts[1], {"e2-": {"pt"}})
    for side in (0, 1):
        chain = [p[side] for p in reversed(pu)] + [p[side] for p in ps]
        # chain runs from the lowest unstable point up to the highest stable one
        for k in range(2, len(chain)):
            b.op(chain[k], chain[k - 2], {"pt": {"pt"}}, b.v_ops, -4, prefix="V")
    meta = {"b1": 1}
    return b.model("flat_bundle", meta, spec.window, spec.include_involution, spec.include_module,
                   spec.include_filtration)


def _minus_e8(spec) -> Model:
    """Degree-2 cobordism operators from the sphere model to the Poincare model."""
    src = generate(ModelSpec("s3", spec.window, spec.include_involution, spec.include_module,
                             spec.include_filtration))
    tgt = generate(ModelSpec("poincare", spec.window, spec.include_involution,
                             spec.include_module, spec.include_filtration))
    sd, td = src.data, tgt.data
    ident = {c: frozenset([c]) for c in SPHERE_CELLS}
    ops = []
    n_s = sum(1 for m in sd.manifolds if m.kind == STABLE)
    n_u = sum(1 for m in sd.manifolds if m.kind == UNSTABLE)
    t_s = sum(1 for m in td.manifolds if m.kind == STABLE)
    t_u = sum(1 for m in td.manifolds if m.kind == UNSTABLE)
    for k in range(n_s):
        if k + 1 < t_s:
            ops.append(ModuliOperator(f"m:T:s{k}", "bar_ss", f"T:s{k}", f"T:s{k + 1}",
                                      required_shift("bar_ss", 2), ident))
    ops.append(ModuliOperator("m:T:u0", "bar_us", "T:u0", "T:s0", required_shift("bar_us", 2), ident))
    for m in range(1, n_u):
        if m - 1 < t_u:
            ops.append(ModuliOperator(f"m:T:u{m}", "bar_uu", f"T:u{m}", f"T:u{m - 1}",
                                      required_shift("bar_uu", 2), ident))
    meta = {"chi": 8, "sigma": -8, "b2": 8, "c1_sq": 0}
    cob = Cobordism(tuple(ops), 2, meta, "minus_e8")
    src.cobordism, src.target = cob, tgt
    return src


def generate(spec) -> Model:
    """Build a named model.  ``spec`` may be a ModelSpec or a model name."""
    if isinstance(spec, str):
        spec = ModelSpec(spec)
    name = spec.name
    if name == "s3":
        return _s3_like("s3", 0, spec.window, spec, {"b1": 0, "rokhlin_times8": 0})
    if name == "poincare":
        return _s3_like("poincare", -2, spec.window, spec, {"b1": 0, "rokhlin_times8": -8})
    if name == "hantzsche_wendt":
        shift = as_degree(spec.options.get("shift", 0))
        return _s3_like("hantzsche_wendt", shift, spec.window, spec, {"b1": 0, "hw_shift": str(shift)})
    if name == "s1xs2":
        return _s1xs2(spec)
    if name == "t3":
        return _t3(spec)
    if name == "flat_bundle":
        return _flat_bundle(spec)
    return _minus_e8(spec)


def _dual_cob(cob: Optional[Cobordism]) -> Optional[Cobordism]:
    from .floer import dual_operator
    if cob is None:
        return None
    return Cobordism(tuple(dual_operator(op) for op in cob.operators), cob.degree,
                     cob.metadata, cob.name)


def dual(model: Model, shift=None) -> Model:
    """Model of the orientation-reversed manifold (filtration levels negated)."""
    data = model.data.dual(shift)
    filt = None if model.filtration is None else {k: -v for k, v in model.filtration.items()}
    window = None
    if model.window is not None:
        k = as_degree(data.metadata["dual_shift"])
        window = (k - model.window[1], k - model.window[0])
    return Model(data, model.involution, _dual_cob(model.q), _dual_cob(model.v), filt, window)


def composite_fixtures(window=(-24, 24)) -> list:
    """``(name, a, b, c, first, second)`` tuples of composable cobordisms."""
    e8 = generate(ModelSpec("minus_e8_cobordism", window))
    s3, p = e8, e8.target
    id_s3, id_p = identity_cobordism(s3.data), identity_cobordism(p.data)
    return [
        ("identity then -E8", s3.data, s3.data, p.data, id_s3, e8.cobordism),
        ("-E8 then identity", s3.data, p.data, p.data, e8.cobordism, id_p),
        ("identity twice", s3.data, s3.data, s3.data, id_s3, id_s3),
    ]


def generate_random_complex(seed: int, size: int, spread: int = 4, cap: int = 4096,
                            mix: Optional[int] = None) -> GradedComplex:
    """Random complex with square-zero differential by construction.

    A direct sum of two-term isomorphisms and one-term pieces is placed on
    degrees ``0 .. spread - 1`` and then conjugated by random elementary
    basis changes inside each degree.
    """
    if size > cap:
        raise ValueError(f"size {size} exceeds the cap {cap}")
    rng = np.random.default_rng(seed)
    degree = np.zeros(size, dtype=int)
    dmat = np.zeros((size, size), dtype=np.uint8)
    i = 0
    while i < size:
        if size - i >= 2 and spread >= 2 and rng.random() < 0.5:
            d = int(rng.integers(1, spread))
            degree[i], degree[i + 1] = d, d - 1
            dmat[i + 1, i] = 1
            i += 2
        else:
            degree[i] = int(rng.integers(0, max(spread, 1)))
            i += 1
    steps = 3 * size if mix is None else mix
    for _ in range(steps):
        a, b2 = rng.integers(0, size, 2) if size else (0, 0)
        if a == b2 or degree[a] != degree[b2]:
            continue
        # new basis vector e_b := e_b + e_a, conjugate by E = I + E_ab
        dmat[:, b2] ^= dmat[:, a]
        dmat[a, :] ^= dmat[b2, :]
    cells = [(k, int(degree[k])) for k in range(size)]
    bd = {}
    for col in range(size):
        rows = np.flatnonzero(dmat[:, col]).tolist()
        if rows:
            bd[col] = frozenset(rows)
    return GradedComplex.build(cells, bd)
