"""Rationally graded chain complexes over GF(2) on a finite degree window.

Chains are sparse: a linear map is stored as ``label -> frozenset(labels)``
(the image of each basis element).  Per-degree work converts to bitsets
indexed by the position of a label inside its degree.

A window ``(lo, hi)`` marks the finite fragment of a possibly infinite
complex that was kept.  A degree ``d`` is *interior* when ``d - 1`` and
``d + 1`` both lie inside the window, so its homology sees every chain it
depends on.  Other window degrees are reported as edge degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from ._parallel import pmap
from .gf2 import BitMatrix, BitVector, Subspace, _ColumnReducer, bits, solve

__all__ = [
    "as_degree",
    "Window",
    "is_interior",
    "sparse_add",
    "sparse_compose",
    "GradedVectorSpace",
    "GradedMap",
    "GradedComplex",
    "FilteredComplex",
    "ValidationReport",
    "SquareZeroError",
    "Homology",
    "HomologyMap",
    "verify_square_zero",
    "homology",
    "verify_chain_map",
    "induced_map",
    "connecting_map",
    "check_exactness",
    "mapping_cone",
    "dualize",
    "SpectralSequence",
    "spectral_sequence",
]

Window = Optional[tuple]
Sparse = Mapping[Hashable, frozenset]


def as_degree(x) -> Fraction:
    """Coerce ints, Fractions and ``"n/d"`` strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"gradings must be exact, got {x!r}")
    return Fraction(x)


def _window(w) -> Window:
    if w is None:
        return None
    lo, hi = as_degree(w[0]), as_degree(w[1])
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    return (lo, hi)


def in_window(d, window: Window) -> bool:
    return window is None or window[0] <= d <= window[1]


def is_interior(d, window: Window, reach=1) -> bool:
    """True when ``d - reach`` and ``d + reach`` both lie in the window."""
    return window is None or (window[0] <= d - reach and d + reach <= window[1])


def sparse_add(*maps: Sparse) -> dict:
    """Sum of sparse maps over GF(2)."""
    out: dict = {}
    for m in maps:
        for x, ys in m.items():
            acc = out.get(x, frozenset()) ^ frozenset(ys)
            if acc:
                out[x] = acc
            else:
                out.pop(x, None)
    return out


def sparse_compose(f: Sparse, g: Sparse) -> dict:
    """The composite ``f o g`` (apply ``g`` first)."""
    out = {}
    for x, ys in g.items():
        acc: frozenset = frozenset()
        for y in ys:
            img = f.get(y)
            if img:
                acc = acc ^ img
        if acc:
            out[x] = acc
    return out


class GradedVectorSpace:
    """Finite graded vector space: ``degrees[d]`` is the ordered basis in degree ``d``."""

    def __init__(self, degrees: Mapping = ()):
        degs = {}
        index = {}
        for d, labels in sorted(((as_degree(d), tuple(ls)) for d, ls in dict(degrees).items())):
            if not labels:
                continue
            k = len(degs)
            degs[d] = labels
            for i, lab in enumerate(labels):
                if lab in index:
                    raise ValueError(f"basis label {lab!r} appears twice")
                index[lab] = (d, i, k)
        self.degrees: dict = degs
        self._index = index
        self._sets: dict = {}

    @classmethod
    def from_labels(cls, items: Iterable[tuple]) -> "GradedVectorSpace":
        """Build from ``(label, degree)`` pairs, keeping their order within each degree."""
        groups: dict = {}
        for lab, d in items:
            if type(d) is not Fraction:
                d = as_degree(d)
            groups.setdefault((d.numerator, d.denominator), []).append(lab)
        return cls({Fraction(n, q): ls for (n, q), ls in groups.items()})

    def __contains__(self, label) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self._index)

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedVectorSpace) and self.degrees == other.degrees

    def __hash__(self):
        return hash(tuple(self.degrees.items()))

    def __repr__(self) -> str:
        dims = {str(d): len(v) for d, v in self.degrees.items()}
        return f"GradedVectorSpace({dims})"

    def labels(self) -> list:
        return [lab for ls in self.degrees.values() for lab in ls]

    def degree_of(self, label) -> Fraction:
        return self._index[label][0]

    def position(self, label) -> int:
        return self._index[label][1]

    def dim(self, d) -> int:
        return len(self.degrees.get(as_degree(d), ()))

    def basis(self, d) -> tuple:
        return self.degrees.get(as_degree(d), ())

    def label_set(self, d) -> frozenset:
        """Basis labels of degree ``d`` as a set (cached)."""
        out = self._sets.get(d)
        if out is None:
            out = self._sets[d] = frozenset(self.degrees.get(d, ()))
        return out

    def restrict(self, window: Window) -> "GradedVectorSpace":
        if window is None:
            return self
        return GradedVectorSpace({d: ls for d, ls in self.degrees.items() if in_window(d, window)})

    def vector(self, d, labels: Iterable) -> int:
        """Bitset over the degree-``d`` basis for a set of labels."""
        v = 0
        for lab in labels:
            deg, i, _ = self._index[lab]
            if deg != d:
                raise ValueError(f"label {lab!r} has degree {deg}, expected {d}")
            v ^= 1 << i
        return v

    def labels_of(self, d, v: int) -> frozenset:
        basis = self.degrees.get(d, ())
        return frozenset(basis[i] for i in bits(v))

    def grid(self, window: Window) -> list:
        """All degrees in the window congruent mod 1 to some occupied degree."""
        if not self.degrees:
            return []
        residues = sorted({d - math.floor(d) for d in self.degrees})
        out = []
        for r in residues:
            if window is None:
                occ = [d for d in self.degrees if d - math.floor(d) == r]
                lo_n, hi_n = math.floor(min(occ)), math.floor(max(occ))
            else:
                lo_n, hi_n = math.ceil(window[0] - r), math.floor(window[1] - r)
            out.extend(r + n for n in range(lo_n, hi_n + 1))
        return sorted(out)


class GradedMap:
    """Homogeneous linear map of a fixed degree shift between graded spaces.

    ``images`` maps each source label to the set of target labels in its
    image.  Targets outside ``target`` are dropped when ``strict`` is false
    (window truncation); a target present at the wrong degree always raises.
    """

    def __init__(self, source: GradedVectorSpace, target: GradedVectorSpace, shift,
                 images: Sparse = (), strict: bool = True):
        self.source = source
        self.target = target
        self.shift = as_degree(shift)
        clean = {}
        allowed_by_k = [target.label_set(d + self.shift) for d in source.degrees]
        sindex = source._index
        for x, ys in dict(images).items():
            pos = sindex.get(x)
            if pos is None:
                if strict:
                    raise ValueError(f"source label {x!r} not in the source space")
                continue
            allowed = allowed_by_k[pos[2]]
            keep = set()
            for y in ys:
                if y in allowed:
                    keep.add(y)
                    continue
                if y not in target:
                    if strict:
                        raise ValueError(f"target label {y!r} not in the target space")
                    continue
                raise ValueError(
                    f"entry {x!r} -> {y!r} has degree {target.degree_of(y) - source.degree_of(x)}, "
                    f"map declares {self.shift}")
            if keep:
                clean[x] = frozenset(keep)
        self.images: dict = clean
        self._blocks: dict = {}

    def __repr__(self) -> str:
        return f"GradedMap(shift={self.shift}, entries={sum(map(len, self.images.values()))})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMap) and self.shift == other.shift
                and self.source == other.source and self.target == other.target
                and self.images == other.images)

    @classmethod
    def identity(cls, space: GradedVectorSpace) -> "GradedMap":
        return cls(space, space, 0, {x: frozenset([x]) for x in space.labels()})

    @classmethod
    def zero(cls, source, target, shift) -> "GradedMap":
        return cls(source, target, shift, {})

    def is_zero(self) -> bool:
        return not self.images

    def columns(self, d) -> list:
        """Images of the degree-``d`` basis as bitsets over the target degree."""
        t = d + self.shift
        return [self.target.vector(t, self.images.get(x, ())) for x in self.source.basis(d)]

    def block(self, d) -> BitMatrix:
        d = as_degree(d)
        blk = self._blocks.get(d)
        if blk is None:
            blk = BitMatrix.from_columns(self.target.dim(d + self.shift), self.columns(d))
            self._blocks[d] = blk
        return blk

    def apply(self, d, v: int) -> int:
        """Image of a degree-``d`` bitset as a bitset in degree ``d + shift``."""
        out = 0
        t = d + self.shift
        basis = self.source.basis(d)
        for i in bits(v):
            out ^= self.target.vector(t, self.images.get(basis[i], ()))
        return out

    def apply_labels(self, labels: Iterable) -> frozenset:
        acc: frozenset = frozenset()
        for x in labels:
            acc = acc ^ self.images.get(x, frozenset())
        return acc

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        if other.target != self.source:
            raise ValueError("maps do not compose")
        return GradedMap(other.source, self.target, self.shift + other.shift,
                         sparse_compose(self.images, other.images))

    def __add__(self, other: "GradedMap") -> "GradedMap":
        if self.shift != other.shift or self.source != other.source or self.target != other.target:
            raise ValueError("maps have different shapes")
        return GradedMap(self.source, self.target, self.shift, sparse_add(self.images, other.images))

    def restrict(self, source: GradedVectorSpace, target: GradedVectorSpace) -> "GradedMap":
        imgs = {x: ys for x, ys in self.images.items() if x in source}
        return GradedMap(source, target, self.shift, imgs, strict=False)


class GradedComplex:
    """A graded space with a degree -1 differential and an optional window.

    ``window=None`` means the complex is complete (nothing was truncated).
    """

    def __init__(self, space: GradedVectorSpace, differential: GradedMap, window=None):
        if differential.shift != -1:
            raise ValueError(f"differential must have degree -1, got {differential.shift}")
        if differential.source != space or differential.target != space:
            raise ValueError("differential must be an endomorphism of the space")
        self.space = space
        self.differential = differential
        self.window = _window(window)

    @classmethod
    def build(cls, cells: Iterable[tuple], boundary: Sparse = (), window=None) -> "GradedComplex":
        """Complex from ``(label, degree)`` pairs and a boundary map.

        Generators outside the window are discarded together with their
        boundary terms.
        """
        window = _window(window)
        space = GradedVectorSpace.from_labels(cells).restrict(window)
        return cls(space, GradedMap(space, space, -1, boundary, strict=False), window)

    @classmethod
    def empty(cls, window=None) -> "GradedComplex":
        space = GradedVectorSpace()
        return cls(space, GradedMap.zero(space, space, -1), window)

    def __repr__(self) -> str:
        return f"GradedComplex({self.space!r}, window={self.window})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedComplex) and self.space == other.space
                and self.differential == other.differential and self.window == other.window)

    def interior(self, d, reach=1) -> bool:
        return is_interior(d, self.window, reach)

    def grid(self) -> list:
        return self.space.grid(self.window)

    def boundary(self, label) -> frozenset:
        return self.differential.images.get(label, frozenset())

    def restrict(self, window) -> "GradedComplex":
        window = _window(window)
        if window is not None and self.window is not None:
            window = (max(window[0], self.window[0]), min(window[1], self.window[1]))
        space = self.space.restrict(window)
        return GradedComplex(space, self.differential.restrict(space, space), window)


@dataclass
class ValidationReport:
    """Outcome of a check: failures are ``(degree, message)`` pairs."""

    ok: bool = True
    failures: list = field(default_factory=list)
    edge: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    details: list = field(default_factory=list)

    def fail(self, degree, message: str) -> None:
        self.ok = False
        self.failures.append((degree, message))

    def merge(self, other: "ValidationReport", prefix: str = "") -> None:
        self.ok = self.ok and other.ok
        self.failures.extend((d, prefix + m) for d, m in other.failures)
        self.edge.extend(other.edge)
        self.warnings.extend(prefix + w for w in other.warnings)
        self.details.extend(other.details)

    def lines(self) -> list:
        out = [f"FAIL degree {d}: {m}" for d, m in self.failures]
        out += [f"WARN {w}" for w in self.warnings]
        if self.edge:
            out.append("edge degrees: " + ", ".join(str(d) for d in sorted(set(self.edge))))
        out.append("PASS" if self.ok else "FAIL")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


class SquareZeroError(ValueError):
    def __init__(self, degree, message="differential does not square to zero"):
        super().__init__(f"{message} at degree {degree}")
        self.degree = degree


def verify_square_zero(c: GradedComplex) -> ValidationReport:
    """Check that the differential squares to zero degree by degree.

    Degrees whose two-step composite leaves the window are reported as
    edge degrees instead of failures.
    """
    rep = ValidationReport()
    dd = sparse_compose(c.differential.images, c.differential.images)
    bad: dict = {}
    for x, ys in dd.items():
        bad.setdefault(c.space.degree_of(x), []).append((x, ys))
    for d in sorted(set(c.space.degrees) | set(bad)):
        reliable = in_window(d, c.window) and in_window(d - 2, c.window)
        if not reliable:
            rep.edge.append(d)
            if d in bad:
                rep.warnings.append(f"nonzero square at edge degree {d}")
            continue
        if d in bad:
            x, ys = sorted(bad[d], key=repr)[0]
            rep.fail(d, f"d(d({x!r})) = {sorted(ys, key=repr)!r}")
    return rep


class Homology:
    """Homology of a complex on its interior degrees, with representative cycles."""

    def __init__(self, c: GradedComplex):
        self.complex = c
        self.dims: dict = {}
        self.reps: dict = {}
        self._reducers: dict = {}
        self.edge: list = []
        interior = []
        for d in c.grid():
            (interior if c.interior(d) else self.edge).append(d)
        for d, (reps, red) in zip(interior, pmap(self._degree, interior)):
            self.dims[d] = len(reps)
            self.reps[d] = reps
            self._reducers[d] = red

    def _degree(self, d):
        dmap = self.complex.differential
        ker = _ColumnReducer(dmap.columns(d)).kernel
        red = Subspace()
        for b in dmap.columns(d + 1):
            red.add(b, 0)
        reps = []
        for z in ker:
            if red.add(z, 1 << len(reps)):
                reps.append(z)
        return reps, red

    def __repr__(self) -> str:
        return f"Homology({self.nonzero()})"

    def degrees(self) -> list:
        return sorted(self.dims)

    def dim(self, d) -> int:
        d = as_degree(d)
        if d not in self.dims:
            if not self.complex.interior(d):
                raise KeyError(f"degree {d} is not interior to the window")
            return 0
        return self.dims[d]

    def reliable(self, d) -> bool:
        return self.complex.interior(d)

    def nonzero(self) -> dict:
        return {d: n for d, n in self.dims.items() if n}

    def total(self) -> int:
        return sum(self.dims.values())

    def coords(self, d, cycle: int) -> int:
        """Coordinates of a cycle in the representative basis of degree ``d``."""
        if cycle == 0 or self.dims.get(d, 0) == 0:
            if cycle and self.complex.differential.apply(d, cycle):
                raise ValueError(f"vector in degree {d} is not a cycle")
            return 0
        rest, tag = self._reducers[d].reduce(cycle)
        if rest:
            raise ValueError(f"vector in degree {d} is not a cycle")
        return tag

    def rep_labels(self, d, k: int) -> frozenset:
        return self.complex.space.labels_of(d, self.reps[d][k])

    def table(self) -> list:
        """Rows ``(degree, dimension or None, is_edge)`` over the window grid."""
        rows = [(d, n, False) for d, n in self.dims.items()]
        rows += [(d, None, True) for d in self.edge]
        return sorted(rows, key=lambda r: r[0])


def homology(c: GradedComplex) -> Homology:
    rep = verify_square_zero(c)
    if not rep.ok:
        raise SquareZeroError(rep.failures[0][0])
    return Homology(c)


def verify_chain_map(f: GradedMap, c_src: GradedComplex, c_tgt: GradedComplex) -> ValidationReport:
    """Check ``d f = f d`` on every source degree whose terms are all in-window."""
    if f.source != c_src.space or f.target != c_tgt.space:
        raise ValueError("map spaces do not match the complexes")
    rep = ValidationReport()
    lhs = sparse_compose(c_tgt.differential.images, f.images)
    rhs = sparse_compose(f.images, c_src.differential.images)
    diff = sparse_add(lhs, rhs)
    s = f.shift
    bad: dict = {}
    for x in diff:
        bad.setdefault(c_src.space.degree_of(x), []).append(x)
    for d in sorted(set(c_src.space.degrees) | set(bad)):
        reliable = (in_window(d - 1, c_src.window) and in_window(d, c_src.window)
                    and in_window(d + s, c_tgt.window) and in_window(d + s - 1, c_tgt.window))
        if not reliable:
            rep.edge.append(d)
            continue
        if d in bad:
            x = sorted(bad[d], key=repr)[0]
            rep.fail(d, f"chain map identity fails on {x!r}")
    return rep


@dataclass
class HomologyMap:
    """Map between homologies given by one matrix per source degree."""

    source: Homology
    target: Homology
    shift: Fraction
    matrices: dict

    def matrix(self, d) -> Optional[BitMatrix]:
        return self.matrices.get(as_degree(d))

    def rank(self) -> dict:
        from .gf2 import rank
        return {d: rank(m) for d, m in self.matrices.items()}

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.matrices.values())

    def is_isomorphism(self) -> bool:
        from .gf2 import rank
        return all(m.rows == m.cols and rank(m) == m.rows for m in self.matrices.values())


def induced_map(f: GradedMap, hs: Homology, ht: Homology) -> HomologyMap:
    """Matrices of ``f_*`` on degrees where both homologies are reliable."""
    mats = {}
    for d in hs.degrees():
        t = d + f.shift
        if not ht.reliable(t):
            continue
        cols = [ht.coords(t, f.apply(d, z)) for z in hs.reps[d]]
        mats[d] = BitMatrix.from_columns(ht.dim(t), cols)
    return HomologyMap(hs, ht, f.shift, mats)


def connecting_map(f: GradedMap, g: GradedMap, ha: Homology, hb: Homology, hc: Homology) -> HomologyMap:
    """Connecting map ``H_d(C) -> H_{d-1}(A)`` of ``0 -> A -f-> B -g-> C -> 0``."""
    if f.shift != 0 or g.shift != 0:
        raise ValueError("short exact sequence maps must have degree 0")
    dB = hb.complex.differential
    mats = {}
    for d in hc.degrees():
        if not (ha.reliable(d - 1) and hb.complex.interior(d)):
            continue
        cols = []
        for z in hc.reps[d]:
            lift = solve(g.block(d), BitVector(hc.complex.space.dim(d), z))
            if lift is None:
                raise ValueError(f"g is not surjective in degree {d}")
            db = dB.apply(d, lift.value)
            a = solve(f.block(d - 1), BitVector(hb.complex.space.dim(d - 1), db))
            if a is None:
                raise ValueError(f"sequence is not exact in degree {d - 1}")
            cols.append(ha.coords(d - 1, a.value))
        mats[d] = BitMatrix.from_columns(ha.dim(d - 1), cols)
    return HomologyMap(hc, ha, Fraction(-1), mats)


def check_exactness(seq: Sequence[HomologyMap], cyclic: bool = False) -> ValidationReport:
    """Verify image = kernel at every junction of a sequence of homology maps.

    Junction ``k`` sits at the target of ``seq[k]``.  Only degrees where all
    three homologies are reliable are examined.
    """
    from .gf2 import rank
    rep = ValidationReport()
    n = len(seq)
    pairs = [(k, k + 1) for k in range(n - 1)]
    if cyclic and n:
        pairs.append((n - 1, 0))
    for a, b in pairs:
        f, g = seq[a], seq[b]
        if f.target is not g.source:
            raise ValueError(f"maps {a} and {b} do not compose")
        mid = f.target
        degrees = sorted(set(mid.dims) | {d + f.shift for d in f.matrices} | set(g.matrices))
        for d in degrees:
            fm = f.matrices.get(d - f.shift)
            gm = g.matrices.get(d)
            if fm is None and not (f.source.reliable(d - f.shift) and f.source.dim(d - f.shift) == 0):
                rep.edge.append(d)
                continue
            if gm is None and not (g.target.reliable(d + g.shift) and g.target.dim(d + g.shift) == 0):
                rep.edge.append(d)
                continue
            if d not in mid.dims:
                rep.edge.append(d)
                continue
            m = mid.dims[d]
            rf = rank(fm) if fm is not None else 0
            rg = rank(gm) if gm is not None else 0
            composite_zero = fm is None or gm is None or (gm @ fm).is_zero()
            exact = composite_zero and rf == m - rg
            rep.details.append({"junction": b, "degree": d, "image": rf, "kernel": m - rg, "exact": exact})
            if not exact:
                rep.fail(d, f"junction {b}: image dim {rf}, kernel dim {m - rg}"
                         + ("" if composite_zero else ", composite nonzero"))
    return rep


def _merge_windows(a: Window, b: Window) -> Window:
    if a is None:
        return b
    if b is None:
        return a
    return (max(a[0], b[0]), min(a[1], b[1]))


def mapping_cone(f: GradedMap, c_src: GradedComplex, c_tgt: GradedComplex):
    """Cone of a chain map with its inclusion and projection maps.

    Returns ``(cone, incl, proj)`` with ``incl: tgt -> cone`` of degree 0 and
    ``proj: cone -> src`` of degree ``-(shift + 1)``.
    """
    s = f.shift
    cells = [(("a", x), c_src.space.degree_of(x) + s + 1) for x in c_src.space.labels()]
    cells += [(("b", y), c_tgt.space.degree_of(y)) for y in c_tgt.space.labels()]
    bd = {}
    for x in c_src.space.labels():
        img = {("a", y) for y in c_src.boundary(x)} | {("b", y) for y in f.images.get(x, ())}
        if img:
            bd[("a", x)] = frozenset(img)
    for y in c_tgt.space.labels():
        if c_tgt.boundary(y):
            bd[("b", y)] = frozenset(("b", z) for z in c_tgt.boundary(y))
    sw = None if c_src.window is None else (c_src.window[0] + s + 1, c_src.window[1] + s + 1)
    cone = GradedComplex.build(cells, bd, _merge_windows(sw, c_tgt.window))
    incl = GradedMap(c_tgt.space, cone.space, 0,
                     {y: frozenset([("b", y)]) for y in c_tgt.space.labels()}, strict=False)
    proj = GradedMap(cone.space, c_src.space, -(s + 1),
                     {("a", x): frozenset([x]) for x in c_src.space.labels()}, strict=False)
    return cone, incl, proj


def dualize(c: GradedComplex, shift_constant) -> GradedComplex:
    """Dual complex: degree ``d`` goes to ``shift_constant - d``, differential transposed."""
    k = as_degree(shift_constant)
    cells = [(x, k - c.space.degree_of(x)) for x in c.space.labels()]
    tr: dict = {}
    for x, ys in c.differential.images.items():
        for y in ys:
            tr.setdefault(y, set()).add(x)
    window = None if c.window is None else (k - c.window[1], k - c.window[0])
    space = GradedVectorSpace.from_labels(cells)
    return GradedComplex(space, GradedMap(space, space, -1, {y: frozenset(xs) for y, xs in tr.items()}), window)


class FilteredComplex:
    """A complex with an integer filtration level for each generator."""

    def __init__(self, complex: GradedComplex, level: Mapping):
        self.complex = complex
        self.level = {x: int(level[x]) for x in complex.space.labels()}
        for x, ys in complex.differential.images.items():
            for y in ys:
                if self.level[y] > self.level[x]:
                    raise ValueError(f"differential raises filtration level on generator {x!r}")


@dataclass
class SpectralSequence:
    """Pages ``E^r`` as ``{(p, d): dim}`` plus ranks of ``d_r`` out of each spot."""

    pages: list
    ranks: list
    limit: dict
    nonzero_pages: list
    collapse_page: int

    def total_dims(self, r: int) -> dict:
        out: dict = {}
        for (p, d), n in self.pages[r].items():
            out[d] = out.get(d, 0) + n
        return out


def spectral_sequence(f: FilteredComplex, max_page: int = 4) -> SpectralSequence:
    """Spectral sequence of an increasing filtration, interior degrees only.

    Uses ``Z^r_p = {x in F_p : dx in F_{p-r}}`` and
    ``E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1})``.
    """
    c = f.complex
    dmap = c.differential
    levels = sorted(set(f.level.values()))
    if not levels:
        return SpectralSequence([{} for _ in range(max_page + 1)], [{} for _ in range(max_page + 1)], {}, [], 1)
    pmin, pmax = levels[0], levels[-1]
    span = pmax - pmin
    last = max(max_page, span + 1)
    cache: dict = {}

    def Z(r, p, d):
        key = (r, p, d)
        if key in cache:
            return cache[key]
        basis = c.space.basis(d)
        sel = [i for i, x in enumerate(basis) if f.level[x] <= p]
        if r <= 0 or not sel:
            out = [1 << i for i in sel]
        else:
            tbasis = c.space.basis(d - 1)
            mask = 0
            for j, y in enumerate(tbasis):
                if f.level[y] > p - r:
                    mask |= 1 << j
            cols = [dmap.apply(d, 1 << i) & mask for i in sel]
            out = []
            for tag in _ColumnReducer(cols).kernel:
                v = 0
                for k in bits(tag):
                    v |= 1 << sel[k]
                out.append(v)
        cache[key] = out
        return out

    def dim_span(*groups) -> int:
        s = Subspace()
        for g in groups:
            for v in g:
                s.add(v)
        return len(s)

    def dZ(r, p, d):
        return [dmap.apply(d + 1, v) for v in Z(r, p, d + 1)]

    degrees = [d for d in c.grid() if c.interior(d)]
    pages, ranks = [], []
    for r in range(last + 1):
        page, rk = {}, {}
        for d in degrees:
            for p in range(pmin, pmax + 1):
                z = dim_span(Z(r, p, d))
                e = z - dim_span(Z(r - 1, p - 1, d), dZ(r - 1, p + r - 1, d))
                if e:
                    page[(p, d)] = e
                    k = z - dim_span(Z(r + 1, p, d), Z(r - 1, p - 1, d))
                    if k:
                        rk[(p, d)] = k
        pages.append(page)
        ranks.append(rk)
    nonzero = [r for r in range(1, last + 1) if ranks[r]]
    collapse = (max(nonzero) + 1) if nonzero else 1
    return SpectralSequence(pages[: max_page + 1], ranks[: max_page + 1], pages[last], nonzero, collapse)
