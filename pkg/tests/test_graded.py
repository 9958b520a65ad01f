from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_homology, complex_cells
from pin2floer.graded import (
    FilteredComplex,
    GradedComplex,
    GradedMap,
    GradedVectorSpace,
    SquareZeroError,
    check_exactness,
    dualize,
    homology,
    induced_map,
    mapping_cone,
    spectral_sequence,
    verify_chain_map,
    verify_square_zero,
)
from pin2floer.models import generate_random_complex, local_sphere_complex
from pin2floer.pin2 import InvariantPart


def dims(h):
    return {int(d): n for d, n in h.dims.items()}


def zero_complex(spec):
    """``spec`` maps degree -> number of generators; zero differential."""
    cells = [((d, k), d) for d, n in spec.items() for k in range(n)]
    return GradedComplex.build(cells)


@st.composite
def small_complexes(draw, max_size=12):
    """Random complexes: either a conjugated direct sum or a two-degree complex."""
    size = draw(st.integers(0, max_size))
    if draw(st.booleans()):
        return generate_random_complex(draw(st.integers(0, 2**32 - 1)), size,
                                       spread=draw(st.integers(1, 5)))
    top = draw(st.integers(0, size))
    cells = [(k, 1 if k < top else 0) for k in range(size)]
    bd = {}
    for k in range(top):
        img = draw(st.sets(st.integers(top, max(top, size - 1)), max_size=size - top))
        img = frozenset(i for i in img if i < size)
        if img:
            bd[k] = img
    return GradedComplex.build(cells, bd)


@st.composite
def filtered_complexes(draw):
    c = draw(small_complexes(10))
    levels = {}
    # levels that never increase along the differential: sort generators so
    # targets come first and give each a level no lower than its targets
    order = sorted(c.space.labels(), key=lambda x: c.space.degree_of(x))
    for x in order:
        floor = max((levels[y] for y in c.boundary(x)), default=0)
        levels[x] = floor + draw(st.integers(0, 2))
    return FilteredComplex(c, levels)


# ---- square zero -----------------------------------------------------------

def test_square_zero_examples():
    assert verify_square_zero(zero_complex({0: 2, 1: 3})).ok
    c = GradedComplex.build([("a", 2), ("b", 1), ("c", 0)],
                            {"a": frozenset("b"), "b": frozenset("c")})
    rep = verify_square_zero(c)
    assert not rep.ok
    assert rep.failures[0][0] == 2
    with pytest.raises(SquareZeroError, match="2"):
        homology(c)


def test_edge_degrees_are_flagged_not_failed():
    c = GradedComplex.build([("a", 2), ("b", 1), ("c", 0)],
                            {"a": frozenset("b"), "b": frozenset("c")}, window=(1, 2))
    rep = verify_square_zero(c)
    assert rep.ok and rep.edge


# ---- homology --------------------------------------------------------------

def test_homology_zero_differential():
    assert dims(homology(zero_complex({0: 2, 1: 3}))) == {0: 2, 1: 3}


def test_sphere_homology_and_invariant_chains():
    c, cell_map = local_sphere_complex()
    assert dims(homology(c)) == {0: 1, 1: 0, 2: 1}
    assert brute_homology(*complex_cells(c)) == {0: 1, 1: 0, 2: 1}
    inv = InvariantPart(c, cell_map.get).complex
    assert dims(homology(inv)) == {0: 1, 1: 1, 2: 1}


def test_window_edges_excluded():
    c = zero_complex({k: 1 for k in range(-3, 4)}).restrict((-3, 3))
    h = homology(c)
    assert sorted(h.edge) == [-3, 3]
    with pytest.raises(KeyError):
        h.dim(3)
    assert [r for r in h.table() if r[2]] == [(-3, None, True), (3, None, True)]


def test_representatives_are_cycles():
    c = generate_random_complex(11, 12)
    h = homology(c)
    for d, reps in h.reps.items():
        for z in reps:
            assert c.differential.apply(d, z) == 0


def test_random_seed_seven_matches_oracle():
    c = generate_random_complex(7, 10)
    got = dims(homology(c))
    assert got == brute_homology(*complex_cells(c))
    assert got == {0: 0, 1: 1, 2: 1, 3: 2}


def test_random_generator_edge_cases():
    assert homology(generate_random_complex(0, 0)).total() == 0
    with pytest.raises(ValueError):
        generate_random_complex(0, 5000)


@settings(max_examples=500, deadline=None)
@given(small_complexes())
def test_homology_matches_enumeration(c):
    cells, bd = complex_cells(c)
    expected = {d: n for d, n in brute_homology(cells, bd).items()}
    assert {d: n for d, n in homology(c).dims.items() if c.space.dim(d)} == expected


@settings(max_examples=200, deadline=None)
@given(small_complexes())
def test_euler_characteristic(c):
    h = homology(c)
    chain = sum((-1) ** int(d) * c.space.dim(d) for d in c.grid())
    hom = sum((-1) ** int(d) * n for d, n in h.dims.items())
    assert chain == hom


# ---- chain maps and exactness ---------------------------------------------

def test_chain_map_examples():
    c = generate_random_complex(3, 10)
    assert verify_chain_map(GradedMap.identity(c.space), c, c).ok
    assert verify_chain_map(c.differential, c, c).ok


def test_corrupted_chain_map_fails_at_its_degree():
    c, _ = local_sphere_complex()
    ident = {x: frozenset([x]) for x in c.space.labels()}
    ident["e1+"] = frozenset(["e1+", "e1-"])
    rep = verify_chain_map(GradedMap(c.space, c.space, 0, ident), c, c)
    assert not rep.ok
    assert {d for d, _ in rep.failures} <= {1, 2}


def test_exactness_examples():
    c = zero_complex({0: 2})
    h = homology(c)
    zero = homology(GradedComplex.empty())
    idm = induced_map(GradedMap.identity(c.space), h, h)
    into = induced_map(GradedMap.zero(zero.complex.space, c.space, 0), zero, h)
    out = induced_map(GradedMap.zero(c.space, zero.complex.space, 0), h, zero)
    assert check_exactness([into, idm]).ok
    assert not check_exactness([into, out]).ok


@settings(max_examples=100, deadline=None)
@given(small_complexes(8), st.integers(0, 2**32 - 1))
def test_mapping_cone_sequence_is_exact(c, seed):
    f = [GradedMap.identity(c.space), GradedMap.zero(c.space, c.space, 0),
         c.differential][seed % 3]
    cone, incl, proj = mapping_cone(f, c, c)
    h, hc = homology(c), homology(cone)
    seq = [induced_map(incl, h, hc), induced_map(proj, hc, h), induced_map(f, h, h)]
    assert check_exactness(seq, cyclic=True).ok


def test_mapping_cone_of_identity_is_acyclic():
    c = generate_random_complex(5, 10)
    cone, _, _ = mapping_cone(GradedMap.identity(c.space), c, c)
    assert homology(cone).total() == 0


# ---- dualize ---------------------------------------------------------------

def test_dualize_examples():
    d = dualize(zero_complex({0: 1, 1: 2}), 0)
    assert dims(homology(d)) == {-1: 2, 0: 1}
    c = generate_random_complex(9, 10)
    assert dualize(dualize(c, 3), 3) == c


@settings(max_examples=100, deadline=None)
@given(small_complexes(), st.integers(-5, 5))
def test_dualize_mirrors_homology(c, k):
    h, hd = homology(c), homology(dualize(c, k))
    for d, n in h.dims.items():
        assert hd.dims.get(k - d, 0) == n


# ---- spectral sequences ----------------------------------------------------

def test_single_level_collapses_immediately():
    c = generate_random_complex(2, 10)
    ss = spectral_sequence(FilteredComplex(c, {x: 0 for x in c.space.labels()}))
    assert ss.nonzero_pages == [] and ss.collapse_page == 1
    assert {int(d): n for d, n in ss.total_dims(1).items()} == \
        {int(d): n for d, n in homology(c).nonzero().items()}


def test_two_level_cancellation():
    c = GradedComplex.build([("a", 1), ("b", 0)], {"a": frozenset("b")})
    ss = spectral_sequence(FilteredComplex(c, {"a": 1, "b": 0}))
    assert sum(ss.pages[1].values()) == 2
    assert ss.nonzero_pages == [1]
    assert ss.pages[2] == {} and ss.limit == {}


def test_filtration_violation_names_generator():
    c = GradedComplex.build([("a", 1), ("b", 0)], {"a": frozenset("b")})
    with pytest.raises(ValueError, match="'a'"):
        FilteredComplex(c, {"a": 0, "b": 1})


@settings(max_examples=200, deadline=None)
@given(filtered_complexes())
def test_spectral_sequence_abutment(f):
    ss = spectral_sequence(f)
    limit: dict = {}
    for (_, d), n in ss.limit.items():
        limit[d] = limit.get(d, 0) + n
    assert limit == homology(f.complex).nonzero()
    if ss.collapse_page < len(ss.pages):
        assert {d: n for d, n in ss.total_dims(ss.collapse_page).items() if n} == limit


def test_graded_space_rejects_duplicates_and_floats():
    with pytest.raises(ValueError):
        GradedVectorSpace.from_labels([("a", 0), ("a", 1)])
    with pytest.raises((TypeError, ValueError)):
        GradedVectorSpace.from_labels([("a", 0.5)])
    s = GradedVectorSpace.from_labels([("a", Fraction(1, 2))])
    assert s.degree_of("a") == Fraction(1, 2)
