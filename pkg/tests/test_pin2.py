from fractions import Fraction

import pytest

from oracles import brute_homology, complex_cells
from pin2floer.floer import FLAVORS, Cobordism, FloerData, assemble
from pin2floer.graded import GradedComplex, homology
from pin2floer.models import ModelSpec, dual, generate, local_sphere_complex
from pin2floer.pin2 import (
    InconclusiveWindow,
    InvariantPart,
    InvariantRecord,
    Involution,
    StandardModuleParams,
    check_involution,
    check_invariant_properties,
    classify_image_i,
    gysin_for_complex,
    gysin_sequence,
    image_subcomplex,
    induced_module,
    invariant_subcomplex,
    quasi_isomorphism_report,
)

W = (-20, 20)


def dims(h):
    return {int(d): n for d, n in h.dims.items() if n}


def model(name, window=W):
    return generate(ModelSpec(name, window))


def invariants(m, window=None):
    return classify_image_i(m.data, m.involution, m.q, m.v, window or m.window)


# ---- invariant and image subcomplexes --------------------------------------

def test_identity_involution_keeps_everything():
    c, _ = local_sphere_complex()
    part = InvariantPart(c, lambda x: x)
    assert dims(homology(part.complex)) == dims(homology(c))
    img, _, _ = image_subcomplex(c, lambda x: x)
    assert len(img.space) == 0


def test_swap_fixes_the_orbit_sum():
    c = GradedComplex.build([("a", 0), ("b", 0)])
    swap = {"a": "b", "b": "a"}.get
    part = InvariantPart(c, swap)
    assert dims(homology(part.complex)) == {0: 1}
    img, _, _ = image_subcomplex(c, swap)
    assert len(img.space) == len(part.complex.space) == 1


def test_antipodal_sphere_gives_projective_plane():
    c, cell_map = local_sphere_complex()
    inv, _ = invariant_subcomplex(c, cell_map.get)
    got = dims(homology(inv))
    assert got == {0: 1, 1: 1, 2: 1}
    assert got == brute_homology(*complex_cells(inv))
    img, _, _ = image_subcomplex(c, cell_map.get)
    assert dims(homology(img)) == got
    assert quasi_isomorphism_report(c, cell_map.get).ok
    assert all(cell_map[cell_map[x]] == x for x in cell_map)


def test_sphere_gysin_sequence():
    c, cell_map = local_sphere_complex()
    assert gysin_for_complex(c, cell_map.get).ok


# ---- involution checks -----------------------------------------------------

def test_involution_must_square_to_identity():
    m = model("s3")
    cells = dict(m.involution.cell_map)
    a = next(iter(cells))
    b = cells[a]
    cells[a] = a
    bad = Involution(m.involution.manifold_map, cells)
    rep = check_involution(m.data, bad)
    assert not rep.ok
    assert any(str(a[0]) in msg or str(b[0]) in msg for _, msg in rep.failures)


@pytest.mark.parametrize("name", ["s3", "poincare", "s1xs2", "t3", "flat_bundle"])
def test_builtin_involutions_pass(name):
    m = model(name)
    assert check_involution(m.data, m.involution, m.window).ok


def test_empty_data_gysin_is_vacuous():
    data = FloerData()
    for f in FLAVORS:
        assert gysin_sequence(data, Involution.trivial(data), f).ok


@pytest.mark.parametrize("name", ["s3", "t3"])
@pytest.mark.parametrize("flavor", FLAVORS)
def test_gysin_exact_on_models(name, flavor):
    m = model(name)
    assert gysin_sequence(m.data, m.involution, flavor, m.window).ok


@pytest.mark.parametrize("name", ["s3", "poincare", "s1xs2", "t3", "flat_bundle"])
def test_image_is_quasi_isomorphic_to_invariants(name):
    m = model(name)
    for f in FLAVORS:
        c = assemble(m.data, f, m.window)
        assert quasi_isomorphism_report(c, m.involution).ok


# ---- module structure ------------------------------------------------------

def test_zero_operators_act_by_zero():
    m = model("s3")
    q, v = Cobordism((), -1), Cobordism((), -4)
    mod = induced_module(m.data, m.involution, q, v, "hat", m.window)
    assert mod.q.is_zero() and mod.v.is_zero()


def test_module_degrees_are_enforced():
    m = model("s3")
    with pytest.raises(ValueError, match="degree"):
        induced_module(m.data, m.involution, m.v, m.q, "hat", m.window)


def test_s3_hat_is_the_ring():
    m = model("s3")
    mod = induced_module(m.data, m.involution, m.q, m.v, "hat", m.window)
    h = mod.homology
    tops = [d for d in h.degrees() if h.dims[d] and d % 4 == 3]
    seen = 0
    for d in tops:
        q1, q2, q3 = mod.word("Q", d, 1), mod.word("QQ", d, 1), mod.word("QQQ", d, 1)
        if q2 is None:
            continue
        assert q1 and q2
        assert not q3
        seen += 1
    assert seen >= 3
    levels = 0
    for d in h.degrees():
        if h.dims[d] and h.reliable(d - 4) and h.dims.get(d - 4):
            vm = mod.v.matrix(d)
            if vm is not None:
                assert vm.rows == vm.cols == 1 and vm.apply(1) == 1
                levels += 1
    assert levels >= 3


def test_s1xs2_module_splits_in_two():
    m = model("s1xs2")
    mod = induced_module(m.data, m.involution, m.q, m.v, "bar", m.window)
    h = mod.homology
    # two standard towers offset by one degree
    assert {h.dims[d] for d in h.degrees()} <= {1, 2}
    assert any(h.dims[d] == 2 for d in h.degrees())


# ---- invariants ------------------------------------------------------------

def test_s3_invariants():
    p = invariants(model("s3"))
    assert p.as_tuple() == (0, 0, 0)
    assert p.shift == 0


def test_poincare_invariants():
    p = invariants(model("poincare"))
    assert p.as_tuple() == (-1, -1, -1)
    assert all(isinstance(x, Fraction) for x in p.as_tuple())


def test_dual_poincare_invariants():
    d = dual(model("poincare"))
    assert invariants(d).as_tuple() == (1, 1, 1)


def test_dual_s3_invariants():
    assert invariants(dual(model("s3"))).as_tuple() == (0, 0, 0)


def test_window_above_the_minima_is_inconclusive():
    with pytest.raises(InconclusiveWindow):
        invariants(model("s3", (-2, 6)), (-2, 6))


def test_invariants_need_rational_homology_sphere():
    m = model("s1xs2")
    with pytest.raises(ValueError, match="b1"):
        classify_image_i(m.data, m.involution, m.q, m.v, m.window)


def test_invariant_properties_on_models():
    recs = []
    for name in ("s3", "poincare"):
        m = model(name)
        recs.append(InvariantRecord(name, invariants(m), m.data.metadata["rokhlin_times8"],
                                    invariants(dual(m))))
    assert check_invariant_properties(recs).ok


def test_ordering_violation_is_reported():
    bad = InvariantRecord("bad", StandardModuleParams(-1, 0, 0))
    rep = check_invariant_properties([bad])
    assert not rep.ok and "ordering" in rep.failures[0][1]


def test_rokhlin_violation_is_reported():
    rec = InvariantRecord("odd", StandardModuleParams(0, 0, 0), rokhlin_times8=8)
    rep = check_invariant_properties([rec])
    assert not rep.ok and "congruent" in rep.failures[0][1]


def test_dual_mismatch_is_reported():
    rec = InvariantRecord("x", StandardModuleParams(1, 0, -1), dual=StandardModuleParams(1, 0, -1))
    assert check_invariant_properties([rec]).ok
    rec = InvariantRecord("x", StandardModuleParams(1, 0, 0), dual=StandardModuleParams(1, 0, 0))
    assert not check_invariant_properties([rec]).ok
