import numpy as np
import pytest

from ofbf import construct, groups as grp, measures as ms
from ofbf.errors import InadmissiblePair, InvalidInput, UseAbsolutelyContinuous
from ofbf.symmetry import classify, range_group_of_values


@pytest.mark.parametrize("target", ["C2", "D2", "SO2", "O2"])
@pytest.mark.parametrize("need_real", [True, False])
def test_recipes_verify_themselves(target, need_real):
    forbidden = (need_real and target == "SO2") or (not need_real and target in ("D2", "O2"))
    if forbidden:
        with pytest.raises(InadmissiblePair):
            construct.recipe_for_range(target, need_real)
        return
    r = construct.recipe_for_range(target, need_real)
    assert range_group_of_values(r.H, [r.AAstar]).iso_type() == target
    assert (np.max(np.abs(r.AAstar.imag)) == 0) == need_real


def test_so2_recipe_kappa():
    r = construct.recipe_for_range("so2", False, kappa=0.5)
    assert r.AAstar[0, 1] == pytest.approx(0.5j)
    with pytest.raises(InvalidInput):
        construct.recipe_for_range("SO2", False, kappa=1.5)


def test_range_target_aliases():
    assert construct.range_target("so(2)") == "SO2"
    assert construct.range_target(grp.dihedral(2)) == "D2"
    with pytest.raises(InvalidInput):
        construct.range_target("D3")


def test_singular_build_is_atomic_and_real_when_needed():
    spec = construct.build_singular(grp.dihedral(2), "O2")
    assert isinstance(spec.spherical, ms.AtomicMeasure)
    assert all(np.max(np.abs(v.imag)) == 0 for _, v in spec.spherical.atoms)
    assert np.array_equal(spec.E, np.eye(2))


def test_example_constructions():
    spec = construct.build_ac(grp.dihedral(3), "SO2")
    assert isinstance(spec.spherical, ms.PiecewiseMeasure) and len(spec.spherical.breakpoints) == 12
    iso = construct.build_ac(grp.o2(), "O2")
    assert isinstance(iso.spherical, ms.ConstantMeasure)
    assert np.allclose(iso.spherical.value, np.eye(2)) and np.allclose(iso.H, 0.4 * np.eye(2))


def test_rejections():
    with pytest.raises(InadmissiblePair):
        construct.build_singular(grp.cyclic(2), "SO2")
    with pytest.raises(InadmissiblePair):
        construct.build_ac(grp.dihedral(2), "SO2")
    with pytest.raises(UseAbsolutelyContinuous):
        construct.build_singular(grp.o2(), "O2")
    with pytest.raises(InvalidInput):
        construct.build(grp.cyclic(3), "C2", mode="spline")


def test_one_dimensional_domain_builds():
    for has_minus, target in ((True, "D2"), (False, "SO2"), (True, "C2")):
        rep = classify(construct.build_singular(grp.SignGroup(has_minus), target))
        assert rep.domain_group.has_minus == has_minus
        assert rep.range_group.iso_type() == target


def test_admissibility_table_counts():
    table = construct.admissibility_table()
    bad = [k for k, (ok, _) in table.items() if not ok]
    # five groups without -I each forbid D2 and O2; five with -I forbid SO2
    assert len(table) == 40 and len(bad) == 15


@pytest.mark.parametrize("h", [0.2, 0.75])
def test_custom_hurst_index(h):
    spec = construct.build_ac(grp.cyclic(3), "C2", h=h)
    assert spec.H[0, 0] == pytest.approx(h)
