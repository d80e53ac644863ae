from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ofbf import groups as grp
from ofbf.errors import AntipodesEverywhere, InvalidInput, NotFinite

turns = st.fractions(min_value=0, max_value=1, max_denominator=48)
elements = st.builds(lambda r, t: grp.reflection(t) if r else grp.rotation(t), st.booleans(), turns)


@given(elements, elements)
def test_composition_matches_matrices(a, b):
    assert np.allclose((a @ b).matrix(), a.matrix() @ b.matrix(), atol=1e-12)


@given(elements, st.floats(0, 1))
def test_action_matches_matrix(g, phi):
    x = np.array([math.cos(2 * math.pi * phi), math.sin(2 * math.pi * phi)])
    y = g.matrix() @ x
    assert grp.same_turn(g.act(phi), math.atan2(y[1], y[0]) / (2 * math.pi), 1e-9)


@given(elements)
def test_inverse(g):
    assert (g @ g.inverse()).is_identity


def test_reflection_axis_is_half_angle():
    F = grp.reflection(Fraction(1, 3)).matrix()
    axis = np.array([math.cos(math.pi / 3), math.sin(math.pi / 3)])
    assert np.allclose(F @ axis, axis)


def test_d3_enumeration_and_closure():
    d3 = grp.dihedral(3)
    els = grp.enumerate_group(d3)
    assert len(els) == 6 and d3.order == 6
    assert sum(e.reflection for e in els) == 3
    for a in els:
        for b in els:
            assert d3.contains(a @ b)
    assert grp.haar_weight(d3) == pytest.approx(1 / 6)


def test_minus_identity_membership():
    assert grp.dihedral(2).contains_minus_identity()
    assert grp.cyclic(4).contains_minus_identity()
    assert not grp.dihedral(3).contains_minus_identity()
    assert not grp.dstar1().contains_minus_identity()
    assert grp.o2().contains_minus_identity() and grp.so2().contains_minus_identity()


def test_parse_group_forms():
    assert grp.parse_group("cyclic:3").same_as(grp.cyclic(3))
    assert grp.parse_group("D4").same_as(grp.dihedral(4))
    assert grp.parse_group("dstar1").label() == "D*1"
    assert grp.parse_group("o2").kind == "o2"
    with pytest.raises(InvalidInput):
        grp.parse_group("tetrahedral")


def test_conjugated_group_matrices():
    W = np.array([[2.0, 0.3], [0.3, 0.7]])
    g = grp.dihedral(2, W)
    assert abs(np.linalg.det(g.W) - 1) < 1e-12
    for B in g.matrices():
        assert g.contains_matrix(B)
    assert not g.contains_matrix(grp.rotation(Fraction(1, 4)).matrix())


def test_orbits():
    orb = grp.orbit(grp.dihedral(3), [math.cos(math.pi / 6), math.sin(math.pi / 6)])
    assert orb.components == 6
    assert any(np.allclose(p, [-math.cos(math.pi / 6), -math.sin(math.pi / 6)]) for p in orb.points)
    assert grp.orbit(grp.so2(), [1.0, 0.0]).circle
    assert len(grp.orbit_turns(grp.cyclic(4), 0.1)) == 4


def test_antipodal_points():
    pts = grp.antipodal_turns(grp.dihedral(3))
    assert [float(t) * 360 for t in pts] == pytest.approx([30, 90, 150, 210, 270, 330])
    assert grp.antipodal_turns(grp.dstar1()) == [0, Fraction(1, 2)]
    assert grp.antipodal_turns(grp.cyclic(3)) == []
    with pytest.raises(AntipodesEverywhere):
        grp.antipodal_turns(grp.dihedral(2))
    with pytest.raises(NotFinite):
        grp.antipodal_turns(grp.so2())


def test_intersections_with_common_conjugacy():
    W = np.array([[1.5, 0.2], [0.2, 0.8]])
    assert grp.intersect(grp.o2(W), grp.so2(2 * W)).same_as(grp.so2(W))
    assert grp.intersect(grp.so2(W), grp.dihedral(2, W)).same_as(grp.cyclic(2))
    assert grp.intersect(grp.dihedral(4), grp.dihedral(6)).same_as(grp.dihedral(2))
    assert grp.intersect(grp.cyclic(3), grp.dihedral(3)).same_as(grp.cyclic(3))


def test_intersection_of_unrelated_ellipse_groups_is_a_rotated_klein_group():
    # Brute force: scan O(2)-level angles of g2 and keep matrices that also preserve g1's form.
    W1, W2 = np.array([[1.3, 0.4], [0.4, 0.9]]), np.array([[0.8, -0.25], [-0.25, 1.6]])
    g1, g2 = grp.o2(W1), grp.o2(W2)
    hits = []
    for k in range(7200):
        for make in (grp.rotation, grp.reflection):
            B = g2.W @ make(k / 7200).matrix() @ np.linalg.inv(g2.W)
            if g1.contains_matrix(B, tol=1e-3):
                hits.append(B)
    res = grp.intersect(g1, g2)
    assert res.iso_type() == "D2" and len(res.matrices()) == 4
    for B in res.matrices():
        assert g1.contains_matrix(B) and g2.contains_matrix(B)
    assert any(np.linalg.det(B) < 0 for B in hits)


def test_canonicalize():
    assert grp.canonicalize([grp.rotation(0), grp.reflection(Fraction(1, 2))]).label() == "D*1"
    assert grp.canonicalize([grp.rotation(Fraction(k, 3)) for k in range(3)]).same_as(grp.cyclic(3))
    tilted = grp.canonicalize([grp.rotation(0), grp.rotation(Fraction(1, 2)), grp.reflection(0.2), grp.reflection(0.7)])
    assert tilted.kind == "explicit" and tilted.iso_type() == "D2"
    with pytest.raises(InvalidInput):
        grp.canonicalize([grp.rotation(Fraction(1, 3))])


def test_maximality():
    for g in (grp.cyclic(3), grp.dihedral(2), grp.dstar1(), grp.o2()):
        assert grp.is_maximal(g)
    assert not grp.is_maximal(grp.so2())


def test_tangent_spaces():
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert grp.tangent_space(grp.dihedral(3)).basis() == []
    t = grp.tangent_space(grp.so2())
    assert t.contains(2 * J) and not t.contains(np.eye(2))
    W = np.array([[2.0, 0.0], [0.0, 0.5]])
    tw = grp.tangent_space(grp.o2(W))
    assert tw.contains(tw.basis()[0]) and not tw.contains(J)


def test_dict_round_trip():
    for g in (grp.cyclic(3), grp.dihedral(2, np.diag([2.0, 1.0])), grp.dstar1(), grp.so2(),
              grp.canonicalize([grp.rotation(0), grp.rotation(Fraction(1, 2)), grp.reflection(0.2), grp.reflection(0.7)])):
        assert grp.group_from_dict(g.to_dict()).same_as(g)


def test_sign_group():
    assert grp.SignGroup(True).contains_minus_identity()
    assert not grp.SignGroup(False).same_as(grp.SignGroup(True))
