from fractions import Fraction
import json
import math

import numpy as np
import pytest

from ofbf import construct, groups as grp, specfile, spectral as sp
from ofbf.errors import InvalidInput
from ofbf.symmetry import classify


@pytest.mark.parametrize(
    "make",
    [
        lambda: construct.build_ac(grp.dihedral(3), "SO2"),
        lambda: construct.build_singular(grp.cyclic(3), "C2"),
        lambda: construct.build_ac(grp.o2(), "O2"),
        lambda: sp.fbm_spec(0.35),
    ],
    ids=["ac", "singular", "constant", "fbm"],
)
def test_round_trip_preserves_classification_and_covariance(make):
    spec = make()
    doc = specfile.loads(specfile.dumps(spec))
    assert classify(doc.spec).to_dict() == classify(spec).to_dict()
    t1, t2 = np.ones(spec.m) * 0.7, np.arange(1, spec.m + 1) * -0.4
    assert np.array_equal(sp.covariance(doc.spec, t1, t2), sp.covariance(spec, t1, t2))


def test_theta_formats():
    assert specfile.theta_to_json(Fraction(1, 12)) == "1/12*2pi"
    assert specfile.theta_from_json("1/12*2pi") == Fraction(1, 12)
    assert specfile.theta_from_json("-1/4*2pi") == Fraction(3, 4)
    assert specfile.theta_from_json(math.pi / 3) == Fraction(1, 6)
    with pytest.raises(InvalidInput):
        specfile.theta_from_json("pi/2")


def test_quadrature_override_and_notes():
    spec = sp.fbm_spec(0.4)
    text = specfile.dumps(spec, sp.QuadratureConfig(rel_tol=1e-8), notes=["hand written"])
    doc = specfile.loads(text)
    assert doc.quadrature.rel_tol == 1e-8 and doc.notes == ["hand written"]


def test_rejects_bad_documents():
    good = json.loads(specfile.dumps(sp.fbm_spec(0.4)))
    with pytest.raises(InvalidInput):
        specfile.spec_from_json({**good, "version": "ofbf-spec/99"})
    with pytest.raises(InvalidInput):
        specfile.spec_from_json({**good, "E": [[1.0, 0.0], [0.0, 1.0]]})
    with pytest.raises(InvalidInput):
        specfile.loads("{not json")
    with pytest.raises(InvalidInput):
        specfile.spec_from_json({**good, "spherical": {"type": "spline"}})


def test_hand_written_arcs_document():
    doc = {
        "m": 2,
        "n": 2,
        "E": [[1, 0], [0, 1]],
        "H": [[0.4, 0], [0, 0.4]],
        "spherical": {
            "type": "piecewise",
            "breakpoints": [0, "1/2*2pi"],
            "values": [{"re": [[1, 0], [0, 1]], "im": [[0, 0.5], [-0.5, 0]]}, {"re": [[1, 0], [0, 1]], "im": [[0, -0.5], [0.5, 0]]}],
        },
    }
    rep = classify(specfile.spec_from_json(doc).spec)
    assert rep.domain_group.label() == "D*1" and rep.range_group.label() == "SO2"
