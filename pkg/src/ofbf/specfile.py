"""JSON serialization of field specs."""

from dataclasses import dataclass, field
from fractions import Fraction
import json
import math
import re

import numpy as np

from . import groups as grp
from .errors import InvalidInput
from .measures import AtomicMeasure, ConstantMeasure, PiecewiseMeasure
from .spectral import QuadratureConfig, make_spec

VERSION = "ofbf-spec/1"
_EXACT = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*\*\s*2\s*pi\s*$")


@dataclass
class SpecDocument:
    spec: object
    quadrature: QuadratureConfig = None
    notes: list = field(default_factory=list)


def theta_to_json(turns):
    if isinstance(turns, Fraction):
        return f"{turns.numerator}/{turns.denominator}*2pi"
    return 2 * math.pi * float(turns)


def theta_from_json(v):
    if isinstance(v, str):
        mt = _EXACT.match(v)
        if not mt:
            raise InvalidInput(f"angle {v!r} is neither a number (radians) nor of the form 'p/q*2pi'")
        return grp.mod1(Fraction(int(mt.group(1)), int(mt.group(2) or 1)))
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidInput(f"angle {v!r} is not a finite number")
    return grp.snap(v / (2 * math.pi), tol=1e-13)


def _matrix_json(M):
    M = np.asarray(M)
    return {"re": np.real(M).tolist(), "im": np.imag(M).tolist()}


def _matrix_from(d, re_key="re", im_key="im"):
    try:
        re_part = np.asarray(d[re_key], dtype=float)
        im_part = np.asarray(d.get(im_key, np.zeros_like(re_part)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed matrix entry: {exc}") from None
    if re_part.shape != im_part.shape or re_part.ndim != 2:
        raise InvalidInput("matrix parts must be square nested lists of equal shape")
    return re_part + 1j * im_part


def measure_to_json(meas):
    if isinstance(meas, AtomicMeasure):
        atoms = [
            {"theta": theta_to_json(t), "value_re": np.real(v).tolist(), "value_im": np.imag(v).tolist()}
            for t, v in meas.atoms
        ]
        return {"type": "atomic", "atoms": atoms}
    if isinstance(meas, PiecewiseMeasure):
        return {
            "type": "piecewise",
            "breakpoints": [theta_to_json(b) for b in meas.breakpoints],
            "values": [_matrix_json(v) for v in meas.values],
        }
    if isinstance(meas, ConstantMeasure):
        return {"type": "constant", "value": _matrix_json(meas.value)}
    raise InvalidInput(f"cannot serialize {type(meas).__name__}")


def measure_from_json(d, m):
    kind = d.get("type")
    if kind == "atomic":
        atoms = [(theta_from_json(a["theta"]), _matrix_from(a, "value_re", "value_im")) for a in d["atoms"]]
        return AtomicMeasure(tuple(atoms), m=m)
    if kind in ("piecewise", "arcs"):
        bps = [theta_from_json(b) for b in d["breakpoints"]]
        return PiecewiseMeasure(tuple(bps), tuple(_matrix_from(v) for v in d["values"]))
    if kind == "constant":
        return ConstantMeasure(_matrix_from(d["value"]))
    raise InvalidInput(f"unknown spherical measure type {kind!r}")


def spec_to_json(spec, quadrature=None, notes=()):
    doc = {
        "version": VERSION,
        "m": spec.m,
        "n": spec.n,
        "E": spec.E.tolist(),
        "H": spec.H.tolist(),
        "spherical": measure_to_json(spec.spherical),
    }
    if quadrature is not None:
        doc["quadrature"] = quadrature.to_dict()
    if notes:
        doc["notes"] = list(notes)
    return doc


def spec_from_json(doc):
    if not isinstance(doc, dict):
        raise InvalidInput("a spec document must be a JSON object")
    if doc.get("version", VERSION) != VERSION:
        raise InvalidInput(f"unsupported spec version {doc.get('version')!r}, expected {VERSION!r}")
    try:
        m, n = int(doc["m"]), int(doc["n"])
        E, H = np.asarray(doc["E"], dtype=float), np.asarray(doc["H"], dtype=float)
        sph = doc["spherical"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed spec document: {exc}") from None
    if E.shape != (m, m) or H.shape != (n, n):
        raise InvalidInput(f"E must be {m}x{m} and H {n}x{n}")
    spec = make_spec(E, H, measure_from_json(sph, m))
    quad = QuadratureConfig(**doc["quadrature"]) if doc.get("quadrature") else None
    return SpecDocument(spec, quad, list(doc.get("notes", [])))


def dumps(spec, quadrature=None, notes=()):
    return json.dumps(spec_to_json(spec, quadrature, notes), indent=2)


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"not valid JSON: {exc}") from None
    return spec_from_json(doc)


def save(path, spec, quadrature=None, notes=()):
    with open(path, "w") as fh:
        fh.write(dumps(spec, quadrature, notes) + "\n")


def load(path):
    with open(path) as fh:
        return loads(fh.read())
