"""Classification of domain and range symmetry groups, exponent sets and isotropy."""

from dataclasses import dataclass, field
from fractions import Fraction
import bisect
import math

import numpy as np

from . import groups as grp
from .errors import DegenerateSpec, InvalidInput, NotMaximal, UnsupportedDimension, UnsupportedSpec
from .matlin import eig2_sym, hermitian, mat_pow, pd_sqrt
from .measures import (
    AtomicMeasure,
    ConstantMeasure,
    PiecewiseMeasure,
    PivotMeasure,
    values_close,
)

R_GRID = tuple(2.0**k for k in range(-3, 4))
R_STABILIZE = (3.0, 5.0)
EIG_TOL = 1e-9


# ---------------------------------------------------------------- range group


def centralizer_in_O2(M, kind):
    """Orthogonal 2x2 matrices commuting with ``M`` (``kind`` is "spd" or "skew")."""
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise InvalidInput("expected a 2x2 matrix")
    scale = max(1.0, float(np.max(np.abs(M))))
    if kind in ("spd", "symmetricPD"):
        if np.max(np.abs(M - M.T)) > 1e-10 * scale:
            raise InvalidInput("matrix is not symmetric")
        vals, V = eig2_sym(0.5 * (M + M.T))
        if vals[1] <= 0:
            raise InvalidInput("matrix is not positive definite")
        if vals[0] - vals[1] <= EIG_TOL * vals[0]:
            return grp.o2()
        phi = math.atan2(V[1, 0], V[0, 0]) / (2 * math.pi)
        els = [grp.rotation(0), grp.rotation(Fraction(1, 2)), grp.reflection(2 * phi), grp.reflection(2 * phi + 0.5)]
        return grp.canonicalize(els)
    if kind == "skew":
        if np.max(np.abs(M + M.T)) > 1e-10 * scale:
            raise InvalidInput("matrix is not skew-symmetric")
        if np.max(np.abs(M)) <= 1e-12:
            return grp.o2()
        return grp.so2()
    raise InvalidInput(f"unknown kind {kind!r}")


def region_group(H, value, r_grid=R_GRID + R_STABILIZE):
    """Range group of a single region with spectral mass ``value``."""
    V = hermitian(value)
    W = pd_sqrt(V.real)
    Winv = np.linalg.inv(W)
    Hc = Winv @ H @ W
    g = grp.o2()
    for r in r_grid:
        R = mat_pow(-Hc, r)
        Pi = R @ R.T
        g = grp._intersect_o2(g, centralizer_in_O2(0.5 * (Pi + Pi.T), "spd"), np.eye(2))
    PiI = Winv @ V.imag @ Winv
    g = grp._intersect_o2(g, centralizer_in_O2(0.5 * (PiI - PiI.T), "skew"), np.eye(2))
    return grp.CompactGroup2(g.kind, g.nu, g.elements, W)


def range_group_of_values(H, values):
    """Intersection of the region groups of the given spectral masses."""
    H = np.asarray(H, dtype=float)
    if H.shape[0] == 1:
        return grp.SignGroup(True)
    if H.shape != (2, 2):
        raise UnsupportedDimension("range classification is implemented for n <= 2")
    result = None
    for v in values:
        g = region_group(H, v)
        result = g if result is None else grp.intersect(result, g)
    if result is None:
        raise DegenerateSpec("the spherical measure has empty support")
    return result


def range_group(spec):
    return range_group_of_values(spec.H, spec.spherical.region_values())


# ---------------------------------------------------------------- domain group


def _atom_symmetries(atoms):
    """Elements of O(2) permuting the atoms (turns, value) with equal values."""
    angles = [float(t) for t, _ in atoms]
    order = sorted(range(len(angles)), key=lambda k: angles[k])
    sorted_angles = [angles[k] for k in order]

    def find(t):
        t = float(grp.mod1(t))
        i = bisect.bisect_left(sorted_angles, t)
        for j in (i - 1, i, i + 1, 0, len(order) - 1):
            if 0 <= j < len(order) and grp.turn_distance(sorted_angles[j], t) <= 1e-10:
                return order[j]
        return None

    t0 = atoms[0][0]
    cands = [grp.rotation(t - t0) for t, _ in atoms] + [grp.reflection(t + t0) for t, _ in atoms]
    accepted = []
    for g in cands:
        ok = True
        for t, v in atoms:
            j = find(g.act(t))
            if j is None or not values_close(atoms[j][1], v):
                ok = False
                break
        if ok and not any(g.isclose(a, 1e-9) for a in accepted):
            accepted.append(g)
    return accepted


def _arc_symmetries(meas):
    bps = meas.breakpoints
    b0 = bps[0]
    cands = [grp.rotation(b - b0) for b in bps] + [grp.reflection(b + b0) for b in bps]
    accepted = []
    for g in cands:
        if not all(any(grp.same_turn(g.act(b), c, 1e-12) for c in bps) for b in bps):
            continue
        if all(values_close(meas.value_at(g.act((s + e) / 2)), v) for s, e, v in meas.arcs()):
            accepted.append(g)
    return accepted


def domain_of_measure(measure):
    """Symmetry group of a spherical or pivot measure, as a named maximal group.

    Subgroups of O(2) are closed under transposition, so the group acting on
    the parameter space coincides with the symmetry group of the measure.
    """
    if isinstance(measure, PivotMeasure):
        measure = measure.as_spherical()
    if measure.m == 1:
        plus, minus = measure.value_at(0), measure.value_at(Fraction(1, 2))
        if plus is None or minus is None:
            return grp.SignGroup(plus is None and minus is None)
        return grp.SignGroup(values_close(plus, minus))
    if isinstance(measure, PiecewiseMeasure):
        measure = measure.merged()
    if isinstance(measure, ConstantMeasure):
        return grp.o2()
    if isinstance(measure, AtomicMeasure):
        return grp.canonicalize(_atom_symmetries(measure.atoms))
    return grp.canonicalize(_arc_symmetries(measure))


def domain_group(spec):
    E = spec.E
    eta = float(np.trace(E)) / spec.m
    if np.max(np.abs(E - eta * np.eye(spec.m))) > 1e-12 * abs(eta):
        raise UnsupportedSpec("domain classification requires a scalar domain exponent E = eta I")
    return domain_of_measure(spec.spherical)


# ---------------------------------------------------------------- admissibility, exponents


RANGE_TYPES = ("C2", "D2", "SO2", "O2")


def validate_pair(domain, rng):
    """Whether ``(domain, range)`` can occur together; returns ``(ok, reason)``."""
    if isinstance(domain, grp.CompactGroup2) and not grp.is_maximal(domain):
        raise NotMaximal(f"{domain.label()} is not a maximal group")
    if isinstance(rng, grp.SignGroup):
        return True, "one-dimensional range: every maximal domain group occurs"
    kind = rng.iso_type()
    if kind not in RANGE_TYPES:
        raise InvalidInput(f"range group {rng.label()} is not one of C2, D2, SO2, O2")
    minus = domain.contains_minus_identity()
    if kind in ("D2", "O2") and not minus:
        return False, f"range {kind} requires -I in the domain group, which {domain.label()} lacks"
    if kind == "SO2" and minus:
        return False, f"range SO2 requires -I outside the domain group, but {domain.label()} contains it"
    return True, "admissible"


@dataclass(frozen=True, eq=False)
class ExponentSet:
    base: np.ndarray
    tangent: grp.TangentSpace2

    def contains(self, M, tol=1e-9):
        return self.tangent.contains(np.asarray(M, dtype=float) - self.base, tol)

    def to_dict(self):
        return {"base": np.asarray(self.base).tolist(), **self.tangent.to_dict()}


def _tangent(g, dim):
    if isinstance(g, grp.SignGroup) or dim != 2:
        return grp.TangentSpace2("zero")
    return grp.tangent_space(g)


def exponent_sets(spec, domain, rng):
    return (
        ExponentSet(spec.E.copy(), _tangent(domain, spec.m)),
        ExponentSet(spec.H.copy(), _tangent(rng, spec.n)),
    )


def isotropy_check(spec, domain=None):
    """Isotropy: a scalar exponent ``eta I`` in the domain exponent set and a constant density."""
    if spec.m == 1:
        g = domain or domain_group(spec)
        return g.contains_minus_identity(), {"eta": float(spec.E[0, 0]), "note": "m = 1: invariance under t -> -t"}
    domain = domain or domain_group(spec)
    dset, _ = exponent_sets(spec, domain, grp.SignGroup())
    E = spec.E
    if dset.tangent.kind == "zero":
        eta = float(E[0, 0]) if np.allclose(E, E[0, 0] * np.eye(2), atol=1e-12) else None
    else:
        W = dset.tangent.W
        S = np.linalg.solve(W, E) @ W
        S = 0.5 * (S + S.T)
        eta = float(S[0, 0]) if np.allclose(S, S[0, 0] * np.eye(2), atol=1e-10) else None
    meas = spec.spherical
    if isinstance(meas, PiecewiseMeasure):
        meas = meas.merged()
    constant = isinstance(meas, ConstantMeasure)
    ok = eta is not None and constant
    cert = {"eta": eta, "constant_density": constant}
    if ok:
        cert["note"] = "spectral measure is absolutely continuous with a rotation-invariant density"
    return ok, cert


# ---------------------------------------------------------------- full report


def group_name(g):
    """Short name in the command-line syntax: ``cyclic:3``, ``dihedral:2``, ``dstar1``, ``so2``, ``o2``."""
    if isinstance(g, grp.SignGroup):
        return "pm1" if g.has_minus else "trivial1"
    if g.kind in ("cyclic", "dihedral"):
        return f"{g.kind}:{g.nu}"
    if g.kind == "explicit":
        lab = g.label().rstrip("~")
        return ("dihedral:" if lab[0] == "D" else "cyclic:") + lab[1:] + "~"
    return g.kind


def sample_matrices(g, count=7):
    """All matrices of a finite group, or ``count`` rotations (and reflections) of a continuous one."""
    if isinstance(g, grp.SignGroup):
        return [np.eye(1), -np.eye(1)] if g.has_minus else [np.eye(1)]
    if g.is_finite:
        return g.matrices()
    Winv = np.linalg.inv(g.W)
    turns = [(k + 0.5) / count for k in range(count)]
    els = [grp.rotation(t) for t in turns]
    if g.kind == "o2":
        els += [grp.reflection(t) for t in turns]
    return [g.W @ e.matrix() @ Winv for e in els]


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    domain_group: object
    range_group: object
    domain_exponent_set: ExponentSet
    range_exponent_set: ExponentSet
    isotropic: bool
    admissible: bool
    reason: str = ""
    isotropy_certificate: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "domain": group_name(self.domain_group),
            "range": group_name(self.range_group),
            "domain_group": self.domain_group.to_dict(),
            "range_group": self.range_group.to_dict(),
            "domain_label": self.domain_group.label(),
            "range_label": self.range_group.label(),
            "domain_exponents": self.domain_exponent_set.to_dict(),
            "range_exponents": self.range_exponent_set.to_dict(),
            "isotropic": self.isotropic,
            "isotropy_certificate": self.isotropy_certificate,
            "admissible": self.admissible,
            "reason": self.reason,
        }


def classify(spec):
    dom = domain_group(spec)
    ran = range_group(spec)
    ok, reason = validate_pair(dom, ran)
    dset, rset = exponent_sets(spec, dom, ran)
    iso, cert = isotropy_check(spec, dom)
    return SymmetryReport(dom, ran, dset, rset, iso, ok, reason, cert)


# ---------------------------------------------------------------- brute-force invariance


def covariance_defect(spec, pairs, A=None, B=None, cfg=None):
    """Max relative deviation of the transformed covariance from the original.

    ``A`` acts on the parameters (``Γ(As, At)``), ``B`` on the values (``B Γ B^T``).
    """
    from .spectral import covariance

    dev = 0.0
    for s, t in pairs:
        G = covariance(spec, s, t, cfg)
        s2, t2 = (np.asarray(s), np.asarray(t)) if A is None else (A @ s, A @ t)
        G2 = covariance(spec, s2, t2, cfg)
        if B is not None:
            G2 = B @ G2 @ B.T
        dev = max(dev, float(np.linalg.norm(G2 - G) / max(np.linalg.norm(G), 1e-300)))
    return dev
