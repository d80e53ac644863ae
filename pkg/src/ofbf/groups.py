"""Compact subgroups of O(2) and their positive definite conjugates.

Angles are stored in *turns* (fractions of a full revolution). Constructed
groups use :class:`fractions.Fraction` so that closure and equality are exact;
angles coming out of numerical linear algebra are floats and are compared with
a small tolerance (and snapped to nearby rationals when possible).
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .errors import AntipodesEverywhere, InvalidInput, NotFinite
from .matlin import eig2_sym, scalar_ratio

ANGLE_TOL = 1e-10
MAX_NU = 360
KINDS = ("cyclic", "dihedral", "dstar1", "so2", "o2", "explicit")


def mod1(x):
    r = x % 1
    if isinstance(r, float) and r >= 1.0:
        r = 0.0
    return r


def snap(x, tol=1e-9, max_den=2 * MAX_NU):
    """Replace a float turn by a nearby small-denominator Fraction, if any."""
    if isinstance(x, (Fraction, int)):
        return mod1(Fraction(x))
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) <= tol:
        return mod1(f)
    return mod1(float(x))


def turn_distance(a, b):
    d = mod1(a - b)
    return float(min(d, 1 - d))


def same_turn(a, b, tol=ANGLE_TOL):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return mod1(a - b) == 0
    return turn_distance(a, b) <= tol


def rotation_matrix(turns):
    t = 2 * math.pi * float(turns)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def reflection_matrix(turns):
    t = 2 * math.pi * float(turns)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s], [s, -c]])


@dataclass(frozen=True)
class GroupElement2:
    """A rotation ``O_theta`` or reflection ``F_theta`` with ``theta = 2*pi*turns``.

    ``F_theta`` reflects across the line at angle ``theta / 2``.
    """

    reflection: bool
    turns: object

    def __post_init__(self):
        object.__setattr__(self, "turns", snap(self.turns, tol=1e-13))

    @property
    def angle(self):
        return 2 * math.pi * float(self.turns)

    @property
    def det(self):
        return -1 if self.reflection else 1

    def matrix(self):
        return reflection_matrix(self.turns) if self.reflection else rotation_matrix(self.turns)

    def __matmul__(self, other):
        a, b = self.turns, other.turns
        if not self.reflection and not other.reflection:
            return GroupElement2(False, a + b)
        if not self.reflection:
            return GroupElement2(True, a + b)
        if not other.reflection:
            return GroupElement2(True, a - b)
        return GroupElement2(False, a - b)

    def inverse(self):
        return self if self.reflection else GroupElement2(False, -self.turns)

    def act(self, phi):
        """Image of the point at angle ``phi`` (turns) on the circle."""
        return mod1(self.turns - phi) if self.reflection else mod1(self.turns + phi)

    def isclose(self, other, tol=ANGLE_TOL):
        return self.reflection == other.reflection and same_turn(self.turns, other.turns, tol)

    @property
    def is_identity(self):
        return not self.reflection and same_turn(self.turns, Fraction(0))

    @property
    def is_minus_identity(self):
        return not self.reflection and same_turn(self.turns, Fraction(1, 2))

    def __repr__(self):
        name = "F" if self.reflection else "O"
        t = self.turns
        return f"{name}({t} turn)" if isinstance(t, Fraction) else f"{name}({t:.12g} turn)"


def rotation(turns):
    return GroupElement2(False, turns)


def reflection(turns):
    return GroupElement2(True, turns)


def element_from_matrix(Q, tol=1e-8):
    """Recover the O(2) element represented by an orthogonal 2x2 matrix."""
    Q = np.asarray(Q, dtype=float)
    if np.max(np.abs(Q @ Q.T - np.eye(2))) > tol:
        raise InvalidInput("matrix is not orthogonal")
    t = math.atan2(Q[1, 0], Q[0, 0]) / (2 * math.pi)
    return GroupElement2(bool(np.linalg.det(Q) < 0), snap(t))


def element_matrix(g):
    return g.matrix()


@dataclass(frozen=True, eq=False)
class CompactGroup2:
    """The group ``W @ G @ inv(W)`` for a compact ``G`` inside O(2) and SPD ``W``."""

    kind: str
    nu: int = 0
    elements: tuple = ()
    W: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown group kind {self.kind!r}")
        W = np.array(self.W, dtype=float)
        if W.shape != (2, 2) or not np.all(np.isfinite(W)):
            raise InvalidInput("conjugacy must be a finite 2x2 matrix")
        if np.max(np.abs(W - W.T)) > 1e-12 * np.max(np.abs(W)):
            raise InvalidInput("conjugacy must be symmetric")
        if np.min(np.linalg.eigvalsh(W)) <= 0:
            raise InvalidInput("conjugacy must be positive definite")
        W = W / math.sqrt(np.linalg.det(W))
        object.__setattr__(self, "W", 0.5 * (W + W.T))
        if self.kind in ("cyclic", "dihedral") and not 1 <= self.nu <= MAX_NU:
            raise InvalidInput(f"nu must lie in 1..{MAX_NU}")

    @property
    def is_finite(self):
        return self.kind not in ("so2", "o2")

    @property
    def has_scalar_conjugacy(self):
        return bool(np.allclose(self.W, np.eye(2), atol=1e-12))

    @property
    def order(self):
        if not self.is_finite:
            return math.inf
        return len(enumerate_group(self))

    def contains_minus_identity(self):
        return self.contains(rotation(Fraction(1, 2)))

    def contains(self, g, tol=ANGLE_TOL):
        """Membership of an O(2)-level element (before conjugation by W)."""
        if self.kind == "o2":
            return True
        if self.kind == "so2":
            return not g.reflection
        if self.kind in ("cyclic", "dihedral"):
            if g.reflection and self.kind == "cyclic":
                return False
            k = float(g.turns) * self.nu
            if isinstance(g.turns, Fraction):
                return (g.turns * self.nu).denominator == 1
            return abs(k - round(k)) <= tol * self.nu
        return any(g.isclose(e, tol) for e in enumerate_group(self))

    def contains_matrix(self, B, tol=1e-8):
        """Membership of a 2x2 matrix in the conjugated group."""
        Winv = np.linalg.inv(self.W)
        Q = Winv @ np.asarray(B, dtype=float) @ self.W
        if np.max(np.abs(Q @ Q.T - np.eye(2))) > tol:
            return False
        return self.contains(element_from_matrix(Q, tol), tol=max(tol, ANGLE_TOL))

    def matrices(self):
        Winv = np.linalg.inv(self.W)
        return [self.W @ g.matrix() @ Winv for g in enumerate_group(self)]

    def label(self):
        if self.kind == "cyclic":
            return f"C{self.nu}"
        if self.kind == "dihedral":
            return f"D{self.nu}"
        if self.kind == "dstar1":
            return "D*1"
        if self.kind == "so2":
            return "SO2"
        if self.kind == "o2":
            return "O2"
        els = self.elements
        nrot = sum(not e.reflection for e in els)
        return f"{'D' if len(els) > nrot else 'C'}{nrot}~"

    def iso_type(self):
        """Isomorphism class ignoring conjugacy and axis orientation."""
        lab = self.label().rstrip("~")
        return "D1" if lab == "D*1" else lab

    def same_as(self, other):
        """Equality of the represented matrix groups."""
        if self.is_finite != other.is_finite:
            return False
        if not self.is_finite:
            return self.kind == other.kind and scalar_ratio(self.W, other.W) is not None
        A, B = self.matrices(), other.matrices()
        if len(A) != len(B):
            return False
        return all(any(np.allclose(a, b, atol=1e-9) for b in B) for a in A)

    def to_dict(self):
        d = {"type": self.kind}
        if self.kind in ("cyclic", "dihedral"):
            d["nu"] = self.nu
        if self.kind == "explicit":
            d["elements"] = [
                {"kind": "reflection" if e.reflection else "rotation", "turns": _turns_json(e.turns)}
                for e in self.elements
            ]
        if not self.has_scalar_conjugacy:
            d["W"] = self.W.tolist()
        return d

    def __repr__(self):
        w = "" if self.has_scalar_conjugacy else f", W={np.round(self.W, 6).tolist()}"
        return f"CompactGroup2({self.label()}{w})"


def _turns_json(t):
    return f"{t.numerator}/{t.denominator}" if isinstance(t, Fraction) else float(t)


def _turns_from_json(v):
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


def group_from_dict(d):
    kind = d["type"]
    W = np.array(d.get("W", np.eye(2)), dtype=float)
    if kind == "explicit":
        els = [GroupElement2(e["kind"] == "reflection", _turns_from_json(e["turns"])) for e in d["elements"]]
        return canonicalize(els, W)
    return CompactGroup2(kind, int(d.get("nu", 0)), (), W)


def cyclic(nu, W=None):
    return CompactGroup2("cyclic", nu, (), np.eye(2) if W is None else W)


def dihedral(nu, W=None):
    return CompactGroup2("dihedral", nu, (), np.eye(2) if W is None else W)


def dstar1():
    return CompactGroup2("dstar1")


def so2(W=None):
    return CompactGroup2("so2", 0, (), np.eye(2) if W is None else W)


def o2(W=None):
    return CompactGroup2("o2", 0, (), np.eye(2) if W is None else W)


def parse_group(text):
    """Parse ``cyclic:3``, ``dihedral:2``, ``dstar1``, ``so2``, ``o2`` or ``C3``/``D2``."""
    t = text.strip().lower()
    if t in ("so2", "so(2)"):
        return so2()
    if t in ("o2", "o(2)"):
        return o2()
    if t in ("dstar1", "d*1"):
        return dstar1()
    for prefix, kind in (("cyclic:", "cyclic"), ("dihedral:", "dihedral"), ("c", "cyclic"), ("d", "dihedral")):
        if t.startswith(prefix) and t[len(prefix):].isdigit():
            return CompactGroup2(kind, int(t[len(prefix):]))
    raise InvalidInput(f"cannot parse group {text!r}")


def enumerate_group(g):
    """Elements of a finite group at the O(2) level (conjugacy not applied)."""
    if not g.is_finite:
        raise NotFinite(f"{g.label()} is not finite")
    if g.kind == "cyclic":
        return [rotation(Fraction(k, g.nu)) for k in range(g.nu)]
    if g.kind == "dihedral":
        rots = [rotation(Fraction(k, g.nu)) for k in range(g.nu)]
        return rots + [reflection(Fraction(k, g.nu)) for k in range(1, g.nu + 1)]
    if g.kind == "dstar1":
        return [rotation(Fraction(0)), reflection(Fraction(1, 2))]
    return list(g.elements)


def haar_weight(g):
    return 1.0 / len(enumerate_group(g))


def _close_under(elements):
    for a in elements:
        for b in elements:
            c = a @ b
            if not any(c.isclose(e, 1e-8) for e in elements):
                return False
    return True


def canonicalize(elements, W=None):
    """Name the finite subgroup of O(2) formed by ``elements`` (conjugated by ``W``)."""
    W = np.eye(2) if W is None else W
    uniq = []
    for e in elements:
        if not any(e.isclose(u, 1e-8) for u in uniq):
            uniq.append(e)
    if not any(u.is_identity for u in uniq) or not _close_under(uniq):
        raise InvalidInput(f"elements {uniq} do not form a group")
    rots = [u for u in uniq if not u.reflection]
    refs = [u for u in uniq if u.reflection]
    nu = len(rots)
    if nu > MAX_NU:
        raise InvalidInput("group too large")
    if not refs:
        return CompactGroup2("cyclic", nu, (), W)
    base = min(refs, key=lambda e: float(e.turns)).turns
    offset = snap(float(base) * nu, tol=1e-8)
    if isinstance(offset, Fraction) and offset.denominator == 1 or turn_distance(offset, 0) <= 1e-8:
        return CompactGroup2("dihedral", nu, (), W)
    if nu == 1 and same_turn(base, Fraction(1, 2), 1e-8):
        return CompactGroup2("dstar1", 0, (), W)
    canon = [rotation(Fraction(k, nu)) for k in range(nu)]
    canon += [reflection(base + Fraction(k, nu)) for k in range(nu)]
    return CompactGroup2("explicit", 0, tuple(canon), W)


@dataclass(frozen=True)
class Orbit:
    points: np.ndarray  # k x 2, empty for a full circle
    circle: bool
    components: int


def orbit(g, x):
    """Orbit of the vector ``x`` under the (conjugated) group ``g``."""
    x = np.asarray(x, dtype=float)
    if not g.is_finite:
        return Orbit(np.empty((0, 2)), True, 1)
    pts = []
    for B in g.matrices():
        y = B @ x
        if not any(np.linalg.norm(y - p) <= ANGLE_TOL * max(1.0, np.linalg.norm(x)) for p in pts):
            pts.append(y)
    return Orbit(np.array(pts), False, len(pts))


def orbit_turns(g, phi):
    """Orbit of the circle point at angle ``phi`` (turns) for an unconjugated finite group."""
    out = []
    for e in enumerate_group(g):
        t = e.act(phi)
        if not any(same_turn(t, s) for s in out):
            out.append(t)
    return out


def antipodal_turns(g):
    """Angles (turns) of points ``x`` with ``-x`` in the orbit of ``x``, for W = I."""
    if not g.is_finite:
        raise NotFinite(f"{g.label()} is not finite")
    if g.contains_minus_identity():
        raise AntipodesEverywhere("-I belongs to the group, every point is antipodal")
    out = []
    for e in enumerate_group(g):
        if e.reflection:
            axis = e.turns / 2
            for t in (mod1(axis + Fraction(1, 4)), mod1(axis + Fraction(3, 4))):
                if not any(same_turn(t, s) for s in out):
                    out.append(t)
    return sorted(out, key=float)


def antipodal_points(g):
    """Unit vectors ``x`` with ``-x`` in the orbit of ``x`` under ``g``."""
    pts = []
    for t in antipodal_turns(g):
        y = g.W @ np.array([math.cos(2 * math.pi * t), math.sin(2 * math.pi * t)])
        pts.append(y / np.linalg.norm(y))
    return np.array(pts).reshape(-1, 2)


def _intersect_o2(a, b, W):
    """Intersection of two unconjugated subgroups of O(2), reported with conjugacy W."""
    if a.kind == "o2":
        return CompactGroup2(b.kind, b.nu, b.elements, W)
    if b.kind == "o2":
        return CompactGroup2(a.kind, a.nu, a.elements, W)
    if a.kind == "so2" and b.kind == "so2":
        return so2(W)
    if a.kind == "so2":
        a, b = b, a
    if b.kind == "so2":
        return canonicalize([e for e in enumerate_group(a) if not e.reflection], W)
    if a.kind == "cyclic" and b.kind in ("cyclic", "dihedral") or a.kind == "dihedral" and b.kind == a.kind:
        nu = math.gcd(a.nu, b.nu)
        if a.kind == "dihedral" and b.kind == "dihedral":
            return dihedral(nu, W)
        return cyclic(nu, W)
    return canonicalize([e for e in enumerate_group(a) if b.contains(e, 1e-8)], W)


def _commuting_candidates(g, P):
    """Elements of ``g`` (O(2) level) commuting with the SPD non-scalar matrix ``P``."""
    if g.is_finite:
        return [e for e in enumerate_group(g) if np.allclose(e.matrix() @ P, P @ e.matrix(), atol=1e-9 * np.linalg.norm(P))]
    out = [rotation(Fraction(0)), rotation(Fraction(1, 2))]
    if g.kind == "o2":
        _, V = eig2_sym(P)
        phi = math.atan2(V[1, 0], V[0, 0]) / (2 * math.pi)
        out += [reflection(snap(2 * phi)), reflection(snap(2 * phi + 0.5))]
    return out


def intersect(g1, g2):
    """The group ``g1 ∩ g2`` of matrices, canonicalized in the frame of ``g2``."""
    if scalar_ratio(g1.W, g2.W) is not None:
        return _intersect_o2(g1, g2, g2.W)
    M = np.linalg.solve(g2.W, g1.W)
    Minv = np.linalg.inv(M)
    keep = []
    for e in _commuting_candidates(g1, M.T @ M):
        Q = M @ e.matrix() @ Minv
        f = element_from_matrix(Q, tol=1e-7)
        if g2.contains(f, 1e-8):
            keep.append(f)
    return canonicalize(keep, g2.W)


def _probe_orbit_key(mats, phi):
    x = np.array([math.cos(phi), math.sin(phi)])
    angs = sorted(round((math.atan2(*(B @ x)[::-1]) % (2 * math.pi)) * 1e8) for B in mats)
    return tuple(sorted(set(angs)))


def is_maximal(g):
    """True iff ``g`` is (up to conjugacy) one of O(2), C_nu, D_nu, D*1.

    Explicit element lists are checked by comparing orbits on a 720-point probe
    grid against the groups obtained by adjoining a reflection or passing to O(2).
    """
    if g.kind in ("cyclic", "dihedral", "dstar1", "o2"):
        return True
    if g.kind == "so2":
        return False
    els = enumerate_group(g)
    if not _close_under(els):
        return False
    probes = [2 * math.pi * (k + 0.5) / 720 for k in range(720)]
    mats = [e.matrix() for e in els]
    # Every probe orbit of a finite group is finite, so it never coincides with
    # an O(2) orbit; the remaining candidates adjoin one reflection.
    if all(e.reflection is False for e in els):
        ext = mats + [reflection(Fraction(0)).matrix() @ m for m in mats]
        if all(_probe_orbit_key(mats, p) == _probe_orbit_key(ext, p) for p in probes):
            return False
    return True


@dataclass(frozen=True, eq=False)
class TangentSpace2:
    kind: str  # "zero" or "so2"
    W: np.ndarray = field(default_factory=lambda: np.eye(2))

    def basis(self):
        if self.kind == "zero":
            return []
        J = np.array([[0.0, -1.0], [1.0, 0.0]])
        return [self.W @ J @ np.linalg.inv(self.W)]

    def contains(self, M, tol=1e-9):
        M = np.asarray(M, dtype=float)
        scale = max(1.0, np.linalg.norm(M))
        if self.kind == "zero":
            return bool(np.linalg.norm(M) <= tol * scale)
        S = np.linalg.solve(self.W, M) @ self.W
        return bool(np.linalg.norm(S + S.T) <= tol * scale)

    def to_dict(self):
        d = {"tangent": "zero" if self.kind == "zero" else "so2"}
        if self.kind != "zero":
            d["W"] = self.W.tolist()
        return d


def tangent_space(g):
    if g.is_finite:
        return TangentSpace2("zero", g.W)
    return TangentSpace2("so2", g.W)


@dataclass(frozen=True)
class SignGroup:
    """Subgroup of O(1) = {1, -1}: used for one-dimensional domains or ranges."""

    has_minus: bool = True

    is_finite = True

    def contains_minus_identity(self):
        return self.has_minus

    def label(self):
        return "{+-1}" if self.has_minus else "{1}"

    def iso_type(self):
        return "O1" if self.has_minus else "C1"

    def to_dict(self):
        return {"type": "pm1" if self.has_minus else "trivial1"}

    def same_as(self, other):
        return isinstance(other, SignGroup) and other.has_minus == self.has_minus
