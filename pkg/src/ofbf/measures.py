"""Matrix-valued measures on the circle (or on {+1, -1} when m = 1).

Angles are in turns. Point masses carry Hermitian matrices; piecewise constant
and constant measures carry Hermitian *densities* with respect to the angle in
radians.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from . import groups as grp
from .errors import (
    ConstructionFailure,
    DuplicateOrbit,
    IncompatibleSpec,
    InvalidInput,
    NotFinite,
    PivotOnAntipode,
)
from .matlin import hermitian, is_pd

MERGE_TOL = 1e-10
VALUE_TOL = 1e-10
GOLDEN = (math.sqrt(5) - 1) / 2


def unit(turns):
    t = 2 * math.pi * float(turns)
    return np.array([math.cos(t), math.sin(t)])


def to_turns(x):
    """Angle (turns) of a 2-vector, or a scalar angle already given in turns."""
    if isinstance(x, (Fraction, int)):
        return grp.snap(x)
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return grp.snap(float(x), tol=1e-13)
    return grp.snap(math.atan2(x[1], x[0]) / (2 * math.pi), tol=1e-13)


def values_close(A, B, tol=VALUE_TOL):
    scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(B))))
    return bool(np.max(np.abs(np.asarray(A) - np.asarray(B))) <= tol * scale)


class SphericalMeasure:
    """Common interface of the three measure variants."""

    kind = None
    m = 2
    n = 1

    def region_values(self):
        """Nonzero Hermitian values of the atoms, arcs or the constant density."""
        raise NotImplementedError

    def mass(self, start, end):
        """Measure of the arc ``[start, end)`` (turns, ``end`` may exceed ``start + 1``)."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class AtomicMeasure(SphericalMeasure):
    atoms: tuple  # ((turns, value), ...)
    m: int = 2
    kind = "atomic"

    def __post_init__(self):
        merged = []
        for t, v in self.atoms:
            t = grp.mod1(grp.snap(t, tol=1e-13))
            v = hermitian(v)
            for k, (s, w) in enumerate(merged):
                if grp.same_turn(s, t, MERGE_TOL):
                    merged[k] = (s, w + v)
                    break
            else:
                merged.append((t, v))
        if not merged:
            raise InvalidInput("atomic measure needs at least one atom")
        sizes = {v.shape for _, v in merged}
        if len(sizes) != 1:
            raise InvalidInput("atom values have inconsistent sizes")
        if self.m == 1 and any(not (grp.same_turn(t, 0) or grp.same_turn(t, Fraction(1, 2))) for t, _ in merged):
            raise InvalidInput("for m = 1 atoms must sit at +1 (turn 0) or -1 (turn 1/2)")
        merged.sort(key=lambda a: float(a[0]))
        object.__setattr__(self, "atoms", tuple(merged))

    @property
    def n(self):
        return self.atoms[0][1].shape[0]

    def region_values(self):
        return [v for _, v in self.atoms if np.max(np.abs(v)) > 0]

    def value_at(self, t, tol=MERGE_TOL):
        for s, v in self.atoms:
            if grp.same_turn(s, t, tol):
                return v
        return None

    def mass(self, start, end):
        out = np.zeros((self.n, self.n), dtype=complex)
        for t, v in self.atoms:
            for shift in (-1, 0, 1):
                if start <= float(t) + shift < end:
                    out += v
        return out


@dataclass(frozen=True, eq=False)
class PiecewiseMeasure(SphericalMeasure):
    breakpoints: tuple
    values: tuple
    kind = "piecewise"
    m = 2

    def __post_init__(self):
        bps = [grp.mod1(grp.snap(b, tol=1e-13)) for b in self.breakpoints]
        vals = [hermitian(v) for v in self.values]
        if len(bps) != len(vals) or not bps:
            raise InvalidInput("need one value per arc and at least one arc")
        order = sorted(range(len(bps)), key=lambda k: float(bps[k]))
        bps = [bps[k] for k in order]
        vals = [vals[k] for k in order]
        if any(grp.same_turn(bps[k], bps[k + 1], 1e-14) for k in range(len(bps) - 1)):
            raise InvalidInput("breakpoints must be distinct")
        object.__setattr__(self, "breakpoints", tuple(bps))
        object.__setattr__(self, "values", tuple(vals))

    @property
    def n(self):
        return self.values[0].shape[0]

    def arcs(self):
        """Triples ``(start, end, value)`` with ``start < end <= start + 1``."""
        b = self.breakpoints
        k = len(b)
        return [(b[i], b[i + 1] if i + 1 < k else b[0] + 1, self.values[i]) for i in range(k)]

    def value_at(self, t):
        t = grp.mod1(t)
        for s, e, v in self.arcs():
            if s <= t < e or s <= t + 1 < e:
                return v
        raise AssertionError("arcs do not cover the circle")

    def merged(self):
        """Equivalent measure with adjacent equal arcs joined."""
        arcs = self.arcs()
        if len(arcs) == 1:
            return self
        keep = [i for i in range(len(arcs)) if not values_close(arcs[i][2], arcs[i - 1][2])]
        if not keep:
            return ConstantMeasure(arcs[0][2])
        return PiecewiseMeasure(tuple(arcs[i][0] for i in keep), tuple(arcs[i][2] for i in keep))

    def region_values(self):
        return [v * (2 * math.pi * float(e - s)) for s, e, v in self.arcs() if np.max(np.abs(v)) > 0]

    def mass(self, start, end):
        out = np.zeros((self.n, self.n), dtype=complex)
        for s, e, v in self.arcs():
            for shift in (-1, 0, 1):
                lo = max(float(s) + shift, start)
                hi = min(float(e) + shift, end)
                if hi > lo:
                    out += v * (2 * math.pi * (hi - lo))
        return out


@dataclass(frozen=True, eq=False)
class ConstantMeasure(SphericalMeasure):
    value: np.ndarray
    kind = "constant"
    m = 2

    def __post_init__(self):
        object.__setattr__(self, "value", hermitian(self.value))

    @property
    def n(self):
        return self.value.shape[0]

    def region_values(self):
        return [self.value * 2 * math.pi] if np.max(np.abs(self.value)) > 0 else []

    def value_at(self, t):
        return self.value

    def mass(self, start, end):
        return self.value * (2 * math.pi * (end - start))


def atomic(atoms, m=2):
    return AtomicMeasure(tuple(atoms), m)


def piecewise(breakpoints, values):
    return PiecewiseMeasure(tuple(breakpoints), tuple(values))


def constant(value):
    return ConstantMeasure(np.asarray(value))


# ---------------------------------------------------------------- pivot measures


@dataclass(frozen=True, eq=False)
class PivotMeasure:
    """Scalar measure spreading mass ``j`` uniformly over the orbit of pivot ``j``."""

    group: grp.CompactGroup2
    pivots: tuple  # turns
    orbits: tuple  # per pivot, tuple of turns
    atoms: tuple  # ((turns, mass), ...)

    def orbit_totals(self):
        return [sum(mass for t, mass in self.atoms if any(grp.same_turn(t, s) for s in orb)) for orb in self.orbits]

    def as_spherical(self):
        return AtomicMeasure(tuple((t, np.array([[mass]])) for t, mass in self.atoms))


def pivot_measure(group, pivots):
    """Orbit measure of ``group`` with pivots given as unit vectors or angles in turns."""
    if not group.is_finite:
        raise NotFinite("pivot measures need a finite group")
    if not group.has_scalar_conjugacy:
        raise InvalidInput("pivot measures are built for unconjugated groups (W = I)")
    turns = [to_turns(p) for p in pivots]
    orbits = []
    for t in turns:
        orb = grp.orbit_turns(group, t)
        for prev in orbits:
            if any(grp.same_turn(a, b) for a in orb for b in prev):
                raise DuplicateOrbit(f"pivot at {t} turns shares an orbit with an earlier pivot")
        orbits.append(tuple(orb))
    atoms = []
    for j, orb in enumerate(orbits, start=1):
        atoms += [(t, j / len(orb)) for t in orb]
    return PivotMeasure(group, tuple(turns), tuple(orbits), tuple(atoms))


def _orbit_points_span(lam):
    vs = np.array([unit(t) for t, _ in lam.atoms])
    return np.linalg.matrix_rank(vs, tol=1e-9) == 2


def golden_turns(start=1):
    k = start
    while True:
        yield (0.5 + k * GOLDEN) % 1.0
        k += 1


def _avoid(group, t, margin=1e-6):
    """True if ``t`` is a poor pivot: fixed by a reflection or mapped to its antipode."""
    for e in grp.enumerate_group(group):
        if e.reflection and grp.turn_distance(e.act(t), t) < margin:
            return True
        if not group.contains_minus_identity() and grp.turn_distance(e.act(t), t + 0.5) < margin:
            return True
    return False


def extend_pivots_until_symmetry(group, seeds=(), max_iter=8):
    """Add pivots until the pivot measure has symmetry group exactly ``group``.

    New pivots come from a golden-angle sequence, skipping points mapped to their
    antipodes, points on reflection axes and points already in a used orbit.
    When the current symmetry group ``S`` is larger than ``group``, a pivot whose
    ``S``-orbit is strictly larger than its ``group``-orbit is preferred.
    """
    from .symmetry import domain_of_measure

    minus = group.contains_minus_identity()
    pivots = []
    for s in seeds:
        t = to_turns(s)
        if not minus and any(grp.turn_distance(t, a) < 1e-9 for a in grp.antipodal_turns(group)):
            continue
        try:
            pivot_measure(group, pivots + [t])
        except DuplicateOrbit:
            continue
        pivots.append(t)
    gen = golden_turns()
    for _ in range(max_iter + 1):
        if pivots:
            lam = pivot_measure(group, pivots)
            sym = domain_of_measure(lam)
            if sym.same_as(group) and _orbit_points_span(lam):
                return lam
        else:
            sym = group
        for _ in range(10000):
            t = next(gen)
            if _avoid(group, t):
                continue
            if sym.is_finite and len(grp.orbit_turns(sym, t)) <= len(grp.orbit_turns(group, t)) and not sym.same_as(group):
                continue
            try:
                pivot_measure(group, pivots + [t])
            except DuplicateOrbit:
                continue
            pivots.append(t)
            break
    lam = pivot_measure(group, pivots)
    raise ConstructionFailure(
        f"symmetry group still {domain_of_measure(lam).label()} after {max_iter} added pivots"
    )


def xi_lift(lam, A=None, *, aa_star=None):
    """Hermitian matrix measure ``AA* Lambda(dθ) + conj(AA*) Lambda(-dθ)``."""
    if (A is None) == (aa_star is None):
        raise InvalidInput("give exactly one of A or aa_star")
    if aa_star is None:
        A = np.asarray(A, dtype=complex)
        if abs(np.linalg.det(A)) <= 1e-12 * max(1.0, np.max(np.abs(A))) ** A.shape[0]:
            raise InvalidInput("A must have full rank")
        aa_star = A @ A.conj().T
    S = hermitian(aa_star)
    if not is_pd(S.real):
        raise IncompatibleSpec("Re(AA*) must be positive definite")
    scale = max(1.0, float(np.max(np.abs(S))))
    real = np.max(np.abs(S.imag)) <= 1e-14 * scale
    minus = lam.group.contains_minus_identity()
    if minus and not real:
        raise IncompatibleSpec("the group contains -I, so AA* must be real")
    if not minus and real:
        raise IncompatibleSpec("the group excludes -I, so Im(AA*) must be nonzero")
    if not minus:
        bad = grp.antipodal_turns(lam.group)
        for p in lam.pivots:
            if any(grp.turn_distance(p, a) < 1e-9 for a in bad):
                raise PivotOnAntipode(f"pivot at {p} turns is mapped to its antipode; avoid {bad}")
    atoms = []
    for t, mass in lam.atoms:
        atoms.append((t, mass * S))
        atoms.append((grp.mod1(t + Fraction(1, 2)), mass * S.conj()))
    return AtomicMeasure(tuple(atoms))


# ---------------------------------------------------------------- slice densities


def _check_pd_real(D, name):
    if not is_pd(D.real):
        raise IncompatibleSpec(f"Re {name} must be positive definite")


def _is_real(D):
    return np.max(np.abs(D.imag)) <= 1e-14 * max(1.0, float(np.max(np.abs(D))))


def dihedral_slices(nu, D1, D2):
    """Density with ``D1`` on the middle half of every slice of width ``1/nu`` turn, ``D2`` elsewhere."""
    if int(nu) != nu or nu < 1:
        raise InvalidInput("nu must be a positive integer")
    D1, D2 = hermitian(D1), hermitian(D2)
    _check_pd_real(D1, "D1")
    if nu % 2:
        if _is_real(D1):
            raise IncompatibleSpec("odd nu needs D1 with nonzero imaginary part")
        if not values_close(D2, D1.conj(), 1e-12):
            raise IncompatibleSpec("odd nu needs D2 = conj(D1)")
    else:
        if not (_is_real(D1) and _is_real(D2)):
            raise IncompatibleSpec("even nu needs real D1 and D2")
        c = np.trace(D2.real) / np.trace(D1.real)
        if not values_close(D2.real, c * D1.real, 1e-12) or c <= 0 or abs(c - 1) < 1e-12:
            raise IncompatibleSpec("even nu needs Re D2 = c Re D1 with c > 0, c != 1")
    k = 4 * nu
    bps = [Fraction(j, k) for j in range(k)]
    vals = [D1 if j % 4 in (1, 2) else D2 for j in range(k)]
    return PiecewiseMeasure(tuple(bps), tuple(vals))


def cyclic_slices(nu, D1, D2, D3, D4):
    """Density cycling ``D1..D4`` over the four quarter arcs of every slice."""
    if int(nu) != nu or nu < 1:
        raise InvalidInput("nu must be a positive integer")
    Ds = [hermitian(D) for D in (D1, D2, D3, D4)]
    for i, D in enumerate(Ds, start=1):
        _check_pd_real(D, f"D{i}")
    if nu % 2:
        if not values_close(Ds[2], Ds[0].conj(), 1e-12) or not values_close(Ds[3], Ds[1].conj(), 1e-12):
            raise IncompatibleSpec("odd nu needs D3 = conj(D1) and D4 = conj(D2)")
        if values_close(Ds[0].real, Ds[1].real, 1e-12):
            raise IncompatibleSpec("odd nu needs Re D1 != Re D2")
        if _is_real(Ds[0]) and _is_real(Ds[1]):
            raise IncompatibleSpec("odd nu needs a nonzero imaginary part")
    else:
        if not all(_is_real(D) for D in Ds):
            raise IncompatibleSpec("even nu needs real values")
        for i in range(4):
            for j in range(i):
                if values_close(Ds[i], Ds[j], 1e-12):
                    raise IncompatibleSpec("even nu needs four pairwise distinct values")
    k = 4 * nu
    bps = [Fraction(j, k) for j in range(k)]
    vals = [Ds[j % 4] for j in range(k)]
    return PiecewiseMeasure(tuple(bps), tuple(vals))


# ---------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    hermitian_symmetry: bool = True
    full_rank: bool = True
    span: bool = True
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return self.hermitian_symmetry and self.full_rank and self.span

    def to_dict(self):
        return {
            "hermitian_symmetry": self.hermitian_symmetry,
            "full_rank": self.full_rank,
            "span": self.span,
            "problems": list(self.problems),
        }


def _rank_ok(v):
    """Zero (outside the support) or positive definite."""
    if np.max(np.abs(v)) == 0:
        return True
    w = np.linalg.eigvalsh(v)
    return bool(w[-1] > 0 and w[0] > 1e-12 * w[-1])


def validate(measure):
    rep = ValidationReport()
    half = Fraction(1, 2)
    if isinstance(measure, AtomicMeasure):
        for t, v in measure.atoms:
            w = measure.value_at(grp.mod1(t + half))
            if w is None or not values_close(w, v.conj()):
                rep.hermitian_symmetry = False
                rep.problems.append(f"atom at {t} turns has no conjugate partner at the antipode")
        dirs = []
        for t, v in measure.atoms:
            if not _rank_ok(v):
                rep.full_rank = False
                rep.problems.append(f"atom at {t} turns is not positive definite")
            elif np.max(np.abs(v)) > 0 and is_pd(v.real):
                dirs.append(unit(t)[: measure.m])
        if not dirs or np.linalg.matrix_rank(np.array(dirs), tol=1e-9) < measure.m:
            rep.span = False
            rep.problems.append(f"support directions with PD real part do not span R^{measure.m}")
    elif isinstance(measure, PiecewiseMeasure):
        for s, e, v in measure.arcs():
            mid = (s + e) / 2
            w = measure.value_at(mid + half)
            bp_ok = any(grp.same_turn(s + half, b, 1e-12) for b in measure.breakpoints)
            if not bp_ok or not values_close(w, v.conj()):
                rep.hermitian_symmetry = False
                rep.problems.append(f"arc [{s}, {e}) has no conjugate partner at the antipode")
            if not _rank_ok(v):
                rep.full_rank = False
                rep.problems.append(f"arc [{s}, {e}) value is not positive definite")
        if not any(np.max(np.abs(v)) > 0 and is_pd(v.real) for _, _, v in measure.arcs()):
            rep.span = False
            rep.problems.append("no arc with positive definite real part")
    elif isinstance(measure, ConstantMeasure):
        v = measure.value
        if not _is_real(v):
            rep.hermitian_symmetry = False
            rep.problems.append("a constant density must be real")
        if not is_pd(v.real):
            rep.full_rank = False
            rep.span = False
            rep.problems.append("constant density is not positive definite")
    else:
        raise InvalidInput(f"unknown measure type {type(measure).__name__}")
    return rep
