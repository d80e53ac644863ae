"""Constructors producing field specs with a prescribed (domain, range) symmetry pair."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import groups as grp
from . import measures as ms
from .errors import (
    ConstructionFailure,
    InadmissiblePair,
    InvalidInput,
    RecipeInvalid,
    UnsupportedDimension,
    UseAbsolutelyContinuous,
)
from .matlin import hermitian
from .spectral import make_spec
from .symmetry import RANGE_TYPES, classify, range_group_of_values, validate_pair

DEFAULT_H = 0.4
DEFAULT_KAPPA = 0.5
SLICE_RATIO = 2.0
J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def range_target(target):
    """Normalize a range target ("so2", "C2", a group object, ...) to one of C2, D2, SO2, O2."""
    if isinstance(target, (grp.CompactGroup2, grp.SignGroup)):
        name = target.iso_type()
    else:
        name = str(target).strip().upper().replace("(", "").replace(")", "")
        name = {"CYCLIC:2": "C2", "DIHEDRAL:2": "D2"}.get(name, name)
    if name not in RANGE_TYPES:
        raise InvalidInput(f"range target must be one of {', '.join(RANGE_TYPES)}, got {target!r}")
    return name


@dataclass(frozen=True, eq=False)
class RangeGroupRecipe:
    target: str
    H: np.ndarray
    AAstar: np.ndarray

    def to_dict(self):
        return {
            "target": self.target,
            "H": self.H.tolist(),
            "AAstar_re": self.AAstar.real.tolist(),
            "AAstar_im": self.AAstar.imag.tolist(),
        }


def _raw_recipe(target, need_real, h, kappa):
    I = np.eye(2)
    if target == "O2":
        return h * I, I.astype(complex)
    if target == "D2":
        return np.diag([h, h + 0.2]), I.astype(complex)
    if target == "SO2":
        return h * I, I + 1j * kappa * J
    H = np.array([[h, 0.0], [0.2, h + 0.2]])
    AA = np.array([[1.0, 0.3], [0.3, 2.0]], dtype=complex)
    if not need_real:
        AA = AA + 1j * kappa * J
    return H, AA


def recipe_for_range(target, need_real, h=DEFAULT_H, kappa=DEFAULT_KAPPA):
    """Parameters ``(H, AA*)`` of a two-variate process whose range group is ``target``.

    ``need_real`` asks for a real ``AA*`` (needed when ``-I`` lies in the domain
    group). Every recipe is checked with the range classifier before it is returned.
    """
    target = range_target(target)
    if need_real and target == "SO2":
        raise InadmissiblePair("an SO2 range needs Im(AA*) != 0, which a domain containing -I forbids")
    if not need_real and target in ("D2", "O2"):
        raise InadmissiblePair(f"a {target} range needs a real AA*, which a domain without -I forbids")
    if not 0 < kappa < 1:
        raise InvalidInput("kappa must lie in (0, 1)")
    H, AA = _raw_recipe(target, need_real, h, kappa)
    AA = hermitian(AA)
    got = range_group_of_values(H, [AA]).iso_type()
    if got != target:
        raise RecipeInvalid(f"recipe for {target} classifies as {got}")
    return RangeGroupRecipe(target, H, AA)


def _check_pair(G1, target):
    if isinstance(G1, grp.CompactGroup2) and not G1.has_scalar_conjugacy:
        raise UnsupportedDimension("constructions are provided for unconjugated domain groups")
    ok, reason = validate_pair(G1, grp.SignGroup() if target is None else _target_group(target))
    if not ok:
        raise InadmissiblePair(reason)


def _target_group(target):
    return {"C2": grp.cyclic(2), "D2": grp.dihedral(2), "SO2": grp.so2(), "O2": grp.o2()}[target]


def _round_trip(spec, G1, target):
    rep = classify(spec)
    same_range = rep.range_group.iso_type() == target
    if not (rep.domain_group.same_as(G1) and same_range):
        raise ConstructionFailure(
            f"requested ({G1.label()}, {target}) but the result classifies as "
            f"({rep.domain_group.label()}, {rep.range_group.label()}): {rep.to_dict()}"
        )
    return spec


def _seed_turns(group, count):
    seeds = []
    for t in ms.golden_turns():
        if len(seeds) == count:
            return seeds
        if not ms._avoid(group, t):
            try:
                ms.pivot_measure(group, seeds + [t])
            except InvalidInput:
                continue
            seeds.append(t)


def build_singular(G1, target, h=DEFAULT_H, kappa=DEFAULT_KAPPA):
    """Field spec with an atomic spherical measure realizing ``(G1, target)``."""
    target = range_target(target)
    _check_pair(G1, target)
    if isinstance(G1, grp.CompactGroup2) and not G1.is_finite:
        raise UseAbsolutelyContinuous(
            f"{G1.label()} cannot be the domain group of a field with singular spectral measure; use the ac mode"
        )
    recipe = recipe_for_range(target, G1.contains_minus_identity(), h, kappa)
    if isinstance(G1, grp.SignGroup):
        S = recipe.AAstar
        meas = ms.AtomicMeasure(((0, S), (Fraction(1, 2), S.conj())), m=1)
        return _round_trip(make_spec([[1.0]], recipe.H, meas), G1, target)
    lam = ms.extend_pivots_until_symmetry(G1, _seed_turns(G1, 2))
    meas = ms.xi_lift(lam, aa_star=recipe.AAstar)
    return _round_trip(make_spec(np.eye(2), recipe.H, meas), G1, target)


def _ac_measure(G1, S):
    if G1.kind == "o2":
        return ms.constant(S.real)
    if G1.kind == "dstar1":
        return ms.piecewise((0, Fraction(1, 2)), (S, S.conj()))
    nu = G1.nu
    if G1.kind == "dihedral":
        if nu % 2:
            return ms.dihedral_slices(nu, S, S.conj())
        return ms.dihedral_slices(nu, S.real, SLICE_RATIO * S.real)
    if G1.kind == "cyclic":
        if nu % 2:
            return ms.cyclic_slices(nu, S, SLICE_RATIO * S, S.conj(), SLICE_RATIO * S.conj())
        return ms.cyclic_slices(nu, *(k * S.real for k in (1, 2, 3, 4)))
    raise InvalidInput(f"no absolutely continuous construction for {G1.label()}")


def build_ac(G1, target, h=DEFAULT_H, kappa=DEFAULT_KAPPA):
    """Field spec with a piecewise-constant spherical density realizing ``(G1, target)``."""
    target = range_target(target)
    if isinstance(G1, grp.SignGroup):
        raise UnsupportedDimension("absolutely continuous constructions are provided for m = 2")
    _check_pair(G1, target)
    recipe = recipe_for_range(target, G1.contains_minus_identity(), h, kappa)
    meas = _ac_measure(G1, recipe.AAstar)
    return _round_trip(make_spec(np.eye(2), recipe.H, meas), G1, target)


def build(G1, target, mode="ac", **kw):
    if mode == "ac":
        return build_ac(G1, target, **kw)
    if mode == "singular":
        return build_singular(G1, target, **kw)
    raise InvalidInput("mode must be 'ac' or 'singular'")


MAXIMAL_DOMAINS = (
    [grp.cyclic(k) for k in range(1, 5)] + [grp.dihedral(k) for k in range(1, 5)] + [grp.dstar1(), grp.o2()]
)


def admissibility_table(domains=MAXIMAL_DOMAINS, targets=RANGE_TYPES):
    """``{(domain label, target): (admissible, reason)}`` over the product grid."""
    return {(g.label(), t): validate_pair(g, _target_group(t)) for g in domains for t in targets}
