"""Battery of invariant checks run by ``ofbf verify``."""

from dataclasses import asdict, dataclass

import numpy as np

from . import specfile, tables
from .sim import block_covariance, GridDesign
from .spectral import covariance, homogeneity_check, oss_check, structure_function
from .symmetry import classify, covariance_defect, sample_matrices

TOL_OSS = 1e-4
TOL_INCREMENTS = 1e-4
TOL_INVARIANCE = 1e-5
TOL_PSD = 1e-8
TOL_HOMOGENEITY = 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float = 0.0
    tolerance: float = 0.0
    detail: str = ""


def probe_pairs(m, count=10, seed=2024):
    rng = np.random.default_rng(seed)
    return [(rng.normal(size=m), rng.normal(size=m)) for _ in range(count)]


def _rel(A, B):
    return float(np.linalg.norm(A - B) / max(np.linalg.norm(B), 1e-300))


def increment_deviation(spec, pairs, cfg=None):
    """Max relative gap between ``Var(X(t1) - X(t2))`` and ``Var(X(t1 - t2))``."""
    return max(_rel(structure_function(spec, a, b, cfg), covariance(spec, a - b, a - b, cfg)) for a, b in pairs)


def psd_margin(spec, points=20, seed=7, cfg=None):
    """``min eig / max |eig|`` of the block covariance on random points."""
    P = np.random.default_rng(seed).normal(size=(points, spec.m))
    w = np.linalg.eigvalsh(block_covariance(spec, GridDesign(P), cfg))
    return float(w[0] / max(np.max(np.abs(w)), 1e-300))


def spec_checks(spec, cfg=None):
    pairs = probe_pairs(spec.m)
    out = []
    margin = psd_margin(spec, cfg=cfg)
    out.append(Check("psd", margin >= -TOL_PSD, margin, TOL_PSD, "min eigenvalue / max |eigenvalue|"))
    dev = max(oss_check(spec, c, pairs, cfg) for c in (0.5, 2.0))
    out.append(Check("operator_self_similarity", dev <= TOL_OSS, dev, TOL_OSS))
    dev = increment_deviation(spec, pairs, cfg)
    out.append(Check("stationary_increments", dev <= TOL_INCREMENTS, dev, TOL_INCREMENTS))
    dev = homogeneity_check(spec, 2.0)
    out.append(Check("spectral_homogeneity", dev <= TOL_HOMOGENEITY, dev, TOL_HOMOGENEITY))
    rep = classify(spec)
    out.append(Check("admissible_pair", rep.admissible, detail=f"{rep.domain_group.label()} x {rep.range_group.label()}: {rep.reason}"))
    dev = max(covariance_defect(spec, pairs[:4], A=A, cfg=cfg) for A in sample_matrices(rep.domain_group))
    out.append(Check("domain_invariance", dev <= TOL_INVARIANCE, dev, TOL_INVARIANCE))
    dev = max(covariance_defect(spec, pairs[:4], B=B, cfg=cfg) for B in sample_matrices(rep.range_group))
    out.append(Check("range_invariance", dev <= TOL_INVARIANCE, dev, TOL_INVARIANCE))
    again = classify(specfile.loads(specfile.dumps(spec)).spec).to_dict()
    out.append(Check("serialization_round_trip", again == rep.to_dict()))
    return out


def table_checks():
    out = []
    for row in tables.check_intersections():
        out.append(
            Check(
                f"intersection:{row.first},{row.second}:{row.branch}",
                row.passed,
                detail=f"expected {row.expected}, got {row.got}",
            )
        )
    matches, extras = tables.check_antipodes()
    out.append(Check("antipodes:D3", matches and not extras, float(len(extras)), detail="six tabulated points, scan of 3600 angles"))
    return out


def summarize(checks):
    return {
        "passed": all(c.passed for c in checks),
        "failed": [c.name for c in checks if not c.passed],
        "checks": [asdict(c) for c in checks],
    }
