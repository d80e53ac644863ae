"""Reference tables for group intersections and antipodal points, with checkers."""

from dataclasses import dataclass
import math

import numpy as np

from . import groups as grp

# (first group, second group, intersection when the conjugacies agree up to scale,
#  intersection for unrelated conjugacies)
INTERSECTION_ROWS = (
    ("O2", "O2", "O2", "C2"),
    ("O2", "SO2", "SO2", "C2"),
    ("O2", "D2", "D2", "C2"),
    ("O2", "C2", "C2", "C2"),
    ("SO2", "SO2", "SO2", "C2"),
    ("SO2", "D2", "C2", "C2"),
    ("SO2", "C2", "C2", "C2"),
    ("D2", "D2", "D2", "C2"),
    ("D2", "C2", "C2", "C2"),
    ("C2", "C2", "C2", "C2"),
)

# reflection (turns of F), axis angle, antipodal points (radians)
D3_ANTIPODES = (
    (1 / 3, math.pi / 3, (5 * math.pi / 6, 11 * math.pi / 6)),
    (2 / 3, 2 * math.pi / 3, (math.pi / 6, 7 * math.pi / 6)),
    (1.0, math.pi, (math.pi / 2, 3 * math.pi / 2)),
)

W_BASE = np.array([[1.3, 0.4], [0.4, 0.9]])
W_GENERIC = np.array([[0.8, -0.25], [-0.25, 1.6]])


def make_range_group(name, W):
    return {"O2": grp.o2, "SO2": grp.so2, "D2": lambda W: grp.dihedral(2, W), "C2": lambda W: grp.cyclic(2, W)}[name](W)


@dataclass(frozen=True)
class Table1Check:
    first: str
    second: str
    branch: str
    expected: str
    got: str
    passed: bool


def _expected_group(name, W):
    return grp.cyclic(2) if name == "C2" else make_range_group(name, W)


def check_intersections(W1=W_BASE, W_generic=W_GENERIC):
    """Intersect each row's pair under both conjugacy branches and compare with the tabulated group.

    In the proportional branch the second group uses ``2 W1``; in the generic
    branch it uses ``W_generic``. A result matches when it equals the expected
    group as a set of matrices.
    """
    out = []
    for a, b, same, generic in INTERSECTION_ROWS:
        for branch, W2, exp in (("proportional", 2 * W1, same), ("generic", W_generic, generic)):
            got = grp.intersect(make_range_group(a, W1), make_range_group(b, W2))
            ok = got.same_as(_expected_group(exp, W1))
            out.append(Table1Check(a, b, branch, exp, got.label(), bool(ok)))
    return out


def check_antipodes(scan=3600, tol=1e-12):
    """Tabulated D3 antipodal points against ``antipodal_points`` and a brute-force angle scan.

    Returns ``(matches_table, scan_extras)`` where ``scan_extras`` lists scanned
    angles (radians) sent to their antipode by some reflection but not tabulated.
    """
    g = grp.dihedral(3)
    expected = sorted(a for _, _, pts in D3_ANTIPODES for a in pts)
    got = sorted(math.atan2(p[1], p[0]) % (2 * math.pi) for p in grp.antipodal_points(g))
    matches = len(got) == len(expected) and all(abs(x - y) <= tol for x, y in zip(got, expected))
    mats = [e.matrix() for e in grp.enumerate_group(g)]
    extras = []
    for k in range(scan):
        phi = 2 * math.pi * k / scan
        x = np.array([math.cos(phi), math.sin(phi)])
        if any(np.linalg.norm(M @ x + x) < 1e-9 for M in mats):
            if min(abs((phi - e + math.pi) % (2 * math.pi) - math.pi) for e in expected) > 1e-9:
                extras.append(phi)
    return matches, extras
