"""A planar field whose law is invariant under D3 in the domain and SO(2) in the range.

Run with ``python demos/d3_so2_field.py``.
"""

from fractions import Fraction

import numpy as np

from ofbf import build_ac, classify, dihedral, sim
from ofbf.groups import reflection, rotation
from ofbf.symmetry import covariance_defect
from ofbf.verify import probe_pairs

spec = build_ac(dihedral(3), "SO2")
report = classify(spec)
print(f"classified as ({report.domain_group.label()}, {report.range_group.label()})")

# The covariance is unchanged by the six elements of D3 but not by a quarter turn or -I.
pairs = probe_pairs(2)
for name, A in [
    ("rotation 1/3", rotation(Fraction(1, 3)).matrix()),
    ("reflection F(2/3)", reflection(Fraction(2, 3)).matrix()),
    ("rotation 1/4", rotation(Fraction(1, 4)).matrix()),
    ("-I", -np.eye(2)),
]:
    print(f"  {name:18s} relative covariance change {covariance_defect(spec, pairs, A=A):.2e}")

# Simulate on a hexagonal grid closed under D3 and test the symmetries empirically.
grid = sim.polygon_grid([0.6, 1.2], 6, offset=Fraction(1, 12))
state = sim.build_sampler(spec, grid, seed=42)
for name, g, mode in [("rotation 1/3", rotation(Fraction(1, 3)), "domain"), ("-I", -np.eye(2), "domain")]:
    res = sim.empirical_symmetry_test(spec, g, mode, grid, samples=2000, state=state)
    print(f"  empirical {name:12s} max |z| = {res.statistic:.2f} -> {'invariant' if res.passed else 'rejected'}")
