"""Arc boundaries and values of the D3 slice density, ready for an external plotting tool."""

import json

from ofbf import build_ac, dihedral

spec = build_ac(dihedral(3), "SO2")
rows = []
for start, end, value in spec.spherical.arcs():
    rows.append({"start_deg": 360 * float(start), "end_deg": 360 * float(end), "im12": float(value[0, 1].imag)})
print(json.dumps(rows, indent=1))
