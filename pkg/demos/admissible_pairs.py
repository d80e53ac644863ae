"""Which (domain, range) symmetry pairs can occur, and a constructed field for each that can."""

from ofbf import build_ac, build_singular, classify
from ofbf.construct import MAXIMAL_DOMAINS, admissibility_table

TARGETS = ("C2", "D2", "SO2", "O2")
table = admissibility_table()

print("domain  " + "  ".join(f"{t:>6s}" for t in TARGETS))
for g in MAXIMAL_DOMAINS:
    cells = []
    for t in TARGETS:
        ok, _ = table[(g.label(), t)]
        if not ok:
            cells.append("  ---")
            continue
        modes = [build_ac] + ([build_singular] if g.is_finite else [])
        reports = [classify(b(g, t)) for b in modes]
        good = all(r.domain_group.same_as(g) and r.range_group.iso_type() == t for r in reports)
        cells.append("   ok" if good else " FAIL")
    print(f"{g.label():6s}  " + "  ".join(f"{c:>6s}" for c in cells))
print("--- marks pairs ruled out by the position of -I; ok means every builder round-trips.")
