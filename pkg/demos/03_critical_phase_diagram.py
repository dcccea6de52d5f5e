"""
Phase diagram at n = 3
======================

Fifty amplitudes, log-spaced over [0.1, 5]. The closed-form table and the
shooting evidence should switch from covered to naked together at a_c.
"""
from ltbcollapse import SweepGrid, critical_constants, run_sweep

result = run_sweep(SweepGrid((3,), 0.1, 5.0, 50), workers=1)
a_c = critical_constants().a_c

for row in result.rows:
    mark = "#" if row.numeric.verdict.value == "Naked" else "."
    flag = "" if row.agree else "  <-- disagreement"
    print(f"a={row.params.a:8.4f} {row.rule.value:>5} {row.numeric.verdict.value:>10} {mark * 20}{flag}")

print(f"\nagreement {result.agreement():.0%}; a_c = {a_c:.7f}")
print(f"sweep took {result.provenance['timing']['total_s']:.2f} s")
