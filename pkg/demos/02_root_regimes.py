"""
The n = 3 root equation
=======================

A ray t = 1 + x r**3 can leave the centre only if x is a positive root of
27 x**3 (a - x) = (3a - x)**3. Positive roots appear below a_0 and above
a_c, but only the upper family lies under the horizon tangent a - 8/27.
"""
from ltbcollapse import critical_constants, solve_roots

cc = critical_constants()
print(f"a_0 = {cc.a_0:.16g}\na_c = {cc.a_c:.16g}\na_0 * a_c * 729/4 = {cc.a_0 * cc.a_c * 729 / 4:.15f}")

print(f"\n{'a':>10} {'regime':>15}  roots  [x < a ?  x < a - 8/27 ?]")
for a in [0.0005, 0.001, cc.a_0, 0.01, 0.3, 1.0, 3.8, cc.a_c, 4.0, 10.0]:
    rep = solve_roots(a)
    tags = [f"{x:.6g} [{x < a}, {x < a - 8 / 27}]" for x in rep.admissible]
    print(f"{a:10.5g} {rep.regime:>15}  {', '.join(tags) or '-'}")

# The low-amplitude roots sit past the singularity curve (x > a), so no
# physical ray uses them; only the super-critical branch gives a naked start.
