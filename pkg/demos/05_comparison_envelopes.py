"""
Comparison envelopes for n = 1, 2
=================================

Writing x = a**(2/3) + y, the ray equation reads r y' = A y + B r**beta
with A < 0. Sampled bounds on A and B give explicit power-law barriers
z0 <= y <= z1; the shot solution should stay between them.
"""
from ltbcollapse import ModelParams
from ltbcollapse.verification import check_envelope_containment, estimate_envelope, shoot_inside_envelope

for n, a in [(1, 1.0), (2, 8.0), (1, 0.05)]:
    params = ModelParams(n, a)
    b = estimate_envelope(params, r_star=1e-2)
    path = shoot_inside_envelope(params, b, r_star=1e-2)
    res = check_envelope_containment(params, path, b, r_star=1e-2)
    print(f"\nn={n}, a={a}: beta={b.beta:.4f}")
    print(f"  A in [{b.A0:.5f}, {b.A1:.5f}], A(0,0)={b.A00:.6f} (closed form {-(3 + 2 * n) / 3:.6f})")
    print(f"  B in [{b.B0:.5f}, {b.B1:.5f}]  (negative: x approaches a^(2/3) from below)")
    print(f"  z0 = {b.c0:.5f} r^beta, z1 = {b.c1:.5f} r^beta")
    print(f"  contained on {res.detail['samples']} samples, worst margin {res.detail['worst_margin']:.4f}")
