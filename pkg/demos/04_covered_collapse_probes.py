"""
Covered collapse: probing from under the horizon
================================================

For n >= 4 there is no singular start. As positive evidence we take rays
from just under the horizon and follow them inward: each one reaches
t < 1, i.e. it comes from the regular centre, not from the singularity.
"""
import numpy as np

from ltbcollapse import ModelParams, backward_probe, classify_numeric
from ltbcollapse import geometry as geo
from ltbcollapse.classify import NumericSettings, probe_anchors

for n, a in [(4, 1.0), (5, 2.0)]:
    params = ModelParams(n, a)
    end, evidence = classify_numeric(params)
    print(f"\nn={n}, a={a}: {end.verdict.value} ({evidence['start_error']})")
    for p in evidence["probes"]:
        print(f"  anchor r1={p['r1']:.3f}: seen at t-1={p['tau_end']:.3e} when r={p['r_end']:.3e}")

    # how far below t = 1 can a probe end? The horizon itself never dips far.
    r = np.linspace(1e-4, params.r_max, 2000)
    dip = (geo.horizon_time(params, r) - 1).min()
    limits = [backward_probe(params, r1, t1) for r1, t1 in probe_anchors(params, NumericSettings())]
    print(f"  deepest horizon point below t=1 on r<=0.1: {dip:.2e}")
    print(f"  probe limits t(1e-7) - 1: {[f'{t - 1:.2e}' for t in limits]}")
