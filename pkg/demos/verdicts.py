"""
Superfluid and NESS at once
===========================

Sweeps along growing boxes at fixed density decide, for each model, whether
the boosted spectrum has negative points (a non-equilibrium stationary state)
and whether the restricted low-energy spectrum stays positive in the limit.
"""
import math

from nesslab.thermolimit import limit_points, run_sweep, verdict_from_report

runs = [
    ("girardeau", dict(), 1.0, 3),
    ("girardeau", dict(), 0.0, 3),
    ("hyl", dict(a_tilde=1), math.pi / 3, 3),
    ("hyl", dict(a_tilde=1), 2.0, 3),
    ("mean-field", dict(a_tilde=1), 1.0, math.pi),
]
print(f"{'model':>10} {'v':>6} {'window':>7} {'NESS':>5} {'superfluid':>10}")
for model, kw, v, L0 in runs:
    rep = run_sweep(model, 1, v, L0, 5, **kw)
    verdict = verdict_from_report(rep)
    print(f"{model:>10} {v:6.3f} {str(verdict.in_window):>7} {str(verdict.is_ness):>5} {str(verdict.is_superfluid):>10}")

# limit points of the cascade ladder approach -2 pi rho v j
rep = run_sweep("girardeau", 1, 1.0, 7 * math.pi, 6, max_cascade=4)
acc, rej = limit_points(rep, labels=[("cascade", j) for j in range(1, 5)])
for lp in acc:
    j = lp.label[1]
    print(f"cascade {j}: eps = {lp.energy:.4f} (target {-2 * math.pi * j:.4f}), q = {lp.exponent:.2f}")
