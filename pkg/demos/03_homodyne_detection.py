# coding: utf-8

# # Homodyne detection
#
# Measuring the quadrature X = (a + a^dag)/sqrt(2) of output b instead of
# photon numbers changes which subtraction scheme helps.

from psmzi import XA, XB, SchemeConfig, optimal_phase

schemes = {"standard": (0, 0), "A(1,0)": (1, 0), "A(2,0)": (2, 0), "B(0,2)": (0, 2), "C(1,1)": (1, 1)}
grid = (0.01, 3.13, 300)

print("scheme    X_a      X_b      phi*(X_b)")
for name, (m, n) in schemes.items():
    cfg = SchemeConfig(alpha_mag=1.0, r=1.0, m=m, n=n)
    xa = optimal_phase(cfg, XA, grid)
    xb = optimal_phase(cfg, XB, grid)
    print(f"{name:8s} {xa.delta_phi:.5f}  {xb.delta_phi:.5f}  {xb.phi:.3f}{'  (edge)' if xb.at_edge else ''}")

# Subtracting from arm a helps the X_b measurement, while subtracting from both
# arms (C) makes it worse than doing nothing.  The best X_b point sits at
# the small-phi end of the range.

for T in (1.0, 0.7):
    cfg = SchemeConfig(alpha_mag=1.0, r=1.0, m=1, T=T)
    print(f"A(1,0), T={T}: X_b optimum {optimal_phase(cfg, XB, (0.01, 1.0, 100)).delta_phi:.5f}")
