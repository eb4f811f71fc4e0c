# coding: utf-8

# # Quantum Fisher information and the Cramer-Rao bound
#
# The QFI F bounds every detection strategy: delta_phi >= 1/sqrt(v F) for v
# repetitions.  With internal loss eta the bound weakens to F_L.

import math

import numpy as np

from psmzi import NDIFF, XB, SchemeConfig, fisher, optimal_phase, qfi_ideal, qfi_lossy

# For a Gaussian input the QFI has a closed form.
for a, r in [(1.0, 0.0), (1.0, 1.0), (2.0, 0.5)]:
    closed = a * a * (1 + math.exp(2 * r)) + math.sinh(r) ** 2 + 0.5 * math.sinh(2 * r) ** 2
    print(f"alpha={a}, r={r}: F = {qfi_ideal(SchemeConfig(alpha_mag=a, r=r)):.6f}  closed form {closed:.6f}")

# Photon subtraction increases F.
print()
for name, (m, n) in {"standard": (0, 0), "A(2,0)": (2, 0), "C(1,1)": (1, 1)}.items():
    cfg = SchemeConfig(alpha_mag=1.0, r=1.0, m=m, n=n, eta=0.8)
    res = fisher(cfg, v=10)
    best = min(optimal_phase(cfg, d).delta_phi for d in (NDIFF, XB))
    print(f"{name:8s} F = {res.F_ideal:8.3f}  F_L(0.8) = {res.F_lossy:7.3f}  "
          f"QCRB(v=1) = {1 / math.sqrt(res.F_ideal):.4f}  best detection {best:.4f}")

# F_L climbs monotonically from 0 (everything lost) to F (no loss).
cfg = SchemeConfig(alpha_mag=1.0, r=1.0, m=1, n=1)
etas = np.linspace(0.0, 1.0, 6)
print("\neta  " + "  ".join(f"{e:5.2f}" for e in etas))
print("F_L  " + "  ".join(f"{qfi_lossy(cfg, e):5.1f}" for e in etas))
