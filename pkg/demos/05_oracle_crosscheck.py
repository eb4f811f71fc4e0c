# coding: utf-8

# # Checking the generating-function results against a Fock-space simulation
#
# The analytic moments come from derivatives of exp(quadratic form).  The
# oracle instead builds the state photon by photon in a truncated Fock basis,
# applies beam splitters, subtraction and loss as matrices, and measures.
# The two routes share no code beyond the configuration object.

from psmzi import NDIFF, SchemeConfig, oracle, phase_sensitivity
from psmzi.validation import analytic_quantities, check_config, converge, run_validate, suggest_cutoff

cfg = SchemeConfig(alpha_mag=1.0, r=0.5, m=1, n=1, phi=1.0, T=0.7)

# How many photons does the basis need?  The input tail decides.
c = suggest_cutoff(cfg)
print(f"suggested cutoff: {c}")

rep = converge(lambda d: oracle.run_pipeline(cfg, d), [c, c + 8, c + 16])
for (lo, hi), ch in zip(zip(rep.cutoffs, rep.cutoffs[1:]), rep.changes):
    print(f"cutoff {lo} -> {hi}: worst relative change {max(ch.values()):.2e}")

res = rep.final
print(f"oracle   <N_a> = {res.observables['na']:.10f}")
print(f"analytic <N_a> = {analytic_quantities(cfg)[('moment', 1, 1, 0, 0)].real:.10f}")
print(f"analytic dphi(N_-) = {phase_sensitivity(cfg, NDIFF).delta_phi:.10f}")

chk = check_config(cfg)
key, dev = chk.worst
print(f"worst deviation over all quantities: {key} {dev:.2e}")

# The same check over a small grid; `psmzi validate` runs the full one.
report = run_validate("smoke")
print("\n".join(report.summary_lines()))
