"""Cross-check of the analytic modules against the Fock-space oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

from . import oracle
from .errors import CutoffTooSmallError, DegenerateStateError, ToleranceBreachError
from .fisher import lossy_from_ideal, qfi_ideal, qfi_lossy
from .metrology import (ModeStats, homodyne_expectations, intensity_expectations,
                        sensitivity_from_stats)
from .model import NAMED_DETECTIONS, SchemeConfig
from .moments import MomentTable, prefactor4_photon_number, total_photon_number

CONVERGENCE_TOL = 1e-8
REL_FLOOR = 1e-9
# convergence changes of near-zero observables are measured against this
# fraction of the largest observable, so roundoff on exact zeros is not
# mistaken for truncation error
SCALE_FLOOR = 1e-6
ETAS = (0.7, 0.8, 1.0)

GRIDS = {
    "default": dict(mn=list(itertools.product((0, 1, 2), repeat=2)), alpha=(0.0, 0.5, 1.0),
                    r=(0.0, 0.5, 1.0), phi=(0.1, 1.0, 1.6), T=(0.7, 1.0)),
    "gaussian": dict(mn=[(0, 0)], alpha=(0.0, 0.5, 1.0), r=(0.0, 0.5, 1.0),
                     phi=(0.1, 1.0, 1.6), T=(1.0,)),
    "smoke": dict(mn=[(0, 0), (1, 0)], alpha=(1.0,), r=(0.5,), phi=(1.0,), T=(0.7, 1.0)),
    "quick": dict(mn=[(0, 0), (1, 0), (1, 1), (0, 2)], alpha=(0.5, 1.0), r=(0.0, 0.5),
                  phi=(0.1, 1.6), T=(0.7, 1.0)),
}


def rel_dev(value, reference, floor: float = REL_FLOOR) -> float:
    return float(abs(value - reference) / max(abs(reference), floor))


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    cutoffs: list
    changes: list            # per successive pair: {observable: relative change}
    threshold: float
    converged: bool
    worst: tuple = ("", 0.0)  # (observable, change) of the last pair
    results: list = field(default_factory=list, repr=False)

    @property
    def final(self):
        return self.results[-1]


def converge(pipeline, cutoffs, threshold: float = CONVERGENCE_TOL) -> ConvergenceReport:
    """Run ``pipeline(cutoff)`` at increasing cutoffs and track successive changes.

    ``pipeline`` returns a mapping (or an object with ``flat()``) of real
    observables.  Non-convergence is reported, not raised; a cutoff too small
    to hold the input state counts as an infinite change.
    """
    cutoffs = list(cutoffs)
    if len(cutoffs) < 2 or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("need at least two strictly increasing cutoffs")
    results, flats = [], []
    for c in cutoffs:
        try:
            res = pipeline(c)
        except CutoffTooSmallError:
            res = None
        results.append(res)
        flats.append(None if res is None else (res.flat() if hasattr(res, "flat") else dict(res)))
    changes = []
    for prev, cur in zip(flats, flats[1:]):
        if prev is None or cur is None:
            changes.append({"input truncation": math.inf})
        else:
            floor = SCALE_FLOOR * max(1.0, max(abs(v) for v in cur.values()))
            changes.append({k: rel_dev(prev[k], cur[k], floor) for k in cur})
    last = changes[-1]
    key = max(last, key=last.get) if last else ""
    worst = (key, last.get(key, 0.0))
    return ConvergenceReport(cutoffs, changes, threshold, worst[1] < threshold, worst, results)


def _total_photon_distribution(alpha: float, r: float, nmax: int) -> np.ndarray:
    p_coh = poisson.pmf(np.arange(nmax), alpha ** 2) if alpha > 0 else np.eye(1, nmax)[0]
    p_sq = np.abs(oracle.squeezed_vacuum_amplitudes(r, nmax)) ** 2
    return np.convolve(p_coh, p_sq)[:nmax]


def suggest_cutoff(cfg: SchemeConfig, tail: float = 1e-12, power: int | None = None,
                   minimum: int = 12, maximum: int = 400) -> int:
    """Smallest cutoff whose discarded input tail, weighted by ``N**power``, is below ``tail``.

    The weight accounts for the subtraction (``2(m+n)``) and for fourth-order
    output moments.
    """
    power = 2 * (cfg.m + cfg.n) + 4 if power is None else power
    P = _total_photon_distribution(cfg.alpha_mag, cfg.r, maximum)
    N = np.arange(maximum, dtype=float)
    w = P * (N + 1.0) ** power
    tails = np.cumsum(w[::-1])[::-1] / w.sum()
    ok = np.nonzero(tails < tail)[0]
    return int(max(minimum, ok[0] if len(ok) else maximum))


# ---------------------------------------------------------------------------
# analytic vs oracle
# ---------------------------------------------------------------------------

def _oracle_stats(res: oracle.OracleResult, kind: str) -> ModeStats:
    o, d = res.observables, res.derivatives
    if kind == "intensity":
        a, b = o["na"], o["nb"]
        return ModeStats(a, b, max(o["na2"] - a * a, 0.0), max(o["nb2"] - b * b, 0.0),
                         o["na_nb"] - a * b, d["na"], d["nb"])
    a, b = o["xa"], o["xb"]
    return ModeStats(a, b, max(o["xa2"] - a * a, 0.0), max(o["xb2"] - b * b, 0.0),
                     o["xa_xb"] - a * b, d["xa"], d["xb"])


def analytic_quantities(cfg: SchemeConfig) -> dict:
    tbl = MomentTable(cfg)
    out = {("moment",) + k: tbl.universal_moment(*k) for k in oracle.MOMENT_ORDERS}
    stats = {"intensity": intensity_expectations(tbl), "homodyne": homodyne_expectations(tbl)}
    for name, det in NAMED_DETECTIONS.items():
        out[("dphi", name)] = sensitivity_from_stats(stats[det.kind], det, cfg.phi)
    out[("N",)] = total_photon_number(cfg)
    out[("F",)] = qfi_ideal(cfg)
    for eta in ETAS:
        out[("F_L", eta)] = qfi_lossy(cfg, eta)
    return out


def oracle_quantities(cfg: SchemeConfig, res: oracle.OracleResult) -> dict:
    out = {("moment",) + k: v for k, v in res.moments.items()}
    stats = {k: _oracle_stats(res, k) for k in ("intensity", "homodyne")}
    for name, det in NAMED_DETECTIONS.items():
        out[("dphi", name)] = sensitivity_from_stats(stats[det.kind], det, cfg.phi)
    out[("N",)] = res.internal["N"]
    out[("F",)] = res.internal["qfi"]
    for eta in ETAS:
        out[("F_L", eta)] = lossy_from_ideal(res.internal["qfi"], res.internal["n_a"], eta)
    return out


def compare(analytic: dict, reference: dict) -> dict:
    """Relative deviation per quantity; undefined sensitivities must agree in status."""
    devs = {}
    for key, a in analytic.items():
        o = reference[key]
        if key[0] == "dphi":
            if a.defined != o.defined:
                devs[key] = math.inf
            elif a.defined:
                devs[key] = rel_dev(a.delta_phi, o.delta_phi)
            continue
        devs[key] = rel_dev(a, o)
    return devs


@dataclass
class ConfigCheck:
    cfg: SchemeConfig
    cutoff: int
    convergence: float        # worst successive relative change of the oracle
    converged: bool
    deviations: dict

    @property
    def worst(self):
        key = max(self.deviations, key=self.deviations.get)
        return key, self.deviations[key]


@dataclass
class ValidationReport:
    checks: list
    tolerance: float
    skipped: list
    photon_number_ratios: list   # (cfg, printed-formula N / oracle N)

    def max_deviation_by_quantity(self) -> dict:
        out = {}
        for c in self.checks:
            for key, v in c.deviations.items():
                fam = key[0] if key[0] != "dphi" else f"dphi[{key[1]}]"
                if key[0] == "F_L":
                    fam = f"F_L[eta={key[1]}]"
                out[fam] = max(out.get(fam, 0.0), v)
        return out

    @property
    def worst(self):
        best = (None, None, 0.0)
        for c in self.checks:
            key, v = c.worst
            if v >= best[2]:
                best = (c.cfg, key, v)
        return best

    @property
    def all_converged(self) -> bool:
        return all(c.converged for c in self.checks)

    @property
    def passed(self) -> bool:
        return self.all_converged and self.worst[2] <= self.tolerance

    def raise_on_breach(self):
        if not self.passed:
            cfg, key, v = self.worst
            raise ToleranceBreachError(
                f"max relative deviation {v:.3e} > {self.tolerance:g} at {key} for {cfg}",
                worst=(cfg, key, v))

    def summary_lines(self) -> list[str]:
        lines = [f"configurations checked: {len(self.checks)} (skipped degenerate: {len(self.skipped)})",
                 f"oracle convergence: all successive changes < {CONVERGENCE_TOL:g}: {self.all_converged}"]
        for fam, v in sorted(self.max_deviation_by_quantity().items()):
            lines.append(f"max rel. deviation {fam:16s} {v:.3e}")
        cfg, key, v = self.worst
        lines.append(f"worst: {key} = {v:.3e} at {cfg}")
        lines.append("photon number: printed closed form (prefactor 4) / oracle N:")
        for cfg, ratio in self.photon_number_ratios:
            lines.append(f"  m={cfg.m} n={cfg.n} alpha={cfg.alpha_mag} r={cfg.r}: ratio {ratio:.10f}")
        lines.append(f"tolerance {self.tolerance:g}: {'PASS' if self.passed else 'BREACH'}")
        return lines


def grid_configs(preset="default", **overrides):
    g = dict(GRIDS[preset] if isinstance(preset, str) else preset)
    g.update(overrides)
    for (m, n), a, r in itertools.product(g["mn"], g["alpha"], g["r"]):
        for phi, T in itertools.product(g["phi"], g["T"]):
            yield SchemeConfig(alpha_mag=a, r=r, m=m, n=n, phi=phi, T=T)


def check_config(cfg: SchemeConfig, cutoff: int | None = None, step: int = 16,
                 min_cutoff: int = 0) -> ConfigCheck:
    """Compare every analytic quantity with a convergence-verified oracle run.

    Without an explicit ``cutoff`` the suggested one is rounded up to a
    multiple of ``step`` so that cached beam-splitter blocks and loss maps
    are shared across configurations.
    """
    c0 = cutoff or step * math.ceil(max(min_cutoff, suggest_cutoff(cfg)) / step)
    rep = converge(lambda c: oracle.run_pipeline(cfg, c), [c0, c0 + step])
    while not rep.converged and rep.cutoffs[-1] + step <= 400:
        c0 = rep.cutoffs[-1]
        rep = converge(lambda c: oracle.run_pipeline(cfg, c), [c0, c0 + step])
    devs = compare(analytic_quantities(cfg), oracle_quantities(cfg, rep.final))
    return ConfigCheck(cfg, rep.cutoffs[-1], rep.worst[1], rep.converged, devs)


def run_validate(preset="default", tolerance: float = 1e-6, progress=None,
                 min_cutoff: int = 0, **overrides) -> ValidationReport:
    checks, skipped, ratios = [], [], []
    seen = set()
    for cfg in grid_configs(preset, **overrides):
        try:
            MomentTable(cfg)
        except DegenerateStateError:
            skipped.append(cfg)
            continue
        chk = check_config(cfg, min_cutoff=min_cutoff)
        checks.append(chk)
        key = (cfg.m, cfg.n, cfg.alpha_mag, cfg.r)
        if key not in seen:
            seen.add(key)
            oracle_N = oracle.run_pipeline(cfg, chk.cutoff, moments=False).internal["N"]
            if oracle_N > 0.0:  # the vacuum has no ratio to report
                ratios.append((cfg, prefactor4_photon_number(cfg) / oracle_N))
        if progress:
            progress(chk)
    return ValidationReport(checks, tolerance, skipped, ratios)
