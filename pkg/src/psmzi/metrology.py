"""Error-propagation phase sensitivity, SQL/HL limits and optimum-phase search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (DegenerateStateError, NegativeVarianceError, NoFinitePointError,
                     UndefinedSensitivityError)
from .model import Detection, SchemeConfig
from .moments import MomentTable, total_photon_number

VARIANCE_TOL = 1e-10
DERIVATIVE_FLOOR = 1e-12
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ModeStats:
    """Means, variances and covariance of one observable pair at the output ports."""

    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    cov: float
    d_mean_a: float
    d_mean_b: float


@dataclass(frozen=True)
class SensitivityPoint:
    phi: float
    delta_phi: float          # nan when undefined
    numerator: float          # sqrt of the signal variance
    denominator: float        # |d<O>/dphi|
    detection: str
    defined: bool = True

    @property
    def status(self) -> str:
        return "ok" if self.defined else "undefined"

    def require(self) -> float:
        if not self.defined:
            raise UndefinedSensitivityError(
                f"|d<O>/dphi| = {self.denominator:.3e} at phi = {self.phi}")
        return self.delta_phi


@dataclass(frozen=True)
class LimitPair:
    N: float
    sql: float
    hl: float


def _checked_variance(value: float, what: str) -> float:
    if value < -VARIANCE_TOL:
        raise NegativeVarianceError(f"{what} = {value:.3e}")
    return max(value, 0.0)


def _real(z: complex) -> float:
    return float(np.real(z))


def intensity_expectations(tbl: MomentTable) -> ModeStats:
    """Photon-number statistics of the two output ports.

    Second moments use ``N^2 = a^dag^2 a^2 + a^dag a``.
    """
    U = tbl.universal_moment
    dU = tbl.d_universal_moment
    na = _real(U(1, 1, 0, 0))
    nb = _real(U(0, 0, 1, 1))
    var_a = _real(U(2, 2, 0, 0)) + na - na ** 2
    var_b = _real(U(0, 0, 2, 2)) + nb - nb ** 2
    cov = _real(U(1, 1, 1, 1)) - na * nb
    return ModeStats(na, nb, _checked_variance(var_a, "Var(N_a)"),
                     _checked_variance(var_b, "Var(N_b)"), cov,
                     _real(dU(1, 1, 0, 0)), _real(dU(0, 0, 1, 1)))


def homodyne_expectations(tbl: MomentTable) -> ModeStats:
    """Quadrature statistics for ``X = (a + a^dag)/sqrt(2)``; vacuum variance is 1/2."""
    U = tbl.universal_moment
    dU = tbl.d_universal_moment
    xa = _real(U(0, 1, 0, 0) + U(1, 0, 0, 0)) / SQRT2
    xb = _real(U(0, 0, 0, 1) + U(0, 0, 1, 0)) / SQRT2
    xa2 = _real(U(0, 2, 0, 0) + U(2, 0, 0, 0) + 2 * U(1, 1, 0, 0) + 1) / 2
    xb2 = _real(U(0, 0, 0, 2) + U(0, 0, 2, 0) + 2 * U(0, 0, 1, 1) + 1) / 2
    xaxb = _real(U(0, 1, 0, 1) + U(0, 1, 1, 0) + U(1, 0, 0, 1) + U(1, 0, 1, 0)) / 2
    dxa = _real(dU(0, 1, 0, 0) + dU(1, 0, 0, 0)) / SQRT2
    dxb = _real(dU(0, 0, 0, 1) + dU(0, 0, 1, 0)) / SQRT2
    return ModeStats(xa, xb, _checked_variance(xa2 - xa ** 2, "Var(X_a)"),
                     _checked_variance(xb2 - xb ** 2, "Var(X_b)"), xaxb - xa * xb, dxa, dxb)


def sensitivity_from_stats(stats: ModeStats, det: Detection, phi: float) -> SensitivityPoint:
    c, d = det.c, det.d
    var = _checked_variance(c * c * stats.var_a + d * d * stats.var_b + 2 * c * d * stats.cov,
                            f"Var({det.name})")
    num = math.sqrt(var)
    den = abs(c * stats.d_mean_a + d * stats.d_mean_b)
    if den < DERIVATIVE_FLOOR:
        return SensitivityPoint(phi, math.nan, num, den, det.name, defined=False)
    return SensitivityPoint(phi, num / den, num, den, det.name)


def phase_sensitivity(cfg: SchemeConfig, det: Detection,
                      table: MomentTable | None = None) -> SensitivityPoint:
    """Error-propagation sensitivity ``sqrt(Var O) / |d<O>/dphi|`` at ``cfg.phi``."""
    tbl = table if table is not None else MomentTable(cfg)
    if det.kind == "intensity":
        stats = intensity_expectations(tbl)
    else:
        stats = homodyne_expectations(tbl)
    return sensitivity_from_stats(stats, det, cfg.phi)


LIMIT_REFERENCES = ("subtracted", "input")


def limits(cfg: SchemeConfig, reference: str = "subtracted") -> LimitPair:
    """Standard quantum limit ``1/sqrt(N)`` and Heisenberg limit ``1/N``.

    ``reference="subtracted"`` takes ``N`` inside the interferometer after
    subtraction.  ``reference="input"`` takes the photon number of the same
    interferometer without subtraction, ``|alpha|^2 + sinh^2 r``, which is the
    common benchmark when comparing schemes at a fixed input.
    """
    if reference == "subtracted":
        N = total_photon_number(cfg)
    elif reference == "input":
        N = total_photon_number(cfg.with_(m=0, n=0))
    else:
        raise ValueError(f"reference must be one of {LIMIT_REFERENCES}, got {reference!r}")
    if N <= 0.0:
        raise DegenerateStateError("zero photons inside the interferometer")
    return LimitPair(N, 1 / math.sqrt(N), 1 / N)


@dataclass(frozen=True)
class Optimum:
    phi: float
    delta_phi: float
    grid_phi: float
    grid_delta_phi: float
    at_edge: bool


def _objective(cfg: SchemeConfig, det: Detection):
    def f(phi: float) -> float:
        p = phase_sensitivity(cfg.with_(phi=float(phi)), det)
        return p.delta_phi if p.defined else math.inf
    return f


def optimal_phase(cfg: SchemeConfig, det: Detection,
                  grid: tuple[float, float, int] = (0.01, math.pi - 0.01, 200),
                  xtol: float = 1e-8) -> Optimum:
    """Minimise the sensitivity over ``phi``.

    Scans ``np.linspace(*grid)`` and refines the best interior grid point
    by a bounded scalar search between its two neighbours.  A minimum on the
    grid edge, or next to an undefined point, is returned as is.
    """
    start, stop, num = grid
    if num < 3:
        raise ValueError("grid needs at least 3 points")
    phis = np.linspace(start, stop, int(num))
    f = _objective(cfg, det)
    vals = np.array([f(p) for p in phis])
    if not np.isfinite(vals).any():
        raise NoFinitePointError(f"{det.name}: every grid point is undefined")
    i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.inf)))
    if i == 0 or i == len(phis) - 1:
        return Optimum(float(phis[i]), float(vals[i]), float(phis[i]), float(vals[i]), True)
    if not (np.isfinite(vals[i - 1]) and np.isfinite(vals[i + 1])):
        return Optimum(float(phis[i]), float(vals[i]), float(phis[i]), float(vals[i]), False)
    # bounded search also handles ties between neighbours (symmetric curves)
    res = minimize_scalar(f, bounds=(phis[i - 1], phis[i + 1]), method="bounded",
                          options={"xatol": xtol})
    phi_opt, val = float(res.x), float(res.fun)
    if not val <= vals[i]:
        phi_opt, val = float(phis[i]), float(vals[i])
    return Optimum(phi_opt, val, float(phis[i]), float(vals[i]), False)


def sensitivity_curve(cfg: SchemeConfig, det: Detection, phis) -> list[SensitivityPoint]:
    return [phase_sensitivity(cfg.with_(phi=float(p)), det) for p in phis]
