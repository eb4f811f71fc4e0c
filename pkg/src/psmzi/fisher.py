"""Quantum Fisher information and quantum Cramer-Rao bounds.

The ideal QFI is ``4 Var(n_a)`` on the subtracted internal state (the state
is pure and the phase generator is ``n_a``).  The lossy QFI plugs the ideal
value and the internal mode-a photon number into the closed-form bound for
loss of transmittance ``eta`` on mode a.  Neither uses ``cfg.T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NegativeVarianceError, ZeroInformationError
from .model import SchemeConfig
from .moments import internal_mean

VARIANCE_TOL = 1e-10


def internal_photon_number_a(cfg: SchemeConfig) -> float:
    """``<n_a>`` inside the interferometer after subtraction."""
    return internal_mean(cfg, 1, 0)


def qfi_ideal(cfg: SchemeConfig) -> float:
    n1 = internal_mean(cfg, 1, 0)
    n2 = internal_mean(cfg, 2, 0)  # <a^dag^2 a^2>
    var = n2 + n1 - n1 * n1
    if var < -VARIANCE_TOL:
        raise NegativeVarianceError(f"Var(n_a) = {var:.3e}")
    return 4.0 * max(var, 0.0)


def lossy_from_ideal(F: float, n_a: float, eta: float) -> float:
    """``4 eta <n_a> F / ((1 - eta) F + 4 eta <n_a>)``."""
    if eta == 1.0:
        return F
    num = 4.0 * eta * n_a * F
    if num == 0.0:
        return 0.0
    return num / ((1.0 - eta) * F + 4.0 * eta * n_a)


def qfi_lossy(cfg: SchemeConfig, eta: float | None = None) -> float:
    eta = cfg.eta if eta is None else eta
    return lossy_from_ideal(qfi_ideal(cfg), internal_photon_number_a(cfg), eta)


def qcrb_from_fisher(F: float, v: int = 1) -> float:
    if v < 1:
        raise ValueError("v must be a positive integer")
    if F <= 0.0:
        raise ZeroInformationError("Fisher information is zero")
    return 1.0 / math.sqrt(v * F)


def qcrb(cfg: SchemeConfig, lossy: bool = False, v: int = 1) -> float:
    """``1/sqrt(v F)`` with the ideal or lossy QFI."""
    F = qfi_lossy(cfg) if lossy else qfi_ideal(cfg)
    return qcrb_from_fisher(F, v)


@dataclass(frozen=True)
class FisherResult:
    F_ideal: float
    F_lossy: float
    n_a: float
    v: int
    qcrb_ideal: float   # nan when F_ideal == 0
    qcrb_lossy: float   # nan when F_lossy == 0


def fisher(cfg: SchemeConfig, v: int = 1) -> FisherResult:
    F = qfi_ideal(cfg)
    n_a = internal_photon_number_a(cfg)
    FL = lossy_from_ideal(F, n_a, cfg.eta)

    def bound(x):
        return qcrb_from_fisher(x, v) if x > 0 else math.nan

    return FisherResult(F, FL, n_a, v, bound(F), bound(FL))
