"""Exponent polynomials of the moment generating functions.

``M`` (over x1, x2, y1, y2, s1, t1, s2, t2) generates the output-port moments
of the subtracted, lossy interferometer; ``Q`` (over s1, t1, s2, t2) generates
the moments of the internal state right after the first beam splitter.
The s/t variables carry the subtraction orders, x/y the output a/b orders;
index 1 belongs to the bra side (creation operators), index 2 to the ket side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SchemeConfig
from .series import INTERNAL_VARS, OUTPUT_VARS, ExponentPoly

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class OutputExponent:
    """``M`` together with the four linear forms it is assembled from."""

    poly: ExponentPoly
    M1: ExponentPoly
    M2: ExponentPoly
    M3: ExponentPoly
    M4: ExponentPoly


def _lin(**coeffs) -> ExponentPoly:
    return ExponentPoly.linear(OUTPUT_VARS, coeffs)


def _linear_forms(cfg: SchemeConfig, d_phi: bool = False):
    """M1..M4, or their phi-derivatives when ``d_phi`` is set."""
    g = math.sqrt(cfg.T)
    em = np.exp(-1j * cfg.phi)  # carried by the bra-side forms M1, M2
    ep = np.exp(1j * cfg.phi)   # carried by the ket-side forms M3, M4
    if d_phi:
        # d/dphi of (1 + e)/2 and (1 - e)/2
        pm, mm = -0.5j * em, 0.5j * em
        pp, mp = 0.5j * ep, -0.5j * ep
        w = 0.0
    else:
        pm, mm = (1 + em) / 2, (1 - em) / 2
        pp, mp = (1 + ep) / 2, (1 - ep) / 2
        w = 1 / SQRT2
    M1 = _lin(s1=w, t1=1j * w, x1=g * pm, y1=1j * g * mm)
    M2 = _lin(t1=w, s1=1j * w, y1=g * pm, x1=-1j * g * mm)
    M3 = _lin(t2=w, s2=-1j * w, y2=g * pp, x2=1j * g * mp)
    M4 = _lin(s2=w, t2=-1j * w, x2=g * pp, y2=-1j * g * mp)
    return M1, M2, M3, M4


def _squeeze_weights(r: float):
    return math.sinh(r) ** 2, math.cosh(r) * math.sinh(r)


def build_output_exponent(cfg: SchemeConfig) -> OutputExponent:
    """Assemble ``M = M1 a* + M4 a + M2 M3 sinh^2 r - (cosh r sinh r / 2)(M2^2 + M3^2)``."""
    a = cfg.alpha
    sh2, chsh = _squeeze_weights(cfg.r)
    M1, M2, M3, M4 = _linear_forms(cfg)
    poly = M1 * a.conjugate() + M4 * a + (M2 * M3) * sh2 - (M2 * M2 + M3 * M3) * (0.5 * chsh)
    return OutputExponent(poly, M1, M2, M3, M4)


def d_phi_output_exponent(cfg: SchemeConfig) -> ExponentPoly:
    """Analytic phi-derivative of ``M`` (product rule on the linear forms)."""
    a = cfg.alpha
    sh2, chsh = _squeeze_weights(cfg.r)
    M1, M2, M3, M4 = _linear_forms(cfg)
    D1, D2, D3, D4 = _linear_forms(cfg, d_phi=True)
    return (D1 * a.conjugate() + D4 * a + (D2 * M3 + M2 * D3) * sh2
            - (M2 * D2 + M3 * D3) * chsh)


def build_internal_exponent(cfg: SchemeConfig) -> ExponentPoly:
    """``Q`` for the internal state after the first beam splitter; uses only alpha and r."""
    a = cfg.alpha
    sh2, chsh = _squeeze_weights(cfg.r)

    def lin(**c):
        return ExponentPoly.linear(INTERNAL_VARS, c)

    u1 = lin(s1=1 / SQRT2, t1=1j / SQRT2)     # (s1 + i t1)/sqrt2
    u2 = lin(s2=1 / SQRT2, t2=-1j / SQRT2)    # (s2 - i t2)/sqrt2
    v1 = lin(t1=1.0, s1=1j)                   # t1 + i s1
    v2 = lin(t2=1.0, s2=-1j)                  # t2 - i s2
    return (u1 * a.conjugate() + u2 * a + (v1 * v2) * (0.5 * sh2)
            - (v1 * v1 + v2 * v2) * (0.25 * chsh))
