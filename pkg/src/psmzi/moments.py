"""Output and internal moments from the generating functions.

The normal-ordered output moment ``<a^dag^p1 a^p2 b^dag^q1 b^q2>`` equals
``A^2`` times the mixed partial of ``exp(M)`` taken ``p1, p2, q1, q2`` times
in ``x1, x2, y1, y2`` and ``m, n, m, n`` times in ``s1, t1, s2, t2``.
Internal moments of the state right after the first beam splitter come from
``exp(Q)`` the same way.
"""

from __future__ import annotations

import functools

from .errors import DegenerateStateError, OrderExceedsCapError
from .exponents import build_internal_exponent, build_output_exponent, d_phi_output_exponent
from .model import SchemeConfig
from .series import TruncatedSeries, exp_series, mixed_partial, multiply

#: Highest per-mode output moment order kept in a :class:`MomentTable`.
MAX_OUTPUT_ORDER = 2

DEGENERATE_FLOOR = 1e-300
REAL_RTOL = 1e-10


def _subtraction_orders(cfg: SchemeConfig) -> tuple[int, int, int, int]:
    # (s1, t1, s2, t2)
    return (cfg.m, cfg.n, cfg.m, cfg.n)


def _as_real(value: complex, what: str) -> float:
    """Coerce a moment that must be real, checking the imaginary residue."""
    if abs(value.imag) > REAL_RTOL * max(abs(value.real), 1e-300) + 1e-14:
        raise ArithmeticError(f"{what} has imaginary part {value.imag:.3e} (real {value.real:.3e})")
    return value.real


def _normalization_denominator(cfg: SchemeConfig) -> float:
    caps = (0, 0, 0, 0) + _subtraction_orders(cfg)
    M = build_output_exponent(cfg).poly
    den = mixed_partial(exp_series(M, caps), caps)
    den = _as_real(den, "normalization denominator")
    if den <= DEGENERATE_FLOOR:
        raise DegenerateStateError(
            f"subtracting m={cfg.m}, n={cfg.n} photons leaves a null state")
    return den


def normalization(cfg: SchemeConfig) -> float:
    """Squared normalisation constant ``A^2`` of the subtracted state."""
    return 1.0 / _normalization_denominator(cfg)


@functools.lru_cache(maxsize=256)
def _internal_series(alpha_mag, alpha_phase, r, caps) -> TruncatedSeries:
    cfg = SchemeConfig(alpha_mag=alpha_mag, alpha_phase=alpha_phase, r=r)
    return exp_series(build_internal_exponent(cfg), caps)


def internal_moment(cfg: SchemeConfig, m1: int, m2: int, n1: int, n2: int) -> complex:
    """Unnormalised ``<psi| B1^dag a^dag^m1 b^dag^n1 b^n2 a^m2 B1 |psi>``."""
    caps = (m1, n1, m2, n2)  # over (s1, t1, s2, t2)
    s = _internal_series(cfg.alpha_mag, cfg.alpha_phase, cfg.r, caps)
    return mixed_partial(s, caps)


class MomentTable:
    """Universal and internal moments of one configuration, cached.

    The output series is built once with caps ``(2, 2, 2, 2)`` on the x/y
    variables, so every universal moment up to second order per mode (and
    its analytic phi-derivative) is a single coefficient lookup.
    """

    def __init__(self, cfg: SchemeConfig, max_order: int = MAX_OUTPUT_ORDER):
        self.cfg = cfg
        self.max_order = max_order
        self._sub = _subtraction_orders(cfg)
        self._caps = (max_order,) * 4 + self._sub
        out = build_output_exponent(cfg)
        self._series = exp_series(out.poly, self._caps)
        den = mixed_partial(self._series, (0, 0, 0, 0) + self._sub)
        den = _as_real(den, "normalization denominator")
        if den <= DEGENERATE_FLOOR:
            raise DegenerateStateError(
                f"subtracting m={cfg.m}, n={cfg.n} photons leaves a null state")
        self.A2 = 1.0 / den
        self._dseries = None
        self._universal = {}
        self._d_universal = {}
        self._internal = {}

    def _orders(self, p1, p2, q1, q2):
        if max(p1, p2, q1, q2) > self.max_order:
            raise OrderExceedsCapError(
                f"moment order {(p1, p2, q1, q2)} exceeds {self.max_order}")
        return (p1, p2, q1, q2) + self._sub

    def universal_moment(self, p1: int, p2: int, q1: int, q2: int) -> complex:
        """``<a^dag^p1 a^p2 b^dag^q1 b^q2>`` at the output ports."""
        key = (p1, p2, q1, q2)
        if key not in self._universal:
            v = self.A2 * mixed_partial(self._series, self._orders(*key))
            if p1 == p2 and q1 == q2:
                v = complex(_as_real(v, f"moment {key}"), 0.0)
            self._universal[key] = v
        return self._universal[key]

    def d_universal_moment(self, p1: int, p2: int, q1: int, q2: int) -> complex:
        """Analytic phi-derivative of :meth:`universal_moment` (A is phi-independent)."""
        key = (p1, p2, q1, q2)
        if key not in self._d_universal:
            if self._dseries is None:
                dM = d_phi_output_exponent(self.cfg)
                self._dseries = multiply(TruncatedSeries.from_poly(dM, self._caps), self._series)
            v = self.A2 * mixed_partial(self._dseries, self._orders(*key))
            if p1 == p2 and q1 == q2:
                v = complex(_as_real(v, f"d moment {key}"), 0.0)
            self._d_universal[key] = v
        return self._d_universal[key]

    def internal_moment(self, m1: int, m2: int, n1: int, n2: int) -> complex:
        """Unnormalised internal moment; see :func:`internal_moment`."""
        key = (m1, m2, n1, n2)
        if key not in self._internal:
            self._internal[key] = internal_moment(self.cfg, *key)
        return self._internal[key]

    def internal_mean(self, da: int, db: int) -> float:
        return internal_mean(self.cfg, da, db)


def internal_mean(cfg: SchemeConfig, da: int, db: int) -> float:
    """Normalised ``<a^dag^(m+da) b^dag^(n+db) b^(n+db) a^(m+da)>`` on the subtracted state."""
    m, n = cfg.m, cfg.n
    num = _as_real(internal_moment(cfg, m + da, m + da, n + db, n + db), "internal moment")
    den = _as_real(internal_moment(cfg, m, m, n, n), "internal moment")
    if den <= DEGENERATE_FLOOR:
        raise DegenerateStateError(f"subtracting m={m}, n={n} photons leaves a null state")
    return num / den


def total_photon_number(cfg: SchemeConfig) -> float:
    """Mean photon number inside the interferometer before the second beam splitter.

    Normalised by the internal moment ``D_{m,m,n,n}`` itself; this equals the
    ``A^2`` of the output normalisation because ``M`` restricted to
    ``x = y = 0`` is exactly ``Q``.
    """
    return internal_mean(cfg, 1, 0) + internal_mean(cfg, 0, 1)


def prefactor4_photon_number(cfg: SchemeConfig) -> float:
    """The widely quoted closed form ``4 A^2 (D_{m+1,m+1,n,n} + D_{m,m,n+1,n+1}) e^Q``.

    Evaluated literally, with ``A^2`` from the output normalisation.  It is
    kept only so reports can show how it compares with the oracle; the
    package itself uses :func:`total_photon_number`.
    """
    m, n = cfg.m, cfg.n
    D = internal_moment(cfg, m + 1, m + 1, n, n) + internal_moment(cfg, m, m, n + 1, n + 1)
    return 4.0 * normalization(cfg) * _as_real(D, "internal moment")
