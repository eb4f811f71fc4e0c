"""Truncated multivariate power series over complex coefficients.

The moment formulas need mixed partial derivatives of ``exp(p)`` at the
origin, where ``p`` is a polynomial of total degree at most two.  Rather
than differentiating symbolically, ``exp(p)`` is expanded as a power series
truncated at fixed per-variable orders and the wanted coefficient is read
off and multiplied by the factorials.

Coefficients are stored densely in an ndarray of shape ``caps + 1``.  The
caps used here are small (at most a handful per variable), so the dense
layout stays compact and keeps every operation vectorised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapOverflowError, OrderExceedsCapError, VarSetMismatchError

#: Upper bound on the number of stored coefficients of a single series.
MAX_TERMS = 4_000_000


class VarSet(tuple):
    """Ordered tuple of unique variable names."""

    def __new__(cls, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        return super().__new__(cls, names)

    def index(self, name):  # noqa: D102 - tuple.index with a clearer error
        try:
            return super().index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in {tuple(self)}") from None


OUTPUT_VARS = VarSet(("x1", "x2", "y1", "y2", "s1", "t1", "s2", "t2"))
INTERNAL_VARS = VarSet(("s1", "t1", "s2", "t2"))


class ExponentPoly:
    """Complex polynomial of total degree <= 2.

    Stored as ``const + lin @ x + x @ quad @ x`` with ``quad`` upper
    triangular, so ``quad[i, j]`` (``i <= j``) is the coefficient of the
    monomial ``x_i * x_j``.
    """

    __slots__ = ("vars", "const", "lin", "quad")

    def __init__(self, vars: Sequence[str], const=0.0, lin=None, quad=None):
        self.vars = vars if isinstance(vars, VarSet) else VarSet(vars)
        k = len(self.vars)
        self.const = complex(const)
        self.lin = np.zeros(k, complex) if lin is None else np.asarray(lin, complex).copy()
        if quad is None:
            self.quad = np.zeros((k, k), complex)
        else:
            q = np.asarray(quad, complex)
            # fold any lower-triangular part onto the upper triangle
            self.quad = np.triu(q) + np.tril(q, -1).T
        if self.lin.shape != (k,) or self.quad.shape != (k, k):
            raise ValueError("coefficient shapes do not match the variable set")

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, vars) -> ExponentPoly:
        return cls(vars)

    @classmethod
    def linear(cls, vars, coeffs: Mapping[str, complex]) -> ExponentPoly:
        p = cls(vars)
        for name, c in coeffs.items():
            p.lin[p.vars.index(name)] += c
        return p

    # -- inspection ---------------------------------------------------------
    @property
    def degree(self) -> int:
        if np.any(self.quad):
            return 2
        if np.any(self.lin):
            return 1
        return 0

    def coeff(self, *names: str) -> complex:
        """Coefficient of the monomial formed by ``names`` (empty -> constant)."""
        if not names:
            return self.const
        if len(names) == 1:
            return complex(self.lin[self.vars.index(names[0])])
        if len(names) == 2:
            i, j = sorted(self.vars.index(n) for n in names)
            return complex(self.quad[i, j])
        raise ValueError("degree > 2 monomial requested")

    def __call__(self, point) -> complex:
        x = np.asarray(point, complex)
        return complex(self.const + self.lin @ x + x @ self.quad @ x)

    def restrict(self, vars: Sequence[str]) -> ExponentPoly:
        """Set every variable outside ``vars`` to zero and re-index over ``vars``."""
        vars = VarSet(vars)
        idx = [self.vars.index(v) for v in vars]
        full = self.quad + self.quad.T - np.diag(np.diag(self.quad))
        sub = full[np.ix_(idx, idx)]
        return ExponentPoly(vars, self.const, self.lin[idx], np.triu(sub))

    def without_const(self) -> ExponentPoly:
        return ExponentPoly(self.vars, 0.0, self.lin, self.quad)

    def allclose(self, other: ExponentPoly, atol: float = 1e-14) -> bool:
        self._check(other)
        return (abs(self.const - other.const) <= atol
                and np.allclose(self.lin, other.lin, rtol=0, atol=atol)
                and np.allclose(self.quad, other.quad, rtol=0, atol=atol))

    def max_abs_diff(self, other: ExponentPoly) -> float:
        self._check(other)
        return float(max(abs(self.const - other.const),
                         np.max(np.abs(self.lin - other.lin), initial=0.0),
                         np.max(np.abs(self.quad - other.quad), initial=0.0)))

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other):
        if other.vars != self.vars:
            raise VarSetMismatchError(f"{tuple(self.vars)} vs {tuple(other.vars)}")

    def __add__(self, other):
        if isinstance(other, ExponentPoly):
            self._check(other)
            return ExponentPoly(self.vars, self.const + other.const,
                                self.lin + other.lin, self.quad + other.quad)
        return ExponentPoly(self.vars, self.const + other, self.lin, self.quad)

    __radd__ = __add__

    def __neg__(self):
        return ExponentPoly(self.vars, -self.const, -self.lin, -self.quad)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExponentPoly):
            self._check(other)
            if self.degree + other.degree > 2:
                raise ValueError("product would exceed total degree 2")
            outer = np.outer(self.lin, other.lin)
            quad = np.triu(outer + np.tril(outer, -1).T)
            quad += self.const * other.quad + other.const * self.quad
            lin = self.const * other.lin + other.const * self.lin
            return ExponentPoly(self.vars, self.const * other.const, lin, quad)
        c = complex(other)
        return ExponentPoly(self.vars, self.const * c, self.lin * c, self.quad * c)

    __rmul__ = __mul__

    def __repr__(self):
        terms = []
        if self.const:
            terms.append(f"{self.const:.6g}")
        for i, v in enumerate(self.vars):
            if self.lin[i]:
                terms.append(f"({self.lin[i]:.6g})*{v}")
        for i, j in zip(*np.nonzero(self.quad)):
            terms.append(f"({self.quad[i, j]:.6g})*{self.vars[i]}*{self.vars[j]}")
        return "ExponentPoly(" + (" + ".join(terms) or "0") + ")"


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series truncated at per-variable degree caps.

    ``coeffs[k1, ..., kd]`` is the coefficient of ``x1**k1 ... xd**kd``;
    its shape is always ``tuple(c + 1 for c in caps)``.
    """

    vars: VarSet
    coeffs: np.ndarray

    @property
    def caps(self) -> tuple[int, ...]:
        return tuple(s - 1 for s in self.coeffs.shape)

    @classmethod
    def constant(cls, vars, caps, value=1.0) -> TruncatedSeries:
        c = np.zeros(_shape(caps), complex)
        c[(0,) * len(caps)] = value
        return cls(VarSet(vars), c)

    @classmethod
    def from_poly(cls, p: ExponentPoly, caps) -> TruncatedSeries:
        """Truncate a polynomial to ``caps`` (monomials beyond a cap are dropped)."""
        caps = _check_caps(p.vars, caps)
        c = np.zeros(_shape(caps), complex)
        d = len(caps)
        c[(0,) * d] = p.const
        for i in range(d):
            if caps[i] >= 1:
                c[_unit(d, i)] += p.lin[i]
            for j in range(i, d):
                idx = np.array(_unit(d, i)) + np.array(_unit(d, j))
                if np.all(idx <= caps):
                    c[tuple(idx)] += p.quad[i, j]
        return cls(p.vars, c)

    def coefficient(self, orders) -> complex:
        orders = self._orders(orders)
        return complex(self.coeffs[orders])

    def _orders(self, orders) -> tuple[int, ...]:
        if isinstance(orders, Mapping):
            full = [0] * len(self.vars)
            for name, k in orders.items():
                full[self.vars.index(name)] = k
            orders = full
        orders = tuple(int(k) for k in orders)
        if len(orders) != len(self.vars):
            raise ValueError("orders length does not match the variable set")
        if any(k < 0 for k in orders):
            raise ValueError("negative derivative order")
        if any(k > c for k, c in zip(orders, self.caps)):
            raise OrderExceedsCapError(f"orders {orders} exceed caps {self.caps}")
        return orders

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        _check_compatible(self, other)
        return TruncatedSeries(self.vars, self.coeffs + other.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        return TruncatedSeries(self.vars, self.coeffs * other)

    __rmul__ = __mul__

    def allclose(self, other: TruncatedSeries, rtol=1e-12, atol=1e-14) -> bool:
        _check_compatible(self, other)
        return np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol)


def _shape(caps) -> tuple[int, ...]:
    return tuple(int(c) + 1 for c in caps)


def _unit(d, i) -> tuple[int, ...]:
    return tuple(1 if k == i else 0 for k in range(d))


def _check_caps(vars, caps) -> tuple[int, ...]:
    if isinstance(caps, Mapping):
        caps = [int(caps.get(v, 0)) for v in vars]
    caps = tuple(int(c) for c in caps)
    if len(caps) != len(vars):
        raise ValueError("caps length does not match the variable set")
    if any(c < 0 for c in caps):
        raise ValueError("negative cap")
    if math.prod(c + 1 for c in caps) > MAX_TERMS:
        raise CapOverflowError(f"caps {caps} exceed {MAX_TERMS} terms")
    return caps


def _check_compatible(a: TruncatedSeries, b: TruncatedSeries):
    if a.vars != b.vars:
        raise VarSetMismatchError(f"{tuple(a.vars)} vs {tuple(b.vars)}")
    if a.coeffs.shape != b.coeffs.shape:
        raise VarSetMismatchError(f"caps {a.caps} vs {b.caps}")


def exp_series(p: ExponentPoly, caps) -> TruncatedSeries:
    """Series of ``exp(p)`` truncated at ``caps``; ``p`` must have no constant term.

    Uses the coefficient recurrence that follows from ``d f/dx_k = (dp/dx_k) f``:
    for a multi-index whose last nonzero entry is ``k``,

        a_k f[a] = lin_k f[a - e_k] + sum_j H_kj f[a - e_k - e_j],

    with ``H`` the Hessian of ``p``.  The result equals the truncation of
    ``sum_j p**j / j!`` exactly, since truncation commutes with the recurrence.
    """
    if p.const != 0:
        raise ValueError("exp_series expects a polynomial with zero constant term")
    caps = _check_caps(p.vars, caps)
    d = len(caps)
    hess = p.quad + p.quad.T
    f = np.zeros(_shape(caps), complex)
    f[(0,) * d] = 1.0
    for k in range(d):
        tail = (0,) * (d - k - 1)
        for a in range(1, caps[k] + 1):
            prev = f[(slice(None),) * k + (a - 1,) + tail]
            acc = p.lin[k] * prev
            if a >= 2:
                acc = acc + hess[k, k] * f[(slice(None),) * k + (a - 2,) + tail]
            for j in range(k):
                if hess[k, j] == 0 or caps[j] == 0:
                    continue
                # x_j * prev: shift along axis j
                shifted = np.zeros_like(prev)
                src = [slice(None)] * k
                dst = [slice(None)] * k
                src[j] = slice(0, caps[j])
                dst[j] = slice(1, caps[j] + 1)
                shifted[tuple(dst)] = prev[tuple(src)]
                acc = acc + hess[k, j] * shifted
            f[(slice(None),) * k + (a,) + tail] = acc / a
    return TruncatedSeries(p.vars, f)


def exp_series_naive(p: ExponentPoly, caps) -> TruncatedSeries:
    """Reference expansion ``sum_{j <= J} p**j / j!`` by repeated truncated products."""
    if p.const != 0:
        raise ValueError("exp_series expects a polynomial with zero constant term")
    caps = _check_caps(p.vars, caps)
    ps = TruncatedSeries.from_poly(p, caps)
    total = TruncatedSeries.constant(p.vars, caps)
    term = total
    for j in range(1, sum(caps) + 1):
        term = multiply(term, ps) * (1.0 / j)
        total = total + term
    return total


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Truncated Cauchy product; terms beyond the caps are discarded."""
    _check_compatible(a, b)
    if np.count_nonzero(a.coeffs) > np.count_nonzero(b.coeffs):
        a, b = b, a
    caps = np.array(a.caps)
    out = np.zeros_like(b.coeffs)
    for idx in zip(*np.nonzero(a.coeffs)):
        c = a.coeffs[idx]
        dst = tuple(slice(i, None) for i in idx)
        src = tuple(slice(0, cap + 1 - i) for i, cap in zip(idx, caps))
        out[dst] += c * b.coeffs[src]
    return TruncatedSeries(a.vars, out)


def mixed_partial(s: TruncatedSeries, orders) -> complex:
    """Mixed partial derivative at the origin: coefficient times prod(k!)."""
    orders = s._orders(orders)
    scale = math.prod(math.factorial(k) for k in orders)
    return complex(s.coeffs[orders]) * scale


def mixed_partials(s: TruncatedSeries) -> np.ndarray:
    """Every mixed partial up to the caps at once (coefficients times factorials)."""
    out = s.coeffs.copy()
    for axis, cap in enumerate(s.caps):
        fact = np.array([math.factorial(k) for k in range(cap + 1)], float)
        shape = [1] * out.ndim
        shape[axis] = cap + 1
        out = out * fact.reshape(shape)
    return out
