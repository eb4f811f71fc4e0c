"""Brute-force two-mode Fock-space simulation of the subtracted interferometer.

Everything here is computed from state vectors or density matrices, with no
reference to the generating-function machinery, so it serves as an
independent check of the analytic modules.

The basis is truncated by *total* photon number: with ``cutoff = D`` the
retained states are ``|n_a, n_b>`` with ``n_a + n_b <= D - 1``.  Beam
splitters, phase shifts, annihilation operators and photon loss all map a
total-number block into itself or into lower blocks, so apart from the
truncation of the input state every operation below is exact.

Basis vectors are laid out block by block, ``index(N, k) = N(N+1)/2 + k``
with ``k = n_a`` and ``n_b = N - k``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import (CutoffTooSmallError, InsufficientHeadroomError,
                     ZeroNormError)
from .model import SchemeConfig

DEFAULT_CUTOFF = 30
HEADROOM = 2


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

class FockBasis:
    """Index bookkeeping for the total-number truncated two-mode basis."""

    def __init__(self, cutoff: int):
        if cutoff < 2:
            raise CutoffTooSmallError(f"cutoff {cutoff} < 2")
        self.cutoff = D = int(cutoff)
        self.dim = D * (D + 1) // 2
        N = np.repeat(np.arange(D), np.arange(1, D + 1))
        start = N * (N + 1) // 2
        self.total = N
        self.na = np.arange(self.dim) - start
        self.nb = N - self.na
        self.blocks = [slice(n * (n + 1) // 2, (n + 1) * (n + 2) // 2) for n in range(D)]

    def index(self, na, nb):
        N = np.asarray(na) + np.asarray(nb)
        return N * (N + 1) // 2 + na

    @functools.cached_property
    def lower_a(self):
        """(src, dst, factor) for the mode-a annihilation operator."""
        src = np.nonzero(self.na > 0)[0]
        dst = self.index(self.na[src] - 1, self.nb[src])
        return src, dst, np.sqrt(self.na[src].astype(float))

    @functools.cached_property
    def lower_b(self):
        src = np.nonzero(self.nb > 0)[0]
        dst = self.index(self.na[src], self.nb[src] - 1)
        return src, dst, np.sqrt(self.nb[src].astype(float))

    def lower(self, mode: str):
        return self.lower_a if mode == "a" else self.lower_b

    def number(self, mode: str) -> np.ndarray:
        return (self.na if mode == "a" else self.nb).astype(float)

    def annihilate(self, vec: np.ndarray, mode: str, times: int = 1) -> np.ndarray:
        """Apply the annihilation operator ``times`` times along the last axis."""
        src, dst, fac = self.lower(mode)
        for _ in range(times):
            out = np.zeros_like(vec)
            out[..., dst] = vec[..., src] * fac
            vec = out
        return vec

    def create(self, vec: np.ndarray, mode: str) -> np.ndarray:
        """Apply the creation operator; amplitude pushed past the truncation is dropped."""
        src, dst, fac = self.lower(mode)
        out = np.zeros_like(vec)
        out[..., src] = vec[..., dst] * fac
        return out

    def matrix(self, mode: str) -> np.ndarray:
        """Dense annihilation matrix (small cutoffs only)."""
        src, dst, fac = self.lower(mode)
        A = np.zeros((self.dim, self.dim))
        A[dst, src] = fac
        return A


@functools.lru_cache(maxsize=8)
def basis(cutoff: int) -> FockBasis:
    return FockBasis(cutoff)


@functools.lru_cache(maxsize=None)
def _block_eigh(N: int):
    """Eigen-decomposition of ``a^dag b + a b^dag`` on the ``N``-photon block."""
    k = np.arange(N)
    off = np.sqrt((k + 1.0) * (N - k))
    return np.linalg.eigh(np.diag(off, 1) + np.diag(off, -1))


@functools.lru_cache(maxsize=32)
def _bs_blocks(cutoff: int, theta: float):
    """Per-block unitaries ``exp(-i theta (a^dag b + a b^dag))``."""
    blocks = []
    for N in range(cutoff):
        lam, V = _block_eigh(N)
        blocks.append((V * np.exp(-1j * theta * lam)) @ V.T)
    return tuple(blocks)


BS_ANGLES = {"B1": math.pi / 4, "B2": -math.pi / 4}


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass
class FockState:
    cutoff: int
    amps: np.ndarray

    @property
    def basis(self) -> FockBasis:
        return basis(self.cutoff)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def to_density(self) -> FockDensity:
        return FockDensity(self.cutoff, np.outer(self.amps, self.amps.conj()))


@dataclass
class FockDensity:
    cutoff: int
    rho: np.ndarray

    @property
    def basis(self) -> FockBasis:
        return basis(self.cutoff)

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.rho + self.rho.conj().T) / 2)[0])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    k = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, complex)
        out[0] = 1.0
        return out
    logmag = -abs(alpha) ** 2 / 2 + k * math.log(abs(alpha)) - 0.5 * gammaln(k + 1)
    return np.exp(logmag) * np.exp(1j * k * np.angle(alpha))


def squeezed_vacuum_amplitudes(r: float, dim: int) -> np.ndarray:
    """Amplitudes of ``exp[r(b^2 - b^dag^2)/2]|0>``; odd entries vanish."""
    out = np.zeros(dim, complex)
    if r == 0:
        out[0] = 1.0
        return out
    k = np.arange((dim + 1) // 2)
    t = math.tanh(r)
    logmag = (-0.5 * math.log(math.cosh(r)) + k * math.log(t)
              + 0.5 * gammaln(2 * k + 1) - k * math.log(2) - gammaln(k + 1))
    out[2 * k] = (-1.0) ** k * np.exp(logmag)
    return out


def prepare_input(alpha: complex, r: float, cutoff: int = DEFAULT_CUTOFF,
                  tol: float = 1e-6) -> FockState:
    """|alpha>_a (x) |r>_b, truncated to total photon number < cutoff and renormalised."""
    if cutoff < 2:
        raise CutoffTooSmallError(f"cutoff {cutoff} < 2")
    B = basis(cutoff)
    ca = coherent_amplitudes(alpha, cutoff)
    cb = squeezed_vacuum_amplitudes(r, cutoff)
    amps = ca[B.na] * cb[B.nb]
    nrm = np.linalg.norm(amps)
    if nrm ** 2 < 1 - tol:
        raise CutoffTooSmallError(
            f"cutoff {cutoff} discards {1 - nrm ** 2:.3g} of the input norm (tol {tol:g})")
    return FockState(cutoff, amps / nrm)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _bs_vector(vec: np.ndarray, cutoff: int, theta: float) -> np.ndarray:
    B = basis(cutoff)
    out = np.empty_like(vec, dtype=complex)
    for blk, U in zip(B.blocks, _bs_blocks(cutoff, theta)):
        out[..., blk] = vec[..., blk] @ U.T
    return out


def bs_matrix(cutoff: int, which: str) -> np.ndarray:
    """Dense block-diagonal beam-splitter unitary (small cutoffs only)."""
    B = basis(cutoff)
    U = np.zeros((B.dim, B.dim), complex)
    for blk, Ub in zip(B.blocks, _bs_blocks(cutoff, BS_ANGLES[which])):
        U[blk, blk] = Ub
    return U


def apply_bs(state, which: str, transmittance: float | None = None):
    """Apply ``"B1"``, ``"B2"`` or the fictitious loss beam splitter ``"loss"``.

    The loss beam splitter couples each internal mode to a vacuum ancilla;
    tracing the ancillas out gives :func:`apply_loss` on both modes, so it
    returns a :class:`FockDensity`.
    """
    if which == "loss":
        if transmittance is None:
            raise ValueError("loss beam splitter needs a transmittance")
        rho = state if isinstance(state, FockDensity) else state.to_density()
        return apply_loss(apply_loss(rho, "a", transmittance), "b", transmittance)
    theta = BS_ANGLES[which]
    if isinstance(state, FockState):
        return FockState(state.cutoff, _bs_vector(state.amps, state.cutoff, theta))
    U = bs_matrix(state.cutoff, which)
    return FockDensity(state.cutoff, U @ state.rho @ U.conj().T)


def subtract_photons(state: FockState, mode: str, count: int):
    """Apply ``mode^count``, renormalise, and return ``(state, success_weight)``."""
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return state, 1.0
    B = state.basis
    if isinstance(state, FockDensity):
        A = np.linalg.matrix_power(B.matrix(mode), count)
        rho = A @ state.rho @ A.T
        w = float(np.trace(rho).real)
        if w <= 1e-300:
            raise ZeroNormError(f"{mode}^{count} annihilates the state")
        return FockDensity(state.cutoff, rho / w), w
    v = B.annihilate(state.amps, mode, count)
    w = float(np.vdot(v, v).real)
    if w <= 1e-300:
        raise ZeroNormError(f"{mode}^{count} annihilates the state")
    return FockState(state.cutoff, v / math.sqrt(w)), w


def kraus_weights(transmittance: float, n: np.ndarray, l: int) -> np.ndarray:
    """<n - l| Pi_l |n> = sqrt(C(n, l) (1-eta)^l eta^(n-l)), zero where n < l."""
    n = np.asarray(n)
    out = np.zeros(n.shape)
    ok = n >= l
    if not ok.any():
        return out
    nn = n[ok]
    eta = transmittance
    if eta == 1.0:
        out[ok] = 1.0 if l == 0 else 0.0
        return out
    if eta == 0.0:
        out[ok] = np.where(nn == l, 1.0, 0.0)
        return out
    logw = (gammaln(nn + 1) - gammaln(l + 1) - gammaln(nn - l + 1)
            + l * math.log1p(-eta) + (nn - l) * math.log(eta))
    out[ok] = np.exp(0.5 * logw)
    return out


def apply_kraus(vec: np.ndarray, cutoff: int, mode: str, transmittance: float,
                l: int) -> np.ndarray:
    """``Pi_l vec`` with ``Pi_l = sqrt((1-eta)^l / l!) eta^(n/2) mode^l``."""
    B = basis(cutoff)
    n = B.number(mode).astype(int)
    w = kraus_weights(transmittance, n, l)
    src = np.nonzero(w)[0]
    dst = B.index(B.na[src] - (l if mode == "a" else 0),
                  B.nb[src] - (l if mode == "b" else 0))
    out = np.zeros_like(vec)
    out[..., dst] = vec[..., src] * w[src]
    return out


def kraus_matrix(cutoff: int, mode: str, transmittance: float, l: int) -> np.ndarray:
    B = basis(cutoff)
    return apply_kraus(np.eye(B.dim, dtype=complex), cutoff, mode, transmittance, l).T


def apply_loss(rho: FockDensity, mode: str, transmittance: float,
               tail: float = 1e-14) -> FockDensity:
    """Photon-loss channel on one mode in Kraus form.

    Kraus terms are accumulated until the trace they still have to carry
    drops below ``tail``.
    """
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    if isinstance(rho, FockState):
        rho = rho.to_density()
    D = rho.cutoff
    total = np.trace(rho.rho).real
    out = np.zeros_like(rho.rho)
    acc = 0.0
    for l in range(D):
        K = kraus_matrix(D, mode, transmittance, l)
        term = K @ rho.rho @ K.conj().T
        out += term
        acc += np.trace(term).real
        if total - acc < tail * max(total, 1.0):
            break
    return FockDensity(D, out)


def apply_phase(state, phi: float):
    """``exp(i phi n_a)`` on a pure state or density matrix."""
    ph = np.exp(1j * phi * basis(state.cutoff).na)
    if isinstance(state, FockState):
        return FockState(state.cutoff, state.amps * ph)
    return FockDensity(state.cutoff, ph[:, None] * state.rho * ph.conj()[None, :])


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

_NAMED = ("one", "na", "nb", "na2", "nb2", "na_nb", "xa", "xb", "xa2", "xb2", "xa_xb")


def _operator_apply(B: FockBasis, spec, vec):
    """Return ``(left, right)`` with ``<left|right> = <vec|O|vec>`` along the last axis."""
    if isinstance(spec, tuple):
        p1, p2, q1, q2 = spec
        left = B.annihilate(B.annihilate(vec, "a", p1), "b", q1)
        right = B.annihilate(B.annihilate(vec, "a", p2), "b", q2)
        return left, right

    def x(v, mode):
        return (B.annihilate(v, mode) + B.create(v, mode)) / math.sqrt(2)

    na, nb = B.number("a"), B.number("b")
    if spec == "one":
        return vec, vec
    if spec in ("na", "nb"):
        return vec, (na if spec == "na" else nb) * vec
    if spec == "na2":
        return na * vec, na * vec
    if spec == "nb2":
        return nb * vec, nb * vec
    if spec == "na_nb":
        return na * vec, nb * vec
    if spec in ("xa", "xb"):
        return vec, x(vec, spec[1])
    if spec in ("xa2", "xb2"):
        v = x(vec, spec[1])
        return v, v
    if spec == "xa_xb":
        return x(vec, "a"), x(vec, "b")
    raise KeyError(f"unknown observable {spec!r}")


def _order(spec) -> int:
    if isinstance(spec, tuple):
        p1, p2, q1, q2 = spec
        return max(p1 + q1, p2 + q2)
    return 2 if spec.endswith("2") or "_" in spec else 1


def expectation(state, spec, headroom: int = HEADROOM) -> complex:
    """Expectation value of a normal-ordered moment ``(p1, p2, q1, q2)`` or a named observable.

    Named observables: ``one, na, nb, na2, nb2, na_nb, xa, xb, xa2, xb2,
    xa_xb`` with ``x = (a + a^dag)/sqrt(2)``.
    """
    if state.cutoff - _order(spec) < headroom:
        raise InsufficientHeadroomError(
            f"cutoff {state.cutoff} too small for observable {spec!r}")
    B = basis(state.cutoff)
    if isinstance(state, FockState):
        left, right = _operator_apply(B, spec, state.amps)
        return complex(np.vdot(left, right))
    # Tr(rho L^dag R) = sum_ij rho_ij <L e_j | R e_i>
    left, right = _operator_apply(B, spec, np.eye(B.dim, dtype=complex))
    G = left.conj() @ right.T
    return complex(np.sum(state.rho * G.T))


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

MOMENT_ORDERS = tuple((p1, p2, q1, q2) for p1 in range(3) for p2 in range(3)
                      for q1 in range(3) for q2 in range(3))


@dataclass
class OracleResult:
    """Observables of one configuration at one cutoff."""

    cutoff: int
    moments: dict                       # (p1,p2,q1,q2) -> complex, output ports
    observables: dict                   # named output observables
    derivatives: dict                   # d/dphi of named output means
    internal: dict = field(default_factory=dict)  # N, n_a, var_n_a, QFI

    def flat(self) -> dict:
        """All values keyed by name; complex values split into re/im."""
        out = {}
        for k, v in self.moments.items():
            out[f"moment{k}.re"] = v.real
            out[f"moment{k}.im"] = v.imag
        for src, tag in ((self.observables, "obs"), (self.derivatives, "d_phi"),
                         (self.internal, "internal")):
            for k, v in src.items():
                out[f"{tag}.{k}"] = float(np.real(v))
        return out


def internal_state(cfg: SchemeConfig, cutoff: int) -> tuple[FockState, float]:
    """State after B1 and photon subtraction (normalised) plus its success weight.

    Independent of ``phi`` and ``T``; cached on the remaining fields.  The
    returned state must not be mutated.
    """
    return _internal_state(cfg.alpha_mag, cfg.alpha_phase, cfg.r, cfg.m, cfg.n, cutoff)


@functools.lru_cache(maxsize=16)
def _internal_state(alpha_mag, alpha_phase, r, m, n, cutoff):
    alpha = alpha_mag * complex(math.cos(alpha_phase), math.sin(alpha_phase))
    psi = apply_bs(prepare_input(alpha, r, cutoff), "B1")
    psi, wa = subtract_photons(psi, "a", m)
    psi, wb = subtract_photons(psi, "b", n)
    return psi, wa * wb


class ShiftOp:
    """Sum of separable shift terms ``c_a(n_a) c_b(n_b) |n_a + da, n_b + db><n_a, n_b|``.

    Every observable used here (normal-ordered moments, photon numbers,
    quadratures and their products) is a short sum of such terms, and the
    dual of a single-mode loss channel maps each term to a term with the
    same shift, acting only on that mode's coefficient vector.
    """

    def __init__(self, cutoff: int, terms: list):
        self.cutoff = cutoff
        self.terms = terms  # [(da, db, ca, cb)], ca/cb indexed by source photon number

    @classmethod
    def ladder(cls, cutoff: int, p1: int, p2: int, q1: int, q2: int) -> ShiftOp:
        """``a^dag^p1 a^p2 b^dag^q1 b^q2``."""
        n = np.arange(cutoff, dtype=float)
        return cls(cutoff, [(p1 - p2, q1 - q2, _ladder_coeffs(n, p1, p2),
                             _ladder_coeffs(n, q1, q2).astype(complex))])

    def __add__(self, other: ShiftOp) -> ShiftOp:
        return ShiftOp(self.cutoff, self.terms + other.terms)

    def __mul__(self, scalar) -> ShiftOp:
        return ShiftOp(self.cutoff, [(da, db, ca, cb * scalar) for da, db, ca, cb in self.terms])

    __rmul__ = __mul__

    def dual_loss(self, mode: str, transmittance: float) -> ShiftOp:
        """Heisenberg-picture loss ``sum_l Pi_l^dag O Pi_l`` on one mode.

        For a term of shift ``d`` the coefficient becomes
        ``c'(n) = sum_l k_l(n) k_l(n + d) c(n - l)`` with
        ``k_l(n) = <n - l|Pi_l|n>``.
        """
        if transmittance == 1.0:
            return self
        K = _kraus_table(self.cutoff, transmittance)
        terms = []
        for da, db, ca, cb in self.terms:
            if mode == "a":
                ca = _dual_loss_1d(ca, da, K)
            else:
                cb = _dual_loss_1d(cb, db, K)
            terms.append((da, db, ca, cb))
        return ShiftOp(self.cutoff, terms)

    def bilinear(self, left: np.ndarray, right: np.ndarray) -> complex:
        """``<left| O |right>`` for flat basis vectors."""
        B = basis(self.cutoff)
        total = 0j
        for da, db, ca, cb in self.terms:
            ta, tb = B.na + da, B.nb + db
            ok = (ta >= 0) & (tb >= 0) & (ta + tb < self.cutoff)
            src = np.nonzero(ok)[0]
            dst = B.index(ta[src], tb[src])
            c = ca[B.na[src]] * cb[B.nb[src]]
            total += np.sum(left[dst].conj() * c * right[src])
        return complex(total)


def _dual_loss_1d(c: np.ndarray, d: int, K: np.ndarray) -> np.ndarray:
    D = len(c)
    n = np.arange(D)
    tgt = n + d
    ok = (tgt >= 0) & (tgt < K.shape[1])
    out = np.zeros_like(c)
    for l in range(D):
        w = np.zeros(D)
        w[ok] = K[l, n[ok]] * K[l, tgt[ok]]
        out[l:] += w[l:] * c[:D - l]
    return out


def _ladder_coeffs(n: np.ndarray, p1: int, p2: int) -> np.ndarray:
    """Coefficient of ``a^dag^p1 a^p2 |n>`` on ``|n - p2 + p1>``."""
    ok = n >= p2
    m = np.where(ok, n - p2, 0)
    logc = 0.5 * (gammaln(n + 1) - gammaln(m + 1)) + 0.5 * (gammaln(m + p1 + 1) - gammaln(m + 1))
    return np.where(ok, np.exp(logc), 0.0)


@functools.lru_cache(maxsize=16)
def _kraus_table(cutoff: int, transmittance: float) -> np.ndarray:
    """``K[l, n] = <n - l|Pi_l|n>`` for ``n`` up to ``cutoff + 2``."""
    n = np.arange(cutoff + 3)
    return np.array([kraus_weights(transmittance, n, l) for l in range(cutoff)])


def named_observable(cutoff: int, name: str) -> ShiftOp:
    """Shift-operator form of a named observable (``x = (a + a^dag)/sqrt(2)``)."""
    L = functools.partial(ShiftOp.ladder, cutoff)
    s = 1 / math.sqrt(2)
    table = {
        "one": lambda: L(0, 0, 0, 0),
        "na": lambda: L(1, 1, 0, 0),
        "nb": lambda: L(0, 0, 1, 1),
        "na2": lambda: L(2, 2, 0, 0) + L(1, 1, 0, 0),
        "nb2": lambda: L(0, 0, 2, 2) + L(0, 0, 1, 1),
        "na_nb": lambda: L(1, 1, 1, 1),
        "xa": lambda: (L(0, 1, 0, 0) + L(1, 0, 0, 0)) * s,
        "xb": lambda: (L(0, 0, 0, 1) + L(0, 0, 1, 0)) * s,
        "xa2": lambda: (L(0, 2, 0, 0) + L(2, 0, 0, 0) + 2 * L(1, 1, 0, 0) + L(0, 0, 0, 0)) * 0.5,
        "xb2": lambda: (L(0, 0, 0, 2) + L(0, 0, 2, 0) + 2 * L(0, 0, 1, 1) + L(0, 0, 0, 0)) * 0.5,
        "xa_xb": lambda: (L(0, 1, 0, 1) + L(0, 1, 1, 0) + L(1, 0, 0, 1) + L(1, 0, 1, 0)) * 0.5,
    }
    return table[name]()


@functools.lru_cache(maxsize=512)
def _lossy_observable(cutoff: int, transmittance: float, spec) -> ShiftOp:
    """Named observable or ladder moment after the dual two-mode loss map."""
    op = named_observable(cutoff, spec) if isinstance(spec, str) else ShiftOp.ladder(cutoff, *spec)
    return op.dual_loss("a", transmittance).dual_loss("b", transmittance)


def run_pipeline(cfg: SchemeConfig, cutoff: int, moments: bool = True) -> OracleResult:
    """Simulate B1 -> subtraction -> loss(T) -> phase -> B2 and collect observables.

    The symmetric two-mode loss channel commutes with the phase shifter and
    the second beam splitter (passive, number-conserving, one common
    transmittance), so observables are evaluated on the pure output state
    through the dual Kraus map.  :func:`run_pipeline_density` performs the
    same computation literally, in operator order, on density matrices.
    """
    B = basis(cutoff)
    psi, _ = internal_state(cfg, cutoff)
    na = B.number("a")
    nb = B.number("b")

    p_a1 = float(np.vdot(psi.amps, na * psi.amps).real)
    p_a2 = float(np.vdot(na * psi.amps, na * psi.amps).real)
    p_b1 = float(np.vdot(psi.amps, nb * psi.amps).real)
    internal = {"N": p_a1 + p_b1, "n_a": p_a1, "var_n_a": p_a2 - p_a1 ** 2,
                "qfi": 4 * (p_a2 - p_a1 ** 2)}

    rotated = apply_phase(psi, cfg.phi).amps
    out = _bs_vector(rotated, cutoff, BS_ANGLES["B2"])
    # d/dphi of the output state
    chi = _bs_vector(1j * na * rotated, cutoff, BS_ANGLES["B2"])

    obs, dobs = {}, {}
    for name in _NAMED:
        op = _lossy_observable(cutoff, cfg.T, name)
        obs[name] = op.bilinear(out, out).real
        if name in ("na", "nb", "xa", "xb"):
            dobs[name] = 2 * op.bilinear(chi, out).real
    mom = {}
    if moments:
        for spec in MOMENT_ORDERS:
            mom[spec] = _lossy_observable(cutoff, cfg.T, spec).bilinear(out, out)
    return OracleResult(cutoff, mom, obs, dobs, internal)


def run_pipeline_density(cfg: SchemeConfig, cutoff: int) -> dict:
    """Literal density-matrix pipeline (small cutoffs): returns named observables and moments."""
    psi, _ = internal_state(cfg, cutoff)
    rho = psi.to_density()
    if cfg.T < 1.0:
        rho = apply_bs(rho, "loss", cfg.T)
    rho = apply_bs(apply_phase(rho, cfg.phi), "B2")
    out = {name: expectation(rho, name, headroom=0).real for name in _NAMED}
    for spec in MOMENT_ORDERS:
        out[spec] = expectation(rho, spec, headroom=0)
    return out
