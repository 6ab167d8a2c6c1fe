"""The diagonal operator V from ``A^2_{n+1}`` to ``A^2_n`` and the equivalence it implements.

``V`` is the integral operator with kernel ``(1 - conj(w) z)^{-1} (1 - |w|^2)^{-1/2}``
against normalized area measure.  It is diagonal on monomials,
``V z^k = alpha_k z^k`` with ``alpha_k = B(k+1, 1/2)``.  In orthonormal
coordinates the diagonal is ``d_k = alpha_k sqrt((n+k)/n)``, which tends to
``sqrt(pi/n)``; the normalized operator ``c_n V`` with ``c_n = sqrt(n/pi)`` is
unitary modulo compacts.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from . import opcalc
from .identities import IdentityCheck, mod_compact_check, shift_matrix
from .mobius import MobiusTransform, derivative
from .rkhs import TruncatedOperator, log_basis_norms, mult_matrix, weighted


def alpha(k: int) -> float:
    """B(k+1, 1/2) by the recurrence alpha_0 = 2, alpha_k = alpha_{k-1} 2k/(2k+1)."""
    return float(alphas(k + 1)[k])


def alphas(count: int) -> np.ndarray:
    k = np.arange(1, count)
    return np.concatenate([[2.0], 2.0 * np.cumprod(2.0 * k / (2.0 * k + 1))])[:count]


def alpha_quadrature(k: int) -> float:
    """Independent value: integral of t^k (1-t)^{-1/2} over [0, 1] with an algebraic weight."""
    val, _ = integrate.quad(lambda t: t ** k, 0.0, 1.0, weight="alg", wvar=(0.0, -0.5),
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def normalization(n: int) -> float:
    return math.sqrt(n / math.pi)


class VOperator:
    """Diagonal of V in orthonormal coordinates together with its normalization."""

    def __init__(self, n: int, N: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.N = N
        k = np.arange(N)
        self.diag = alphas(N) * np.sqrt((n + k) / n)
        self.normalization = normalization(n)

    @property
    def normalized(self) -> np.ndarray:
        return self.normalization * self.diag

    def operator(self) -> TruncatedOperator:
        return TruncatedOperator(np.diag(self.normalized), weighted(self.n + 1, self.N), "V",
                                 weighted(self.n, self.N))


def build_V(n: int, N: int) -> VOperator:
    return VOperator(n, N)


def essential_unitarity_probe(n: int = 1, N: int = 512, Ks=(16, 32, 64, 128, 256)) -> opcalc.CompactnessReport:
    d = build_V(n, N).normalized
    return opcalc.compactness_probe(np.diag(d ** 2 - 1), Ks)


def intertwining_entries(n: int, N: int) -> np.ndarray:
    """Subdiagonal of ``V T_{n+1} - T_n V`` from the closed form ``c (d_{k+1} w_k^{(n+1)} - w_k^{(n)} d_k)``."""
    d = build_V(n, N).normalized
    hi = np.exp(log_basis_norms(weighted(n + 1), N + 1))
    lo = np.exp(log_basis_norms(weighted(n), N + 1))
    w_hi = hi[:-1] / hi[1:]
    w_lo = lo[:-1] / lo[1:]
    return d[1:] * w_hi[:N - 1] - w_lo[:N - 1] * d[:-1]


def intertwining_difference(n: int, N: int) -> np.ndarray:
    Vh = np.diag(build_V(n, N).normalized)
    return Vh @ shift_matrix(weighted(n + 1), N) - shift_matrix(weighted(n), N) @ Vh


def check_V_intertwines_shift(n: int = 1, N: int = 512, Ks=(16, 32, 64, 128, 256)) -> IdentityCheck:
    D = intertwining_difference(n, N)
    gap = float(np.abs(np.diag(D, -1) - intertwining_entries(n, N)).max())
    rep = opcalc.compactness_probe(D, Ks)
    return IdentityCheck("v_intertwines_shift", rep.tail_norms, "mod_compact", rep.decaying and gap <= 1e-14,
                         {"n": n, "N": N, "entry_gap": gap, "fitted_rate": rep.fitted_rate})


def build_V_gbar(n: int, N: int, g) -> TruncatedOperator:
    """``V_{conj g}`` from ``A^2_{n+1}`` to ``A^2_n``.

    Expanding the kernel and matching powers of ``w`` gives
    ``V_{conj g}(z^k) = alpha_k sum_{m<=k} conj(g_m) z^{k-m}``, so the monomial
    entry ``(j, k)`` is ``conj(g_{k-j}) alpha_k``.
    """
    g = np.asarray(g, dtype=complex)
    a = alphas(N)
    j = np.arange(N)[:, None]
    k = np.arange(N)[None, :]
    d = k - j
    mask = (d >= 0) & (d < len(g))
    mono = np.where(mask, np.conj(g[np.clip(d, 0, len(g) - 1)]), 0) * a[None, :]
    lb_dom = log_basis_norms(weighted(n + 1), N)
    lb_cod = log_basis_norms(weighted(n), N)
    mat = normalization(n) * mono * np.exp(lb_dom[None, :] - lb_cod[:, None])
    return TruncatedOperator(mat, weighted(n + 1, N), "Vgbar", weighted(n, N))


def psi_coefficients(g: MobiusTransform, count: int) -> np.ndarray:
    """Taylor coefficients of ``psi = (1 - |a|^2)^{1/4} (1 - conj(a) z)^{-1/2}``, ``a = g^{-1}(0)``.

    This is the branch of ``(g')^{1/4}``, up to a unimodular constant, with ``psi(0) > 0``.
    """
    a = g.preimage_of_zero()
    k = np.arange(1, count)
    c = np.concatenate([[1.0], np.cumprod((2 * k - 1) / (2 * k))])[:count]
    return (1 - abs(a) ** 2) ** 0.25 * c * np.conj(a) ** np.arange(count)


def psi(g: MobiusTransform, z):
    a = g.preimage_of_zero()
    return (1 - abs(a) ** 2) ** 0.25 / np.sqrt(1 - np.conj(a) * z)


def psi_fourth_gap(g: MobiusTransform, pts) -> float:
    """max |psi^4 - (1 - |a|^2)/(1 - conj(a) z)^2| and the modulus check |psi|^4 = |g'|."""
    a = g.preimage_of_zero()
    pts = np.asarray(pts, dtype=complex)
    p4 = psi(g, pts) ** 4
    ref = (1 - abs(a) ** 2) / (1 - np.conj(a) * pts) ** 2
    return float(max(np.abs(p4 - ref).max(), np.abs(np.abs(p4) - np.abs(derivative(g, pts))).max()))


def _tail_len(r: float) -> int:
    return 64 if r == 0 else int(math.ceil(math.log(1e-18) / math.log(r))) + 64


def vcv_difference(n: int, g: MobiusTransform, N: int) -> np.ndarray:
    """Leading ``N/2`` block of ``V^* C~_g V - M_psi^* M_psi C_g`` (tilde: ``A^2_n``; plain: ``A^2_{n+1}``)."""
    R = N // 2
    d = build_V(n, R).normalized
    Ct = opcalc.composition_block(weighted(n), g, R, R)
    lhs = d[:, None] * Ct * d[None, :]
    W = R + _tail_len(abs(g.preimage_of_zero()))
    Mp = mult_matrix(weighted(n + 1), psi_coefficients(g, W), W)
    MM = (Mp.conj().T @ Mp)[:R, :W]
    C = opcalc.composition_block(weighted(n + 1), g, W, R)
    return lhs - MM @ C


def vuv_difference(n: int, g: MobiusTransform, N: int) -> np.ndarray:
    """Leading ``N/2`` block of ``V^* U~_g V - U_g``."""
    R = N // 2
    d = build_V(n, R).normalized
    Ut = opcalc.polar_rows(weighted(n), g, R, cols=R, extra=N - R)
    U = opcalc.polar_rows(weighted(n + 1), g, R, cols=R, extra=N - R)
    return d[:, None] * Ut * d[None, :] - U


EXT_SWEEP = (128, 256, 512, 1024)


def check_ext_equivalence(n: int, g: MobiusTransform, Ns=EXT_SWEEP, K: int = 32):
    """Both displays of the equivalence, as band-decay checks across ``Ns``.

    The differences decay like ``1/N`` (the diagonal of V approaches its limit
    at that rate), so the sweep spans a factor of 8 for the 0.2 ratio test.
    """
    if n > 2:
        raise ValueError("n is capped at 2")
    out = []
    for name, fn in (("vcv", vcv_difference), ("vuv", vuv_difference)):
        band, win = [], []
        for N in Ns:
            D = fn(n, g, N)
            band.append((N, opcalc.band_residual(D, N)))
            win.append((N, opcalc.spectral_norm(D[:K, :K])))
        out.append(mod_compact_check(name, band, win, final_tol=None, n=n))
    return out


def conjugate_down(n: int, X: np.ndarray) -> np.ndarray:
    """``V^* X V`` for X on ``A^2_n``, giving an operator on ``A^2_{n+1}``."""
    d = build_V(n, len(X)).normalized
    return d[:, None] * X * d[None, :]


def two_step_difference(g: MobiusTransform, N: int) -> tuple:
    """Conjugating ``U`` on H^2 up to ``A^2_3`` in two steps versus ``U`` on ``A^2_3``.

    Returns the band norms of the two single steps and of the composite.
    """
    R = N // 2
    Us = [opcalc.polar_rows(weighted(m), g, R, cols=R, extra=N - R) for m in (1, 2, 3)]
    step1 = conjugate_down(1, Us[0]) - Us[1]
    step2 = conjugate_down(2, Us[1]) - Us[2]
    both = conjugate_down(2, conjugate_down(1, Us[0])) - Us[2]
    return tuple(opcalc.band_residual(D, N) for D in (step1, step2, both))

