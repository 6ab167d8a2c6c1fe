"""Numerical certificates for the operator identities behind the composition algebra.

Exact identities (factorization of ``C_g C_g^*``, the intertwining
``M_g C_g = C_g T`` and the binomial expansion of ``F(lambda)``) are checked
on a fixed window, where row-truncated matrices are exact.  Identities that
hold only modulo compact operators are checked by a band statistic: the norm
of the difference on indices ``[N/4, N/2)`` must decay as ``N`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import opcalc
from .mobius import MobiusTransform, compose, evaluate, taylor_coefficients
from .rkhs import (DISK, SpaceSpec, fourier_coefficients, kernel_vector, mult_matrix,
                   shift_weights, toeplitz_matrix)

EXACT_TOL = 1e-9
FINAL_TOL = 1e-3
SWEEP = (64, 128, 256)
WINDOW = 32


@dataclass
class IdentityCheck:
    name: str
    residuals: list
    mode: str
    passed: bool
    info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "mode": self.mode, "passed": bool(self.passed),
                "residuals": [[_num(N), float(r)] for N, r in self.residuals], **self.info}


def _num(x):
    return int(x) if isinstance(x, (int, np.integer)) else float(x)


def _rel(D: np.ndarray, ref: np.ndarray) -> float:
    return opcalc.spectral_norm(D) / max(1.0, opcalc.spectral_norm(ref))


def mod_compact_check(name: str, residuals, window=None, final_tol: float = FINAL_TOL, **info) -> IdentityCheck:
    vals = [r for _, r in residuals]
    ok = opcalc.decay_verdict(vals) and (final_tol is None or vals[-1] <= final_tol)
    extra = dict(info)
    if window is not None:
        extra["window_residuals"] = [[int(N), float(r)] for N, r in window]
    return IdentityCheck(name, list(residuals), "mod_compact", ok, extra)


# exact identities ------------------------------------------------------------

def check_factor(space: SpaceSpec, g: MobiusTransform, N: int = 256, K: int = 64) -> IdentityCheck:
    """``C_g C_g^* = M_f M_f^*`` with ``f = (1 - conj(a) z)^n / (1 - |a|^2)^{n/2}``, ``a = g^{-1}(0)``.

    The residual is relative to the window norm of ``M_f M_f^*``, which grows
    like ``((1+|a|)/(1-|a|))^n`` and sets the rounding scale.
    """
    if space.kind != DISK:
        raise ValueError("check_factor needs a weighted disk space")
    C = opcalc.composition_rows(space, g, K)
    lhs = C @ C.conj().T
    rhs = opcalc.factor_gram(space, g, K)
    r = _rel(lhs - rhs, rhs)
    return IdentityCheck("factor", [(N, r)], "exact", r <= EXACT_TOL,
                         {"space": space.label(), "window": K, "a": abs(g.preimage_of_zero()),
                          "absolute": opcalc.spectral_norm(lhs - rhs)})


def kernel_gram_oracle(n: int, g: MobiusTransform, z: complex, w: complex) -> complex:
    """Closed form of ``<C_g C_g^* k_w, k_z>`` from the factorization."""
    a = g.preimage_of_zero()
    val = (1 - np.conj(a) * z) * (1 - a * np.conj(w)) / ((1 - abs(a) ** 2) * (1 - z * np.conj(w)))
    return val ** n


def check_kernel_gram(space: SpaceSpec, g: MobiusTransform, pairs) -> IdentityCheck:
    """``<C_g C_g^* k_w, k_z>`` from matrices against its closed form."""
    rmax = max(max(abs(z), abs(w)) for z, w in pairs)
    rows = max(64, int(math.ceil(math.log(1e-19) / math.log(max(rmax, 1e-3)))) + 8 * space.n)
    C = opcalc.composition_rows(space, g, rows)
    G = C @ C.conj().T
    worst = 0.0
    for z, w in pairs:
        kz, kw = kernel_vector(space, z, rows), kernel_vector(space, w, rows)
        val = np.vdot(kz, G @ kw)
        ref = kernel_gram_oracle(space.n, g, z, w)
        worst = max(worst, abs(val - ref) / max(1.0, abs(ref)))
    return IdentityCheck("kernel_gram", [(rows, worst)], "exact", worst <= 1e-11, {"space": space.label()})


def kernel_adjoint_residual(space: SpaceSpec, g: MobiusTransform, w: complex, N: int = 256) -> float:
    """``||C_g^* k_w - k_{g(w)}||`` over the first ``N`` coordinates.

    Column ``k`` of ``C_g`` is summed over enough rows for ``|w|^j`` to vanish.
    """
    extra = 0 if w == 0 else int(math.ceil(math.log(1e-20) / math.log(abs(w))))
    rows = N + max(extra, 0) + 8 * space.n
    C = opcalc.composition_block(space, g, rows, N)
    lhs = C.conj().T @ kernel_vector(space, w, rows)
    rhs = kernel_vector(space, evaluate(g, w), N)
    return float(np.linalg.norm(lhs - rhs))


def check_commute(space: SpaceSpec, g: MobiusTransform, N: int = 256, K: int = 64) -> IdentityCheck:
    """``M_g C_g = C_g T`` on the leading window, ``M_g`` built from the Taylor series of g."""
    C = opcalc.composition_rows(space, g, K)
    W = C.shape[1]
    C = opcalc.composition_block(space, g, K, W + 1)
    Mg = mult_matrix(space, taylor_coefficients(g, K), K)
    lhs = Mg @ C[:, :K]
    w = shift_weights(space, K)
    rhs = C[:, 1:K + 1] * w[None, :]
    r = _rel(lhs - rhs, rhs)
    return IdentityCheck("commute", [(N, r)], "exact", r <= EXACT_TOL,
                         {"space": space.label(), "window": K, "absolute": opcalc.spectral_norm(lhs - rhs)})


def shift_matrix(space: SpaceSpec, N: int) -> np.ndarray:
    return np.diag(shift_weights(space, N)[:-1], -1).astype(complex)


def e_operators(T: np.ndarray, n: int) -> list:
    """``E_m = (-1)^m sum_{m<=k<=n} C(n,k) C(n,k-m) T^k T^{*(k-m)}`` for ``m = 0..n``.

    ``E_0`` holds the diagonal part ``sum_d C(n,d)^2 T^d T^{*d}``.
    """
    Ts = T.conj().T
    P = [np.eye(len(T), dtype=complex)]
    Q = [np.eye(len(T), dtype=complex)]
    for _ in range(n):
        P.append(P[-1] @ T)
        Q.append(Q[-1] @ Ts)
    out = []
    for m in range(n + 1):
        acc = np.zeros_like(T)
        for k in range(m, n + 1):
            acc = acc + math.comb(n, k) * math.comb(n, k - m) * (P[k] @ Q[k - m])
        out.append((-1) ** m * acc)
    return out


def f_lambda(T: np.ndarray, n: int, lam: complex) -> np.ndarray:
    """Direct product ``(1 - conj(lam) T)^n (1 - lam T^*)^n``."""
    I = np.eye(len(T), dtype=complex)
    X = np.linalg.matrix_power(I - np.conj(lam) * T, n)
    return X @ X.conj().T


def f_lambda_expansion(E: list, lam: complex) -> np.ndarray:
    out = E[0].copy()
    for m in range(1, len(E)):
        out += np.conj(lam) ** m * E[m] + lam ** m * E[m].conj().T
    return out


def check_f_lambda_expansion(space: SpaceSpec, lam: complex, N: int = 128) -> IdentityCheck:
    if space.kind != DISK:
        raise ValueError("check_f_lambda_expansion needs a weighted disk space")
    if abs(abs(lam) - 1) > 1e-12:
        raise ValueError("lambda must be unimodular")
    n = space.n
    T = shift_matrix(space, N)
    E = e_operators(T, n)
    W = N - n
    D = f_lambda(T, n, lam) - f_lambda_expansion(E, lam)
    r = opcalc.spectral_norm(D[:W, :W])
    # E_n is (-1)^n T^n
    en = opcalc.spectral_norm((E[n] - (-1) ** n * np.linalg.matrix_power(T, n))[:W, :W])
    return IdentityCheck("f_lambda_expansion", [(N, r)], "exact", max(r, en) <= 1e-10,
                         {"space": space.label(), "e_n_residual": en})


# mod-compact identities -----------------------------------------------------

def _extra(N):
    return N - N // 2


def boundary_composition(q_coeffs: dict, g: MobiusTransform):
    """``e^{i theta} -> q(g(e^{i theta}))`` for a trigonometric polynomial q."""
    def fun(z):
        u = evaluate(g, z)
        out = np.zeros_like(z, dtype=complex)
        for m, c in q_coeffs.items():
            out += c * u ** m
        return out
    return fun


def covariance_difference(space: SpaceSpec, g: MobiusTransform, q: dict, N: int) -> np.ndarray:
    """Leading ``N/2`` block of ``U_g T_q U_g^* - T_{q o g}`` at truncation ``N``."""
    R = N // 2
    U = opcalc.polar_rows(space, g, R, extra=_extra(N))
    L = U.shape[1]
    Tq = toeplitz_matrix(space, q, L)
    lhs = U @ Tq @ U.conj().T
    rhs = toeplitz_matrix(space, fourier_coefficients(boundary_composition(q, g), R), R, center=R)
    return lhs - rhs


def check_covariance(space: SpaceSpec, g: MobiusTransform, q: dict, Ns=SWEEP, K: int = WINDOW) -> IdentityCheck:
    if max(abs(m) for m in q) > 8:
        raise ValueError("trigonometric degree of q must be at most 8")
    band, win = [], []
    for N in Ns:
        D = covariance_difference(space, g, q, N)
        band.append((N, opcalc.band_residual(D, N)))
        win.append((N, opcalc.spectral_norm(D[:K, :K])))
    return mod_compact_check("covariance", band, win, space=space.label())


def group_law_difference(space: SpaceSpec, g: MobiusTransform, h: MobiusTransform, N: int) -> np.ndarray:
    """Leading ``N/2`` block of ``U_g U_h - U_{h o g}``."""
    R = N // 2
    E = _extra(N)
    Ug = opcalc.polar_rows(space, g, R, extra=E)
    L = Ug.shape[1]
    Uh = opcalc.polar_rows(space, h, L, cols=R, extra=max(E, 200))
    Uhg = opcalc.polar_rows(space, compose(h, g), R, cols=R, extra=E)
    return Ug @ Uh - Uhg


def check_group_law(space: SpaceSpec, g: MobiusTransform, h: MobiusTransform, Ns=SWEEP,
                    K: int = WINDOW) -> IdentityCheck:
    band, win = [], []
    for N in Ns:
        D = group_law_difference(space, g, h, N)
        band.append((N, opcalc.band_residual(D, N)))
        win.append((N, opcalc.spectral_norm(D[:K, :K])))
    return mod_compact_check("group_law", band, win, space=space.label())


def inverse_modulus_symbol(n: int, g: MobiusTransform):
    """``|f|^{-1}`` on the circle: ``(1 - |a|^2)^{n/2} / |1 - conj(a) e^{i theta}|^n``."""
    a = g.preimage_of_zero()

    def fun(z):
        return (1 - abs(a) ** 2) ** (n / 2) / np.abs(1 - np.conj(a) * z) ** n
    return fun


def polar_formula_difference(space: SpaceSpec, g: MobiusTransform, N: int) -> np.ndarray:
    """Leading ``N/2`` block of ``U_g - T_{|f|^{-1}} C_g``."""
    R = N // 2
    U = opcalc.polar_rows(space, g, R, cols=R, extra=_extra(N))
    r = abs(g.preimage_of_zero())
    band = R if r == 0 else int(math.ceil(math.log(1e-18) / math.log(r))) + 16 * space.n
    W = R + band
    c = fourier_coefficients(inverse_modulus_symbol(space.n, g), W)
    Tf = toeplitz_matrix(space, c, R, W, center=W)
    C = opcalc.composition_block(space, g, W, R)
    return U - Tf @ C


def check_polar_formula(space: SpaceSpec, g: MobiusTransform, Ns=SWEEP, K: int = WINDOW) -> IdentityCheck:
    band, win = [], []
    for N in Ns:
        D = polar_formula_difference(space, g, N)
        band.append((N, opcalc.band_residual(D, N)))
        win.append((N, opcalc.spectral_norm(D[:K, :K])))
    return mod_compact_check("polar_formula", band, win, space=space.label())

