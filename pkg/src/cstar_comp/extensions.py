"""Two extension pictures of the boundary crossed product and the index of ``[z]``.

Hardy picture: ``z`` lifts to the unilateral shift, index ``-1``.
Toy Emerson picture: ``z`` lifts to a diagonal unitary on a word ball, index ``0``.
The Lott construction lives on boundary ``L^2`` with the Riesz projection and
on the Dirichlet space with the unitaries ``u_g f = f o g - f(g(0))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import opcalc
from .fuchsian import FuchsianGroup, default_group, enumerate_words
from .identities import IdentityCheck, mod_compact_check
from .mobius import MobiusTransform, derivative, evaluate, inverse, taylor_coefficients
from .rkhs import dirichlet, fourier_coefficients, mult_matrix, multiplication_l2, shift_weights

GRID = 1024


# index of the Hardy lift -------------------------------------------------------

def winding_number(symbol: Callable, grid: int = GRID) -> int:
    """Argument-principle sum of phase increments of a nonvanishing symbol around the circle."""
    z = np.exp(2j * np.pi * np.arange(grid + 1) / grid)
    v = symbol(z)
    if np.min(np.abs(v)) == 0:
        raise ValueError("symbol vanishes on the circle")
    steps = np.angle(v[1:] / v[:-1])
    return int(round(steps.sum() / (2 * np.pi)))


def index_of_symbol_lift_hardy(symbol: Callable = lambda z: z, grid: int = GRID) -> int:
    """Fredholm index of the Toeplitz lift: minus the winding number."""
    return -winding_number(symbol, grid)


def toeplitz_cokernel_dim(power: int, N: int = 64) -> int:
    """Cokernel dimension of the finite section of ``T_{z^power}`` acting on its full-rank columns."""
    T = np.eye(N, k=-power)[:, :N - power]
    return N - int(np.linalg.matrix_rank(T))


# toy Emerson model ---------------------------------------------------------------

@dataclass
class BoundaryExtension:
    values: dict
    source_symbol: str = "z"

    def diagonal(self) -> np.ndarray:
        return np.diag([self.values[w] for w in self.words()])

    def words(self) -> list:
        return list(self.values)


def word_ball(G: FuchsianGroup, R: int) -> list:
    """Identity word followed by all reduced words of length at most R."""
    return [("", None)] + enumerate_words(G, R) if R > 0 else [("", None)]


def emerson_extension(G: FuchsianGroup, R: int, f: Callable = lambda z: z) -> BoundaryExtension:
    """``f~(x) = f(x(0)/|x(0)|)`` on the word ball, ``f~(e) = 1``."""
    vals = {}
    for w, g in word_ball(G, R):
        if g is None:
            vals[w] = 1.0 + 0j
            continue
        p = g.image_of_zero()
        if abs(p) == 0:
            raise ValueError(f"word {w!r} fixes the origin; orbit direction undefined")
        vals[w] = complex(f(p / abs(p)))
    return BoundaryExtension(vals)


def emerson_lift(G: FuchsianGroup | None = None, R: int = 4, f: Callable = lambda z: z):
    """Diagonal lift of ``f`` and its index.  The lift is unitary, so the index is 0."""
    G = G or default_group()
    if R > 8:
        raise ValueError("ball radius is capped at 8")
    D = emerson_extension(G, R, f).diagonal()
    gap = opcalc.spectral_norm(D.conj().T @ D - np.eye(len(D)))
    if gap > 1e-12:
        raise ValueError(f"lift is not unitary (gap {gap:.2e})")
    return D, 0


def index_contrast(R: int = 4) -> dict:
    hardy = index_of_symbol_lift_hardy()
    _, emerson = emerson_lift(default_group(), R)
    return {"hardy": hardy, "emerson": emerson, "differ": hardy != emerson}


# boundary L^2 --------------------------------------------------------------------

def modes(M: int) -> np.ndarray:
    return np.arange(-M, M + 1)


def _quad_size(M: int, stretch: float) -> int:
    need = 4 * (M * stretch + 256)
    return max(4096, 1 << int(math.ceil(math.log2(need))))


def weighted_composition_l2(g: MobiusTransform, M: int, weight: bool = True, chunk: int = 128) -> np.ndarray:
    """Matrix of ``h -> |g'|^{1/2} (h o g)`` on modes ``-M..M`` (``weight=False`` drops the factor).

    Column ``n`` holds the Fourier coefficients of ``|g'|^{1/2} g^n`` on the
    circle.  ``g^n`` has frequencies up to about ``|n| max|g'|``, so the
    quadrature size grows with ``M``.
    """
    r = abs(g.preimage_of_zero())
    Q = _quad_size(M, (1 + r) / (1 - r))
    z = np.exp(2j * np.pi * np.arange(Q) / Q)
    u = evaluate(g, z)
    phase = np.angle(u)
    w = np.sqrt(np.abs(derivative(g, z))) if weight else np.ones(Q)
    ms = modes(M)
    out = np.empty((len(ms), len(ms)), dtype=complex)
    for s in range(0, len(ms), chunk):
        ns = ms[s:s + chunk]
        vals = w[:, None] * np.exp(1j * phase[:, None] * ns[None, :])
        F = np.fft.fft(vals, axis=0) / Q
        out[:, s:s + chunk] = F[ms % Q]
    return out


def covariant_unitary(g: MobiusTransform, M: int) -> np.ndarray:
    """``U(g) = M_{|(g^{-1})'|^{1/2}} C_{g^{-1}}``, so that ``U(g^{-1}) = M_{|g'|^{1/2}} C_g``."""
    return weighted_composition_l2(inverse(g), M)


def laurent_of(fun: Callable, M: int) -> np.ndarray:
    """Multiplication by a continuous function on modes ``-M..M``."""
    c = fourier_coefficients(fun, 2 * M)
    j = modes(M)[:, None]
    k = modes(M)[None, :]
    return c[(j - k) + 2 * M]


def center(M: int, half: int) -> slice:
    return slice(M - half, M + half + 1)


SYMBOLS = {
    "z": lambda z: z,
    "z2": lambda z: z ** 2,
    "cos": lambda z: 0.5 * (z + 1 / z),
}


@dataclass
class RieszSetup:
    fourier_trunc: int
    projection: np.ndarray = field(init=False)

    def __post_init__(self):
        self.projection = np.diag((modes(self.fourier_trunc) >= 0).astype(float)).astype(complex)

    def unitary(self, g: MobiusTransform) -> np.ndarray:
        return covariant_unitary(g, self.fourier_trunc)

    def pi(self, f: Callable) -> np.ndarray:
        return laurent_of(f, self.fourier_trunc)


def covariant_rep_check(g: MobiusTransform, Ms=(128, 256, 512), half: int = 32) -> list:
    """Unitarity of ``U(g)`` and ``U(g) M_f U(g)^* = M_{f o g^{-1}}`` on a centered window."""
    unit, cov = [], {k: [] for k in SYMBOLS}
    ginv = inverse(g)
    for M in Ms:
        U = covariant_unitary(g, M)
        c = center(M, half)
        unit.append((M, opcalc.spectral_norm((U.conj().T @ U - np.eye(2 * M + 1))[c, c])))
        for name, f in SYMBOLS.items():
            lhs = U @ laurent_of(f, M) @ U.conj().T
            rhs = laurent_of(lambda z, f=f: f(evaluate(ginv, z)), M)
            cov[name].append((M, opcalc.spectral_norm((lhs - rhs)[c, c])))
    out = [mod_compact_check("l2_unitarity", unit, final_tol=None, window_size=2 * half + 1)]
    for name, rows in cov.items():
        out.append(mod_compact_check(f"l2_covariance_{name}", rows, final_tol=None, window_size=2 * half + 1))
    return out


def riesz_commutator(g: MobiusTransform, M: int = 512) -> np.ndarray:
    """``[C_g, P] = -P C_g P^perp`` on modes ``-M..M`` (unweighted composition)."""
    C = weighted_composition_l2(g, M, weight=False)
    P = RieszSetup(M).projection
    return C @ P - P @ C


def riesz_commutator_rank(g: MobiusTransform, M: int = 512):
    """Singular values of the commutator, its range direction and the closed-form functional gap.

    The closed form: ``P C_g P^perp h = (sum_{n<0} h(n) conj(g(0))^{|n|}) 1``.
    """
    K = riesz_commutator(g, M)
    U, s, Vh = np.linalg.svd(K)
    rng = U[:, 0]
    const = np.zeros(2 * M + 1)
    const[M] = 1.0
    range_gap = float(np.linalg.norm(rng - np.vdot(const, rng) * const))
    p = np.conj(g.image_of_zero())
    ms = modes(M)
    functional = np.where(ms < 0, p ** np.abs(ms).astype(float), 0)
    explicit = -np.outer(const, functional)
    return {"singular_values": s, "range_vector": rng, "range_gap": range_gap,
            "sigma1_formula": math.sqrt(sum(abs(p) ** (2 * k) for k in range(1, M + 1))),
            "formula_gap": opcalc.spectral_norm(K - explicit)}


# Dirichlet space -----------------------------------------------------------------

def dirichlet_integral(coeffs) -> float:
    c = np.asarray(coeffs)
    k = np.arange(len(c))
    return float(np.sum(k * np.abs(c) ** 2))


def compose_series(f_coeffs, g: MobiusTransform, rows: int) -> np.ndarray:
    """Taylor coefficients of ``f o g`` up to ``rows``."""
    from . import kernels
    table, _ = kernels.power_table(g.a, g.b, rows, len(f_coeffs))
    return table @ np.asarray(f_coeffs, dtype=complex)


def u_gamma_rows(g: MobiusTransform, rows: int) -> np.ndarray:
    """First ``rows`` rows of ``u_g``: identity on constants, ``C_g`` on ``D_0`` with the value at 0 removed."""
    C = opcalc.composition_rows(dirichlet(rows), g, rows)
    C[0, :] = 0.0
    C[:, 0] = 0.0
    C[0, 0] = 1.0
    return C


def dirichlet_u_gamma_check(g: MobiusTransform, Ns=(64, 128, 256), K: int = 32, seed: int = 0,
                            rows: int = 4096) -> list:
    unit = []
    for N in Ns:
        u = opcalc.composition_block(dirichlet(N), g, N, K)
        u[0, :] = 0.0
        u[:, 0] = 0.0
        u[0, 0] = 1.0
        unit.append((N, opcalc.spectral_norm(u.conj().T @ u - np.eye(K))))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        deg = int(rng.integers(1, 9))
        f = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        fg = compose_series(f, g, rows)
        worst = max(worst, abs(dirichlet_integral(fg) - dirichlet_integral(f)) / max(1.0, dirichlet_integral(f)))
    inv_check = IdentityCheck("dirichlet_invariance", [(rows, worst)], "exact", worst <= 1e-8)
    cov = []
    for N in Ns:
        R = N // 2
        u = u_gamma_rows(g, R)
        W = u.shape[1]
        Mz = np.diag(shift_weights(dirichlet(W), W)[:-1], -1)
        lhs = u @ Mz @ u.conj().T
        rhs = mult_matrix(dirichlet(R), taylor_coefficients(g, R), R)
        cov.append((N, opcalc.band_residual(lhs - rhs, N)))
    return [mod_compact_check("dirichlet_unitarity", unit, final_tol=1e-10), inv_check,
            mod_compact_check("dirichlet_covariance", cov, final_tol=None)]


# KK-cycle conditions -------------------------------------------------------------

def by_frequency(M: int) -> np.ndarray:
    """Permutation ordering modes as 0, 1, -1, 2, -2, ... so P_K keeps |m| small."""
    ms = modes(M)
    return np.argsort(np.abs(ms) * 2 - (ms > 0), kind="stable")


def l2_probe(A: np.ndarray, M: int, Ks=(8, 16, 32, 64)) -> opcalc.CompactnessReport:
    p = by_frequency(M)
    B = A[np.ix_(p, p)]
    return opcalc.compactness_probe(B, Ks, edge=len(B) // 2)


def kk_cycle_check(gs=None, fs=None, M: int = 512) -> dict:
    gs = gs or default_group().generators
    fs = fs or [SYMBOLS["z"], SYMBOLS["cos"]]
    F = 2 * RieszSetup(M).projection - np.eye(2 * M + 1)
    out = {"F2_minus_I": float(np.abs(F @ F - np.eye(2 * M + 1)).max()),
           "F_minus_Fstar": float(np.abs(F - F.conj().T).max()), "unitary": [], "multiplier": []}
    for g in gs:
        U = covariant_unitary(g, M)
        out["unitary"].append(l2_probe(U @ F - F @ U, M))
    for f in fs:
        Mf = laurent_of(f, M)
        out["multiplier"].append(l2_probe(Mf @ F - F @ Mf, M))
    out["passed"] = (out["F2_minus_I"] == 0 and out["F_minus_Fstar"] == 0
                     and all(r.decaying for r in out["unitary"] + out["multiplier"]))
    return out


def laurent_poly(coeffs: dict, M: int) -> np.ndarray:
    return multiplication_l2(coeffs, M)
