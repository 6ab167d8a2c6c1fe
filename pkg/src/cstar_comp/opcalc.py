"""Composition operators, polar factors, matrix roots and compactness diagnostics.

Row truncation of a composition operator is exact: row ``j`` of ``C_g`` only
involves the first ``j+1`` Taylor coefficients of the powers ``g^k``.  Columns
are the delicate direction.  The coefficients of ``g^k`` spread up to index
about ``k * max|g'|`` and leave a fixed row window only once
``k * min|g'| >> rows``, with ``min|g'| = (1-r)/(1+r)`` and ``r = |g^{-1}(0)|``.
Products are therefore formed from row blocks whose columns are extended
until the weighted coefficients have died out.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .mobius import MobiusTransform
from .rkhs import DIRICHLET, DISK, SpaceSpec, TruncatedOperator, log_basis_norms

SIGMA_MIN = 1e-10
PSD_CLAMP = 1e-8
DECAY_RATIO = 0.2
DECAY_JITTER = 0.1
# tail values below this are indistinguishable from rounding and count as zero
ZERO_FLOOR = 1e-11


class NearSingularError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def contraction_rate(g: MobiusTransform) -> float:
    """min over the circle of |g'| (equal to (1-r)/(1+r), r = |g^{-1}(0)|)."""
    r = abs(g.b / g.a)
    return (1 - r) / (1 + r)


def column_extent(g: MobiusTransform, rows: int) -> int:
    """A column count past which rows ``< rows`` of ``C_g`` are negligible."""
    return int(1.5 * rows / contraction_rate(g)) + 64


def _scale(space: SpaceSpec, table: np.ndarray, col0: int = 0) -> np.ndarray:
    rows, cols = table.shape
    lb = log_basis_norms(space, max(rows, col0 + cols))
    return table * np.exp(lb[col0:col0 + cols][None, :] - lb[:rows][:, None])


def composition_block(space: SpaceSpec, g: MobiusTransform, rows: int, cols: int) -> np.ndarray:
    """Exact ``rows x cols`` block of ``C_g`` in orthonormal coordinates."""
    if space.kind not in (DISK, DIRICHLET):
        raise ValueError("composition operators are built on the disk spaces")
    table, _ = kernels.power_table(g.a, g.b, rows, cols)
    return _scale(space, table)


def column_blocks(space: SpaceSpec, g: MobiusTransform, rows: int, tol: float = 1e-17,
                  block: int = 2048, max_cols: int = 20_000_000):
    """Yield consecutive column blocks of the first ``rows`` rows of ``C_g``.

    Blocks are generated by resuming the power recurrence and stop once a
    whole block is below ``tol`` times the largest entry seen.
    """
    if space.kind not in (DISK, DIRICHLET):
        raise ValueError("composition operators are built on the disk spaces")
    start = None
    peak = 0.0
    col = 0
    block = max(block, rows)
    while True:
        table, start = kernels.power_table(g.a, g.b, rows, block, start)
        scaled = _scale(space, table, col)
        bmax = np.abs(scaled).max()
        peak = max(peak, bmax)
        yield scaled
        col += block
        if col >= rows and bmax <= tol * peak:
            return
        if col >= max_cols:
            raise NearSingularError(f"column extent exceeded {max_cols}; |g^-1(0)| too close to 1")


def composition_rows(space: SpaceSpec, g: MobiusTransform, rows: int, tol: float = 1e-17) -> np.ndarray:
    """The first ``rows`` rows of ``C_g`` with every non-negligible column."""
    out = np.concatenate(list(column_blocks(space, g, rows, tol)), axis=1)
    peak = np.abs(out).max()
    keep = np.nonzero(np.abs(out).max(axis=0) > tol * peak)[0]
    last = max(keep[-1] + 1 if len(keep) else 1, rows)
    return out[:, :last]


def gram_product(space: SpaceSpec, g: MobiusTransform, rows: int, tol: float = 1e-17) -> np.ndarray:
    """``P C_g C_g^* P`` accumulated block by block without storing all columns."""
    G = np.zeros((rows, rows), dtype=complex)
    for B in column_blocks(space, g, rows, tol):
        G += B @ B.conj().T
    return G


def composition_operator(space: SpaceSpec, g: MobiusTransform) -> TruncatedOperator:
    """The N x N compression of ``C_g``; entries are exact, no series padding is involved."""
    N = space.trunc
    return TruncatedOperator(composition_block(space, g, N, N), space, "C")


def factor_coefficients(n: int, g: MobiusTransform) -> np.ndarray:
    """Taylor coefficients of ``f = (1 - conj(a) z)^n / (1 - |a|^2)^{n/2}``, ``a = g^{-1}(0)``."""
    a = g.preimage_of_zero()
    k = np.arange(n + 1)
    binom = np.array([math.comb(n, i) for i in k], dtype=float)
    return binom * (-np.conj(a)) ** k / (1 - abs(a) ** 2) ** (n / 2)


def factor_gram(space: SpaceSpec, g: MobiusTransform, rows: int) -> np.ndarray:
    """``P (M_f M_f^*) P`` on the first ``rows`` indices; exact since ``M_f`` is banded."""
    if space.kind != DISK:
        raise ValueError("the factorization needs a weighted disk space")
    from .rkhs import mult_matrix

    M = mult_matrix(space, factor_coefficients(space.n, g), rows)
    return M @ M.conj().T


def composition_gram(space: SpaceSpec, g: MobiusTransform, rows: int, method: str = "factor") -> np.ndarray:
    """Leading ``rows x rows`` block of ``C_g C_g^*``.

    ``method="product"`` multiplies padded row blocks; ``"factor"`` uses the
    banded closed form, available on the weighted disk spaces.
    """
    if method == "factor":
        return factor_gram(space, g, rows)
    return gram_product(space, g, rows)


def inverse_sqrt(G: np.ndarray, sigma_min: float = SIGMA_MIN) -> np.ndarray:
    G = 0.5 * (G + G.conj().T)
    w, V = np.linalg.eigh(G)
    if w[0] <= sigma_min ** 2:
        raise NearSingularError(f"smallest singular value {math.sqrt(max(w[0], 0)):.3e} below {sigma_min:g}")
    return (V * w ** -0.5) @ V.conj().T


def polar_unitary(C: TruncatedOperator, sigma_min: float = SIGMA_MIN) -> TruncatedOperator:
    """``(C C^*)^{-1/2} C`` through a Hermitian eigendecomposition."""
    A = C.matrix
    return TruncatedOperator(inverse_sqrt(A @ A.conj().T, sigma_min) @ A, C.space, f"polar({C.meta})", C.codomain)


def polar_rows(space: SpaceSpec, g: MobiusTransform, rows: int, cols: int | None = None,
               extra: int = 200, method: str = "factor") -> np.ndarray:
    """First ``rows`` rows of the polar unitary of ``C_g``.

    The inverse square root is taken of the Gram block on ``rows + extra``
    indices; its edge effects decay into the interior and are cropped away.
    ``cols`` fixes the column count, otherwise it is chosen adaptively.
    """
    R = rows + extra
    Ginv = inverse_sqrt(composition_gram(space, g, R, method))[:rows]
    if cols is None:
        C = composition_rows(space, g, R)
    else:
        C = composition_block(space, g, R, cols)
    return Ginv @ C


def composition_unitary(space: SpaceSpec, g: MobiusTransform, extra: int = 200) -> TruncatedOperator:
    N = space.trunc
    return TruncatedOperator(polar_rows(space, g, N, N, extra), space, "U")


def positive_root(A: TruncatedOperator | np.ndarray, n: int):
    """The positive semidefinite n-th root; negative rounding dust is clamped to 0."""
    M = A.matrix if isinstance(A, TruncatedOperator) else np.asarray(A, dtype=complex)
    M = 0.5 * (M + M.conj().T)
    w, V = np.linalg.eigh(M)
    scale = max(abs(w).max(), 1e-300) if w.size else 1.0
    if w.size and w[0] < -PSD_CLAMP * scale:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e}")
    R = (V * np.clip(w, 0, None) ** (1.0 / n)) @ V.conj().T
    if isinstance(A, TruncatedOperator):
        return TruncatedOperator(R, A.space, f"root{n}({A.meta})")
    return R


def _mat(A):
    return A.matrix if isinstance(A, TruncatedOperator) else np.asarray(A)


def spectral_norm(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def block_residual(A, B, K: int) -> float:
    """``||P_K (A - B) P_K||``, the fixed-window statistic."""
    A, B = _mat(A), _mat(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch {A.shape} vs {B.shape}")
    if K > min(A.shape):
        raise ValueError("window larger than the matrix")
    return spectral_norm(A[:K, :K] - B[:K, :K])


def band_residual(D: np.ndarray, N: int) -> float:
    """Norm of the ``[N/4, N/2)`` band, which moves outward as ``N`` grows."""
    return spectral_norm(np.asarray(D)[N // 4:N // 2, N // 4:N // 2])


def decay_verdict(values, ratio: float = DECAY_RATIO, jitter: float = DECAY_JITTER,
                  floor: float = ZERO_FLOOR) -> bool:
    """Last value at most ``ratio`` times the first, and no step up by more than ``jitter``.

    Values under ``floor`` are rounding noise and are treated as exact zeros.
    """
    v = [0.0 if x < floor else float(x) for x in values]
    if not v:
        return False
    if v[0] == 0.0:
        return all(x == 0.0 for x in v)
    if v[-1] > ratio * v[0]:
        return False
    return all(b <= (1 + jitter) * a or b == 0.0 for a, b in zip(v, v[1:]))


def fit_rate(xs, ys) -> float:
    """Least-squares slope of log y against log x over the positive entries."""
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if y > ZERO_FLOOR and x > 0]
    if len(pts) < 2:
        return float("-inf") if all(y <= ZERO_FLOOR for y in ys) else 0.0
    X, Y = np.array(pts).T
    return float(np.polyfit(X, Y, 1)[0])


@dataclass
class CompactnessReport:
    tail_norms: list
    fitted_rate: float
    verdict: str
    meta: dict = field(default_factory=dict)

    @property
    def decaying(self) -> bool:
        return self.verdict == "decaying"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["K", "tail_norm"])
        for K, t in self.tail_norms:
            w.writerow([K, repr(float(t))])
        return buf.getvalue()

    def to_json(self) -> dict:
        rate = self.fitted_rate
        return {"verdict": self.verdict, "fitted_rate": rate if math.isfinite(rate) else str(rate),
                "tail_norms": [[int(K), float(t)] for K, t in self.tail_norms], **self.meta}


def compactness_probe(A, Ks, edge: int = 0) -> CompactnessReport:
    """Tail norms ``||(I - P_K) A (I - P_K)||`` restricted away from the last ``edge`` indices.

    ``edge`` removes the truncation boundary, where a finite section of an
    operator differs from the infinite one (for instance the last diagonal
    entry of ``[T, T^*]``).
    """
    M = _mat(A)
    N = M.shape[0]
    Ks = list(Ks)
    if any(b <= a for a, b in zip(Ks, Ks[1:])):
        raise ValueError("Ks must be strictly increasing")
    if Ks and Ks[-1] > N // 2:
        raise ValueError("largest K must be at most N/2")
    stop = N - edge
    tails = [(K, spectral_norm(M[K:stop, K:stop])) for K in Ks]
    vals = [t for _, t in tails]
    verdict = "decaying" if decay_verdict(vals) else "stagnant"
    return CompactnessReport(tails, fit_rate(Ks, vals), verdict, {"N": N, "edge": edge})
