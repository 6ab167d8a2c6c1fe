"""Function spaces on the disk and the basic operators acting on them.

Every operator is stored in orthonormal coordinates.  For the weighted disk
space ``A^2_n`` (kernel ``(1 - z conj(w))^{-n}``, ``n = 1`` is Hardy space) the
orthonormal basis is ``e_k = beta_k z^k`` with ``beta_k = sqrt(C(n+k-1, k))``.
The Dirichlet space uses ``beta_0 = 1`` and ``beta_k = 1/sqrt(k)``.  Boundary
``L^2`` is represented by Fourier modes ``-N..N``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from scipy.special import gammaln

DISK = "disk"
DIRICHLET = "dirichlet"
L2 = "l2"


@dataclass(frozen=True)
class SpaceSpec:
    kind: str
    n: int = 1
    trunc: int = 128

    def __post_init__(self):
        if self.kind not in (DISK, DIRICHLET, L2):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == DISK and self.n < 1:
            raise ValueError("kernel exponent must be >= 1")
        if self.trunc < 1:
            raise ValueError("truncation must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.trunc + 1 if self.kind == L2 else self.trunc

    def with_trunc(self, N: int) -> SpaceSpec:
        return SpaceSpec(self.kind, self.n, N)

    def label(self) -> str:
        if self.kind == DISK:
            return "h2" if self.n == 1 else f"a2:{self.n}"
        return self.kind

    @classmethod
    def parse(cls, text: str, trunc: int = 128) -> SpaceSpec:
        """Accepts ``h2``, ``a2:n``, ``dirichlet`` or ``l2``."""
        t = text.strip().lower()
        if t in ("h2", "hardy"):
            return cls(DISK, 1, trunc)
        m = re.fullmatch(r"a2:(\d+)", t)
        if m:
            return cls(DISK, int(m.group(1)), trunc)
        if t == DIRICHLET:
            return cls(DIRICHLET, 1, trunc)
        if t == L2:
            return cls(L2, 1, trunc)
        raise ValueError(f"cannot parse space {text!r}")


def hardy(N=128) -> SpaceSpec:
    return SpaceSpec(DISK, 1, N)


def weighted(n, N=128) -> SpaceSpec:
    return SpaceSpec(DISK, n, N)


def dirichlet(N=128) -> SpaceSpec:
    return SpaceSpec(DIRICHLET, 1, N)


def log_basis_norms(space: SpaceSpec, count: int) -> np.ndarray:
    k = np.arange(count, dtype=float)
    if space.kind == DISK:
        n = space.n
        return 0.5 * (gammaln(n + k) - gammaln(k + 1) - gammaln(n))
    if space.kind == DIRICHLET:
        out = np.zeros(count)
        out[1:] = -0.5 * np.log(k[1:])
        return out
    raise ValueError("boundary L2 has no monomial basis norms")


def basis_norms(space: SpaceSpec, count: int | None = None) -> np.ndarray:
    """beta_0 .. beta_{count-1}, computed through logs so large k cannot overflow."""
    return np.exp(log_basis_norms(space, space.trunc if count is None else count))


def basis_norm(space: SpaceSpec, k: int) -> float:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return float(basis_norms(space, k + 1)[k])


@dataclass
class TruncatedOperator:
    """A finite matrix in orthonormal coordinates, tagged with its space.

    ``codomain`` is only set for operators between different spaces.
    """

    matrix: np.ndarray
    space: SpaceSpec
    meta: str = ""
    codomain: SpaceSpec | None = None

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        target = self.codomain or self.space
        if self.matrix.shape != (target.dim, self.space.dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match space dimensions")

    @property
    def N(self) -> int:
        return self.space.trunc

    @property
    def H(self) -> TruncatedOperator:
        if self.codomain is None:
            return TruncatedOperator(self.matrix.conj().T, self.space, f"adj({self.meta})")
        return TruncatedOperator(self.matrix.conj().T, self.codomain, f"adj({self.meta})", self.space)

    def _check(self, other):
        if not isinstance(other, TruncatedOperator):
            return NotImplemented
        return other

    def __matmul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if (other.codomain or other.space) != self.space:
            raise ValueError("space mismatch in operator product")
        cod = self.codomain or self.space
        return TruncatedOperator(self.matrix @ other.matrix, other.space, f"{self.meta}*{other.meta}",
                                 None if cod == other.space else cod)

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if other.space != self.space or other.codomain != self.codomain:
            raise ValueError("space mismatch in operator sum")
        return TruncatedOperator(self.matrix + other.matrix, self.space, f"{self.meta}+{other.meta}", self.codomain)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if other.space != self.space or other.codomain != self.codomain:
            raise ValueError("space mismatch in operator difference")
        return TruncatedOperator(self.matrix - other.matrix, self.space, f"{self.meta}-{other.meta}", self.codomain)

    def header(self) -> dict:
        h = {"kind": self.space.kind, "n": self.space.n, "N": self.space.trunc, "provenance": self.meta}
        if self.codomain is not None:
            h["codomain"] = {"kind": self.codomain.kind, "n": self.codomain.n, "N": self.codomain.trunc}
        return h

    def dumps(self) -> str:
        """JSON header line followed by row-major ``re im`` pairs, one row per line."""
        lines = [json.dumps(self.header(), sort_keys=True)]
        for row in self.matrix:
            lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> TruncatedOperator:
        head, *rows = text.strip().splitlines()
        h = json.loads(head)
        space = SpaceSpec(h["kind"], h["n"], h["N"])
        cod = None
        if "codomain" in h:
            c = h["codomain"]
            cod = SpaceSpec(c["kind"], c["n"], c["N"])
        vals = [np.array(r.split(), dtype=float) for r in rows]
        mat = np.array([v[0::2] + 1j * v[1::2] for v in vals])
        return cls(mat, space, h.get("provenance", ""), cod)


def shift(space: SpaceSpec) -> TruncatedOperator:
    """Multiplication by z: subdiagonal weights ``w_k = beta_k / beta_{k+1}``."""
    if space.kind == L2:
        N = space.trunc
        return TruncatedOperator(np.eye(2 * N + 1, k=-1), space, "shift")
    beta = basis_norms(space, space.trunc + 1)
    w = beta[:-1] / beta[1:]
    return TruncatedOperator(np.diag(w[:-1], -1), space, "shift")


def shift_weights(space: SpaceSpec, count: int) -> np.ndarray:
    beta = basis_norms(space, count + 1)
    return beta[:-1] / beta[1:]


def kernel_vector(space: SpaceSpec, w: complex, N: int | None = None) -> np.ndarray:
    """Coordinates ``beta_k conj(w)^k`` of the reproducing kernel at ``w``."""
    if space.kind != DISK:
        raise ValueError("kernel vectors are defined for the weighted disk spaces")
    if abs(w) >= 1:
        raise ValueError("w must lie in the open disk")
    N = space.trunc if N is None else N
    k = np.arange(N)
    lb = log_basis_norms(space, N)
    if w == 0:
        out = np.zeros(N, dtype=complex)
        out[0] = 1.0
        return out
    # log form avoids overflow of beta_k before the geometric factor kicks in
    return np.exp(lb + k * np.log(abs(w))) * np.exp(-1j * k * np.angle(w))


def mult_matrix(space: SpaceSpec, coeffs, rows: int, cols: int | None = None) -> np.ndarray:
    """Rows x cols block of M_g for Taylor coefficients ``coeffs`` of g."""
    cols = rows if cols is None else cols
    g = np.asarray(coeffs, dtype=complex)
    size = max(rows, cols)
    beta = basis_norms(space, size)
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    d = j - k
    mask = (d >= 0) & (d < len(g))
    vals = np.where(mask, g[np.clip(d, 0, len(g) - 1)], 0)
    return vals * beta[:cols][None, :] / beta[:rows][:, None]


def mult_analytic(space: SpaceSpec, coeffs) -> TruncatedOperator:
    N = space.trunc
    return TruncatedOperator(mult_matrix(space, coeffs, N), space, "mult")


def fourier_coefficients(fun: Callable, M: int, Q: int = 4096, tol: float = 1e-16, max_q: int = 1 << 22):
    """Fourier coefficients ``c_{-M}..c_M`` of a function on the unit circle.

    Trapezoid rule on ``Q`` points.  ``Q`` is doubled until the coefficients near
    the Nyquist band are below ``tol`` relative to the largest one, so symbols
    with poles close to the circle are not aliased.
    """
    while True:
        theta = 2 * np.pi * np.arange(Q) / Q
        vals = fun(np.exp(1j * theta))
        F = np.fft.fft(vals) / Q
        band = np.abs(F[3 * Q // 8: 5 * Q // 8])
        if band.max() <= tol * max(np.abs(F).max(), 1e-300) or Q >= max_q:
            break
        Q *= 2
    m = np.arange(-M, M + 1)
    out = F[m % Q] if M < Q // 2 else np.where(np.abs(m) < Q // 2, F[m % Q], 0)
    return out


def toeplitz_matrix(space: SpaceSpec, coeffs: Mapping[int, complex] | np.ndarray, rows: int,
                    cols: int | None = None, center: int | None = None) -> np.ndarray:
    """Rows x cols block of the Toeplitz operator with boundary symbol ``sum c_m e^{i m theta}``.

    ``coeffs`` is a dict ``{m: c_m}`` or an array indexed ``m + center``.  On
    ``A^2_n`` the symbol is extended harmonically (``e^{i m theta}`` becomes
    ``z^m`` or ``conj(z)^{|m|}``) and compressed; under the weighted measure
    with kernel ``(1 - z conj(w))^{-n}`` the radial moment ratio works out to
    ``beta_min(j,k) / beta_max(j,k)``, so no quadrature is needed.
    """
    if space.kind != DISK:
        raise ValueError("Toeplitz compressions are defined on the weighted disk spaces")
    cols = rows if cols is None else cols
    if isinstance(coeffs, Mapping):
        items = {int(m): complex(c) for m, c in coeffs.items()}
    else:
        arr = np.asarray(coeffs, dtype=complex)
        center = len(arr) // 2 if center is None else center
        items = {m - center: c for m, c in enumerate(arr) if c != 0}
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    d = j - k
    out = np.zeros((rows, cols), dtype=complex)
    lo, hi = -(cols - 1), rows - 1
    for m, c in items.items():
        if lo <= m <= hi:
            out[d == m] = c
    if space.n > 1:
        lb = log_basis_norms(space, max(rows, cols))
        out *= np.exp(-np.abs(lb[:rows][:, None] - lb[:cols][None, :]))
    return out


def toeplitz_boundary(space: SpaceSpec, coeffs) -> TruncatedOperator:
    N = space.trunc
    return TruncatedOperator(toeplitz_matrix(space, coeffs, N), space, "toeplitz")


def toeplitz_from_function(space: SpaceSpec, fun: Callable, rows: int, cols: int | None = None,
                           Q: int = 4096) -> np.ndarray:
    """Toeplitz block whose symbol is sampled on the circle and expanded by FFT."""
    cols = rows if cols is None else cols
    M = max(rows, cols)
    c = fourier_coefficients(fun, M, Q)
    return toeplitz_matrix(space, c, rows, cols, center=M)


def multiplication_l2(coeffs: Mapping[int, complex], M: int) -> np.ndarray:
    """Multiplication by a trigonometric polynomial on modes ``-M..M`` (a Laurent block)."""
    dim = 2 * M + 1
    j = np.arange(dim)[:, None]
    k = np.arange(dim)[None, :]
    out = np.zeros((dim, dim), dtype=complex)
    for m, c in coeffs.items():
        out[(j - k) == m] = c
    return out
