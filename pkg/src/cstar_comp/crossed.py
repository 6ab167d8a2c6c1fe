"""The algebraic crossed product of trigonometric polynomials by the Schottky group.

Elements are finite sums ``sum_g f_g [g]`` with ``f_g`` a trigonometric
polynomial and ``g`` a freely reduced word.  The action is
``(g . h)(z) = h(g^{-1}(z))``.  Composition with a Mobius map leaves the class
of trigonometric polynomials, so acted coefficients are re-expanded on a
Fourier band.  By default the band adapts until the dropped tail is at
rounding level; a fixed ``band`` truncates and warns with the tail mass.
"""

from __future__ import annotations

import functools
import math
import re
import warnings
from dataclasses import dataclass, field

import finufft
import numpy as np

from . import identities, kernels
from .fuchsian import FuchsianGroup, default_group, enumerate_words, invert_word
from .mobius import MobiusTransform, evaluate, inverse
from .rkhs import hardy

# relative floor for coefficients; FFT rounding sits near 1e-16
DROP = 1e-15
IDENTITY_WORD = "e"
# Horner below this many term evaluations, NUFFT above
NUFFT_WORK = 10_000_000
NUFFT_EPS = 1e-15


class CutoffWarning(UserWarning):
    pass


def reduce_word(word: str) -> str:
    out = []
    for c in word:
        if out and out[-1] == c.swapcase():
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def word_product(u: str, v: str) -> str:
    return reduce_word(u + v)


class TrigPoly:
    """``sum_m c_m z^m`` for ``m`` in ``low .. low + len(coeffs) - 1``."""

    __slots__ = ("low", "coeffs")

    def __init__(self, coeffs, low: int = 0):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        nz = np.nonzero(c)[0]
        if len(nz) == 0:
            self.low, self.coeffs = 0, np.zeros(0, dtype=complex)
        else:
            self.low = int(low + nz[0])
            self.coeffs = c[nz[0]:nz[-1] + 1].copy()

    @classmethod
    def from_dict(cls, d: dict) -> TrigPoly:
        if not d:
            return cls([])
        lo, hi = min(d), max(d)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for m, v in d.items():
            c[m - lo] += v
        return cls(c, lo)

    @classmethod
    def constant(cls, c=1.0) -> TrigPoly:
        return cls([c])

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def to_dict(self) -> dict:
        return {self.low + i: complex(c) for i, c in enumerate(self.coeffs) if c != 0}

    def __add__(self, other: TrigPoly) -> TrigPoly:
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        c = np.zeros(hi - lo + 1, dtype=complex)
        c[self.low - lo:self.high - lo + 1] += self.coeffs
        c[other.low - lo:other.high - lo + 1] += other.coeffs
        return TrigPoly(c, lo)

    def __neg__(self) -> TrigPoly:
        return TrigPoly(-self.coeffs, self.low)

    def __sub__(self, other: TrigPoly) -> TrigPoly:
        return self + (-other)

    def __mul__(self, other) -> TrigPoly:
        if not isinstance(other, TrigPoly):
            return TrigPoly(self.coeffs * other, self.low)
        if self.is_zero() or other.is_zero():
            return TrigPoly([])
        # exact discrete convolution, no quadrature in the unit sector
        return TrigPoly(np.convolve(self.coeffs, other.coeffs), self.low + other.low)

    __rmul__ = __mul__

    def conj(self) -> TrigPoly:
        """Boundary conjugate: ``conj(z^m) = z^{-m}``."""
        return TrigPoly(np.conj(self.coeffs[::-1]), -self.high)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero():
            return np.zeros_like(z)
        return kernels.horner(self.coeffs, z) * z ** self.low

    def on_circle(self, theta) -> np.ndarray:
        """Values at ``e^{i theta}``; large evaluations go through a type-2 NUFFT."""
        theta = np.asarray(theta, dtype=float)
        if self.is_zero():
            return np.zeros(theta.shape, dtype=complex)
        if len(self.coeffs) * theta.size < NUFFT_WORK:
            return self(np.exp(1j * theta))
        D = self.degree()
        c = np.zeros(2 * D + 1, dtype=complex)
        c[self.low + D:self.high + D + 1] = self.coeffs
        return finufft.nufft1d2(theta, c, eps=NUFFT_EPS, isign=1, nthreads=1)

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max()) if len(self.coeffs) else 0.0

    def distance(self, other: TrigPoly) -> float:
        return (self - other).max_abs()

    def degree(self) -> int:
        return 0 if self.is_zero() else max(abs(self.low), abs(self.high))


def _quad_points(poly: TrigPoly) -> int:
    # a starting size only; the Nyquist test in compose_boundary doubles it as needed
    return max(1024, 1 << int(math.ceil(math.log2(4 * (poly.degree() + 64)))))


def compose_boundary(poly: TrigPoly, g: MobiusTransform, band: int | None = None,
                     max_q: int = 1 << 22) -> tuple:
    """Fourier coefficients of ``poly o g`` on the circle and the dropped tail mass.

    With ``band=None`` the quadrature grows until the Nyquist region is empty
    and coefficients below ``DROP`` relative to the peak are dropped.
    """
    if poly.is_zero() or poly.degree() == 0:
        return poly, 0.0
    Q = _quad_points(poly)
    while True:
        z = np.exp(2j * np.pi * np.arange(Q) / Q)
        F = np.fft.fft(poly.on_circle(np.angle(evaluate(g, z)))) / Q
        peak = np.abs(F).max()
        if np.abs(F[3 * Q // 8:5 * Q // 8]).max() <= DROP * peak or Q >= max_q:
            break
        Q *= 2
    F = np.fft.fftshift(F)
    m = np.arange(Q) - Q // 2
    keep = np.abs(F) > DROP * peak
    if band is not None:
        keep &= np.abs(m) <= band
    tail = float(np.sqrt(np.sum(np.abs(F[~keep]) ** 2)))
    idx = np.nonzero(keep)[0]
    out = TrigPoly(F[idx[0]:idx[-1] + 1] * keep[idx[0]:idx[-1] + 1], int(m[idx[0]]))
    if band is not None and tail > DROP * peak * math.sqrt(Q):
        warnings.warn(f"composed coefficients exceed band {band}; tail mass {tail:.3e}", CutoffWarning)
    return out, tail


@functools.lru_cache(maxsize=2048)
def _compose_cached(a, b, low, raw, band):
    poly = TrigPoly(np.frombuffer(raw, dtype=complex), low)
    return compose_boundary(poly, MobiusTransform(a, b), band)


@dataclass
class CrossedElement:
    terms: dict = field(default_factory=dict)
    group: FuchsianGroup = field(default_factory=default_group)
    band: int | None = None
    tail: float = 0.0

    def __post_init__(self):
        clean = {}
        for w, p in self.terms.items():
            w = "" if w == IDENTITY_WORD else reduce_word(w)
            if not isinstance(p, TrigPoly):
                p = TrigPoly.from_dict(p) if isinstance(p, dict) else TrigPoly.constant(p)
            if not p.is_zero():
                clean[w] = clean[w] + p if w in clean else p
        self.terms = clean

    def _new(self, terms, tail=0.0) -> CrossedElement:
        return CrossedElement(terms, self.group, self.band, self.tail + tail)

    def act(self, word: str, poly: TrigPoly) -> tuple:
        """``word . poly = poly o word^{-1}``."""
        if word == "":
            return poly, 0.0
        g = self.group.word_map(invert_word(word))
        return _compose_cached(g.a, g.b, poly.low, poly.coeffs.tobytes(), self.band)

    def __add__(self, other: CrossedElement) -> CrossedElement:
        terms = dict(self.terms)
        for w, p in other.terms.items():
            terms[w] = terms[w] + p if w in terms else p
        return CrossedElement(terms, self.group, self.band, self.tail + other.tail)

    def __sub__(self, other: CrossedElement) -> CrossedElement:
        return self + other.scale(-1.0)

    def scale(self, c) -> CrossedElement:
        return self._new({w: p * c for w, p in self.terms.items()})

    def __mul__(self, other: CrossedElement) -> CrossedElement:
        return cp_multiply(self, other)

    def star(self) -> CrossedElement:
        return cp_star(self)

    def distance(self, other: CrossedElement) -> float:
        d = self - other
        return max((p.max_abs() for p in d.terms.values()), default=0.0)

    def max_word_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def to_text(self) -> str:
        lines = []
        for w in sorted(self.terms, key=lambda s: (len(s), s)):
            for m, c in sorted(self.terms[w].to_dict().items()):
                lines.append(f"{w or IDENTITY_WORD} : {m} -> {float(c.real)!r} {float(c.imag)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, group: FuchsianGroup | None = None) -> CrossedElement:
        group = group or default_group()
        letters = set(group.letters())
        terms = {}
        pat = re.compile(r"^\s*(\S+)\s*:\s*(-?\d+)\s*(?:->|→)\s*(\S+)\s+(\S+)\s*$")
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            mt = pat.match(line)
            if not mt:
                raise ValueError(f"line {lineno}: expected 'word : m -> c_re c_im', got {line!r}")
            w, m, re_, im_ = mt.groups()
            if w != IDENTITY_WORD and not set(w) <= letters:
                raise ValueError(f"line {lineno}: unknown letter in word {w!r}")
            w = "" if w == IDENTITY_WORD else w
            terms.setdefault(w, {})
            terms[w][int(m)] = terms[w].get(int(m), 0) + complex(float(re_), float(im_))
        return cls(terms, group)


def cp_multiply(x: CrossedElement, y: CrossedElement) -> CrossedElement:
    """``sum f_g (g . f'_h) [gh]``."""
    out, tail = {}, 0.0
    for g, f in x.terms.items():
        for h, fp in y.terms.items():
            moved, t = x.act(g, fp)
            tail += t
            w = word_product(g, h)
            term = f * moved
            out[w] = out[w] + term if w in out else term
    return CrossedElement(out, x.group, x.band, x.tail + y.tail + tail)


def cp_star(x: CrossedElement) -> CrossedElement:
    """``x^* = sum_g (g . conj(f_{g^{-1}})) [g]``."""
    out, tail = {}, 0.0
    for g, f in x.terms.items():
        gi = invert_word(g)
        moved, t = x.act(gi, f.conj())
        tail += t
        out[gi] = moved
    return x._new(out, tail)


def unit(group: FuchsianGroup | None = None) -> CrossedElement:
    return CrossedElement({"": 1.0}, group or default_group())


def random_element(rng: np.random.Generator, group: FuchsianGroup | None = None, terms: int = 3,
                   degree: int = 4, max_len: int = 2) -> CrossedElement:
    group = group or default_group()
    words = [""] + [w for w, _ in enumerate_words(group, max_len)]
    out = {}
    for _ in range(terms):
        w = words[int(rng.integers(len(words)))]
        d = int(rng.integers(0, degree + 1))
        c = rng.normal(size=2 * d + 1) + 1j * rng.normal(size=2 * d + 1)
        out[w] = TrigPoly(c, -d)
    return CrossedElement(out, group)


def algebra_axiom_gaps(x: CrossedElement, y: CrossedElement, z: CrossedElement) -> dict:
    """Relative coefficient gaps for the *-algebra identities."""
    def rel(a, b):
        scale = max(1.0, max((p.max_abs() for p in b.terms.values()), default=0.0))
        return a.distance(b) / scale
    xy = x * y
    return {"star_of_product": rel(xy.star(), y.star() * x.star()),
            "associativity": rel(xy * z, x * (y * z)),
            "distributivity": rel(x * (y + z), x * y + x * z),
            "double_star": rel(x.star().star(), x),
            "unit": rel(unit(x.group) * x, x)}


# regular representation -----------------------------------------------------------

def word_ball(group: FuchsianGroup, R: int) -> list:
    return [""] + ([w for w, _ in enumerate_words(group, R)] if R > 0 else [])


def _laurent_block(coeffs: np.ndarray, M: int) -> np.ndarray:
    """Laurent block on modes ``-M..M`` from coefficients ``c_{-2M}..c_{2M}``."""
    j = np.arange(2 * M + 1)[:, None]
    k = np.arange(2 * M + 1)[None, :]
    return coeffs[(j - k) + 2 * M]


def _boundary_coefficients(fun, M: int, Q: int = 4096) -> np.ndarray:
    from .rkhs import fourier_coefficients
    return fourier_coefficients(fun, 2 * M, Q)


@dataclass
class RegularRep:
    """Block-sparse matrix on ``(word ball) x (modes -M..M)``: ``blocks[(row, col)]``."""
    words: list
    M: int
    blocks: dict
    truncated: bool = False

    def dense(self) -> np.ndarray:
        d = 2 * self.M + 1
        pos = {w: i for i, w in enumerate(self.words)}
        out = np.zeros((len(self.words) * d, len(self.words) * d), dtype=complex)
        for (r, c), B in self.blocks.items():
            out[pos[r] * d:(pos[r] + 1) * d, pos[c] * d:(pos[c] + 1) * d] += B
        return out

    def __matmul__(self, other: RegularRep) -> RegularRep:
        out = {}
        by_row = {}
        for (r, c), B in other.blocks.items():
            by_row.setdefault(r, []).append((c, B))
        for (r, m), A in self.blocks.items():
            for c, B in by_row.get(m, []):
                out[(r, c)] = out[(r, c)] + A @ B if (r, c) in out else A @ B
        return RegularRep(self.words, self.M, out, self.truncated or other.truncated)

    def adjoint(self) -> RegularRep:
        return RegularRep(self.words, self.M, {(c, r): B.conj().T for (r, c), B in self.blocks.items()},
                          self.truncated)

    def restricted_gap(self, other: RegularRep, cols, modes: int) -> float:
        """Largest entry of the difference on columns ``cols`` and modes ``|m| <= modes``."""
        sl = slice(self.M - modes, self.M + modes + 1)
        cols = set(cols)
        keys = {k for k in set(self.blocks) | set(other.blocks) if k[1] in cols}
        z = np.zeros((2 * self.M + 1,) * 2, dtype=complex)
        return max((float(np.abs((self.blocks.get(k, z) - other.blocks.get(k, z))[sl, sl]).max())
                    for k in keys), default=0.0)


def regular_representation(x: CrossedElement, R: int = 3, M: int = 64) -> RegularRep:
    """``sigma(x) = sum pi~(f_g) U(g)`` with ``U(g) e_h = e_{gh}`` and ``pi~(f)`` acting by ``M_{f o h}`` at word ``h``.

    Translates leaving the ball are dropped and ``truncated`` is set; nothing
    wraps around.
    """
    words = word_ball(x.group, R)
    inball = set(words)
    maps = {w: x.group.word_map(w) for w in words}
    blocks, truncated = {}, False
    for g, f in x.terms.items():
        for h in words:
            t = word_product(g, h)
            if t not in inball:
                truncated = True
                continue
            c = _boundary_coefficients(lambda z, f=f, t=t: f(evaluate(maps[t], z)), M)
            B = _laurent_block(c, M)
            blocks[(t, h)] = blocks[(t, h)] + B if (t, h) in blocks else B
    return RegularRep(words, M, blocks, truncated)


def interior_words(words, radius: int) -> list:
    return [w for w in words if len(w) <= radius]


def representation_checks(x: CrossedElement, y: CrossedElement, R: int = 3, M: int = 64,
                          modes: int | None = None) -> dict:
    """Gaps of ``sigma(xy) - sigma(x) sigma(y)`` and ``sigma(x^*) - sigma(x)^*`` away from the ball edge.

    Columns are limited to words whose translates by ``x`` and ``y`` stay in
    the ball, and modes to ``|m| <= modes`` (default ``M/2``).
    """
    modes = M // 2 if modes is None else modes
    sx, sy = regular_representation(x, R, M), regular_representation(y, R, M)
    sxy = regular_representation(x * y, R, M)
    sxs = regular_representation(x.star(), R, M)
    lx, ly = x.max_word_length(), y.max_word_length()
    cols_mul = interior_words(sx.words, R - lx - ly)
    cols_star = interior_words(sx.words, R - lx)
    return {"homomorphism": sxy.restricted_gap(sx @ sy, cols_mul, modes),
            "involution": sxs.restricted_gap(sx.adjoint(), cols_star, modes),
            "interior_columns": len(cols_mul), "truncated": sx.truncated}


def translation_isometry_gap(word: str = "a", R: int = 2, M: int = 8) -> float:
    """``sigma([g])^* sigma([g]) = I`` on the sub-ball of radius ``R - |g|``."""
    s = regular_representation(CrossedElement({word: 1.0}), R, M)
    P = s.adjoint() @ s
    cols = interior_words(s.words, R - len(word))
    eye = np.eye(2 * M + 1)
    gap = 0.0
    for c in cols:
        for r in s.words:
            B = P.blocks.get((r, c), np.zeros_like(eye))
            gap = max(gap, float(np.abs(B - (eye if r == c else 0)).max()))
    return gap


def norm_lower_bounds(x: CrossedElement, Rs=(1, 2, 3), M: int = 16) -> list:
    """``||sigma(x)||`` on growing balls; a monotone sequence of lower bounds for the reduced norm."""
    return [(R, float(np.linalg.norm(regular_representation(x, R, M).dense(), 2))) for R in Rs]


def covariance_in_quotient(g: MobiusTransform, f: dict, Ns=identities.SWEEP, K: int = identities.WINDOW):
    """``U_{g^{-1}} T_f U_{g^{-1}}^* - T_{f o g^{-1}}`` on H^2, as a band-decay check."""
    chk = identities.check_covariance(hardy(), inverse(g), f, Ns, K)
    chk.name = "covariance_in_quotient"
    return chk
