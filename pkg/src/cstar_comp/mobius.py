"""Disk automorphisms in SU(1,1) normal form.

A transform is stored as the pair ``(a, b)`` with ``|a|^2 - |b|^2 = 1`` and acts by

    z -> (a z + b) / (conj(b) z + conj(a)).

The pairs ``(a, b)`` and ``(-a, -b)`` give the same map, so equality is decided
by evaluating at fixed probe points rather than by comparing representatives.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

PARABOLIC_TOL = 1e-10
PROBE_POINTS = (0.0 + 0.0j, 0.5 + 0.0j, 0.0 + 0.5j)


@dataclass(frozen=True)
class MobiusTransform:
    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        det = abs(a) ** 2 - abs(b) ** 2
        if not det > 0:
            raise ValueError(f"not an SU(1,1) pair: |a|^2 - |b|^2 = {det}")
        # leave already-normalized pairs bit-identical so text round-trips are exact
        if abs(det - 1.0) > 4e-16:
            s = math.sqrt(det)
            a, b = a / s, b / s
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __call__(self, z):
        return evaluate(self, z)

    def __matmul__(self, other: MobiusTransform) -> MobiusTransform:
        return compose(self, other)

    @property
    def inv(self) -> MobiusTransform:
        return inverse(self)

    def preimage_of_zero(self) -> complex:
        """The point ``a`` with ``g(a) = 0``, i.e. ``g^{-1}(0)``."""
        return -self.b / self.a

    def image_of_zero(self) -> complex:
        return self.b / self.a.conjugate()

    def same_map(self, other: MobiusTransform, tol: float = 1e-12) -> bool:
        return all(abs(evaluate(self, p) - evaluate(other, p)) <= tol for p in PROBE_POINTS)

    def to_text(self) -> str:
        return " ".join(repr(float(x)) for x in (self.a.real, self.a.imag, self.b.real, self.b.imag))

    @classmethod
    def from_text(cls, line: str) -> MobiusTransform:
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"expected 'a_re a_im b_re b_im', got {line!r}")
        ar, ai, br, bi = (float(p) for p in parts)
        return cls(complex(ar, ai), complex(br, bi))


IDENTITY = MobiusTransform(1.0, 0.0)


def rotation(theta: float) -> MobiusTransform:
    """z -> e^{i theta} z."""
    return MobiusTransform(cmath.exp(0.5j * theta), 0.0)


def from_point(p: complex, theta: float = 0.0) -> MobiusTransform:
    """The automorphism z -> e^{i theta} (z + p) / (1 + conj(p) z), sending 0 to e^{i theta} p."""
    p = complex(p)
    if abs(p) >= 1:
        raise ValueError("point must lie in the open disk")
    s = 1.0 / math.sqrt(1 - abs(p) ** 2)
    u = cmath.exp(0.5j * theta)
    return MobiusTransform(u * s, u * s * p)


def _trusted(a: complex, b: complex) -> MobiusTransform:
    # products of normalized pairs have determinant 1 algebraically; recomputing
    # |a|^2 - |b|^2 cancels catastrophically for long words
    g = object.__new__(MobiusTransform)
    object.__setattr__(g, "a", complex(a))
    object.__setattr__(g, "b", complex(b))
    return g


def compose(g: MobiusTransform, h: MobiusTransform) -> MobiusTransform:
    """z -> g(h(z))."""
    a = g.a * h.a + g.b * h.b.conjugate()
    b = g.a * h.b + g.b * h.a.conjugate()
    return _trusted(a, b)


def inverse(g: MobiusTransform) -> MobiusTransform:
    return _trusted(g.a.conjugate(), -g.b)


def evaluate(g: MobiusTransform, z):
    """Apply ``g``; accepts a scalar or an array of points with ``|z| <= 1``."""
    return (g.a * z + g.b) / (g.b.conjugate() * z + g.a.conjugate())


def derivative(g: MobiusTransform, z):
    """g'(z) = 1 / (conj(b) z + conj(a))^2 in SU(1,1) normal form."""
    return 1.0 / (g.b.conjugate() * z + g.a.conjugate()) ** 2


def trace(g: MobiusTransform) -> float:
    return 2.0 * abs(g.a.real)


def classify(g: MobiusTransform) -> str:
    if g.same_map(IDENTITY):
        return "identity"
    t = trace(g)
    if abs(t - 2.0) <= PARABOLIC_TOL:
        return "parabolic"
    return "elliptic" if t < 2.0 else "hyperbolic"


def fixed_points(g: MobiusTransform) -> tuple[complex, ...]:
    """Roots of conj(b) z^2 + (conj(a) - a) z - b = 0 (unit-circle pair for hyperbolic g).

    For a hyperbolic transform the first point returned is the attracting one.
    """
    c2, c1, c0 = g.b.conjugate(), g.a.conjugate() - g.a, -g.b
    if abs(c2) < 1e-300:
        return (0j,)
    disc = cmath.sqrt(c1 * c1 - 4 * c2 * c0)
    roots = ((-c1 + disc) / (2 * c2), (-c1 - disc) / (2 * c2))
    return tuple(sorted(roots, key=lambda z: abs(derivative(g, z))))


def taylor_coefficients(g: MobiusTransform, degree: int) -> np.ndarray:
    """Taylor coefficients g_0 .. g_degree of g at the origin."""
    a, b = g.a, g.b
    r = -b.conjugate() / a.conjugate()
    k = np.arange(degree + 1)
    # (a z + b) / conj(a) * sum_k r^k z^k
    geo = r ** k / a.conjugate()
    out = b * geo
    out[1:] += a * geo[:-1]
    return out


def parse_transforms(lines: Iterable[str]) -> list[MobiusTransform]:
    out = []
    for i, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(MobiusTransform.from_text(line))
        except ValueError as exc:
            raise ValueError(f"line {i}: {exc}") from None
    return out
