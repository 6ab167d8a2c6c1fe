"""Finitely generated Fuchsian groups: reduced words, orbits and limit-set samples."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .mobius import IDENTITY, MobiusTransform, classify, compose, inverse

WORD_CAP = 10 ** 6
CLUSTER_GAP = 0.05
SEPARATION = 1e-2


class BudgetError(RuntimeError):
    pass


class InsufficientSeparationError(ValueError):
    pass


def invert_word(word: str) -> str:
    """Inverse of a word; inverse letters are upper case (``a`` and ``A``)."""
    return word[::-1].swapcase()


@dataclass
class FuchsianGroup:
    generators: list
    labels: list = None

    def __post_init__(self):
        if not self.generators:
            raise ValueError("at least one generator is required")
        for g in self.generators:
            if g.same_map(IDENTITY):
                raise ValueError("identity is not allowed as a generator")
        if self.labels is None:
            self.labels = [chr(ord("a") + i) for i in range(len(self.generators))]
        if len(self.labels) != len(self.generators) or any(not (l.isalpha() and l.islower()) for l in self.labels):
            raise ValueError("labels must be distinct lower-case letters, one per generator")

    def letters(self) -> dict:
        """Letter -> transform, including inverse letters in upper case."""
        out = {}
        for l, g in zip(self.labels, self.generators):
            out[l] = g
            out[l.upper()] = inverse(g)
        return out

    def word_map(self, word: str) -> MobiusTransform:
        """The transform of a word; the leftmost letter acts last."""
        lets = self.letters()
        out = IDENTITY
        for c in word:
            out = compose(out, lets[c])
        return out


def default_group() -> FuchsianGroup:
    """The Schottky pair (sqrt2 z + 1)/(z + sqrt2), (sqrt2 z + i)/(-i z + sqrt2)."""
    s = math.sqrt(2.0)
    return FuchsianGroup([MobiusTransform(s, 1.0), MobiusTransform(s, 1j)], ["a", "b"])


def enumerate_words(G: FuchsianGroup, max_len: int, cap: int = WORD_CAP, dedupe: bool = True):
    """All freely reduced words of length 1..max_len with their transforms.

    Words are produced in order of length, then lexicographically in the
    letter order ``a A b B ...``.  Words whose map coincides with an earlier
    one (relations in a non-free group) are dropped when ``dedupe`` is set.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    lets = G.letters()
    order = [c for l in G.labels for c in (l, l.upper())]
    out = []
    seen = {}
    frontier = [("", IDENTITY)]
    for _ in range(max_len):
        nxt = []
        for w, g in frontier:
            for c in order:
                if w and w[-1] == c.swapcase():
                    continue
                h = compose(g, lets[c])
                nxt.append((w + c, h))
                if len(out) + len(nxt) > cap:
                    raise BudgetError(f"word count exceeds cap {cap}")
        for w, h in nxt:
            if dedupe:
                key = _map_key(h)
                if key in seen or h.same_map(IDENTITY):
                    continue
                seen[key] = w
            out.append((w, h))
        frontier = nxt
    return out


def _map_key(g: MobiusTransform):
    # a and -a give the same map; fix the sign so the key is canonical
    a, b = g.a, g.b
    if a.real < 0 or (a.real == 0 and a.imag < 0):
        a, b = -a, -b
    return (round(a.real, 9), round(a.imag, 9), round(b.real, 9), round(b.imag, 9))


@dataclass
class LimitSetSample:
    points: list
    word_length: int
    base_point: complex = 0j
    moduli: list = field(default_factory=list)
    words: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def angles(self) -> np.ndarray:
        return np.mod(np.angle(np.asarray(self.points, dtype=complex)), 2 * np.pi)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["angle", "modulus", "word"])
        for ang, r, word in sorted(zip(self.angles(), self.moduli, self.words)):
            w.writerow([repr(float(ang)), repr(float(r)), word])
        return buf.getvalue()


def orbit(G: FuchsianGroup, max_len: int, base_point: complex = 0j):
    """(word, transform, image of base point) for all reduced words."""
    return [(w, g, complex(g(base_point))) for w, g in enumerate_words(G, max_len)]


def limit_set_sample(G: FuchsianGroup, max_len: int, radius_floor: float = 0.99,
                     base_point: complex = 0j) -> LimitSetSample:
    """Orbit points with modulus at least ``radius_floor``, pushed radially to the circle."""
    if not 0 < radius_floor < 1:
        raise ValueError("radius_floor must lie in (0, 1)")
    pts, mods, words = [], [], []
    for w, _, z in orbit(G, max_len, base_point):
        r = abs(z)
        if r >= radius_floor:
            pts.append(z / r)
            mods.append(r)
            words.append(w)
    return LimitSetSample(pts, max_len, base_point, mods, words)


def clusters(sample: LimitSetSample, gap: float = CLUSTER_GAP) -> list:
    """Group sample angles into clusters split at circular gaps larger than ``gap``.

    Returns a list of arrays of angles, each cluster sorted.
    """
    ang = np.sort(sample.angles())
    if len(ang) == 0:
        return []
    diffs = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    cuts = np.nonzero(diffs > gap)[0]
    if len(cuts) == 0:
        return [ang]
    # rotate so that a cluster starts right after the first cut
    start = cuts[0] + 1
    rolled = np.concatenate([ang[start:], ang[:start] + 2 * np.pi])
    d = np.diff(rolled)
    groups = np.split(rolled, np.nonzero(d > gap)[0] + 1)
    return [np.mod(g, 2 * np.pi) for g in groups]


def cluster_centers(sample: LimitSetSample, gap: float = CLUSTER_GAP) -> np.ndarray:
    """Circular mean direction of each cluster, as unimodular complex numbers."""
    out = []
    for c in clusters(sample, gap):
        m = np.exp(1j * c).mean()
        out.append(m / abs(m))
    return np.array(out)


def angular_distance(z, w) -> float:
    return float(abs(np.angle(z * np.conj(w))))


def hausdorff_angular(A, B) -> float:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if len(A) == 0 or len(B) == 0:
        return math.inf
    D = np.abs(np.angle(A[:, None] * np.conj(B[None, :])))
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def pick_distinct_limit_points(sample: LimitSetSample, m: int, sep: float = SEPARATION, skip=(),
                               first: str = "outer") -> list:
    """Greedy farthest-point choice of ``m`` sample points with angular separation > ``sep``.

    The first point is the one of largest orbit modulus (``first="inner"``:
    smallest).  ``skip`` lists
    indices to leave out, which lets callers retry with a different set.
    """
    if m < 1:
        raise ValueError("m must be positive")
    pts = np.asarray(sample.points, dtype=complex)
    idx = [i for i in range(len(pts)) if i not in set(skip)]
    if not idx:
        raise InsufficientSeparationError("empty limit-set sample")
    mods = np.asarray(sample.moduli) if len(sample.moduli) == len(pts) else np.ones(len(pts))
    sign = 1.0 if first == "outer" else -1.0
    chosen = [max(idx, key=lambda i: (sign * mods[i], -i))]
    while len(chosen) < m:
        best, best_d = None, -1.0
        for i in idx:
            if i in chosen:
                continue
            d = min(angular_distance(pts[i], pts[j]) for j in chosen)
            if d > best_d:
                best, best_d = i, d
        if best is None or best_d <= sep:
            raise InsufficientSeparationError(f"only {len(chosen)} points with separation > {sep}")
        chosen.append(best)
    return [complex(pts[i]) for i in chosen]


def isometric_circle(g: MobiusTransform):
    """Center and radius of ``|conj(b) z + conj(a)| = 1``."""
    if abs(g.b) < 1e-15:
        return None
    return -g.a.conjugate() / g.b.conjugate(), 1.0 / abs(g.b)


def pingpong_check(G: FuchsianGroup, tol: float = 1e-12) -> bool:
    """Isometric circles of all generators and inverses bound disjoint open disks.

    Tangency is allowed (within ``tol``); the default pair is tangent at four
    points and ping-pong still applies with the open disks.
    """
    circles = []
    for g in G.generators:
        if classify(g) != "hyperbolic":
            return False
        for h in (g, inverse(g)):
            c = isometric_circle(h)
            if c is None:
                return False
            circles.append(c)
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            (c1, r1), (c2, r2) = circles[i], circles[j]
            if abs(c1 - c2) < r1 + r2 - tol:
                return False
    return True
