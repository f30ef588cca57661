"""Generators for the concept classes studied in self-directed learning.

Every generator returns a :class:`~sdlab.core.ConceptClass` over a finite
point set.  Continuous-domain classes (thresholds, intervals, boxes,
halfspaces) are restricted to explicit finite grids or point sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import ConceptClass
from .linsep import affine, separator

MAX_POINTS = 64
MAX_CONCEPTS = 2_000_000


@dataclass(frozen=True)
class RationalPoint:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def _cls(rows, num_labels, name, points=None, labels=None):
    return ConceptClass.from_rows(rows, num_points=None if rows else 0, num_labels=num_labels,
                                  name=name, point_names=points, label_names=labels)


def singletons(n: int) -> ConceptClass:
    if n < 2:
        raise ValueError("singletons needs n >= 2")
    return ConceptClass(np.eye(n, dtype=np.int32), 2, name=f"singletons:{n}")


def thresholds(n: int) -> ConceptClass:
    """Concept ``a`` (0 <= a <= n) labels point ``j`` with 1 iff ``j < a``."""
    if n < 1:
        raise ValueError("thresholds needs n >= 1")
    a = np.arange(n + 1)[:, None]
    return ConceptClass((np.arange(n)[None, :] < a).astype(np.int32), 2, name=f"thresholds:{n}")


def _blocks(bits: Sequence[int]) -> int:
    return sum(1 for i, b in enumerate(bits) if b and (i == 0 or not bits[i - 1]))


def k_intervals(k: int, n: int) -> ConceptClass:
    """All labellings of ``n`` ordered points with at most ``k`` maximal runs of 1s."""
    if k < 1 or n < 2 * k:
        raise ValueError("k_intervals needs k >= 1 and n >= 2k")
    if n > 20:
        raise ValueError("k_intervals is capped at n <= 20")
    rows = [r for r in itertools.product((0, 1), repeat=n) if _blocks(r) <= k]
    rows.sort(key=lambda r: (sum(r), tuple(-v for v in r)))
    return _cls(rows, 2, f"k_intervals:{k}:{n}")


def grid_rectangles(d: int, n_per_dim: int, cap: int = MAX_POINTS) -> ConceptClass:
    """Dichotomies of the ``n_per_dim ** d`` grid cut out by axis-aligned boxes."""
    if d < 1 or n_per_dim < 2:
        raise ValueError("grid_rectangles needs d >= 1 and n_per_dim >= 2")
    if n_per_dim ** d > cap:
        raise ValueError(f"grid of {n_per_dim ** d} points exceeds cap {cap}")
    pts = np.array(list(itertools.product(range(n_per_dim), repeat=d)), dtype=np.int64)
    rows = {tuple([0] * len(pts))}
    spans = [(lo, hi) for lo in range(n_per_dim) for hi in range(lo, n_per_dim)]
    for box in itertools.product(spans, repeat=d):
        lo = np.array([b[0] for b in box])
        hi = np.array([b[1] for b in box])
        inside = np.all((pts >= lo) & (pts <= hi), axis=1)
        rows.add(tuple(inside.astype(int).tolist()))
    names = tuple("(" + ",".join(map(str, p)) + ")" for p in pts.tolist())
    return _cls(sorted(rows), 2, f"grid_rectangles:{d}:{n_per_dim}", points=names)


def bendavid(d: int, n: int, cap: int = MAX_POINTS) -> ConceptClass:
    """The 3x3 recursive block class with VC dimension ``d`` and ``3^n * 2^d`` concepts."""
    if d < 1 or n < 0:
        raise ValueError("bendavid needs d >= 1 and n >= 0")
    if 3 ** n * d > cap:
        raise ValueError(f"{3 ** n * d} points exceeds cap {cap}")
    H = np.array(list(itertools.product((0, 1), repeat=d)), dtype=np.int32)
    for _ in range(n):
        m, w = H.shape
        ones = np.ones((m, w), dtype=np.int32)
        zeros = np.zeros((m, w), dtype=np.int32)
        H = np.block([[H, ones, zeros],
                      [zeros, H, ones],
                      [ones, zeros, H]])
    return ConceptClass(H, 2, name=f"bendavid:{d}:{n}")


def perm_thresholds(n: int) -> ConceptClass:
    """Thresholds along every ordering of ``2^n`` points, the ordering encoded in the label.

    Label id ``2*i + b`` stands for (permutation ``i``, bit ``b``).  Concept
    ``(i, m)`` gives point ``k`` the bit ``[P_i(k) <= m]`` for ``m = 1..2^n``.
    """
    if n not in (2, 3):
        raise ValueError("perm_thresholds supports n in {2, 3}")
    N = 2 ** n
    perms = np.array(list(itertools.permutations(range(1, N + 1))), dtype=np.int32)
    P = len(perms)
    m = np.arange(1, N + 1, dtype=np.int32)
    bits = (perms[:, None, :] <= m[None, :, None]).astype(np.int32)  # P x N(m) x N(k)
    table = 2 * np.arange(P, dtype=np.int32)[:, None, None] + bits
    return ConceptClass(table.reshape(P * N, N), 2 * P, name=f"perm_thresholds:{n}")


def linear_separators(points: Sequence[RationalPoint], name: str = "linear_separators",
                      cap: int = 16) -> ConceptClass:
    """All dichotomies of ``points`` realised by an affine halfspace (decided exactly)."""
    if not 1 <= len(points) <= cap:
        raise ValueError(f"linear_separators needs 1..{cap} points")
    pts = [p.coords if isinstance(p, RationalPoint) else tuple(Fraction(c) for c in p)
           for p in points]
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points have inconsistent dimensions")
    n = len(pts)
    accepted = set()
    # depth-first over sign prefixes: a labelling is separable only if its
    # prefix is, and the prefix's witness settles one extension for free
    stack = [((0,), separator(pts[:1], (0,)))]
    while stack:
        signs, wb = stack.pop()
        if len(signs) == n:
            accepted.add(signs)
            accepted.add(tuple(1 - s for s in signs))
            continue
        x = pts[len(signs)]
        v = affine(wb, x)
        for s in (0, 1):
            ext = signs + (s,)
            if (s == 1 and v >= 1) or (s == 0 and v <= -1):
                stack.append((ext, wb))
            else:
                w2 = separator(pts[:len(ext)], ext)
                if w2 is not None:
                    stack.append((ext, w2))
    names = tuple("(" + ",".join(str(c) for c in p) + ")" for p in pts)
    return _cls(sorted(accepted), 2, name, points=names)


def octagon_config() -> list[RationalPoint]:
    """Star octagon: a unit diamond inside the square of side 6, in general position.

    Both rings are invariant under the symmetries of the square.  Points in
    convex position (see :func:`regular_octagon`) only reach a self-directed
    value of 3; the inner ring is what lifts this one to 4.
    """
    coords = [(1, 0), (3, 3), (0, 1), (-3, 3), (-1, 0), (-3, -3), (0, -1), (3, -3)]
    return [RationalPoint(c) for c in coords]


def regular_octagon() -> list[RationalPoint]:
    """Rational octagon in convex position: (+-1, 0), (0, +-1), (+-12/17, +-12/17)."""
    a = Fraction(12, 17)
    one = Fraction(1)
    coords = [(one, 0), (a, a), (0, one), (-a, a), (-one, 0), (-a, -a), (0, -one), (a, -a)]
    return [RationalPoint(c) for c in coords]


def embed_2d(copies: int) -> list[RationalPoint]:
    """``copies`` octagons on disjoint coordinate triples (x, y, 1) of R^(3*copies)."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    base = octagon_config()
    dim = 3 * copies
    out = []
    for c in range(copies):
        for p in base:
            v = [Fraction(0)] * dim
            v[3 * c], v[3 * c + 1], v[3 * c + 2] = p.coords[0], p.coords[1], Fraction(1)
            out.append(RationalPoint(tuple(v)))
    return out


def random_class(m: int, n: int, L: int, seed: int) -> ConceptClass:
    """Up to ``m`` distinct uniformly drawn concepts (fewer if ``L**n < m``)."""
    if m < 1 or n < 1 or L < 1:
        raise ValueError("random_class needs positive m, n, L")
    rng = np.random.default_rng(seed & (2 ** 64 - 1))
    target = min(m, L ** n)
    seen = {}
    while len(seen) < target:
        row = tuple(rng.integers(0, L, size=n).tolist())
        seen.setdefault(row, None)
    return ConceptClass.from_rows(list(seen), num_points=n, num_labels=max(L, 2),
                                  name=f"random:{m}:{n}:{L}:{seed}")


def vc1_tree_class(n: int, seed: int) -> ConceptClass:
    """Initial segments of a random forest order on ``n`` points, plus the empty concept."""
    if n < 1:
        raise ValueError("vc1_tree_class needs n >= 1")
    rng = np.random.default_rng(seed & (2 ** 64 - 1))
    parent = [-1] + [int(rng.integers(-1, i)) for i in range(1, n)]
    relabel = rng.permutation(n)
    rows = [[0] * n]
    for y in range(n):
        row = [0] * n
        v = y
        while v >= 0:
            row[relabel[v]] = 1
            v = parent[v]
        rows.append(row)
    return ConceptClass.from_rows(rows, num_points=n, num_labels=2, name=f"vc1_tree:{n}:{seed}")


# -- URIs ---------------------------------------------------------------------

def _ints(args, k, name):
    if len(args) != k:
        raise ValueError(f"zoo:{name} takes {k} integer parameter(s)")
    try:
        return [int(a) for a in args]
    except ValueError:
        raise ValueError(f"zoo:{name} parameters must be integers") from None


GENERATORS = {
    "singletons": (1, singletons),
    "thresholds": (1, thresholds),
    "k_intervals": (2, k_intervals),
    "grid_rectangles": (2, grid_rectangles),
    "rectangles": (2, grid_rectangles),
    "bendavid": (2, bendavid),
    "perm_thresholds": (1, perm_thresholds),
    "random": (4, random_class),
    "vc1_tree": (2, vc1_tree_class),
}


def from_uri(uri: str) -> ConceptClass:
    """Build a class from ``zoo:<name>:<param>:...``.

    Besides the generators in :data:`GENERATORS`, ``zoo:octagon`` and
    ``zoo:regular_octagon`` and ``zoo:embed:<copies>`` give halfspace classes
    on the built-in point sets.
    """
    parts = uri.split(":")
    if parts[0] != "zoo" or len(parts) < 2:
        raise ValueError(f"not a zoo URI: {uri!r}")
    name, args = parts[1], parts[2:]
    if name == "octagon":
        _ints(args, 0, name)
        return linear_separators(octagon_config(), name="octagon")
    if name == "regular_octagon":
        _ints(args, 0, name)
        return linear_separators(regular_octagon(), name="regular_octagon")
    if name == "embed":
        (c,) = _ints(args, 1, name)
        return linear_separators(embed_2d(c), name=f"embed:{c}")
    if name not in GENERATORS:
        raise ValueError(f"unknown zoo class {name!r}; known: "
                         + ", ".join(sorted(list(GENERATORS) + ["octagon", "regular_octagon", "embed"])))
    k, fn = GENERATORS[name]
    cls = fn(*_ints(args, k, name))
    object.__setattr__(cls, "name", uri[4:])
    return cls
