"""Certified isomorphisms between concept tables with a fixed column correspondence.

Two tables are isomorphic here when some bijection of their rows maps every
column's partition of the rows (rows grouped by label) onto the same
column's partition in the other table.  Candidates come from colour
refinement plus individualization; every candidate is checked exactly, so a
returned mapping is always a genuine isomorphism.  ``None`` means that no
mapping was found within the attempt limit, not that none exists.
"""

from __future__ import annotations

import numpy as np

def _hash_colors(colors: np.ndarray, salt: int) -> np.ndarray:
    """Pseudo-random 64-bit image of each colour (splitmix64)."""
    with np.errstate(over="ignore"):
        z = colors.astype(np.uint64) + np.uint64(salt) * np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def _compact_labels(table: np.ndarray) -> np.ndarray:
    out = np.empty_like(table)
    for j in range(table.shape[1]):
        out[:, j] = np.unique(table[:, j], return_inverse=True)[1].ravel()
    return out


def _refine(A: np.ndarray, B: np.ndarray, colors: np.ndarray) -> np.ndarray:
    """Colour refinement on both tables at once (rows of A first, then B)."""
    m = A.shape[0]
    n = A.shape[1]
    ncolors = len(np.unique(colors))
    rnd = 0
    while True:
        rnd += 1
        h = _hash_colors(colors, rnd)
        # a collision only merges colours; the final exact check keeps results sound
        with np.errstate(over="ignore"):
            key = colors.astype(np.uint64) * np.uint64(0x9E3779B97F4A7C15)
            for j in range(n):
                parts = []
                for T, rows in ((A, slice(0, m)), (B, slice(m, 2 * m))):
                    lab = T[:, j]
                    sums = np.zeros(lab.max() + 1, dtype=np.uint64)
                    np.add.at(sums, lab, h[rows])
                    parts.append(sums[lab])
                key = _hash_colors(key ^ np.concatenate(parts), j + 1)
        colors = np.unique(key, return_inverse=True)[1].ravel()
        k = int(colors.max()) + 1
        if k == ncolors:
            return colors
        ncolors = k


def _is_iso(A: np.ndarray, B: np.ndarray, perm: np.ndarray) -> bool:
    """Does row ``i`` of A -> row ``perm[i]`` of B preserve every column partition?"""
    Bp = B[perm]
    for j in range(A.shape[1]):
        # the label pairs (A, B) must form a bijection between the two alphabets
        pairs = np.unique(np.stack([A[:, j], Bp[:, j]], axis=1), axis=0)
        if len(np.unique(pairs[:, 0])) != len(pairs) or len(np.unique(pairs[:, 1])) != len(pairs):
            return False
    return True


def _histograms_match(colors: np.ndarray, m: int) -> bool:
    k = colors.max() + 1
    return np.array_equal(np.bincount(colors[:m], minlength=k), np.bincount(colors[m:], minlength=k))


def _perm_from(colors: np.ndarray, m: int) -> np.ndarray:
    perm = np.empty(m, dtype=np.int64)
    perm[np.argsort(colors[:m], kind="stable")] = np.argsort(colors[m:], kind="stable")
    return perm


def find_isomorphism(A: np.ndarray, B: np.ndarray, max_tries: int = 8) -> np.ndarray | None:
    """Row bijection (``perm[i]`` = image of row ``i``) between ``A`` and ``B``, or None.

    When refinement stalls, first every non-trivial colour class is
    individualized at once (one row per side per class), which settles
    tables with many independent symmetric pairs in a few rounds.  If that
    guess fails the exact check, a depth-first search individualizes one
    row at a time with at most ``max_tries`` alternative choices.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        return None
    m = A.shape[0]
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    A = _compact_labels(A)
    B = _compact_labels(B)
    start = _refine(A, B, np.zeros(2 * m, dtype=np.int64))
    if not _histograms_match(start, m):
        return None

    colors = start
    while True:
        counts = np.bincount(colors[:m])
        if counts.max() == 1:
            perm = _perm_from(colors, m)
            if _is_iso(A, B, perm):
                return perm
            break
        c2 = colors.copy()
        targets = np.flatnonzero(counts > 1)
        first_a = np.unique(colors[:m], return_index=True)[1]  # indexed by colour
        first_b = np.unique(colors[m:], return_index=True)[1]
        fresh = colors.max() + 1 + np.arange(len(targets))
        c2[first_a[targets]] = fresh
        c2[m + first_b[targets]] = fresh
        colors = _refine(A, B, c2)
        if not _histograms_match(colors, m):
            break

    tries = [0]

    def search(colors):
        if not _histograms_match(colors, m):
            return None
        counts = np.bincount(colors[:m])
        if counts.max() == 1:
            perm = _perm_from(colors, m)
            return perm if _is_iso(A, B, perm) else None
        target = int(np.flatnonzero(counts == counts[counts > 1].min())[0])
        a = int(np.flatnonzero(colors[:m] == target)[0])
        for i, b in enumerate(np.flatnonzero(colors[m:] == target)):
            if i:
                if tries[0] >= max_tries:
                    return None
                tries[0] += 1
            c2 = colors.copy()
            fresh = colors.max() + 1
            c2[a] = fresh
            c2[m + b] = fresh
            found = search(_refine(A, B, c2))
            if found is not None:
                return found
        return None

    if m > 64:
        return None  # one-at-a-time search is only affordable on small tables
    return search(start)


def swap_is_automorphism(table: np.ndarray, a: int, b: int) -> bool:
    """Certified: exchanging columns ``a`` and ``b`` maps the class onto itself."""
    cols = list(range(table.shape[1]))
    cols[a], cols[b] = cols[b], cols[a]
    return find_isomorphism(table, table[:, cols]) is not None
