"""Slow reference implementations written directly from the definitions.

They share no code with the package: concepts are plain tuples, version
spaces are frozensets, and every game is searched exhaustively.
"""

from functools import lru_cache
from itertools import combinations, permutations, product


def rows_of(cls):
    return frozenset(tuple(int(v) for v in r) for r in cls.table.tolist())


def sd_value(rows, points, L):
    """Self-directed mistake bound: learner picks point and prediction, adversary answers."""

    @lru_cache(maxsize=None)
    def M(H, S):
        if not H:
            return -1
        if not S:
            return 0
        best = None
        for x in S:
            rest = S - {x}
            answers = {h[x] for h in H}
            for y in range(L):
                worst = max(int(a != y) + M(frozenset(h for h in H if h[x] == a), rest)
                            for a in answers)
                best = worst if best is None else min(best, worst)
        return best

    return M(frozenset(rows), frozenset(points))


def online_value(rows, points):
    """Adversary picks each point and its label; no point is asked twice."""

    @lru_cache(maxsize=None)
    def M(H, S):
        if not H or not S:
            return 0 if H else -1
        best = 0
        for x in S:
            rest = S - {x}
            kids = {}
            for h in H:
                kids.setdefault(h[x], set()).add(h)
            # learner predicts the label whose branch is worst for the adversary
            vals = sorted((M(frozenset(k), rest) for k in kids.values()), reverse=True)
            v = vals[0] if len(vals) == 1 else max(vals[0], vals[1] + 1)
            best = max(best, v)
        return best

    return M(frozenset(rows), frozenset(points))


def fixed_value(rows, order):
    @lru_cache(maxsize=None)
    def M(H, i):
        if not H:
            return -1
        if i == len(order):
            return 0
        x = order[i]
        kids = {}
        for h in H:
            kids.setdefault(h[x], set()).add(h)
        vals = sorted((M(frozenset(k), i + 1) for k in kids.values()), reverse=True)
        return vals[0] if len(vals) == 1 else max(vals[0], vals[1] + 1)

    return M(frozenset(rows), 0)


def best_order(rows, points):
    return min(fixed_value(rows, p) for p in permutations(points)) if points else (0 if rows else -1)


def worst_order(rows, points):
    return max(fixed_value(rows, p) for p in permutations(points)) if points else (0 if rows else -1)


def subsets(n):
    for k in range(n + 1):
        yield from combinations(range(n), k)


def class_max(fn, rows, n):
    if not rows:
        return -1
    return max(fn(rows, S) for S in subsets(n))


def vc(rows, n):
    best = 0
    for S in subsets(n):
        if len({tuple(h[x] for x in S) for h in rows}) == 2 ** len(S):
            best = max(best, len(S))
    return best


def teaching_dim(rows, n):
    rows = list(rows)
    if len(rows) <= 1:
        return 0
    worst = 0
    for h in rows:
        others = [g for g in rows if g != h]
        for k in range(n + 1):
            if any(all(any(g[x] != h[x] for x in T) for g in others)
                   for T in combinations(range(n), k)):
                worst = max(worst, k)
                break
    return worst


def game_value(rows, points, L, multiclass=False):
    """Labelling game straight from its rules; A extends, B shortens."""
    rows = frozenset(rows)

    def realizable(lab):
        return any(all(h[x] == y for x, y in lab) for h in rows)

    @lru_cache(maxsize=None)
    def A(lab, S):
        if not S:
            return 0 if realizable(lab) else -1
        best = None
        for k in range(len(S) + 1):
            for C in combinations(sorted(S), k):
                for ys in product(range(L), repeat=k):
                    lab2 = tuple(sorted(lab + tuple(zip(C, ys))))
                    rest = S - set(C)
                    if not rest:
                        v = 0 if realizable(lab2) else -1
                    elif multiclass:
                        pairs = list(combinations(range(L), 2))
                        v = max(B(lab2, rest, d) for d in product(pairs, repeat=len(rest)))
                    else:
                        v = B(lab2, rest, None)
                    best = v if best is None else max(best, v)
        return best

    @lru_cache(maxsize=None)
    def B(lab, S, des):
        order = sorted(S)
        vals = []
        for i, x in enumerate(order):
            for y in (des[i] if des is not None else range(L)):
                lab2 = tuple(sorted(lab + ((x, y),)))
                rest = S - {x}
                # an unrealizable labelling can never recover
                v = -1 if not realizable(lab2) else 1 + A(lab2, frozenset(rest))
                vals.append(v)
        return min(vals)

    return A((), frozenset(points))
