"""Exhaustive labelling-game solver, kept independent of the search kernel.

Each round player A labels any subset ``C`` of the remaining points (with a
labelling that some surviving concept agrees with) and player B then labels
one remaining point.  In the multi-class variant A also offers B a pair of
labels per remaining point.  The payout is the number of completed rounds,
or -1 if the final labelling contradicts every concept.  The game tree is
enumerated exhaustively, so the solver is capped to tiny instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import ActiveSet, ConceptClass, VersionSpace, _indices

MAX_POINTS = 4
MAX_CONCEPTS = 16
MAX_LABELS = 3


@dataclass(frozen=True)
class AdversaryMove:
    assignment: tuple[tuple[int, int], ...]  # (point, label) pairs labelled by A
    designation: tuple[tuple[int, tuple[int, int]], ...] | None = None  # multi-class only


def check_caps(cls: ConceptClass, vs: VersionSpace, active: ActiveSet) -> None:
    if len(active) > MAX_POINTS:
        raise ValueError(f"labelling-game oracle is capped at {MAX_POINTS} points (got {len(active)})")
    if len(vs) > MAX_CONCEPTS:
        raise ValueError(f"labelling-game oracle is capped at {MAX_CONCEPTS} concepts (got {len(vs)})")
    if cls.num_labels > MAX_LABELS:
        raise ValueError(f"labelling-game oracle is capped at {MAX_LABELS} labels "
                         f"(got {cls.num_labels})")


def _submasks(s: int):
    """Submasks of ``s`` by increasing popcount, then increasing value."""
    subs = []
    sub = s
    while True:
        subs.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & s
    subs.sort(key=lambda b: (bin(b).count("1"), b))
    return subs


class LabellingGame:
    """Minimax values and optimal moves of the labelling game on one class."""

    def __init__(self, cls: ConceptClass, multiclass: bool = False):
        self.cls = cls
        self.multiclass = multiclass
        self._memo: dict[tuple[int, int], int] = {}
        self._pairs = list(itertools.combinations(range(cls.num_labels), 2))

    # -- players' options ---------------------------------------------------

    def adversary_labellings(self, vs: int, s: int):
        """Distinct realizable labellings A may play: ``(C, assignment, vs_after)``."""
        rows = _indices(vs)
        T = self.cls.table
        for C in _submasks(s):
            pts = _indices(C)
            seen = {}
            for r in rows:
                key = tuple(int(T[r, p]) for p in pts)
                seen[key] = seen.get(key, 0) | (1 << r)
            for key in sorted(seen):
                yield C, tuple(zip(pts, key)), seen[key]

    def designations(self, s: int):
        pts = _indices(s)
        for combo in itertools.product(self._pairs, repeat=len(pts)):
            yield tuple(zip(pts, combo))

    def learner_moves(self, s: int, designation=None):
        if designation is None:
            return [(x, y) for x in _indices(s) for y in range(self.cls.num_labels)]
        return [(x, y) for x, pair in designation for y in pair]

    # -- values ---------------------------------------------------------------

    def value(self, vs: int, s: int) -> int:
        if vs == 0:
            return -1
        if s == 0:
            return 0
        key = (vs, s)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        best = -1
        for C, _, v in self.adversary_labellings(vs, s):
            best = max(best, self.after_adversary(v, s & ~C))
        self._memo[key] = best
        return best

    def after_adversary(self, vs: int, s: int, designation=None) -> int:
        """Value once A has labelled: B moves next (A still to designate in multi-class)."""
        if s == 0:
            return 0
        if designation is not None or not self.multiclass:
            return min(self.learner_payout(vs, s, x, y)
                       for x, y in self.learner_moves(s, designation))
        return max(self.after_adversary(vs, s, d) for d in self.designations(s))

    def learner_payout(self, vs: int, s: int, x: int, y: int) -> int:
        v = vs & self.cls.mask(x, y)
        if v == 0:
            return -1
        return 1 + self.value(v, s & ~(1 << x))

    # -- optimal play ---------------------------------------------------------

    def best_adversary_move(self, vs: int, s: int) -> tuple[AdversaryMove, int]:
        """A's first optimal move: fewest points labelled, then enumeration order."""
        best = None
        for C, assign, v in self.adversary_labellings(vs, s):
            rest = s & ~C
            if self.multiclass and rest:
                for d in self.designations(rest):
                    val = self.after_adversary(v, rest, d)
                    if best is None or val > best[1]:
                        best = (AdversaryMove(assign, d), val)
            else:
                val = self.after_adversary(v, rest)
                if best is None or val > best[1]:
                    best = (AdversaryMove(assign, None), val)
        return best

    def best_learner_move(self, vs: int, s: int, designation=None) -> tuple[tuple[int, int], int]:
        """B's optimal (point, label): lowest point, then lowest label among minimisers."""
        best = None
        for x, y in sorted(self.learner_moves(s, designation)):
            val = self.learner_payout(vs, s, x, y)
            if best is None or val < best[1]:
                best = ((x, y), val)
        return best


def labelling_game_value(cls: ConceptClass, active: ActiveSet | None = None,
                         multiclass: bool = False, vs: VersionSpace | None = None) -> int:
    """Minimax payout of the labelling game on ``(vs, active)`` (exhaustive, capped)."""
    if vs is None:
        vs = VersionSpace.full(cls.num_concepts)
    if active is None:
        active = ActiveSet.full(cls.num_points)
    check_caps(cls, vs, active)
    return LabellingGame(cls, multiclass).value(vs.bits, active.bits)
