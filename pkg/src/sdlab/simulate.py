"""Self-directed learning episodes and the interactive labelling game.

An episode alternates learner moves (choose an unlabelled point, predict its
label) with adversary answers (a label some surviving concept agrees with).
Learners and adversaries are small objects with ``choose`` / ``answer``
methods; plain callables with the same signature are accepted as hooks.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import ActiveSet, ConceptClass, LabeledExample, StateError, VersionSpace, restrict
from .dimensions import m_sd
from .errors import ProtocolError
from .oracle import AdversaryMove, LabellingGame, check_caps


def child_values(cls: ConceptClass, vs: VersionSpace, active: ActiveSet, x: int) -> dict[int, int]:
    """Self-directed value of every realizable answer at ``x`` (unrealizable ones omitted)."""
    rest = active.without(x)
    out = {}
    for y in range(cls.num_labels):
        child = restrict(cls, vs, LabeledExample(x, y))
        if child:
            out[y] = m_sd(cls, child, rest)
    return out


def sd_soa_step(cls: ConceptClass, vs: VersionSpace, active: ActiveSet) -> tuple[int, int]:
    """The SD-SOA move: minimise, over (point, label), the best value among the other labels.

    The score of ``(x, y)`` is the largest child value over labels ``y'' != y``,
    an unrealizable label counting as -1.  Ties go to the lowest point, then
    the lowest label.
    """
    if not vs or not active:
        raise StateError("SD-SOA needs a non-empty version space and active set")
    best = None
    for x in active.indices():
        vals = child_values(cls, vs, active, x)
        for y in range(cls.num_labels):
            score = max((v for lab, v in vals.items() if lab != y), default=-1)
            if best is None or score < best[0]:
                best = (score, x, y)
    return best[1], best[2]


def optimal_adversary_answer(cls: ConceptClass, vs: VersionSpace, active: ActiveSet,
                             point: int, predicted: int) -> int:
    """Realizable answer maximising mistake + successor value (mistakes win ties, then low labels)."""
    if not vs:
        raise StateError("empty version space")
    if point not in active:
        raise ValueError(f"point {point} is not active")
    vals = child_values(cls, vs, active, point)
    return max(vals, key=lambda y: (int(y != predicted) + vals[y], int(y != predicted), -y))


# -- players --------------------------------------------------------------------

@dataclass
class EpisodeState:
    cls: ConceptClass
    vs: VersionSpace
    active: ActiveSet
    step: int


class SdSoaLearner:
    name = "sd_soa"

    def choose(self, st: EpisodeState):
        return sd_soa_step(st.cls, st.vs, st.active)


class MajorityLearner:
    """Baseline: lowest unlabelled point, predict the label most surviving concepts give it."""
    name = "majority"

    def choose(self, st: EpisodeState):
        x = st.active.indices()[0]
        counts = np.bincount(st.cls.table[st.vs.indices(), x], minlength=st.cls.num_labels)
        return x, int(np.argmax(counts))


class RandomLearner:
    name = "random"

    def __init__(self, seed: int):
        self.rng = np.random.default_rng([seed, 1])

    def choose(self, st: EpisodeState):
        pts = st.active.indices()
        return int(pts[self.rng.integers(len(pts))]), int(self.rng.integers(st.cls.num_labels))


class ScriptedLearner:
    name = "scripted"

    def __init__(self, moves: Sequence[tuple[int, int]]):
        self.moves = [tuple(m) for m in moves]

    def choose(self, st: EpisodeState):
        if st.step >= len(self.moves):
            raise ProtocolError(f"step {st.step}: learner script exhausted")
        return self.moves[st.step]


class OptimalAdversary:
    name = "optimal"

    def answer(self, st: EpisodeState, point: int, predicted: int):
        return optimal_adversary_answer(st.cls, st.vs, st.active, point, predicted)


class FixedTargetAdversary:
    """Answers with the labels of one concept of the class."""

    def __init__(self, concept: int):
        self.concept = concept
        self.name = f"fixed_target:{concept}"

    def answer(self, st: EpisodeState, point: int, predicted: int):
        if not 0 <= self.concept < st.cls.num_concepts:
            raise ProtocolError(f"target concept {self.concept} out of range")
        return int(st.cls.table[self.concept, point])


class RandomAdversary:
    name = "random"

    def __init__(self, seed: int):
        self.rng = np.random.default_rng([seed, 2])

    def answer(self, st: EpisodeState, point: int, predicted: int):
        labels = sorted(set(st.cls.table[st.vs.indices(), point].tolist()))
        return int(labels[self.rng.integers(len(labels))])


class ScriptedAdversary:
    name = "scripted"

    def __init__(self, labels: Sequence[int]):
        self.labels = list(labels)

    def answer(self, st: EpisodeState, point: int, predicted: int):
        if st.step >= len(self.labels):
            raise ProtocolError(f"step {st.step}: adversary script exhausted")
        return self.labels[st.step]


class _Hook:
    def __init__(self, fn: Callable, name: str):
        self.fn = fn
        self.name = name

    def choose(self, st):
        return self.fn(st)

    def answer(self, st, point, predicted):
        return self.fn(st, point, predicted)


def make_learner(spec, seed: int = 0):
    """``spec`` is a learner object or hook, else a built-in learner name."""
    if hasattr(spec, "choose"):
        return spec
    if callable(spec):
        return _Hook(spec, "hook")
    table = {"sd_soa": SdSoaLearner, "majority": MajorityLearner}
    if spec in table:
        return table[spec]()
    if spec == "random":
        return RandomLearner(seed)
    raise ValueError(f"unknown learner {spec!r}; known: sd_soa, majority, random, scripted")


def make_adversary(spec, seed: int = 0):
    """``spec`` is an adversary object or hook, else a built-in name such as ``fixed_target:<i>``."""
    if hasattr(spec, "answer"):
        return spec
    if callable(spec):
        return _Hook(spec, "hook")
    if spec == "optimal":
        return OptimalAdversary()
    if spec == "random":
        return RandomAdversary(seed)
    if isinstance(spec, str) and spec.startswith("fixed_target:"):
        try:
            return FixedTargetAdversary(int(spec.split(":", 1)[1]))
        except ValueError:
            raise ValueError(f"bad adversary {spec!r}") from None
    raise ValueError(f"unknown adversary {spec!r}; known: optimal, random, fixed_target:<i>, scripted")


# -- episodes ---------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    point: int
    predicted: int
    true: int
    mistake: bool
    vs_size: int


@dataclass
class Transcript:
    class_id: str
    learner: str
    adversary: str
    seed: int
    steps: list[Step] = field(default_factory=list)

    @property
    def mistakes(self) -> int:
        return sum(s.mistake for s in self.steps)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"step": i, **asdict(s)}, sort_keys=True)
                 for i, s in enumerate(self.steps)]
        lines.append(json.dumps({"class_id": self.class_id, "learner": self.learner,
                                 "adversary": self.adversary, "seed": self.seed,
                                 "steps": len(self.steps), "mistakes": self.mistakes},
                                sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_table(self, cls: ConceptClass | None = None) -> str:
        def pname(p):
            return cls.point_names[p] if cls is not None and cls.point_names else f"x{p}"

        out = [f"{'step':>4}  {'point':>10}  {'pred':>4}  {'true':>4}  {'mistake':>7}  {'|VS|':>6}"]
        for i, s in enumerate(self.steps):
            out.append(f"{i:>4}  {pname(s.point):>10}  {s.predicted:>4}  {s.true:>4}  "
                       f"{'yes' if s.mistake else 'no':>7}  {s.vs_size:>6}")
        out.append(f"mistakes: {self.mistakes}  ({self.learner} vs {self.adversary}, "
                   f"class {self.class_id}, seed {self.seed})")
        return "\n".join(out) + "\n"


def run_episode(cls: ConceptClass, learner="sd_soa", adversary="optimal", seed: int = 0,
                active: ActiveSet | None = None, vs: VersionSpace | None = None) -> Transcript:
    """Play the self-directed protocol until every active point is labelled."""
    learner = make_learner(learner, seed)
    adversary = make_adversary(adversary, seed)
    if vs is None:
        vs = VersionSpace.full(cls.num_concepts)
    if active is None:
        active = ActiveSet.full(cls.num_points)
    if not vs:
        raise StateError("cannot run an episode on an empty version space")
    tr = Transcript(cls.name, learner.name, adversary.name, seed)
    step = 0
    while active:
        st = EpisodeState(cls, vs, active, step)
        move = learner.choose(st)
        try:
            x, y = (int(v) for v in move)
        except (TypeError, ValueError):
            raise ProtocolError(f"step {step}: learner returned {move!r}, expected (point, label)")
        if x not in active:
            raise ProtocolError(f"step {step}: point {x} is not an unlabelled point")
        if not 0 <= y < cls.num_labels:
            raise ProtocolError(f"step {step}: predicted label {y} out of range")
        t = adversary.answer(st, x, y)
        if not isinstance(t, (int, np.integer)) or not 0 <= t < cls.num_labels:
            raise ProtocolError(f"step {step}: adversary answered {t!r}, not a label id")
        nxt = restrict(cls, vs, LabeledExample(x, int(t)))
        if not nxt:
            raise ProtocolError(f"step {step}: answer {t} for point {x} is not realizable")
        vs, active = nxt, active.without(x)
        tr.steps.append(Step(x, y, int(t), y != t, len(vs)))
        step += 1
    return tr


# -- labelling game -----------------------------------------------------------------

class IllegalMove(ValueError):
    """A game move broke the rules; the game state is left unchanged."""


@dataclass
class GameRecord:
    class_id: str
    multiclass: bool
    rounds: list[dict] = field(default_factory=list)
    labels: dict[int, int] = field(default_factory=dict)
    finished: bool = False
    quit: bool = False
    payout: int | None = None
    value: int | None = None  # minimax value of the starting position

    def to_json(self) -> dict:
        d = asdict(self)
        d["labels"] = {str(k): v for k, v in sorted(self.labels.items())}
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


@dataclass
class GameView:
    """What a player sees before moving."""
    cls: ConceptClass
    remaining: list[int]
    labels: dict[int, int]
    realizable: int
    designation: tuple | None = None


class _Game:
    def __init__(self, cls, active, multiclass):
        self.cls = cls
        self.engine = LabellingGame(cls, multiclass)
        self.multiclass = multiclass
        self.vs = VersionSpace.full(cls.num_concepts).bits
        self.s = active.bits

    def remaining(self):
        return ActiveSet(self.s).indices()

    def apply_labels(self, assignment):
        for x, y in assignment:
            self.vs &= self.cls.mask(x, y)
            self.s &= ~(1 << x)

    def check_adversary(self, move: AdversaryMove):
        rem = set(self.remaining())
        pts = [x for x, _ in move.assignment]
        if len(set(pts)) != len(pts):
            raise IllegalMove("a point was labelled twice")
        for x, y in move.assignment:
            if x not in rem:
                raise IllegalMove(f"point {x} is already labelled or not in play")
            if not 0 <= y < self.cls.num_labels:
                raise IllegalMove(f"label {y} out of range")
        left = rem - set(pts)
        if self.multiclass and left:
            if move.designation is None:
                raise IllegalMove("designate two labels for every remaining point")
            des = dict(move.designation)
            if set(des) != left:
                raise IllegalMove("designations must cover exactly the remaining points")
            for x, pair in des.items():
                a, b = pair
                if a == b or not (0 <= a < self.cls.num_labels and 0 <= b < self.cls.num_labels):
                    raise IllegalMove(f"point {x} needs two distinct valid labels")

    def check_learner(self, x, y, designation):
        if x not in self.remaining():
            raise IllegalMove(f"point {x} is already labelled or not in play")
        if designation is not None:
            if y not in dict(designation)[x]:
                raise IllegalMove(f"label {y} is not one of the designated labels for point {x}")
        elif not 0 <= y < self.cls.num_labels:
            raise IllegalMove(f"label {y} out of range")

    def machine_adversary(self) -> AdversaryMove:
        if self.vs == 0:  # already lost: label everything
            return AdversaryMove(tuple((x, 0) for x in self.remaining()))
        move, _ = self.engine.best_adversary_move(self.vs, self.s)
        if self.multiclass and move.designation is not None:
            move = AdversaryMove(move.assignment, tuple((x, tuple(p)) for x, p in move.designation))
        return move

    def machine_learner(self, designation):
        if self.vs == 0:
            x = self.remaining()[0]
            return x, (designation[0][1][0] if designation else 0)
        (x, y), _ = self.engine.best_learner_move(self.vs, self.s, designation)
        return x, y


def play_labelling_game(cls: ConceptClass, active: ActiveSet | None = None,
                        human_side: str | None = None, multiclass: bool = False,
                        ask_adversary: Callable[[GameView], AdversaryMove | None] | None = None,
                        ask_learner: Callable[[GameView], tuple[int, int] | None] | None = None,
                        on_reject: Callable[[str], None] | None = None) -> GameRecord:
    """Play the labelling game; the machine plays optimally on the other side(s).

    ``human_side`` is ``"A"`` (adversary), ``"B"`` (learner) or ``None`` for
    machine self-play.  Ask-hooks return ``None`` to quit, which yields a
    partial record.  Illegal human moves are reported through ``on_reject``
    and asked again.
    """
    if active is None:
        active = ActiveSet.full(cls.num_points)
    if human_side not in (None, "A", "B"):
        raise ValueError("human_side must be 'A', 'B' or None")
    check_caps(cls, VersionSpace.full(cls.num_concepts), active)
    if human_side == "A" and ask_adversary is None or human_side == "B" and ask_learner is None:
        raise ValueError("the human side needs an input hook")
    g = _Game(cls, active, multiclass)
    rec = GameRecord(cls.name, multiclass, value=g.engine.value(g.vs, g.s))
    reject = on_reject or (lambda msg: None)

    def view(designation=None):
        return GameView(cls, g.remaining(), dict(rec.labels), bin(g.vs).count("1"), designation)

    while g.s:
        # player A
        while True:
            if human_side == "A":
                move = ask_adversary(view())
                if move is None:
                    rec.quit = True
                    return rec
            else:
                move = g.machine_adversary()
            try:
                g.check_adversary(move)
                break
            except IllegalMove as e:
                if human_side != "A":
                    raise
                reject(str(e))
        g.apply_labels(move.assignment)
        rec.labels.update(dict(move.assignment))
        rnd = {"adversary": [list(a) for a in move.assignment]}
        if not g.s:
            rec.rounds.append(rnd)
            break
        designation = move.designation if multiclass else None
        if designation is not None:
            rnd["designation"] = [[x, list(p)] for x, p in designation]
        # player B
        while True:
            if human_side == "B":
                mv = ask_learner(view(designation))
                if mv is None:
                    rec.rounds.append(rnd)
                    rec.quit = True
                    return rec
            else:
                mv = g.machine_learner(designation)
            try:
                x, y = int(mv[0]), int(mv[1])
                g.check_learner(x, y, designation)
                break
            except (IllegalMove, TypeError, ValueError, IndexError) as e:
                if human_side != "B":
                    raise
                reject(str(e) if isinstance(e, IllegalMove) else f"malformed move {mv!r}")
        g.apply_labels([(x, y)])
        rec.labels[x] = y
        rnd["learner"] = [x, y]
        rec.rounds.append(rnd)
    rec.finished = True
    completed = sum(1 for r in rec.rounds if "learner" in r)
    rec.payout = completed if g.vs else -1
    return rec
