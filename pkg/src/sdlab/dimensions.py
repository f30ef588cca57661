"""Exact complexity measures of finite concept classes.

State-level functions take a version space and an active point set and
solve the corresponding game exactly.  Class-level functions (``*_class``)
take the maximum over point subsets where the measure is not monotone in the
point set (self-directed and best-sequence bounds); the online and
worst-sequence bounds are monotone, so the full domain is their maximiser.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernel, symmetry
from .core import ActiveSet, ConceptClass, LabeledExample, VersionSpace, realizable_labels, restrict
from .errors import BudgetExceeded, UnsupportedError
from .oracle import labelling_game_value  # noqa: F401  (re-exported)

MEASURES = ("vc", "ld", "m_worst", "m_best", "m_sd", "td")
CHAIN = ("ld", "m_worst", "m_best", "m_sd", "vc")


class InvariantViolation(AssertionError):
    """A computed report broke a proven inequality."""


@dataclass(frozen=True)
class SearchBudget:
    max_states: int | None = None
    max_millis: int | None = None
    max_depth: int = 8  # largest point set whose orderings are enumerated exhaustively

    def __post_init__(self):
        for name in ("max_states", "max_millis"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_depth <= 0:
            raise ValueError("max_depth must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "SearchBudget":
        kw = {}
        if os.environ.get("SDL_BUDGET_STATES"):
            kw["max_states"] = int(os.environ["SDL_BUDGET_STATES"])
        if os.environ.get("SDL_BUDGET_MS"):
            kw["max_millis"] = int(os.environ["SDL_BUDGET_MS"])
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


UNLIMITED = SearchBudget()


class _Meter:
    """Shares one budget across many solver calls."""

    def __init__(self, budget: SearchBudget | None):
        budget = budget or UNLIMITED
        self.budget = budget
        self.states = 0
        self.deadline = None if budget.max_millis is None else \
            time.monotonic() + budget.max_millis / 1000.0
        self.solver = kernel.shared_solver()

    def _remaining(self):
        if self.budget.max_states is None:
            return None
        return self.budget.max_states - self.states

    def check(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("time budget exceeded", states=self.states)
        rem = self._remaining()
        if rem is not None and rem < 0:
            raise BudgetExceeded("state budget exceeded", states=self.states)

    def run(self, method: str, table):
        self.check()
        fn = getattr(self.solver, method)
        try:
            return fn(table, self._remaining(), self.deadline)
        finally:
            self.states += self.solver.states


def _state_table(cls: ConceptClass, vs: VersionSpace | None, active: ActiveSet | None):
    if vs is None:
        vs = VersionSpace.full(cls.num_concepts)
    if active is None:
        active = ActiveSet.full(cls.num_points)
    return cls.subtable(vs, active), vs, active


def _halving_bound(rows: int) -> int:
    return rows.bit_length() - 1


# -- self-directed -------------------------------------------------------------

def m_sd(cls: ConceptClass, vs: VersionSpace | None = None, active: ActiveSet | None = None,
         budget: SearchBudget | None = None) -> int:
    """Optimal self-directed mistake bound of the state ``(vs, active)``.

    Memoized minimax over (point, prediction) learner moves and realizable
    adversary answers, with halving upper bounds and window cut-offs.
    """
    table, vs, active = _state_table(cls, vs, active)
    if not vs:
        return -1
    if not active:
        return 0
    meter = _Meter(budget)
    try:
        return meter.run("sd_value", table)
    except BudgetExceeded as e:
        e.lower = 1 if len(np.unique(table, axis=0)) > 1 else 0
        e.upper = min(len(active), _halving_bound(len(vs)))
        raise


def m_sd_naive(cls: ConceptClass, vs: VersionSpace | None = None,
               active: ActiveSet | None = None) -> int:
    """The unreduced recursion: no normal forms, no pruning, no shortcuts.

    Exponential; a reference for small states only.
    """
    if vs is None:
        vs = VersionSpace.full(cls.num_concepts)
    if active is None:
        active = ActiveSet.full(cls.num_points)
    memo: dict = {}

    def M(v: VersionSpace, s: ActiveSet) -> int:
        if not v:
            return -1
        if not s:
            return 0
        k = (v.bits, s.bits)
        if k in memo:
            return memo[k]
        best = None
        for x in s.indices():
            rest = s.without(x)
            answers = realizable_labels(cls, v, x)
            sub = {y: M(restrict(cls, v, LabeledExample(x, y)), rest) for y in answers}
            for y in range(cls.num_labels):
                worst = max((int(a != y) + sub[a]) for a in answers)
                if best is None or worst < best:
                    best = worst
        memo[k] = best
        return best

    return M(vs, active)


@dataclass(frozen=True)
class SubsetMax:
    """Maximum of a state measure over point subsets, with its first maximiser."""
    value: int
    witness: tuple[int, ...]
    states: int = 0


def _reduced_points(cls: ConceptClass) -> list[int]:
    """One representative per distinct non-trivial label partition of the concepts."""
    seen = set()
    reps = []
    for p in range(cls.num_points):
        col = cls.table[:, p]
        _, inv = np.unique(col, return_inverse=True)
        # canonical partition: relabel by first occurrence
        first = {}
        part = tuple(first.setdefault(int(v), len(first)) for v in inv)
        if len(first) > 1 and part not in seen:
            seen.add(part)
            reps.append(p)
    return reps


def _subset_order(points: Sequence[int], floor: int):
    """Subsets of ``points`` by decreasing size, lexicographic within a size."""
    for k in range(len(points), floor, -1):
        yield from itertools.combinations(points, k)


def _symmetry_classes(cls: ConceptClass, pts: list[int]) -> dict[int, int]:
    """Map each point of ``pts`` to a component of verified interchangeable points."""
    table = np.unique(cls.table[:, pts], axis=0)
    comp = _interchangeable(table, list(range(len(pts))))
    return {p: comp[i] for i, p in enumerate(pts)}


def _canonical_subsets(cls: ConceptClass, pts: list[int], floor: int):
    """:func:`_subset_order` keeping one subset per orbit of the verified symmetries.

    Within a component of interchangeable points any choice of ``j`` members
    is equivalent, so only the first ``j`` (in point order) are kept.
    """
    comp = _symmetry_classes(cls, pts)
    members: dict[int, list[int]] = {}
    for p in pts:
        members.setdefault(comp[p], []).append(p)
    for S in _subset_order(pts, floor):
        chosen: dict[int, list[int]] = {}
        for p in S:
            chosen.setdefault(comp[p], []).append(p)
        if all(v == members[c][:len(v)] for c, v in chosen.items()):
            yield S


def _sd_chunk(args):
    cls, subsets, best, budget = args
    meter = _Meter(budget)
    witness = None
    for S in subsets:
        sub = cls.table[:, list(S)]
        rows = np.unique(sub, axis=0)
        if min(len(S), _halving_bound(len(rows))) <= best:
            continue
        v = meter.run("sd_value", rows)
        if v > best:
            best, witness = v, S
    return best, witness, meter.states


def _split_chunks(items: list, workers: int) -> list[list]:
    if workers <= 1 or len(items) < 2:
        return [items]
    size = math.ceil(len(items) / workers)
    return [items[i:i + size] for i in range(0, len(items), size)]


def m_sd_class(cls: ConceptClass, budget: SearchBudget | None = None, workers: int = 1,
               lower: int = 0, lower_witness: Sequence[int] = ()) -> SubsetMax:
    """``max over S`` of :func:`m_sd` on the full version space (the class-level bound).

    ``lower``/``lower_witness`` may carry a subset already known to reach
    ``lower``; only strictly better subsets are then searched for.
    """
    if cls.num_concepts == 0:
        return SubsetMax(-1, ())
    if cls.num_concepts == 1 or cls.num_points == 0:
        return SubsetMax(0, ())
    pts = _reduced_points(cls)
    cap = _halving_bound(cls.num_concepts)
    best, witness, states = max(lower, 0), None, 0
    meter = _Meter(budget)
    if workers > 1:
        subsets = list(_canonical_subsets(cls, pts, best))
        chunks = _split_chunks(subsets, workers)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sd_chunk, [(cls, c, best, budget) for c in chunks]))
        for b, w, st in results:
            states += st
            if w is not None and b > best:
                best, witness = b, w
    else:
        try:
            for S in _canonical_subsets(cls, pts, best):
                if len(S) <= best or best >= cap:
                    break
                rows = np.unique(cls.table[:, list(S)], axis=0)
                if _halving_bound(len(rows)) <= best:
                    continue
                v = meter.run("sd_value", rows)
                if v > best:
                    best, witness = v, S
        except BudgetExceeded as e:
            e.lower, e.upper = best, cap
            raise
        states = meter.states
    if witness is None:
        witness = tuple(lower_witness) if best > 0 else ()
    return SubsetMax(best, tuple(witness), states)


# -- adversarial orders ----------------------------------------------------------

def online_bound(cls: ConceptClass, active: ActiveSet | None = None,
                 vs: VersionSpace | None = None, budget: SearchBudget | None = None) -> int:
    """Mistake bound when the adversary picks every next point (Littlestone value on S)."""
    table, vs, active = _state_table(cls, vs, active)
    if not vs:
        return -1
    if not active:
        return 0
    meter = _Meter(budget)
    try:
        return meter.run("online_value", table)
    except BudgetExceeded as e:
        e.lower, e.upper = 1, min(len(active), _halving_bound(len(vs)))
        raise


def fixed_order_bound(cls: ConceptClass, order: Sequence[int], active: ActiveSet | None = None,
                      vs: VersionSpace | None = None, budget: SearchBudget | None = None) -> int:
    """Optimal mistake bound when points arrive in the given order."""
    if active is None:
        active = ActiveSet.full(cls.num_points)
    order = list(order)
    if sorted(order) != active.indices():
        raise ValueError("order must be a permutation of the active points")
    if vs is None:
        vs = VersionSpace.full(cls.num_concepts)
    if not vs:
        return -1
    if not order:
        return 0
    table = cls.table[np.ix_(vs.indices(), order)]
    return _Meter(budget).run("fixed_value", table)


def _order_reps(table: np.ndarray) -> list[int]:
    """Columns of ``table`` that are non-forced and not a repeat of an earlier partition."""
    seen = set()
    reps = []
    for j in range(table.shape[1]):
        first = {}
        part = tuple(first.setdefault(int(v), len(first)) for v in table[:, j])
        if len(first) > 1 and part not in seen:
            seen.add(part)
            reps.append(j)
    return reps


def _interchangeable(table: np.ndarray, cols: list[int]) -> list[int]:
    """Component id per column: columns joined when swapping them is a verified automorphism.

    Equal ordered normal forms settle a swap cheaply; otherwise a row
    bijection preserving every column partition is searched for and checked
    exactly.  Transpositions generate the full symmetric group on each
    component, so any ordering inside a component is equivalent.
    """
    comp = list(range(len(cols)))

    def find(i):
        while comp[i] != i:
            comp[i] = comp[comp[i]]
            i = comp[i]
        return i

    if table.shape[0] * len(cols) > 4 * 10 ** 6:
        return comp
    sub = table[:, cols]
    base = kernel.normalize_ordered(sub)[0]
    for a, b in itertools.combinations(range(len(cols)), 2):
        if find(a) == find(b):
            continue
        perm = list(range(len(cols)))
        perm[a], perm[b] = perm[b], perm[a]
        if (kernel.normalize_ordered(sub[:, perm])[0] == base
                or symmetry.swap_is_automorphism(sub, a, b)):
            comp[find(b)] = find(a)
    return [find(i) for i in range(len(cols))]


def _orders(cols: list[int], comp: list[int]):
    """Orderings of ``cols`` up to permutations inside each interchangeable component."""
    seen = set()
    for perm in itertools.permutations(range(len(cols))):
        sig = tuple(comp[i] for i in perm)
        if sig in seen:
            continue
        seen.add(sig)
        yield [cols[i] for i in perm]


def _first_point_bound(meter: _Meter, table: np.ndarray, x: int, method: str) -> int:
    """max(v1, 1 + v2) over the children of ``x`` valued by ``method``."""
    order = np.argsort(table[:, x], kind="stable")
    col = table[order, x]
    cuts = np.flatnonzero(col[1:] != col[:-1]) + 1
    rest = np.delete(table, x, axis=1)[order]
    vals = sorted((meter.run(method, part) for part in np.split(rest, cuts)), reverse=True)
    return vals[0] if len(vals) == 1 else max(vals[0], 1 + vals[1])


def _order_search(cls, vs, active, budget, minimize, cutoff=None, lower=None, upper=None):
    table, vs, active = _state_table(cls, vs, active)
    if not vs:
        return -1
    if not active:
        return 0
    budget = budget or UNLIMITED
    table = np.unique(table, axis=0)
    cols = _order_reps(table)
    if not cols:
        return 0
    meter = _Meter(budget)
    table = np.ascontiguousarray(table[:, cols])
    idx = list(range(len(cols)))
    if minimize:
        target = meter.run("sd_value", table)
        best = min(len(cols), _halving_bound(len(table)))
        if upper is not None:
            best = min(best, upper)
    else:
        target = meter.run("online_value", table) if upper is None else upper
        best = max(1, lower or 0)
    if best == target:
        return best
    if len(cols) > budget.max_depth:
        lo, hi = (target, best) if minimize else (best, target)
        raise BudgetExceeded(f"{len(cols)} distinct points exceed the ordering depth cap "
                             f"{budget.max_depth}", lower=lo, upper=hi)
    comp = _interchangeable(table, idx)
    # bound on every order that starts with a given point
    method = "sd_value" if minimize else "online_value"
    first: dict[int, int] = {}
    single = len(set(comp)) == 1  # one order up to symmetry, nothing to prune
    try:
        for order in _orders(idx, comp):
            x = order[0]
            if not single and x not in first:
                first[x] = _first_point_bound(meter, table, x, method)
            if not single and ((first[x] >= best) if minimize else (first[x] <= best)):
                continue
            v = meter.run("fixed_value", table[:, order])
            if (v < best) if minimize else (v > best):
                best = v
                if best == target:
                    break
                if minimize and cutoff is not None and best <= cutoff:
                    break
    except BudgetExceeded as e:
        e.lower, e.upper = (target, best) if minimize else (best, target)
        raise
    return best


def m_best(cls: ConceptClass, active: ActiveSet | None = None, vs: VersionSpace | None = None,
           budget: SearchBudget | None = None, cutoff: int | None = None) -> int:
    """Best fixed ordering of the active points (learner commits to the sequence).

    With ``cutoff``, the search may stop as soon as some ordering achieves a
    value ``<= cutoff``; the returned value is then only an upper bound.
    """
    return _order_search(cls, vs, active, budget, True, cutoff)


def m_worst(cls: ConceptClass, active: ActiveSet | None = None, vs: VersionSpace | None = None,
            budget: SearchBudget | None = None, lower: int | None = None,
            upper: int | None = None) -> int:
    """Worst fixed ordering of the active points (adversary commits to the sequence).

    ``lower``/``upper`` may pass proven bounds (e.g. the best-order and
    online values); the ordering search is skipped when they meet.
    """
    return _order_search(cls, vs, active, budget, False, lower=lower, upper=upper)


def m_best_class(cls: ConceptClass, budget: SearchBudget | None = None, lower: int = 0,
                 lower_witness: Sequence[int] = ()) -> SubsetMax:
    """``max over S`` of :func:`m_best`; ``lower`` may carry a known lower bound (e.g. m_sd)."""
    if cls.num_concepts == 0:
        return SubsetMax(-1, ())
    if cls.num_concepts == 1 or cls.num_points == 0:
        return SubsetMax(0, ())
    pts = _reduced_points(cls)
    cap = _halving_bound(cls.num_concepts)
    best, witness = max(lower, 0), None
    meter = _Meter(budget)
    for S in _canonical_subsets(cls, pts, best):
        if len(S) <= best or best >= cap:
            break
        act = ActiveSet.of(S)
        rows = np.unique(cls.table[:, list(S)], axis=0)
        if _halving_bound(len(rows)) <= best:
            continue
        if meter.run("online_value", rows) <= best:
            continue
        v = m_best(cls, act, budget=_remaining_budget(meter), cutoff=best)
        if v > best:
            best, witness = v, S
    if witness is None:
        witness = tuple(lower_witness) if best > 0 else ()
    return SubsetMax(best, tuple(witness))


def _remaining_budget(meter: _Meter) -> SearchBudget:
    b = meter.budget
    ms = None
    if meter.deadline is not None:
        ms = max(1, int((meter.deadline - time.monotonic()) * 1000))
    st = None if b.max_states is None else max(1, b.max_states - meter.states)
    return SearchBudget(st, ms, b.max_depth)


# -- combinatorial dimensions -------------------------------------------------------

def vc_dim(cls: ConceptClass) -> int:
    """Size of the largest shattered point set (binary classes only; -1 for the empty class)."""
    if cls.num_labels != 2:
        raise UnsupportedError("VC dimension is only defined here for binary classes")
    m = cls.num_concepts
    if m == 0:
        return -1
    best = 0
    pts = range(cls.num_points)
    for k in range(1, cls.num_points + 1):
        if 2 ** k > m:
            break
        found = False
        for S in itertools.combinations(pts, k):
            sub = cls.table[:, list(S)]
            codes = sub @ (1 << np.arange(k, dtype=np.int64))
            if len(np.unique(codes)) == 2 ** k:
                found = True
                break
        if not found:
            break
        best = k
    return best


def shattered_set(cls: ConceptClass, size: int | None = None) -> tuple[int, ...]:
    """First (lexicographic) shattered set of the given size (default: the VC dimension)."""
    d = vc_dim(cls) if size is None else size
    if d <= 0:
        return ()
    for S in itertools.combinations(range(cls.num_points), d):
        codes = cls.table[:, list(S)] @ (1 << np.arange(d, dtype=np.int64))
        if len(np.unique(codes)) == 2 ** d:
            return S
    raise ValueError(f"no shattered set of size {d}")


def teaching_dim(cls: ConceptClass, budget: SearchBudget | None = None) -> int:
    """Largest minimum teaching set over the concepts (0 for one concept, -1 for none)."""
    m = cls.num_concepts
    if m == 0:
        return -1
    if m == 1:
        return 0
    meter = _Meter(budget)
    weights = [1 << p for p in range(cls.num_points)]
    worst = 0
    for i in range(m):
        differ = np.delete(cls.table != cls.table[i], i, axis=0)
        masks = {sum(w for w, d in zip(weights, row) if d) for row in differ.tolist()}
        # only a teaching set larger than the running maximum matters
        if worst and _hits_all(masks, cls.num_points, worst, meter):
            continue
        k = worst + 1
        while not _hits_all(masks, cls.num_points, k, meter):
            k += 1
        worst = k
    return worst


def _hits_all(masks, n, k, meter):
    """Is there a ``k``-point set meeting every mask?"""
    for S in itertools.combinations(range(n), k):
        meter.check()
        b = sum(1 << p for p in S)
        if all(m & b for m in masks):
            return True
    return False


# -- reports ---------------------------------------------------------------------------

@dataclass
class DimReport:
    class_id: str
    values: dict[str, int] = field(default_factory=dict)
    millis: dict[str, int] = field(default_factory=dict)
    states: dict[str, int] = field(default_factory=dict)
    witness: dict[str, list[int]] = field(default_factory=dict)
    errors: dict[str, dict] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.errors

    def chain_ok(self) -> bool | None:
        """Is ld >= m_worst >= m_best >= m_sd >= vc over the measures present? (None below two)"""
        present = [self.values[k] for k in CHAIN if k in self.values]
        if len(present) < 2:
            return None
        return all(a >= b for a, b in zip(present, present[1:]))

    def to_json(self, timings: bool = False) -> dict:
        d = {"class_id": self.class_id, "values": dict(self.values)}
        if self.witness:
            d["witness"] = {k: list(v) for k, v in self.witness.items()}
        if self.errors:
            d["errors"] = self.errors
        if timings:
            d["millis"] = dict(self.millis)
            d["states_explored"] = dict(self.states)
        return d

    def dumps(self, timings: bool = False) -> str:
        return json.dumps(self.to_json(timings), indent=2, sort_keys=True)

    def csv_rows(self, timings: bool = False) -> list[list]:
        rows = []
        for k in MEASURES:
            if k in self.values:
                rows.append([self.class_id, k, self.values[k],
                             self.states.get(k, 0) if timings else "",
                             self.millis.get(k, 0) if timings else ""])
        return rows

    CSV_HEADER = ("class_id", "measure", "value", "states_explored", "millis")


def _chain_bounds(rep: DimReport) -> None:
    """Tighten the bounds of failed measures using their neighbours in the chain."""
    def lo(k):
        return rep.values.get(k, rep.errors.get(k, {}).get("lower"))

    def hi(k):
        return rep.values.get(k, rep.errors.get(k, {}).get("upper"))

    for i, k in enumerate(CHAIN):
        err = rep.errors.get(k)
        if not err or err.get("error") != "budget":
            continue
        lows = [v for v in [err.get("lower")] + [lo(j) for j in CHAIN[i + 1:]] if v is not None]
        highs = [v for v in [err.get("upper")] + [hi(j) for j in CHAIN[:i]] if v is not None]
        err["lower"] = max(lows) if lows else None
        err["upper"] = min(highs) if highs else None


def full_report(cls: ConceptClass, measures: Iterable[str] = MEASURES,
                budget: SearchBudget | None = None, workers: int = 1,
                check_chain: bool = True) -> DimReport:
    """Compute the requested class-level measures.

    Budget errors are recorded per measure (with proven bounds) and do not
    stop the other measures.  When every chain measure is present the
    ordering ld >= m_worst >= m_best >= m_sd >= vc is asserted.
    """
    measures = list(measures)
    unknown = set(measures) - set(MEASURES)
    if unknown:
        raise ValueError(f"unknown measures: {sorted(unknown)}")
    rep = DimReport(cls.name)
    # cheaper measures first: each one bounds the ordering searches after it
    order = sorted(measures, key=["vc", "td", "m_sd", "ld", "m_best", "m_worst"].index)
    for name in order:
        t0 = time.perf_counter()
        solver = kernel.shared_solver()
        try:
            if name == "vc":
                if cls.num_labels != 2:
                    rep.errors[name] = {"error": "unsupported for non-binary classes"}
                    continue
                rep.values[name] = vc_dim(cls)
            elif name == "td":
                rep.values[name] = teaching_dim(cls, budget)
            elif name == "m_sd":
                lower = max(rep.values.get("vc", 0), 0)
                r = m_sd_class(cls, budget, workers, lower=lower,
                               lower_witness=shattered_set(cls, lower) if lower else ())
                rep.values[name] = r.value
                rep.witness[name] = list(r.witness)
                rep.states[name] = r.states
            elif name == "ld":
                rep.values[name] = online_bound(cls, budget=budget) if cls.num_concepts else -1
            elif name == "m_worst":
                lo = max([rep.values.get(k, 0) for k in ("m_best", "m_sd", "vc")] + [0])
                rep.values[name] = m_worst(cls, budget=budget, lower=lo,
                                           upper=rep.values.get("ld")) if cls.num_concepts else -1
            elif name == "m_best":
                lower = max(rep.values.get("m_sd", 0), 0)
                r = m_best_class(cls, budget, lower=lower,
                                 lower_witness=rep.witness.get("m_sd", ()))
                rep.values[name] = r.value
                rep.witness[name] = list(r.witness)
        except BudgetExceeded as e:
            rep.errors[name] = {"error": "budget", "lower": e.lower, "upper": e.upper,
                                "message": e.args[0] if e.args else "budget exceeded"}
        finally:
            rep.millis[name] = int((time.perf_counter() - t0) * 1000)
            rep.states.setdefault(name, solver.states)
    _chain_bounds(rep)
    if check_chain and all(k in rep.values for k in CHAIN) and not rep.chain_ok():
        raise InvariantViolation(f"mistake-bound chain violated: {rep.values}")
    return rep
