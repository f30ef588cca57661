"""Pure-Python search kernel.

Tables are tuples of row tuples holding small integer labels.  Every search
routine first puts a table into normal form (see :func:`normalize`) and
memoizes on it, so isomorphic subgames reached along different paths are
solved once.  ``_kernel_c`` implements the same algorithms over C arrays and
must agree with it exactly, down to the number of states explored.
"""

import time

from .errors import BudgetExceeded

BACKEND = "python"


def _relabel(col):
    m = {}
    out = tuple([m.setdefault(v, len(m)) for v in col])
    return out, len(m)


def _as_rows(table):
    if hasattr(table, "tolist"):
        table = table.tolist()
    return [tuple(r) for r in table]


def _normal_form(rows, ordered):
    if not rows:
        raise ValueError("cannot normalize an empty table")
    keep = []
    seen = set()
    for col in zip(*rows):
        rc, k = _relabel(col)
        if k > 1 and rc not in seen:
            seen.add(rc)
            keep.append(rc)
    if not keep:
        return ((),)
    rows2 = sorted(set(zip(*keep)))
    cols = [_relabel(c)[0] for c in zip(*rows2)]
    if not ordered:
        cols.sort()
    return tuple(sorted(zip(*cols)))


def normalize(table):
    """Normal form of a state table, usable as a memo key.

    Forced columns and columns repeating an earlier row partition are
    dropped and duplicate rows merged.  Labels are then renamed by first
    occurrence before rows and columns are sorted.  Returns ``(key, table)``;
    here the key is the table itself.
    """
    nf = _normal_form(_as_rows(table), False)
    return nf, nf


def normalize_ordered(table):
    """Like :func:`normalize` but keeps the column order (for fixed sequences)."""
    nf = _normal_form(_as_rows(table), True)
    return nf, nf


def shape(nf):
    return len(nf), len(nf[0])


def _log2floor(r):
    return r.bit_length() - 1


def _groups(rows, x):
    groups = {}
    for row in rows:
        groups.setdefault(row[x], []).append(row)
    return sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0]))


class Solver:
    """Memoized exact solvers for the three prediction games.

    ``sd``: learner picks the next point (self-directed); ``online``: the
    adversary picks it; ``fixed``: points come in column order.
    """

    def __init__(self):
        self.memo_sd = {}
        self.memo_online = {}
        self.memo_fixed = {}
        self.states = 0
        self._limit = None
        self._deadline = None

    def clear(self):
        self.memo_sd.clear()
        self.memo_online.clear()
        self.memo_fixed.clear()

    def _arm(self, max_states, deadline):
        self.states = 0
        self._limit = max_states
        self._deadline = deadline

    def _tick(self):
        self.states += 1
        if self._limit is not None and self.states > self._limit:
            raise BudgetExceeded("state budget exceeded", states=self.states)
        if self._deadline is not None and (self.states & 255) == 0 \
                and time.monotonic() > self._deadline:
            raise BudgetExceeded("time budget exceeded", states=self.states)

    # -- public entry points -------------------------------------------
    def sd_value(self, table, max_states=None, deadline=None):
        self._arm(max_states, deadline)
        return self._sd(normalize(table)[1])

    def online_value(self, table, max_states=None, deadline=None):
        self._arm(max_states, deadline)
        return self._online(normalize(table)[1])

    def fixed_value(self, table, max_states=None, deadline=None):
        self._arm(max_states, deadline)
        return self._fixed(normalize_ordered(table)[1])

    def sd_children(self, table):
        """Per column of the raw table: {label: sd value of the child state}."""
        rows = _as_rows(table)
        out = []
        for x in range(len(rows[0]) if rows else 0):
            vals = {}
            for lab, g in _groups(rows, x):
                child = normalize([r[:x] + r[x + 1:] for r in g])[1]
                vals[lab] = self._sd(child)
            out.append(vals)
        return out

    # -- self-directed ---------------------------------------------------
    def _sd(self, rows):
        r, c = len(rows), len(rows[0])
        if c == 0:
            return 0
        if r <= 3 or c == 1:
            return 1
        v = self.memo_sd.get(rows)
        if v is not None:
            return v
        self._tick()
        best = min(c, _log2floor(r))
        cands = []
        for x in range(c):
            gs = _groups(rows, x)
            cands.append((len(gs[1][1]), len(gs[0][1]), x, gs))
        cands.sort(key=lambda t: t[:3])
        for _, _, x, gs in cands:
            # every child with >= 2 rows still has a non-forced column
            lb2 = 1 if len(gs[1][1]) >= 2 else 0
            if max(1 if len(gs[0][1]) >= 2 else 0, 1 + lb2) >= best:
                continue
            top1 = top2 = -1
            score = best
            for _, g in gs:
                if top2 >= 0 and min(c - 1, _log2floor(len(g))) <= top2:
                    break
                val = self._sd(normalize([row[:x] + row[x + 1:] for row in g])[1])
                if val > top1:
                    top1, top2 = val, top1
                elif val > top2:
                    top2 = val
                score = max(top1, 1 + top2)
                if score >= best:
                    break
            if score < best:
                best = score
                if best <= 1:
                    break
        self.memo_sd[rows] = best
        return best

    # -- adversary-chosen order -------------------------------------------
    def _online(self, rows):
        r, c = len(rows), len(rows[0])
        if c == 0:
            return 0
        if r <= 3 or c == 1:
            return 1
        v = self.memo_online.get(rows)
        if v is not None:
            return v
        self._tick()
        ub = min(c, _log2floor(r))
        best = 1
        cands = []
        for x in range(c):
            gs = _groups(rows, x)
            cands.append((-len(gs[1][1]), -len(gs[0][1]), x, gs))
        cands.sort(key=lambda t: t[:3])
        for _, _, x, gs in cands:
            u1 = min(c - 1, _log2floor(len(gs[0][1])))
            u2 = min(c - 1, _log2floor(len(gs[1][1])))
            if max(u1, 1 + u2) <= best:
                continue
            top1 = top2 = -1
            for _, g in gs:
                if top2 >= 0 and min(c - 1, _log2floor(len(g))) <= top2:
                    break
                val = self._online(normalize([row[:x] + row[x + 1:] for row in g])[1])
                if val > top1:
                    top1, top2 = val, top1
                elif val > top2:
                    top2 = val
            score = max(top1, 1 + top2)
            if score > best:
                best = score
                if best >= ub:
                    break
        self.memo_online[rows] = best
        return best

    # -- fixed sequence -----------------------------------------------------
    def _fixed(self, rows):
        r, c = len(rows), len(rows[0])
        if c == 0:
            return 0
        if r <= 3 or c == 1:
            return 1
        v = self.memo_fixed.get(rows)
        if v is not None:
            return v
        self._tick()
        top1 = top2 = -1
        for _, g in _groups(rows, 0):
            if top2 >= 0 and min(c - 1, _log2floor(len(g))) <= top2:
                break
            val = self._fixed(normalize_ordered([row[1:] for row in g])[1])
            if val > top1:
                top1, top2 = val, top1
            elif val > top2:
                top2 = val
        best = max(top1, 1 + top2)
        self.memo_fixed[rows] = best
        return best
