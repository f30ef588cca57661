# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search kernel; same normal forms and algorithms as ``_kernel_py``.

Normal-form tables are C-contiguous ``int32`` arrays; memo keys are the
array bytes prefixed with the shape.
"""

import time

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, realloc, qsort
from libc.string cimport memcpy, memcmp

from .errors import BudgetExceeded

cnp.import_array()

BACKEND = "cython"

cdef int _W = 0


cdef int _cmp_lex(const void* a, const void* b) noexcept nogil:
    cdef const int* ra = (<const int**>a)[0]
    cdef const int* rb = (<const int**>b)[0]
    cdef int i
    for i in range(_W):
        if ra[i] != rb[i]:
            return -1 if ra[i] < rb[i] else 1
    return 0


cdef class _Scratch:
    cdef int* lab
    cdef int size

    def __cinit__(self):
        self.lab = NULL
        self.size = 0

    cdef int ensure(self, int n) except -1:
        cdef int i
        if n <= self.size:
            return 0
        cdef int* p = <int*>realloc(self.lab, n * sizeof(int))
        if p == NULL:
            raise MemoryError()
        for i in range(self.size, n):
            p[i] = -1
        self.lab = p
        self.size = n
        return 0

    def __dealloc__(self):
        free(self.lab)


cdef _Scratch _scratch = _Scratch()


cdef int _relabel(const int* src, int stride, int n, int* dst, int* lab) noexcept:
    """Rename labels by first occurrence; returns the number of distinct labels."""
    cdef int i, v, k = 0
    for i in range(n):
        v = src[i * stride]
        if lab[v] < 0:
            lab[v] = k
            k += 1
        dst[i] = lab[v]
    for i in range(n):
        lab[src[i * stride]] = -1
    return k


cdef tuple _normal_form(const int* data, int r, int c, bint ordered):
    """(key bytes, normal-form ndarray) of an r x c row-major table."""
    global _W
    cdef int i, j, k, kept = 0, maxv = 0, r2
    cdef int* colbuf = NULL
    cdef int* rowbuf = NULL
    cdef int** ptrs = NULL
    cdef int* col2 = NULL
    cdef int** cptrs = NULL
    cdef int* rows3 = NULL
    cdef cnp.ndarray out
    cdef int* optr
    cdef int hdr[2]
    if r <= 0:
        raise ValueError("cannot normalize an empty table")
    for i in range(r * c):
        if data[i] > maxv:
            maxv = data[i]
    _scratch.ensure((maxv if maxv > r else r) + 1)
    try:
        colbuf = <int*>malloc((c * r + 1) * sizeof(int))
        for j in range(c):
            k = _relabel(data + j, c, r, colbuf + kept * r, _scratch.lab)
            if k <= 1:
                continue
            for i in range(kept):
                if memcmp(colbuf + i * r, colbuf + kept * r, r * sizeof(int)) == 0:
                    k = 0
                    break
            if k:
                kept += 1
        if kept == 0:
            out = np.zeros((1, 0), dtype=np.int32)
            hdr[0] = 1
            hdr[1] = 0
            return (<bytes>(<char*>hdr)[:8]), out
        rowbuf = <int*>malloc(r * kept * sizeof(int))
        for i in range(r):
            for j in range(kept):
                rowbuf[i * kept + j] = colbuf[j * r + i]
        ptrs = <int**>malloc(r * sizeof(int*))
        for i in range(r):
            ptrs[i] = rowbuf + i * kept
        _W = kept
        qsort(ptrs, r, sizeof(int*), _cmp_lex)
        r2 = 0
        for i in range(r):
            if r2 == 0 or _cmp_lex(&ptrs[i], &ptrs[r2 - 1]) != 0:
                ptrs[r2] = ptrs[i]
                r2 += 1
        # second relabel in sorted row order, column-major into col2
        col2 = <int*>malloc(kept * r2 * sizeof(int))
        for j in range(kept):
            for i in range(r2):
                colbuf[i] = ptrs[i][j]
            _relabel(colbuf, 1, r2, col2 + j * r2, _scratch.lab)
        cptrs = <int**>malloc(kept * sizeof(int*))
        for j in range(kept):
            cptrs[j] = col2 + j * r2
        if not ordered:
            _W = r2
            qsort(cptrs, kept, sizeof(int*), _cmp_lex)
        rows3 = <int*>malloc(r2 * kept * sizeof(int))
        for i in range(r2):
            for j in range(kept):
                rows3[i * kept + j] = cptrs[j][i]
        for i in range(r2):
            ptrs[i] = rows3 + i * kept
        _W = kept
        qsort(ptrs, r2, sizeof(int*), _cmp_lex)
        out = np.empty((r2, kept), dtype=np.int32)
        optr = <int*>cnp.PyArray_DATA(out)
        for i in range(r2):
            memcpy(optr + i * kept, ptrs[i], kept * sizeof(int))
        hdr[0] = r2
        hdr[1] = kept
        key = (<bytes>(<char*>hdr)[:8]) + (<bytes>(<char*>optr)[:r2 * kept * sizeof(int)])
        return key, out
    finally:
        free(colbuf)
        free(rowbuf)
        free(ptrs)
        free(col2)
        free(cptrs)
        free(rows3)


cdef tuple _normalize_array(object table, bint ordered):
    cdef cnp.ndarray arr = np.ascontiguousarray(table, dtype=np.int32)
    if arr.ndim != 2:
        arr = arr.reshape(len(table), -1)
    return _normal_form(<int*>cnp.PyArray_DATA(arr), arr.shape[0], arr.shape[1], ordered)


def normalize(table):
    """Normal form of a state table: ``(key, ndarray)``."""
    return _normalize_array(table, False)


def normalize_ordered(table):
    """Normal form keeping the column order: ``(key, ndarray)``."""
    return _normalize_array(table, True)


def shape(nf):
    return nf.shape[0], nf.shape[1]


cdef inline int _log2floor(int r) noexcept:
    cdef int k = -1
    while r:
        r >>= 1
        k += 1
    return k


cdef class _Split:
    """Rows of a normal-form table grouped by the label in one column."""
    cdef int* order      # row indices grouped by label, groups by (-size, label)
    cdef int* start
    cdef int* size
    cdef int ngroups

    def __dealloc__(self):
        free(self.order)
        free(self.start)
        free(self.size)


cdef int* _CNT = NULL  # group sizes seen by _cmp_group


cdef int _cmp_group(const void* pa, const void* pb) noexcept nogil:
    cdef int a = (<const int*>pa)[0]
    cdef int b = (<const int*>pb)[0]
    if _CNT[a] != _CNT[b]:
        return -1 if _CNT[a] > _CNT[b] else 1
    return -1 if a < b else (1 if a > b else 0)


cdef _Split _split(const int* data, int r, int c, int x):
    global _CNT
    cdef _Split s = _Split()
    cdef int i, g, k = 0, t, a, b
    for i in range(r):
        if data[i * c + x] + 1 > k:
            k = data[i * c + x] + 1
    cdef int* cnt = <int*>malloc(k * sizeof(int))
    cdef int* glab = <int*>malloc(k * sizeof(int))
    cdef int* pos = <int*>malloc(k * sizeof(int))
    s.order = <int*>malloc(r * sizeof(int))
    s.start = <int*>malloc(k * sizeof(int))
    s.size = <int*>malloc(k * sizeof(int))
    s.ngroups = k
    for g in range(k):
        cnt[g] = 0
        glab[g] = g
    for i in range(r):
        cnt[data[i * c + x]] += 1
    # labels by (-count, label)
    _CNT = cnt
    qsort(glab, k, sizeof(int), _cmp_group)
    t = 0
    for g in range(k):
        s.start[g] = t
        s.size[g] = cnt[glab[g]]
        pos[glab[g]] = t
        t += cnt[glab[g]]
    for i in range(r):
        a = data[i * c + x]
        s.order[pos[a]] = i
        pos[a] += 1
    free(cnt)
    free(glab)
    free(pos)
    return s


cdef tuple _child(const int* data, int r, int c, _Split s, int g, int x, bint ordered):
    cdef int n = s.size[g], i, j, q, row
    cdef int w = c - 1
    cdef int* buf = <int*>malloc((n * w + 1) * sizeof(int))
    try:
        for i in range(n):
            row = s.order[s.start[g] + i]
            q = 0
            for j in range(c):
                if j != x:
                    buf[i * w + q] = data[row * c + j]
                    q += 1
        return _normal_form(buf, n, w, ordered)
    finally:
        free(buf)


cdef class Solver:
    """Memoized exact solvers; see ``_kernel_py.Solver``."""
    cdef public dict memo_sd, memo_online, memo_fixed
    cdef public long states
    cdef object _limit, _deadline
    cdef long _limit_c
    cdef bint _has_deadline
    cdef double _deadline_c

    def __init__(self):
        self.memo_sd = {}
        self.memo_online = {}
        self.memo_fixed = {}
        self.states = 0
        self._limit_c = -1
        self._has_deadline = False

    def clear(self):
        self.memo_sd.clear()
        self.memo_online.clear()
        self.memo_fixed.clear()

    cdef _arm(self, max_states, deadline):
        self.states = 0
        self._limit_c = -1 if max_states is None else max_states
        self._has_deadline = deadline is not None
        self._deadline_c = 0.0 if deadline is None else deadline

    cdef int _tick(self) except -1:
        self.states += 1
        if self._limit_c >= 0 and self.states > self._limit_c:
            raise BudgetExceeded("state budget exceeded", states=self.states)
        if self._has_deadline and (self.states & 255) == 0 and time.monotonic() > self._deadline_c:
            raise BudgetExceeded("time budget exceeded", states=self.states)
        return 0

    def sd_value(self, table, max_states=None, deadline=None):
        self._arm(max_states, deadline)
        key, arr = normalize(table)
        return self._sd(key, arr)

    def online_value(self, table, max_states=None, deadline=None):
        self._arm(max_states, deadline)
        key, arr = normalize(table)
        return self._online(key, arr)

    def fixed_value(self, table, max_states=None, deadline=None):
        self._arm(max_states, deadline)
        key, arr = normalize_ordered(table)
        return self._fixed(key, arr)

    def sd_children(self, table):
        cdef cnp.ndarray arr = np.ascontiguousarray(table, dtype=np.int32)
        cdef int r = arr.shape[0], c = arr.shape[1], x, g
        cdef int* data = <int*>cnp.PyArray_DATA(arr)
        cdef _Split s
        out = []
        for x in range(c):
            s = _split(data, r, c, x)
            vals = {}
            for g in range(s.ngroups):
                if s.size[g] == 0:
                    continue
                key, ch = _child(data, r, c, s, g, x, False)
                vals[int(data[s.order[s.start[g]] * c + x])] = self._sd(key, ch)
            out.append(vals)
        return out

    cdef int _sd(self, bytes key, cnp.ndarray arr) except -9:
        cdef int r = arr.shape[0], c = arr.shape[1]
        cdef int* data
        cdef int best, x, i, g, val, top1, top2, score, lb1, lb2
        cdef list cands
        cdef _Split s
        if c == 0:
            return 0
        if r <= 3 or c == 1:
            return 1
        v = self.memo_sd.get(key)
        if v is not None:
            return v
        self._tick()
        data = <int*>cnp.PyArray_DATA(arr)
        best = _log2floor(r)
        if c < best:
            best = c
        cands = []
        for x in range(c):
            s = _split(data, r, c, x)
            cands.append((s.size[1], s.size[0], x, s))
        cands.sort(key=_first3)
        for item in cands:
            x = item[2]
            s = item[3]
            lb1 = 1 if s.size[0] >= 2 else 0
            lb2 = 1 if s.size[1] >= 2 else 0
            if (lb1 if lb1 > 1 + lb2 else 1 + lb2) >= best:
                continue
            top1 = -1
            top2 = -1
            score = best
            for g in range(s.ngroups):
                if top2 >= 0:
                    i = _log2floor(s.size[g])
                    if c - 1 < i:
                        i = c - 1
                    if i <= top2:
                        break
                ckey, carr = _child(data, r, c, s, g, x, False)
                val = self._sd(ckey, carr)
                if val > top1:
                    top2 = top1
                    top1 = val
                elif val > top2:
                    top2 = val
                score = top1 if top1 > 1 + top2 else 1 + top2
                if score >= best:
                    break
            if score < best:
                best = score
                if best <= 1:
                    break
        self.memo_sd[key] = best
        return best

    cdef int _online(self, bytes key, cnp.ndarray arr) except -9:
        cdef int r = arr.shape[0], c = arr.shape[1]
        cdef int* data
        cdef int best, ub, x, i, g, val, top1, top2, score, u1, u2
        cdef list cands
        cdef _Split s
        if c == 0:
            return 0
        if r <= 3 or c == 1:
            return 1
        v = self.memo_online.get(key)
        if v is not None:
            return v
        self._tick()
        data = <int*>cnp.PyArray_DATA(arr)
        ub = _log2floor(r)
        if c < ub:
            ub = c
        best = 1
        cands = []
        for x in range(c):
            s = _split(data, r, c, x)
            cands.append((-s.size[1], -s.size[0], x, s))
        cands.sort(key=_first3)
        for item in cands:
            x = item[2]
            s = item[3]
            u1 = _log2floor(s.size[0])
            if c - 1 < u1:
                u1 = c - 1
            u2 = _log2floor(s.size[1])
            if c - 1 < u2:
                u2 = c - 1
            if (u1 if u1 > 1 + u2 else 1 + u2) <= best:
                continue
            top1 = -1
            top2 = -1
            for g in range(s.ngroups):
                if top2 >= 0:
                    i = _log2floor(s.size[g])
                    if c - 1 < i:
                        i = c - 1
                    if i <= top2:
                        break
                ckey, carr = _child(data, r, c, s, g, x, False)
                val = self._online(ckey, carr)
                if val > top1:
                    top2 = top1
                    top1 = val
                elif val > top2:
                    top2 = val
            score = top1 if top1 > 1 + top2 else 1 + top2
            if score > best:
                best = score
                if best >= ub:
                    break
        self.memo_online[key] = best
        return best

    cdef int _fixed(self, bytes key, cnp.ndarray arr) except -9:
        cdef int r = arr.shape[0], c = arr.shape[1]
        cdef int* data
        cdef int i, g, val, top1 = -1, top2 = -1, best
        cdef _Split s
        if c == 0:
            return 0
        if r <= 3 or c == 1:
            return 1
        v = self.memo_fixed.get(key)
        if v is not None:
            return v
        self._tick()
        data = <int*>cnp.PyArray_DATA(arr)
        s = _split(data, r, c, 0)
        for g in range(s.ngroups):
            if top2 >= 0:
                i = _log2floor(s.size[g])
                if c - 1 < i:
                    i = c - 1
                if i <= top2:
                    break
            ckey, carr = _child(data, r, c, s, g, 0, True)
            val = self._fixed(ckey, carr)
            if val > top1:
                top2 = top1
                top1 = val
            elif val > top2:
                top2 = val
        best = top1 if top1 > 1 + top2 else 1 + top2
        self.memo_fixed[key] = best
        return best


def _first3(t):
    return t[0], t[1], t[2]
