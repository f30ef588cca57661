"""Exact strict linear separability over the rationals.

A labelling ``s`` of points ``x_i`` is realised by an affine halfspace iff
the system ``s_i * (w . x_i + b) >= 1`` has a rational solution.  That is
decided with a phase-one simplex in :class:`fractions.Fraction` arithmetic
using Bland's rule, so no rounding can flip a verdict.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _phase_one(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """A point of ``{z >= 0 : A z = b}``, or None if it is empty.  ``b`` must be non-negative."""
    m = len(A)
    n = len(A[0]) if m else 0
    # tableau columns: n originals, m artificials, rhs
    T = [row[:] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i, row in enumerate(A)]
    basis = [n + i for i in range(m)]
    width = n + m
    # objective: minimise the sum of artificials, written as reduced costs
    obj = [Fraction(0)] * (width + 1)
    for i in range(m):
        for j in range(n):
            obj[j] -= T[i][j]
        obj[width] -= T[i][width]
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # unbounded direction; cannot happen for phase one
            break
        piv = T[leave][enter]
        prow = [v / piv for v in T[leave]]
        T[leave] = prow
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [vi - f * pv for vi, pv in zip(T[i], prow)]
        f = obj[enter]
        obj = [vo - f * pv for vo, pv in zip(obj, prow)]
        basis[leave] = enter
    if obj[width] != 0:
        return None
    z = [Fraction(0)] * width
    for i, j in enumerate(basis):
        z[j] = T[i][width]
    return z[:n]


def separable(points: Sequence[Sequence[Fraction]], signs: Sequence[int]) -> bool:
    """True iff some affine function is >= 1 on ``+`` points and <= -1 on ``-`` points.

    ``signs`` holds 1 for the positive class and 0 (or -1) for the negative one.
    """
    return separator(points, signs) is not None


def separator(points: Sequence[Sequence[Fraction]], signs: Sequence[int]):
    """A witness ``(w, b)`` for :func:`separable`, or None."""
    if not points:
        return [], Fraction(1)
    A, rhs = [], []
    for x, s in zip(points, signs):
        sg = 1 if s == 1 else -1
        coeffs = [Fraction(sg) * Fraction(v) for v in x] + [Fraction(sg)]
        # sg*(w.x + b) - slack = 1 with w, b split into positive parts
        row = coeffs + [-c for c in coeffs]
        A.append(row)
        rhs.append(Fraction(1))
    m = len(A)
    for i in range(m):
        A[i] = A[i] + [Fraction(-int(i == k)) for k in range(m)]
    z = _phase_one(A, rhs)
    if z is None:
        return None
    k = len(points[0]) + 1
    wb = [z[i] - z[k + i] for i in range(k)]
    return wb[:-1], wb[-1]


def affine(wb, x) -> Fraction:
    w, b = wb
    return sum((wi * Fraction(xi) for wi, xi in zip(w, x)), Fraction(0)) + b
