"""Compensated summation and a small double-double toolkit.

The gamma series in :mod:`record_lomax.analytic` alternate in sign and can
have terms far larger than their sum.  Neumaier's variant of Kahan summation
handles the ordinary case; the double-double helpers (an unevaluated pair
``hi + lo`` carrying ~106 bits) are the fallback when cancellation is severe.
"""
from __future__ import annotations

from typing import Iterable

_SPLITTER = 134217729.0  # 2**27 + 1


def neumaier_sum(values: Iterable[float]) -> float:
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    return s, b - (s - a)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_add(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    s, e = two_sum(a[0], b[0])
    t, f = two_sum(a[1], b[1])
    e += t
    s, e = _quick_two_sum(s, e)
    e += f
    return _quick_two_sum(s, e)


def dd_mul_d(a: tuple[float, float], b: float) -> tuple[float, float]:
    p, e = two_prod(a[0], b)
    e += a[1] * b
    return _quick_two_sum(p, e)


def dd_div_d(a: tuple[float, float], b: float) -> tuple[float, float]:
    q1 = a[0] / b
    p1, p2 = two_prod(q1, b)
    s, e = two_sum(a[0], -p1)
    e -= p2
    e += a[1]
    q2 = (s + e) / b
    return _quick_two_sum(q1, q2)
