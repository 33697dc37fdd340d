"""Wigner 3j and 6j symbols via the Racah formulas.

Arguments are half-integers (passed as float or int); internally everything
is handled as doubled integers so triangle and projection rules are exact.
Factorials are accumulated in log space, which keeps the alternating Racah
sums usable up to j of order 100. Selection-rule violations return 0.
"""

from __future__ import annotations

import math
from functools import lru_cache

__all__ = ["wigner3j", "wigner6j"]


def _two(x) -> int:
    t = 2.0 * x
    r = round(t)
    if abs(t - r) > 1e-9:
        raise ValueError(f"argument {x} is not a half-integer")
    return int(r)


def _lnfac(two_n: int) -> float:
    # two_n must be an even, non-negative doubled integer
    if two_n % 2:
        raise ValueError("factorial of a non-integer")
    if two_n < 0:
        raise ValueError("factorial of a negative number")
    return math.lgamma(two_n // 2 + 1)


def _triangle_ok(a: int, b: int, c: int) -> bool:
    # a,b,c doubled; |a-b| <= c <= a+b and integer perimeter
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


def _ln_delta(a: int, b: int, c: int) -> float:
    """log of the triangle coefficient Delta(abc) (doubled args)."""
    return 0.5 * (
        _lnfac(a + b - c) + _lnfac(a - b + c) + _lnfac(-a + b + c)
        - _lnfac(a + b + c + 2)
    )


@lru_cache(maxsize=200_000)
def _wigner3j_cached(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    if m1 + m2 + m3 != 0:
        return 0.0
    if not _triangle_ok(j1, j2, j3):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if (j1 + m1) % 2 or (j2 + m2) % 2 or (j3 + m3) % 2:
        return 0.0

    ln_pref = _ln_delta(j1, j2, j3) + 0.5 * (
        _lnfac(j1 + m1) + _lnfac(j1 - m1) + _lnfac(j2 + m2)
        + _lnfac(j2 - m2) + _lnfac(j3 + m3) + _lnfac(j3 - m3)
    )

    # Racah sum over t (t is a plain integer; bounds in doubled units / 2)
    t_min = max(0, (j2 - j3 - m1) // 2, (j1 - j3 + m2) // 2)
    t_max = min((j1 + j2 - j3) // 2, (j1 - m1) // 2, (j2 + m2) // 2)
    total = 0.0
    # scale terms by the largest to avoid overflow before the cancellation
    logs = []
    signs = []
    for t in range(t_min, t_max + 1):
        ln_t = (
            _lnfac(2 * t)
            + _lnfac(j1 + j2 - j3 - 2 * t)
            + _lnfac(j1 - m1 - 2 * t)
            + _lnfac(j2 + m2 - 2 * t)
            + _lnfac(j3 - j2 + m1 + 2 * t)
            + _lnfac(j3 - j1 - m2 + 2 * t)
        )
        logs.append(ln_pref - ln_t)
        signs.append(-1.0 if t % 2 else 1.0)
    if not logs:
        return 0.0
    ln_max = max(logs)
    total = sum(s * math.exp(ln - ln_max) for s, ln in zip(signs, logs))
    phase = -1.0 if ((j1 - j2 - m3) // 2) % 2 else 1.0
    return phase * total * math.exp(ln_max)


@lru_cache(maxsize=200_000)
def _wigner6j_cached(j1: int, j2: int, j3: int, j4: int, j5: int, j6: int) -> float:
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    for a, b, c in triads:
        if not _triangle_ok(a, b, c):
            return 0.0

    ln_pref = sum(_ln_delta(a, b, c) for a, b, c in triads)

    s1 = (j1 + j2 + j3) // 2
    s2 = (j1 + j5 + j6) // 2
    s3 = (j4 + j2 + j6) // 2
    s4 = (j4 + j5 + j3) // 2
    q1 = (j1 + j2 + j4 + j5) // 2
    q2 = (j2 + j3 + j5 + j6) // 2
    q3 = (j3 + j1 + j6 + j4) // 2

    t_min = max(s1, s2, s3, s4)
    t_max = min(q1, q2, q3)
    if t_min > t_max:
        return 0.0
    logs = []
    signs = []
    for t in range(t_min, t_max + 1):
        ln_t = (
            _lnfac(2 * (t - s1)) + _lnfac(2 * (t - s2)) + _lnfac(2 * (t - s3))
            + _lnfac(2 * (t - s4)) + _lnfac(2 * (q1 - t)) + _lnfac(2 * (q2 - t))
            + _lnfac(2 * (q3 - t))
        )
        logs.append(ln_pref + _lnfac(2 * t + 2) - ln_t)
        signs.append(-1.0 if t % 2 else 1.0)
    ln_max = max(logs)
    total = sum(s * math.exp(ln - ln_max) for s, ln in zip(signs, logs))
    return total * math.exp(ln_max)


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol; returns 0 on any selection-rule violation."""
    return _wigner3j_cached(_two(j1), _two(j2), _two(j3),
                            _two(m1), _two(m2), _two(m3))


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}; 0 when a triad fails."""
    return _wigner6j_cached(_two(j1), _two(j2), _two(j3),
                            _two(j4), _two(j5), _two(j6))
