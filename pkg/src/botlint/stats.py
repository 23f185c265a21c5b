"""Two-sample comparison: Mann-Whitney U test and Vargha-Delaney A12.

p-values use the normal approximation with tie-corrected variance and a
continuity correction; there is no exact small-sample distribution.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from botlint.errors import EmptySample


def _check(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) == 0 or len(b) == 0:
        raise EmptySample("both samples must be non-empty")


def midranks(values: Sequence[float]) -> list:
    """1-based ranks with ties given the mean of the ranks they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> tuple:
    """Return ``(U_a, p)`` where ``U_a`` counts pairs won by ``a`` (ties count half)."""
    _check(a, b)
    n1, n2 = len(a), len(b)
    ranks = midranks(list(a) + list(b))
    u = sum(ranks[:n1]) - n1 * (n1 + 1) / 2
    n = n1 + n2
    ties = sum(t**3 - t for t in Counter(list(a) + list(b)).values())
    var = n1 * n2 / 12 * ((n + 1) - ties / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return u, 1.0
    z = max(abs(u - n1 * n2 / 2) - 0.5, 0.0) / math.sqrt(var)
    p = math.erfc(z / math.sqrt(2))
    return u, min(1.0, p)


def vargha_delaney_a12(a: Sequence[float], b: Sequence[float]) -> float:
    """Probability that a value from ``a`` exceeds one from ``b``, ties counted half."""
    _check(a, b)
    ranks = midranks(list(a) + list(b))
    n1, n2 = len(a), len(b)
    return (sum(ranks[:n1]) - n1 * (n1 + 1) / 2) / (n1 * n2)
