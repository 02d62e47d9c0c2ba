"""Upper bounds on the number of BTC networks.

All quantities are exact Python integers.  Tuple-count terms are written as
falling products, so a tuple length beyond the available nodes yields 0 and
a negative length contributes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple


@lru_cache(maxsize=None)
def _even_falling(n: int, h: int, k: int) -> int:
    """(2n-2h-2)(2n-2h-4)...(2n-2h-2k); 1 for k=0."""
    out = 1
    for j in range(1, k + 1):
        out *= 2 * n - 2 * h - 2 * j
    return out


@lru_cache(maxsize=None)
def p_aux(n: int, h: int, k: int) -> Tuple[int, int, int]:
    """Tuples of k tree nodes, pairwise neither equal nor siblings, none with
    a hybrid parent or sibling, in a network with n leaves and h hybrids.

    Returns ``(p0, p1, p)``: tuples avoiding the root, tuples containing it,
    and their sum.
    """
    if k < 0:
        return 0, 0, 0
    p0 = _even_falling(n, h, k)
    p1 = k * _even_falling(n, h, k - 1) if k >= 1 else 0
    return p0, p1, p0 + p1


def _p(n: int, h: int, k: int) -> int:
    return p_aux(n, h, k)[2]


def f_h(n: int, h: int, k: int) -> int:
    """Bound on H-pairs with |S2| = k (Condition 3 ignored)."""
    if k < 0:
        return 0
    p = _p(n, h, k)
    avail = 2 * n + h - k - 1  # tree nodes left once the tuple is fixed
    return p * avail + p * (avail * (avail - 1) // 2)


def f_t_terms(n: int, h: int, k: int) -> Tuple[int, int, int, int, int]:
    """The five disjoint T-pair cases (Condition 3 ignored):

    1. tau outside S2;
    2. tau in S2 and a child or sibling of a hybrid;
    3A/3B. tau in S2 with its sibling also in S2, the rest of the tuple
       containing / avoiding the root;
    4. tau in S2, none of the above.
    """
    if k < 0:
        return 0, 0, 0, 0, 0
    p = _p(n, h, k)
    t1 = p * (2 * n + h - k - 1)
    t2 = _p(n, h, k - 1) * k * 3 * h
    if k >= 2:
        p0, p1, _ = p_aux(n, h, k - 2)
        t3a = k * (k - 1) * p1 * (2 * n - 2 * h - 2 * k + 4)
        t3b = k * (k - 1) * p0 * (2 * n - 2 * h - 2 * k + 2)
    else:
        t3a = t3b = 0
    t4 = p * k
    return t1, t2, t3a, t3b, t4


def f_t(n: int, h: int, k: int) -> int:
    return sum(f_t_terms(n, h, k))


@dataclass
class BoundTable:
    """``b[n][h]`` for ``1 <= n <= n_max`` and ``0 <= h <= n-1``; row 0 is
    an empty placeholder so that rows are indexed by n."""

    b: List[List[int]]

    @property
    def n_max(self) -> int:
        return len(self.b) - 1

    def __getitem__(self, nh: Tuple[int, int]) -> int:
        n, h = nh
        row = self.b[n]
        return row[h] if 0 <= h < len(row) else 0

    def total(self, n: int) -> int:
        return sum(self.b[n])


def bound_table(n_max: int) -> BoundTable:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    b: List[List[int]] = [[], [1]]
    for n in range(2, n_max + 1):
        prev = b[n - 1]
        row = []
        for h in range(n):
            s = 0
            for hp in range(min(h, n - 2) + 1):
                s += prev[hp] * f_t(n - 1, hp, h - hp)
                if hp < h:
                    s += prev[hp] * f_h(n - 1, hp, h - hp - 1)
            row.append(s)
        b.append(row)
    return BoundTable(b)


def bound_total(n: int) -> int:
    return bound_table(n).total(n)
