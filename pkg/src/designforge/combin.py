"""Ranking and unranking of k-subsets, scalar and vectorized.

Lexicographic order on sorted index tuples drives seed selection when
partitioning all k-subsets into orbits; colexicographic ranks index the
dense counters used for coverage verification.
"""

from __future__ import annotations

import math

import numpy as np


def lex_rank(subset, n: int) -> int:
    """Rank of a sorted k-subset of 0..n-1 in lexicographic order."""
    k = len(subset)
    rank = 0
    prev = -1
    for i, c in enumerate(subset):
        rank += math.comb(n - prev - 1, k - i) - math.comb(n - c, k - i)
        prev = c
    return rank


def lex_unrank(rank: int, n: int, k: int) -> tuple[int, ...]:
    """Inverse of lex_rank."""
    out = []
    prev = -1
    for i in range(k):
        c = prev + 1
        while True:
            count = math.comb(n - c - 1, k - i - 1)
            if rank < count:
                break
            rank -= count
            c += 1
        out.append(c)
        prev = c
    return tuple(out)


def colex_rank(subset) -> int:
    """Rank of a sorted subset in colexicographic order: sum C(c_i, i+1)."""
    return sum(math.comb(c, i + 1) for i, c in enumerate(subset))


def comb_table(n: int, k: int) -> np.ndarray:
    """Pascal table C[i][j] for 0 <= i <= n, 0 <= j <= k, int64.

    Callers must keep values inside int64; the orbit-partition caps do.
    """
    table = np.zeros((n + 1, k + 1), dtype=np.int64)
    table[:, 0] = 1
    for i in range(1, n + 1):
        hi = min(i, k)
        table[i, 1 : hi + 1] = table[i - 1, 1 : hi + 1] + table[i - 1, 0:hi]
    return table


def lex_rank_rows(cols: np.ndarray, n: int, table: np.ndarray) -> np.ndarray:
    """Lexicographic ranks of many sorted k-subsets at once.

    cols is an (m, k) int array of sorted point indices.
    """
    m, k = cols.shape
    prev = np.empty_like(cols)
    prev[:, 0] = -1
    prev[:, 1:] = cols[:, :-1]
    slots = np.arange(k, 0, -1)
    ranks = table[n - prev - 1, slots] - table[n - cols, slots]
    return ranks.sum(axis=1)


def colex_rank_rows(cols: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Colexicographic ranks of many sorted subsets at once."""
    m, k = cols.shape
    slots = np.arange(1, k + 1)
    return table[cols, slots].sum(axis=1)
