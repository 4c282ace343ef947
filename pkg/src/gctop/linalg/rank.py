"""Exact ranks of sparse integer matrices.

Ranks are computed modulo two large primes; agreement is accepted, and a
disagreement falls back to fraction-free elimination over the integers.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from gctop.errors import ConfigurationError, IntegrityError
from gctop.linalg import kernels
from gctop.linalg.sparse import SparseIntMatrix

PRIMARY_PRIME = 2147483647  # 2**31 - 1
CHECK_PRIME = 2147483629
DEFAULT_DENSE_THRESHOLD = 200

MODULAR_AGREED = "modular-agreed"
EXACT = "exact"


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class RankConfig:
    primary_prime: int = PRIMARY_PRIME
    check_prime: int = CHECK_PRIME
    exact_fallback: bool = True
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD
    confirm_exact: bool = False

    def __post_init__(self) -> None:
        for p in (self.primary_prime, self.check_prime):
            if not (1 << 20) < p < (1 << 31):
                raise ConfigurationError(f"prime {p} must lie in (2**20, 2**31)")
            if not is_prime(p):
                raise ConfigurationError(f"{p} is not prime")
        if self.primary_prime == self.check_prime:
            raise ConfigurationError("primary and confirmation primes must differ")
        if self.dense_threshold < 0:
            raise ConfigurationError("dense threshold must be non-negative")

    @property
    def primes(self) -> tuple[int, int]:
        return self.primary_prime, self.check_prime


def _dense_rank(rows: list[dict[int, int]], p: int) -> int:
    cols = sorted({c for row in rows for c in row})
    if not cols:
        return 0
    pos = {c: i for i, c in enumerate(cols)}
    dense = []
    for row in rows:
        line = [0] * len(cols)
        for c, v in row.items():
            line[pos[c]] = v
        dense.append(line)
    return kernels.dense_rank_mod_p(dense, len(cols), p)


def rank_mod_p(m: SparseIntMatrix, p: int, dense_threshold: int = DEFAULT_DENSE_THRESHOLD) -> int:
    """Rank over GF(p).

    Sparse elimination picks the active row with fewest nonzeros and, within
    it, the column with fewest active rows (a Markowitz-style rule); once at
    most ``dense_threshold`` rows remain the rest goes to the dense kernel.
    Ties break on the smallest index, so the result is deterministic.
    """
    rows: list[dict[int, int]] = [dict() for _ in range(m.nrows)]
    for r, c, v in m.entries:
        v %= p
        if v:
            rows[r][c] = v
    col_rows: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    active = {r for r, row in enumerate(rows) if row}
    heap = [(len(rows[r]), r) for r in active]
    heapq.heapify(heap)
    rank = 0
    while active:
        if len(active) <= dense_threshold:
            return rank + _dense_rank([rows[r] for r in sorted(active)], p)
        nnz, r = heapq.heappop(heap)
        if r not in active or nnz != len(rows[r]):
            continue
        prow = rows[r]
        c = min(prow, key=lambda k: (len(col_rows[k]), k))
        inv = pow(prow[c], -1, p)
        active.discard(r)
        for k in prow:
            col_rows[k].discard(r)
        for s in sorted(col_rows[c]):
            row = rows[s]
            f = row[c] * inv % p
            for k, v in prow.items():
                x = (row.get(k, 0) - f * v) % p
                if x:
                    if k not in row:
                        col_rows[k].add(s)
                    row[k] = x
                elif k in row:
                    del row[k]
                    col_rows[k].discard(s)
            if row:
                heapq.heappush(heap, (len(row), s))
            else:
                active.discard(s)
        rank += 1
    return rank


def rank_exact(m: SparseIntMatrix) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination."""
    rows = [row for row in m.rows() if row]
    cols = sorted({c for row in rows for c in row})
    pos = {c: i for i, c in enumerate(cols)}
    a = []
    for row in rows:
        line = [0] * len(cols)
        for c, v in row.items():
            line[pos[c]] = v
        a.append(line)
    nr, nc = len(a), len(cols)
    rank = 0
    prev = 1
    for c in range(nc):
        if rank == nr:
            break
        piv = next((i for i in range(rank, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        prow = a[rank]
        pv = prow[c]
        for i in range(rank + 1, nr):
            row = a[i]
            f = row[c]
            # Bareiss step: the division by the previous pivot is exact.
            a[i] = [(pv * x - f * y) // prev for x, y in zip(row, prow)]
        prev = pv
        rank += 1
    return rank


def certified_rank(m: SparseIntMatrix, cfg: RankConfig | None = None) -> tuple[int, str]:
    """Rank with a certainty flag: ``"modular-agreed"`` or ``"exact"``."""
    cfg = cfg or RankConfig()
    r1 = rank_mod_p(m, cfg.primary_prime, cfg.dense_threshold)
    r2 = rank_mod_p(m, cfg.check_prime, cfg.dense_threshold)
    if r1 == r2 and not cfg.confirm_exact:
        return r1, MODULAR_AGREED
    if r1 != r2 and not (cfg.exact_fallback or cfg.confirm_exact):
        raise IntegrityError(
            f"rank mod {cfg.primary_prime} is {r1} but rank mod {cfg.check_prime} is {r2}"
        )
    exact = rank_exact(m)
    if max(r1, r2) > exact:
        raise IntegrityError(f"modular rank {max(r1, r2)} exceeds exact rank {exact}")
    return exact, EXACT
