"""Pure-Python modular elimination kernels (fallback for ``_ckernels``)."""

from __future__ import annotations


def dense_rank_mod_p(rows: list[list[int]], ncols: int, p: int) -> int:
    """Rank over GF(p) of a dense matrix given as a list of integer rows."""
    if p < 2 or p >= 1 << 31:
        raise ValueError("prime must satisfy 2 <= p < 2**31")
    a = [[x % p for x in row[:ncols]] for row in rows]
    m = len(a)
    rank = 0
    for c in range(ncols):
        if rank == m:
            break
        piv = next((i for i in range(rank, m) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        prow = a[rank]
        inv = pow(prow[c], -1, p)
        prow[c:] = [x * inv % p for x in prow[c:]]
        for i in range(rank + 1, m):
            f = a[i][c]
            if f:
                row = a[i]
                row[c:] = [(x - f * y) % p for x, y in zip(row[c:], prow[c:])]
        rank += 1
    return rank
