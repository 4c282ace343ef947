# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular elimination kernels.

Same contract as :mod:`gctop.linalg._pykernels`; primes must be below 2**31
so that every product of two residues fits in a signed 64-bit integer.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc


cdef inline int64_t _inverse(int64_t a, int64_t p) nogil:
    cdef int64_t t = 0, new_t = 1, r = p, new_r = a, q, tmp
    while new_r != 0:
        q = r // new_r
        tmp = t - q * new_t
        t = new_t
        new_t = tmp
        tmp = r - q * new_r
        r = new_r
        new_r = tmp
    if t < 0:
        t += p
    return t


cdef Py_ssize_t _eliminate(int64_t* a, Py_ssize_t m, Py_ssize_t n, int64_t p) nogil:
    cdef Py_ssize_t rank = 0, c, i, j, piv
    cdef int64_t inv, f, x, tmp
    for c in range(n):
        if rank == m:
            break
        piv = -1
        for i in range(rank, m):
            if a[i * n + c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(c, n):
                tmp = a[piv * n + j]
                a[piv * n + j] = a[rank * n + j]
                a[rank * n + j] = tmp
        inv = _inverse(a[rank * n + c], p)
        for j in range(c, n):
            a[rank * n + j] = (a[rank * n + j] * inv) % p
        for i in range(rank + 1, m):
            f = a[i * n + c]
            if f == 0:
                continue
            for j in range(c, n):
                x = (a[i * n + j] - f * a[rank * n + j]) % p
                if x < 0:
                    x += p
                a[i * n + j] = x
        rank += 1
    return rank


def dense_rank_mod_p(rows, Py_ssize_t ncols, int64_t p):
    """Rank over GF(p) of a dense matrix given as a list of integer rows."""
    cdef Py_ssize_t m = len(rows), i, j, rank
    if p < 2 or p >= 2147483648:
        raise ValueError("prime must satisfy 2 <= p < 2**31")
    if m == 0 or ncols == 0:
        return 0
    cdef int64_t* a = <int64_t*> malloc(m * ncols * sizeof(int64_t))
    if a == NULL:
        raise MemoryError()
    try:
        for i in range(m):
            row = rows[i]
            for j in range(ncols):
                a[i * ncols + j] = row[j] % p
        with nogil:
            rank = _eliminate(a, m, ncols, p)
    finally:
        free(a)
    return rank
