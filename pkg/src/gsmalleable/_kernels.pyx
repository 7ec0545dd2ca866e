# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels (int64).  Mirrors ``_kernels_py`` exactly."""

from libc.stdlib cimport malloc, free

ctypedef long long i64


def min_load_assignment(list costs, int m):
    cdef int n = len(costs)
    cdef long nm = 1 << m
    cdef i64* c = <i64*> malloc(n * nm * sizeof(i64))
    cdef long* cur = <long*> malloc(n * sizeof(long))
    cdef long* bestm = <long*> malloc(n * sizeof(long))
    cdef i64* loads = <i64*> malloc(m * sizeof(i64))
    cdef int j, k, i
    cdef long mask, mm
    cdef i64 best = -1, mx, cc
    if c == NULL or cur == NULL or bestm == NULL or loads == NULL:
        free(c); free(cur); free(bestm); free(loads)
        raise MemoryError()
    try:
        for j in range(n):
            row = costs[j]
            for mask in range(nm):
                c[j * nm + mask] = row[mask]
            cur[j] = 0
        for i in range(m):
            loads[i] = 0
        k = 0
        while k >= 0:
            mask = cur[k]
            if mask:
                cc = c[k * nm + mask]
                mm = mask
                i = 0
                while mm:
                    if mm & 1:
                        loads[i] -= cc
                    mm >>= 1
                    i += 1
            mask = cur[k] + 1
            while mask < nm and c[k * nm + mask] < 0:
                mask += 1
            if mask >= nm:
                cur[k] = 0
                k -= 1
                continue
            cur[k] = mask
            cc = c[k * nm + mask]
            mm = mask
            i = 0
            while mm:
                if mm & 1:
                    loads[i] += cc
                mm >>= 1
                i += 1
            if k == n - 1:
                mx = loads[0]
                for i in range(1, m):
                    if loads[i] > mx:
                        mx = loads[i]
                if best < 0 or mx < best:
                    best = mx
                    for j in range(n):
                        bestm[j] = cur[j]
            else:
                k += 1
                cur[k] = 0
        if best < 0:
            return None
        return best, tuple(bestm[j] for j in range(n))
    finally:
        free(c); free(cur); free(bestm); free(loads)


def exchange_violation(list values, int n):
    cdef long N = 1 << n
    cdef i64* v = <i64*> malloc(N * sizeof(i64))
    cdef long S, T, d, e, bi, b2
    cdef int i, i2
    cdef i64 lhs
    cdef bint ok
    if v == NULL:
        raise MemoryError()
    try:
        for S in range(N):
            v[S] = values[S]
        for S in range(N):
            for T in range(N):
                d = S & ~T
                if not d:
                    continue
                lhs = v[S] + v[T]
                e = T & ~S
                for i in range(n):
                    if not (d >> i) & 1:
                        continue
                    bi = 1 << i
                    if lhs <= v[S ^ bi] + v[T | bi]:
                        continue
                    ok = False
                    for i2 in range(n):
                        if (e >> i2) & 1:
                            b2 = 1 << i2
                            if lhs <= v[(S ^ bi) | b2] + v[(T ^ b2) | bi]:
                                ok = True
                                break
                    if not ok:
                        return S, T, i
        return None
    finally:
        free(v)
