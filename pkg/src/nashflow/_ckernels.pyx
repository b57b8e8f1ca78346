# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled exact kernels; a Cython build of ``_kernels_py``.

Big rationals stay Python objects; the gain comes from typed loop
indices, direct list access and skipping Fraction construction in the
inner loops.
"""
from fractions import Fraction
from math import gcd


def earliest_event(list slacks, list rates):
    cdef Py_ssize_t i, m = len(rates)
    cdef object best_n = None, best_d = None, n, d, r, s, lhs, rhs
    cdef list hits = []
    for i in range(m):
        r = rates[i]
        if r >= 0:
            continue
        s = slacks[i]
        n = s.numerator * r.denominator
        d = -r.numerator * s.denominator
        if best_n is None:
            best_n = n
            best_d = d
            hits = [i]
            continue
        lhs = n * best_d
        rhs = best_n * d
        if lhs < rhs:
            best_n = n
            best_d = d
            hits = [i]
        elif lhs == rhs:
            hits.append(i)
    if best_n is None:
        return None, []
    return Fraction(best_n, best_d), hits


def axpy(list values, list slopes, delta):
    cdef Py_ssize_t i, m = len(values)
    cdef list out
    if delta == 0:
        return list(values)
    out = [None] * m
    for i in range(m):
        s = slopes[i]
        out[i] = values[i] + s * delta if s else values[i]
    return out


def solve_exact(matrix, rhs):
    cdef Py_ssize_t m = len(matrix), n, i, j, k, piv
    cdef list rows, row, rk, ri, x
    cdef object den, prev, akk, aik, acc, v
    n = len(matrix[0]) if m else 0
    if n == 0:
        return [] if all(Fraction(b) == 0 for b in rhs) else None
    if m < n:
        return None
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in matrix[i]]
        row.append(Fraction(rhs[i]))
        den = 1
        for v in row:
            den = den * v.denominator // gcd(den, v.denominator)
        rows.append([(v.numerator * (den // v.denominator)) for v in row])

    prev = 1
    for k in range(n):
        piv = k
        while piv < m and rows[piv][k] == 0:
            piv += 1
        if piv == m:
            return None
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
        rk = rows[k]
        akk = rk[k]
        for i in range(k + 1, m):
            ri = rows[i]
            aik = ri[k]
            if aik == 0:
                for j in range(k + 1, n + 1):
                    ri[j] = (ri[j] * akk) // prev
            else:
                for j in range(k + 1, n + 1):
                    ri[j] = (ri[j] * akk - rk[j] * aik) // prev
            ri[k] = 0
        prev = akk
    for i in range(n, m):
        if rows[i][n] != 0:
            return None

    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        ri = rows[i]
        acc = Fraction(ri[n])
        for j in range(i + 1, n):
            if ri[j]:
                acc -= ri[j] * x[j]
        x[i] = acc / ri[i]
    return x
